//! Seeded random sampling of points, vectors, expressions and forms.
//!
//! All randomness flows from [`Sampler`], a thin wrapper over xoshiro256++
//! seeded through SplitMix64 (`SeedableRng::seed_from_u64`). Independent
//! streams are split off by name with [`Sampler::derive`], which mixes the
//! 64-bit FNV-1a hash of the name into the seed.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::expr::{BinOp, ExprAst, ExprFn, Func};
use crate::forms::index::binomial;
use crate::forms::{SForm, VForm};
use crate::smooth::Chart;

const MAX_REJECTIONS: usize = 10_000;

pub fn fnv1a(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    rng: Xoshiro256PlusPlus,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            seed,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// An independent stream for `name`, a function of the seed and the name
    /// only.
    pub fn derive(&self, name: &str) -> Sampler {
        Sampler::new(self.seed ^ fnv1a(name))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// A point of the chart's sampling box that satisfies its domain
    /// predicates, by rejection.
    pub fn point(&mut self, chart: &Chart) -> Result<Vec<f64>> {
        for _ in 0..MAX_REJECTIONS {
            let p: Vec<f64> = chart
                .bounds()
                .iter()
                .map(|&(lo, hi)| self.uniform(lo, hi))
                .collect();
            if chart.contains(&p) {
                return Ok(p);
            }
        }
        Err(Error::Sampler(format!(
            "no admissible point of chart `{}` after {MAX_REJECTIONS} draws",
            chart.name()
        )))
    }

    /// A vector with entries uniform in `[-1, 1)`.
    pub fn vector(&mut self, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| self.uniform(-1.0, 1.0)).collect()
    }

    pub fn vectors(&mut self, count: usize, dim: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.vector(dim)).collect()
    }

    fn coefficient(&mut self) -> f64 {
        // Round to a few digits so printed expressions stay readable.
        (self.uniform(-1.0, 1.0) * 100.0).round() / 100.0
    }

    /// A random smooth expression in `arity` variables that is defined on all
    /// of `R^arity`: sums and products of polynomial and bounded
    /// transcendental pieces, of tree depth at most `depth`.
    pub fn smooth_expr(&mut self, arity: usize, depth: usize) -> ExprAst {
        if depth <= 1 || arity == 0 || self.index(4) == 0 {
            return if arity > 0 && self.index(3) != 0 {
                ExprAst::Var(self.index(arity))
            } else {
                ExprAst::Num(self.coefficient())
            };
        }
        match self.index(7) {
            0 => ExprAst::bin(
                BinOp::Add,
                self.smooth_expr(arity, depth - 1),
                self.smooth_expr(arity, depth - 1),
            ),
            1 => ExprAst::bin(
                BinOp::Sub,
                self.smooth_expr(arity, depth - 1),
                self.smooth_expr(arity, depth - 1),
            ),
            2 => ExprAst::bin(
                BinOp::Mul,
                self.smooth_expr(arity, depth - 1),
                self.smooth_expr(arity, depth - 1),
            ),
            3 => {
                // a / (1 + b^2)
                let den = ExprAst::bin(
                    BinOp::Add,
                    ExprAst::Num(1.0),
                    ExprAst::bin(
                        BinOp::Pow,
                        self.smooth_expr(arity, depth.saturating_sub(3)),
                        ExprAst::Num(2.0),
                    ),
                );
                ExprAst::bin(BinOp::Div, self.smooth_expr(arity, depth - 1), den)
            }
            4 => {
                let f = [Func::Sin, Func::Cos, Func::Atan][self.index(3)];
                ExprAst::call(f, self.smooth_expr(arity, depth - 1))
            }
            5 => {
                // exp(sin(a)) stays bounded.
                ExprAst::call(Func::Exp, ExprAst::call(Func::Sin, self.smooth_expr(arity, depth - 2)))
            }
            _ => ExprAst::neg(self.smooth_expr(arity, depth - 1)),
        }
    }

    /// A low-degree polynomial-trigonometric coefficient used for random forms:
    /// `c₀ + c₁ x_a + c₂ x_b x_c + c₃ sin(x_d)`.
    pub fn coefficient_expr(&mut self, dim: usize) -> ExprAst {
        let mut terms = vec![ExprAst::Num(self.coefficient())];
        if dim > 0 {
            let (a, b, c, d) = (self.index(dim), self.index(dim), self.index(dim), self.index(dim));
            terms.push(ExprAst::bin(
                BinOp::Mul,
                ExprAst::Num(self.coefficient()),
                ExprAst::Var(a),
            ));
            terms.push(ExprAst::bin(
                BinOp::Mul,
                ExprAst::Num(self.coefficient()),
                ExprAst::bin(BinOp::Mul, ExprAst::Var(b), ExprAst::Var(c)),
            ));
            terms.push(ExprAst::bin(
                BinOp::Mul,
                ExprAst::Num(self.coefficient()),
                ExprAst::call(Func::Sin, ExprAst::Var(d)),
            ));
        }
        terms
            .into_iter()
            .reduce(|a, b| ExprAst::bin(BinOp::Add, a, b))
            .unwrap()
    }

    fn coefficient_fn(&mut self, dim: usize, count: usize) -> ExprFn {
        let comps = (0..count).map(|_| self.coefficient_expr(dim)).collect();
        ExprFn::from_components(dim, comps).expect("generated coefficients use valid variables")
    }

    pub fn random_sform(&mut self, dim: usize, degree: usize) -> SForm {
        let f = self.coefficient_fn(dim, binomial(dim, degree));
        SForm::from_exprs(dim, degree, f).expect("sizes match by construction")
    }

    pub fn random_vform(&mut self, dim: usize, degree: usize) -> VForm {
        let f = self.coefficient_fn(dim, dim * binomial(dim, degree));
        VForm::from_exprs(dim, degree, f).expect("sizes match by construction")
    }

    /// A unit upper-triangular matrix field `S(x)` with random smooth entries
    /// above the diagonal, row-major.
    pub fn unit_upper_triangular(&mut self, dim: usize) -> ExprFn {
        let mut comps = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                comps.push(match i.cmp(&j) {
                    std::cmp::Ordering::Equal => ExprAst::Num(1.0),
                    std::cmp::Ordering::Greater => ExprAst::Num(0.0),
                    std::cmp::Ordering::Less => self.coefficient_expr(dim),
                });
            }
        }
        ExprFn::from_components(dim, comps).expect("valid variables")
    }
}
