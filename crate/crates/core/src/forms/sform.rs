use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use super::index::{binomial, sort_with_sign, Basis};
use crate::error::{Error, Result};
use crate::expr::{ExprAst, ExprFn};
use crate::smooth::jet::{constants, values};
use crate::smooth::Jet;

pub(crate) type CoeffFn = dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync;

/// A scalar differential `p`-form on an `n`-dimensional chart.
///
/// Coefficients `ω_J` are indexed by strictly increasing multi-indices `J` in
/// lexicographic order (see [`Basis`]) and are produced lazily at jet points,
/// so any form can be differentiated further.
#[derive(Clone)]
pub struct SForm {
    dim: usize,
    degree: usize,
    coeffs: Arc<CoeffFn>,
}

pub(crate) fn check_point(dim: usize, x: &[Jet]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
            context: "form evaluation point",
        });
    }
    Ok(())
}

/// Sums signed expression terms into one component AST.
pub(crate) fn sum_terms(terms: Vec<(f64, ExprAst)>) -> ExprAst {
    let mut acc: Option<ExprAst> = None;
    for (sign, t) in terms {
        acc = Some(match (acc, sign < 0.0) {
            (None, false) => t,
            (None, true) => ExprAst::neg(t),
            (Some(a), false) => ExprAst::bin(crate::expr::BinOp::Add, a, t),
            (Some(a), true) => ExprAst::bin(crate::expr::BinOp::Sub, a, t),
        });
    }
    acc.unwrap_or(ExprAst::Num(0.0))
}

/// Parses one coefficient expression and returns its single component.
pub(crate) fn parse_component(src: &str, dim: usize) -> Result<ExprAst> {
    let f = ExprFn::parse_exact(src, dim, 1)?;
    Ok(f.components()[0].clone())
}

impl SForm {
    /// Wraps a raw coefficient function. `f` must return `C(dim, degree)`
    /// components.
    pub fn from_fn(
        dim: usize,
        degree: usize,
        f: impl Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    ) -> Self {
        SForm {
            dim,
            degree,
            coeffs: Arc::new(f),
        }
    }

    /// Coefficients given as the components of an [`ExprFn`], one per
    /// increasing multi-index.
    pub fn from_exprs(dim: usize, degree: usize, f: ExprFn) -> Result<Self> {
        if f.arity_in() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.arity_in(),
                context: "form coefficient arity",
            });
        }
        let len = binomial(dim, degree);
        if f.arity_out() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: f.arity_out(),
                context: "form coefficient count",
            });
        }
        Ok(Self::from_fn(dim, degree, move |x| Ok(f.eval(x)?)))
    }

    /// Builds `Σ coeff · dx^{j₁}∧…∧dx^{j_p}` from `(indices, expression)` terms.
    /// Indices are 0-based and need not be sorted; repeated indices vanish.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(&[usize], &str)]) -> Result<Self> {
        let basis = Basis::get(dim, degree);
        let mut slots: Vec<Vec<(f64, ExprAst)>> = vec![Vec::new(); basis.len()];
        for (idx, src) in terms {
            check_indices(dim, degree, idx)?;
            let ast = parse_component(src, dim)?;
            if let Some((r, sign)) = basis.rank_signed(idx) {
                slots[r].push((sign, ast));
            }
        }
        let comps = slots.into_iter().map(sum_terms).collect();
        Self::from_exprs(dim, degree, ExprFn::from_components(dim, comps)?)
    }

    pub fn zero(dim: usize, degree: usize) -> Self {
        let len = binomial(dim, degree);
        Self::from_fn(dim, degree, move |_| Ok(vec![Jet::ZERO; len]))
    }

    /// The function `f` as a 0-form.
    pub fn function(f: ExprFn) -> Result<Self> {
        let dim = f.arity_in();
        Self::from_exprs(dim, 0, f)
    }

    pub fn parse_function(src: &str, dim: usize) -> Result<Self> {
        Self::function(ExprFn::parse_exact(src, dim, 1)?)
    }

    /// The coordinate function `x^i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        Self::from_fn(dim, 0, move |x| Ok(vec![x[i]]))
    }

    /// The basis form `dx^{idx}` for increasing `idx`.
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        let basis = Basis::get(dim, idx.len());
        let r = basis.rank(idx);
        let len = basis.len();
        Self::from_fn(dim, idx.len(), move |_| {
            let mut out = vec![Jet::ZERO; len];
            out[r] = Jet::constant(1.0);
            Ok(out)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of stored coefficients, `C(dim, degree)`.
    pub fn len(&self) -> usize {
        binomial(self.dim, self.degree)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coeffs(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        check_point(self.dim, x)?;
        (self.coeffs)(x)
    }

    pub fn coeffs_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        Ok(values(&self.coeffs(&constants(p))?))
    }

    /// `ω(X₁, …, X_p)` at a jet point.
    pub fn eval_on(&self, x: &[Jet], vectors: &[Vec<Jet>]) -> Result<Jet> {
        if vectors.len() != self.degree {
            return Err(Error::DegreeMismatch(format!(
                "{}-form evaluated on {} vectors",
                self.degree,
                vectors.len()
            )));
        }
        let c = self.coeffs(x)?;
        Ok(contract(&c, self.dim, vectors))
    }

    pub fn eval_at(&self, p: &[f64], vectors: &[Vec<f64>]) -> Result<f64> {
        let vs: Vec<Vec<Jet>> = vectors.iter().map(|v| constants(v)).collect();
        Ok(self.eval_on(&constants(p), &vs)?.value())
    }

    fn check_same(&self, other: &SForm, op: &str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
                context: "forms on different charts",
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "{op} of a {}-form and a {}-form",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    /// `Σ cᵢ ωᵢ` over forms of a common degree.
    pub fn linear_combination(terms: &[(f64, SForm)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::DegreeMismatch("empty linear combination".into()))?;
        for (_, t) in terms {
            first.check_same(t, "sum")?;
        }
        let (dim, degree, len) = (first.dim, first.degree, first.len());
        let terms = terms.to_vec();
        Ok(Self::from_fn(dim, degree, move |x| {
            let mut out = vec![Jet::ZERO; len];
            for (c, t) in &terms {
                for (o, v) in out.iter_mut().zip(t.coeffs(x)?) {
                    *o += v.scale(*c);
                }
            }
            Ok(out)
        }))
    }

    pub fn scale(&self, c: f64) -> Self {
        let inner = self.clone();
        Self::from_fn(self.dim, self.degree, move |x| {
            Ok(inner.coeffs(x)?.into_iter().map(|v| v.scale(c)).collect())
        })
    }

    /// `f · ω` for a 0-form `f`.
    pub fn times(&self, f: &SForm) -> Result<Self> {
        if f.degree != 0 {
            return Err(Error::DegreeMismatch("multiplier must be a 0-form".into()));
        }
        self.wedge(f)
    }

    /// `α ∧ β`.
    pub fn wedge(&self, other: &SForm) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
                context: "wedge of forms on different charts",
            });
        }
        let (n, p, q) = (self.dim, self.degree, other.degree);
        let out_basis = Basis::get(n, p + q);
        let (bp, bq) = (Basis::get(n, p), Basis::get(n, q));
        // For each output index: (sign, rank of A, rank of B) over all splits.
        let plan: Vec<Vec<(f64, usize, usize)>> = out_basis
            .subsets()
            .iter()
            .map(|idx| {
                bp.subsets()
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.iter().all(|i| idx.contains(i)))
                    .map(|(ra, a)| {
                        let b: Vec<usize> = idx.iter().copied().filter(|i| !a.contains(i)).collect();
                        let joined: Vec<usize> = a.iter().chain(&b).copied().collect();
                        let sign = sort_with_sign(&joined).unwrap().1;
                        (sign, ra, bq.rank(&b))
                    })
                    .collect()
            })
            .collect();
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::from_fn(n, p + q, move |x| {
            let (ca, cb) = (a.coeffs(x)?, b.coeffs(x)?);
            Ok(plan
                .iter()
                .map(|terms| {
                    terms
                        .iter()
                        .map(|&(s, ra, rb)| (ca[ra] * cb[rb]).scale(s))
                        .sum()
                })
                .collect())
        }))
    }
}

pub(crate) fn check_indices(dim: usize, degree: usize, idx: &[usize]) -> Result<()> {
    if idx.len() != degree {
        return Err(Error::DegreeMismatch(format!(
            "term with {} indices in a {degree}-form",
            idx.len()
        )));
    }
    if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad + 1,
            context: "form index out of range",
        });
    }
    Ok(())
}

/// `Σ_J c_J det(V[J, ·])`: contracts antisymmetric coefficients with vectors.
pub(crate) fn contract(c: &[Jet], dim: usize, vectors: &[Vec<Jet>]) -> Jet {
    let k = vectors.len();
    let basis = Basis::get(dim, k);
    let mut acc = Jet::ZERO;
    let mut m = vec![Jet::ZERO; k * k];
    for (r, idx) in basis.subsets().iter().enumerate() {
        if c[r].norm_inf() == 0.0 {
            continue;
        }
        for (row, &j) in idx.iter().enumerate() {
            for (col, v) in vectors.iter().enumerate() {
                m[row * k + col] = v[j];
            }
        }
        acc += c[r] * super::index::small_det(&m, k);
    }
    acc
}

impl fmt::Debug for SForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SForm(dim {}, degree {})", self.dim, self.degree)
    }
}

impl Add for SForm {
    type Output = SForm;
    /// Panics on mismatched dimension or degree.
    fn add(self, rhs: SForm) -> SForm {
        SForm::linear_combination(&[(1.0, self), (1.0, rhs)]).expect("mismatched forms")
    }
}

impl Sub for SForm {
    type Output = SForm;
    fn sub(self, rhs: SForm) -> SForm {
        SForm::linear_combination(&[(1.0, self), (-1.0, rhs)]).expect("mismatched forms")
    }
}

impl Neg for SForm {
    type Output = SForm;
    fn neg(self) -> SForm {
        self.scale(-1.0)
    }
}
