//! Trivial principal `R^m`-bundles `P = M × R^m` with principal connections,
//! their gauge groupoids in the chart `(x, y, k)`, and the correspondence
//! between connections and multiplicative projections.
//!
//! With `θ = dc + A` the connection form, `K = (dk + A(x)dx − A(y)dy) ⊗ ∂k`
//! on the gauge groupoid, `F = dA`, and `R'_K = s*F − t*F`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::index::Basis;
use crate::forms::related::report_from;
use crate::forms::{
    check_f_related, check_projection, curvature, fn_bracket, max_over_samples, pullback,
    DerivationReport, SForm, VForm,
};
use crate::groupoid::{check_multiplicative, zoo, Groupoid};
use crate::sampling::Sampler;
use crate::smooth::jet::{constants, values};
use crate::smooth::linalg::max_abs;
use crate::smooth::{Chart, Jet, SmoothMap};

/// Tolerance for validating connection and projection hypotheses.
pub const HYPOTHESIS_TOL: f64 = 1e-9;

/// `P = M × R^m` with the right action `ψ_g(x, c) = (x, c + g)`.
#[derive(Clone, Debug)]
pub struct TrivialBundle {
    base: Chart,
    group_dim: usize,
}

impl TrivialBundle {
    pub fn new(base: Chart, group_dim: usize) -> Self {
        TrivialBundle { base, group_dim }
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn group_dim(&self) -> usize {
        self.group_dim
    }

    /// The chart `(x, c)` of `P`.
    pub fn total(&self) -> Chart {
        Chart::product(&self.base, &Chart::new(format!("R{}", self.group_dim), self.group_dim))
    }

    /// `ψ_g` as a map of `P`.
    pub fn action(&self, g: &[f64]) -> SmoothMap {
        let (n, m) = (self.base_dim(), self.group_dim);
        let src: Vec<String> = (1..=n)
            .map(|i| format!("x{i}"))
            .chain((0..m).map(|a| format!("x{} + {}", n + a + 1, g[a])))
            .collect();
        SmoothMap::parse(&src.join(";"), n + m, n + m).expect("generated action parses")
    }

    /// Worst residual of `ψ_0 = id` and `ψ_g ∘ ψ_h = ψ_{hg}`.
    pub fn check_action(&self, sampler: &mut Sampler, samples: usize) -> Result<f64> {
        let m = self.group_dim;
        let total = self.total();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let q = sampler.point(&total)?;
            let (g, h) = (sampler.vector(m), sampler.vector(m));
            let hg: Vec<f64> = h.iter().zip(&g).map(|(a, b)| a + b).collect();
            let id = self.action(&vec![0.0; m]).apply(&q)?;
            let gh = self.action(&g).apply(&self.action(&h).apply(&q)?)?;
            let direct = self.action(&hg).apply(&q)?;
            worst = worst
                .max(crate::smooth::linalg::max_abs_diff(&id, &q))
                .max(crate::smooth::linalg::max_abs_diff(&gh, &direct));
        }
        Ok(worst)
    }

    /// The gauge groupoid `(P × P)/R^m` in the chart `(x, y, k)`, where the
    /// class of `((x, c), (y, d))` is `(x, y, c − d)`.
    pub fn gauge_groupoid(&self) -> Groupoid {
        zoo::gauge(&self.base, self.group_dim)
    }

    /// The quotient map `P × P → G(P)`.
    pub fn quotient(&self) -> SmoothMap {
        let (n, m) = (self.base_dim(), self.group_dim);
        let w = n + m;
        let mut src: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        src.extend((1..=n).map(|i| format!("x{}", w + i)));
        src.extend((1..=m).map(|a| format!("x{} - x{}", n + a, w + n + a)));
        SmoothMap::parse(&src.join(";"), 2 * w, 2 * n + m).expect("generated quotient parses")
    }
}

/// A principal connection `θ = dc + A` with `A` an `R^m`-valued 1-form on `M`.
#[derive(Clone, Debug)]
pub struct Connection {
    bundle: TrivialBundle,
    a: Vec<SForm>,
}

impl Connection {
    pub fn new(bundle: &TrivialBundle, a: Vec<SForm>) -> Result<Self> {
        if a.len() != bundle.group_dim() {
            return Err(Error::DimensionMismatch {
                expected: bundle.group_dim(),
                found: a.len(),
                context: "connection components",
            });
        }
        for f in &a {
            if f.degree() != 1 || f.dim() != bundle.base_dim() {
                return Err(Error::DegreeMismatch(format!(
                    "connection components must be 1-forms on R^{}",
                    bundle.base_dim()
                )));
            }
        }
        Ok(Connection {
            bundle: bundle.clone(),
            a,
        })
    }

    /// Components from `;`-separated coefficient expressions, one string per
    /// Lie algebra direction.
    pub fn parse(bundle: &TrivialBundle, components: &[&str]) -> Result<Self> {
        let n = bundle.base_dim();
        let a = components
            .iter()
            .map(|src| SForm::from_exprs(n, 1, crate::expr::ExprFn::parse(src, n)?))
            .collect::<Result<Vec<_>>>()?;
        Connection::new(bundle, a)
    }

    /// The flat connection `A = 0`.
    pub fn flat(bundle: &TrivialBundle) -> Self {
        let a = vec![SForm::zero(bundle.base_dim(), 1); bundle.group_dim()];
        Connection {
            bundle: bundle.clone(),
            a,
        }
    }

    pub fn bundle(&self) -> &TrivialBundle {
        &self.bundle
    }

    pub fn potential(&self) -> &[SForm] {
        &self.a
    }

    /// `A` at `x` as an `m × n` row-major matrix.
    fn a_matrix(&self, x: &[Jet]) -> Result<Vec<Jet>> {
        let mut out = Vec::with_capacity(self.a.len() * x.len());
        for f in &self.a {
            out.extend(f.coeffs(x)?);
        }
        Ok(out)
    }

    /// `Θ = (dc + A) ⊗ ∂c` on `P`.
    pub fn theta(&self) -> VForm {
        let (n, m) = (self.bundle.base_dim(), self.bundle.group_dim());
        let w = n + m;
        let me = self.clone();
        VForm::from_fn(w, 1, move |q| {
            let a = me.a_matrix(&q[..n])?;
            let mut out = vec![Jet::ZERO; w * w];
            for r in 0..m {
                for j in 0..n {
                    out[(n + r) * w + j] = a[r * n + j];
                }
                out[(n + r) * w + n + r] = Jet::constant(1.0);
            }
            Ok(out)
        })
    }

    /// Worst residual of `Θ² = Θ`, `Im Θ = V` and `ψ_g`-invariance of `Θ`.
    pub fn check(&self, sampler: &mut Sampler, samples: usize) -> Result<f64> {
        let theta = self.theta();
        let total = self.bundle.total();
        let n = self.bundle.base_dim();
        let points = (0..samples).map(|_| sampler.point(&total)).collect::<Result<Vec<_>>>()?;
        let mut worst = check_projection(&theta, &points)?;
        for p in &points {
            let c = theta.coeffs_at(p)?;
            worst = worst.max(max_abs(&c[..n * total.dim()]));
        }
        let g = sampler.vector(self.bundle.group_dim());
        let eq = check_f_related(&self.bundle.action(&g), &total, &theta, &theta, sampler, samples)?;
        Ok(worst.max(eq.max_residual))
    }

    /// The horizontal lift of the constant field `e_i` on `M`.
    fn horizontal(&self, i: usize) -> VForm {
        let (n, m) = (self.bundle.base_dim(), self.bundle.group_dim());
        let me = self.clone();
        VForm::from_fn(n + m, 0, move |q| {
            let a = me.a_matrix(&q[..n])?;
            let mut out = vec![Jet::ZERO; n + m];
            out[i] = Jet::constant(1.0);
            for r in 0..m {
                out[n + r] = -a[r * n + i];
            }
            Ok(out)
        })
    }
}

/// `K((X, Y)‾) = (Θ X, Θ Y)‾`: the multiplicative projection on the gauge
/// groupoid with image `Δ_V` and kernel `Δ_H`.
pub fn connection_to_k(conn: &Connection) -> VForm {
    let (n, m) = (conn.bundle.base_dim(), conn.bundle.group_dim());
    let w = 2 * n + m;
    let conn = conn.clone();
    VForm::from_fn(w, 1, move |g| {
        let ax = conn.a_matrix(&g[..n])?;
        let ay = conn.a_matrix(&g[n..2 * n])?;
        let mut out = vec![Jet::ZERO; w * w];
        for r in 0..m {
            let row = (2 * n + r) * w;
            for j in 0..n {
                out[row + j] = ax[r * n + j];
                out[row + n + j] = -ay[r * n + j];
            }
            out[row + 2 * n + r] = Jet::constant(1.0);
        }
        Ok(out)
    })
}

/// Recovers the connection from a multiplicative projection `K` with image
/// `Δ_V` through `K((X, 0)‾) = (Θ X, 0)‾` at the units.
pub fn k_to_connection(bundle: &TrivialBundle, k: &VForm) -> Result<Connection> {
    let (n, m) = (bundle.base_dim(), bundle.group_dim());
    let w = 2 * n + m;
    let g = bundle.gauge_groupoid();
    if k.degree() != 1 || k.dim() != w {
        return Err(Error::Hypothesis(format!("expected a 1-form on R^{w}")));
    }
    let mut sampler = Sampler::new(0x6a75).derive("k_to_connection");
    let points = (0..20).map(|_| sampler.point(g.arrows())).collect::<Result<Vec<_>>>()?;
    check_projection(k, &points)?;
    for p in &points {
        let c = k.coeffs_at(p)?;
        let leak = max_abs(&c[..2 * n * w]);
        if leak > HYPOTHESIS_TOL {
            return Err(Error::Hypothesis(format!("image of K is not vertical (residual {leak:.3e})")));
        }
    }
    let r = check_multiplicative(&g, k, &VForm::zero(n, 1), &mut sampler, 20)?;
    if !r.pass {
        return Err(Error::Hypothesis(format!(
            "K is not multiplicative (residual {:.3e})",
            r.max_residual()
        )));
    }
    let a = (0..m)
        .map(|r| {
            let k = k.clone();
            SForm::from_fn(n, 1, move |x| {
                let mut unit: Vec<Jet> = x.iter().chain(x).copied().collect();
                unit.extend(std::iter::repeat(Jet::ZERO).take(m));
                let c = k.coeffs(&unit)?;
                Ok((0..n).map(|j| c[(2 * n + r) * w + j]).collect())
            })
        })
        .collect();
    Connection::new(bundle, a)
}

/// `F_θ(X, Y) = −θ([X^H, Y^H])` on coordinate fields, one 2-form per Lie
/// algebra direction.
pub fn curvature_f(conn: &Connection) -> Result<Vec<SForm>> {
    let (n, m) = (conn.bundle.base_dim(), conn.bundle.group_dim());
    let basis = Basis::get(n, 2);
    let brackets = basis
        .subsets()
        .iter()
        .map(|ij| fn_bracket(&conn.horizontal(ij[0]), &conn.horizontal(ij[1])))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..m)
        .map(|r| {
            let (brackets, conn) = (brackets.clone(), conn.clone());
            SForm::from_fn(n, 2, move |x| {
                let mut q = x.to_vec();
                q.extend(std::iter::repeat(Jet::ZERO).take(m));
                let a = conn.a_matrix(x)?;
                brackets
                    .iter()
                    .map(|b| {
                        let v = b.coeffs(&q)?;
                        let mut theta = v[n + r];
                        for j in 0..n {
                            theta += a[r * n + j] * v[j];
                        }
                        Ok(-theta)
                    })
                    .collect()
            })
        })
        .collect())
}

/// `φ: Δ_V → t*Ad(P)`. For the trivial bundle with abelian group a vector
/// of `Δ_V` at `(x, y, k)` is `(0, 0, w)` and `φ` sends it to `(x, w)`.
pub fn phi(bundle: &TrivialBundle, arrow: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = bundle.base_dim();
    let leak = max_abs(&v[..2 * n]);
    if leak > HYPOTHESIS_TOL {
        return Err(Error::Hypothesis(format!("vector not in the vertical distribution (residual {leak:.3e})")));
    }
    Ok((arrow[..n].to_vec(), v[2 * n..].to_vec()))
}

/// `φ⁻¹`: the vertical vector at `arrow` with Lie algebra value `w`.
pub fn phi_inverse(bundle: &TrivialBundle, w: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; 2 * bundle.base_dim()];
    v.extend_from_slice(w);
    v
}

/// The semidirect product `G(P) ⋉ Ad(P)` receiving `φ`; the action is trivial.
pub fn adjoint_semidirect(bundle: &TrivialBundle) -> Result<Groupoid> {
    let (n, m) = (bundle.base_dim(), bundle.group_dim());
    let g = bundle.gauge_groupoid();
    let act = SmoothMap::block(2 * n + m + m, 2 * n + m, m);
    zoo::semidirect(&g, act, m)
}

/// An `Ad(P)`-valued form on the gauge groupoid, one scalar form per Lie
/// algebra direction.
#[derive(Clone, Debug)]
pub struct AdForm {
    pub components: Vec<SForm>,
}

/// `R'_K = φ ∘ R_K`.
pub fn curvature_ad(conn: &Connection) -> Result<AdForm> {
    let (n, m) = (conn.bundle.base_dim(), conn.bundle.group_dim());
    let r = curvature(&connection_to_k(conn))?;
    Ok(AdForm {
        components: (0..m).map(|a| r.component(2 * n + a)).collect(),
    })
}

/// Residuals of `R'_K = g·s*F − t*F` and of the vertical part of `R_K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub identity: DerivationReport,
    pub vertical: f64,
}

/// Evaluates `φ ∘ R_K` and `s*F − t*F` independently at random arrows and
/// tangent pairs.
pub fn check_curvature_identity(conn: &Connection, sampler: &mut Sampler, samples: usize) -> Result<CurvatureReport> {
    let (n, m) = (conn.bundle.base_dim(), conn.bundle.group_dim());
    let g = conn.bundle.gauge_groupoid();
    let r = curvature(&connection_to_k(conn))?;
    let f = curvature_f(conn)?;
    let draws = (0..samples)
        .map(|_| Ok((sampler.point(g.arrows())?, sampler.vectors(2, 2 * n + m))))
        .collect::<Result<Vec<_>>>()?;
    let mut vertical: f64 = 0.0;
    for (p, vs) in &draws {
        vertical = vertical.max(max_abs(&r.eval_at(p, vs)?[..2 * n]));
    }
    let residual = |(p, vs): &(Vec<f64>, Vec<Vec<f64>>)| -> Result<f64> {
        let rv = r.eval_at(p, vs)?;
        // φ reads the fiber part; the horizontal part is reported as `vertical`.
        let lhs = &rv[2 * n..];
        let (x, y) = (&p[..n], &p[n..2 * n]);
        let tv: Vec<Vec<f64>> = vs.iter().map(|v| v[..n].to_vec()).collect();
        let sv: Vec<Vec<f64>> = vs.iter().map(|v| v[n..2 * n].to_vec()).collect();
        let rhs = f
            .iter()
            .map(|fa| Ok(fa.eval_at(y, &sv)? - fa.eval_at(x, &tv)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(crate::smooth::linalg::max_abs_diff(lhs, &rhs))
    };
    let best = max_over_samples(&draws, residual)?;
    Ok(CurvatureReport {
        identity: report_from(draws, best),
        vertical,
    })
}

/// Residual of `m*ω = pr₁*ω + g·pr₂*ω` for an `Ad(P)`-valued form, compared
/// coefficientwise on the chart of composable pairs.
pub fn check_mult_rep(g: &Groupoid, form: &AdForm, sampler: &mut Sampler, samples: usize) -> Result<DerivationReport> {
    let comp = g.comp();
    let sides = form
        .components
        .iter()
        .map(|w| {
            Ok((
                pullback(g.mult(), w)?,
                pullback(&comp.prs[0], w)?,
                pullback(&comp.prs[1], w)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let draws = (0..samples)
        .map(|_| Ok((sampler.point(&comp.chart)?, Vec::new())))
        .collect::<Result<Vec<_>>>()?;
    let residual = |(c, _): &(Vec<f64>, Vec<Vec<f64>>)| -> Result<f64> {
        let x = constants(c);
        let mut worst: f64 = 0.0;
        for (m, p1, p2) in &sides {
            let (a, b, d) = (values(&m.coeffs(&x)?), values(&p1.coeffs(&x)?), values(&p2.coeffs(&x)?));
            for i in 0..a.len() {
                worst = worst.max((a[i] - b[i] - d[i]).abs());
            }
        }
        Ok(worst)
    };
    let best = max_over_samples(&draws, residual)?;
    Ok(report_from(draws, best))
}
