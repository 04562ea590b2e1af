use serde::Serialize;

use super::Groupoid;
use crate::error::{Error, Result};
use crate::forms::related::{related_residual, report_from};
use crate::forms::{check_projection, max_over_samples, restricted_product, DerivationReport, VForm};
use crate::sampling::Sampler;
use crate::smooth::linalg::{max_abs, Mat};
use crate::smooth::SmoothMap;

/// Default tolerance for multiplicativity verdicts.
pub const DEFAULT_MULT_TOL: f64 = 1e-7;

/// Residuals of the three relatedness conditions making `K` multiplicative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultReport {
    pub s_related: DerivationReport,
    pub t_related: DerivationReport,
    pub m_related: DerivationReport,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl MultReport {
    fn new(s: DerivationReport, t: DerivationReport, m: DerivationReport, samples: usize, tolerance: f64) -> Self {
        let pass = s.passes(tolerance) && t.passes(tolerance) && m.passes(tolerance);
        MultReport {
            s_related: s,
            t_related: t,
            m_related: m,
            samples,
            tolerance,
            pass,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.s_related
            .max_residual
            .max(self.t_related.max_residual)
            .max(self.m_related.max_residual)
    }
}

fn check_dims(g: &Groupoid, k: &VForm, k_m: Option<&VForm>) -> Result<()> {
    if k.dim() != g.arrows().dim() {
        return Err(Error::DimensionMismatch {
            expected: g.arrows().dim(),
            found: k.dim(),
            context: "form on the arrows",
        });
    }
    if let Some(km) = k_m {
        if km.degree() != k.degree() {
            return Err(Error::DegreeMismatch(format!(
                "form of degree {} on G covering a form of degree {} on M",
                k.degree(),
                km.degree()
            )));
        }
        if km.dim() != g.objects().dim() {
            return Err(Error::DimensionMismatch {
                expected: g.objects().dim(),
                found: km.dim(),
                context: "form on the objects",
            });
        }
    }
    Ok(())
}

/// `K^{(2)}`: the restriction of `K × K` to the chart of composable pairs.
pub fn mult_lift(g: &Groupoid, k: &VForm) -> Result<VForm> {
    let comp = g.comp();
    restricted_product(
        &[(comp.prs[0].clone(), k.clone()), (comp.prs[1].clone(), k.clone())],
        &comp.join,
    )
}

type Draws = Vec<(Vec<f64>, Vec<Vec<f64>>)>;

fn draw(s: &mut Sampler, chart: &crate::smooth::Chart, count: usize, samples: usize) -> Result<Draws> {
    (0..samples)
        .map(|_| Ok((s.point(chart)?, s.vectors(count, chart.dim()))))
        .collect()
}

fn related(f: &SmoothMap, k1: &VForm, k2: &VForm, draws: Draws) -> Result<DerivationReport> {
    let best = max_over_samples(&draws, |(p, vs)| related_residual(f, k1, k2, p, vs))?;
    Ok(report_from(draws, best))
}

/// Checks that `K` is `s`- and `t`-related to `K_M` and that `K^{(2)}` is
/// `m`-related to `K`, i.e. `K(Tm(X₁, Y₁), …) = Tm(K(X₁, …), K(Y₁, …))` for
/// composable tangent vectors.
pub fn check_multiplicative(
    g: &Groupoid,
    k: &VForm,
    k_m: &VForm,
    sampler: &mut Sampler,
    samples: usize,
) -> Result<MultReport> {
    check_dims(g, k, Some(k_m))?;
    let deg = k.degree();
    let sd = draw(sampler, g.arrows(), deg, samples)?;
    let td = draw(sampler, g.arrows(), deg, samples)?;
    let md = draw(sampler, &g.comp().chart, deg, samples)?;
    let s = related(g.source(), k, k_m, sd)?;
    let t = related(g.target(), k, k_m, td)?;
    let m = related(g.mult(), &mult_lift(g, k)?, k, md)?;
    Ok(MultReport::new(s, t, m, samples, DEFAULT_MULT_TOL))
}

/// Checks that `K_M` is `ε`-related to `K` and `K` is `ι`-related to itself,
/// both consequences of multiplicativity.
pub fn check_unit_inverse_related(
    g: &Groupoid,
    k: &VForm,
    k_m: &VForm,
    sampler: &mut Sampler,
    samples: usize,
) -> Result<DerivationReport> {
    check_dims(g, k, Some(k_m))?;
    let ud = draw(sampler, g.objects(), k.degree(), samples)?;
    let id = draw(sampler, g.arrows(), k.degree(), samples)?;
    Ok(related(g.unit(), k_m, k, ud)?.merge(related(g.inverse(), k, k, id)?))
}

/// Right translation `x ↦ m(x, a)` on a group.
fn right_translation(g: &Groupoid, a: &[f64]) -> SmoothMap {
    let n = g.arrows().dim();
    let pair = SmoothMap::stack(vec![SmoothMap::identity(n), SmoothMap::constant(n, a.to_vec())]);
    g.mult().after(&g.comp().join.after(&pair))
}

/// Conjugation `x ↦ a x a⁻¹` on a group.
fn conjugation(g: &Groupoid, a: &[f64], a_inv: &[f64]) -> SmoothMap {
    let n = g.arrows().dim();
    let left = SmoothMap::stack(vec![SmoothMap::constant(n, a.to_vec()), SmoothMap::identity(n)]);
    let ax = g.mult().after(&g.comp().join.after(&left));
    right_translation(g, a_inv).after(&ax)
}

/// Multiplicativity of `K` on a Lie group in the right trivialization
/// `TG ≅ G × 𝔤`, where `Tm` becomes `(gh, u + Ad_g v)`. The residual of
/// `K̂_{gh}(u + Ad_g v) = K̂_g(u) + Ad_g K̂_h(v)` is transported back to
/// `T_{gh}G`, so it is directly comparable with [`check_multiplicative`] run
/// with the same sampler state.
pub fn lie_group_mult_check(g: &Groupoid, k: &VForm, sampler: &mut Sampler, samples: usize) -> Result<MultReport> {
    if !g.is_group() {
        return Err(Error::NotAGroup(g.objects().dim()));
    }
    check_dims(g, k, None)?;
    let deg = k.degree();
    let n = g.arrows().dim();
    let e = g.unit().apply(&[])?;
    let k_pt = VForm::zero(0, deg);
    // Keep the sampler in step with check_multiplicative.
    let s = related(g.source(), k, &k_pt, draw(sampler, g.arrows(), deg, samples)?)?;
    let t = related(g.target(), k, &k_pt, draw(sampler, g.arrows(), deg, samples)?)?;
    let draws = draw(sampler, &g.comp().chart, deg, samples)?;
    let residual = |(c, ws): &(Vec<f64>, Vec<Vec<f64>>)| -> Result<f64> {
        let a = g.comp().prs[0].apply(c)?;
        let b = g.comp().prs[1].apply(c)?;
        let ab = g.mult().apply(c)?;
        let inv = |x: &[f64]| g.inverse().apply(x);
        let (a_inv, b_inv, ab_inv) = (inv(&a)?, inv(&b)?, inv(&ab)?);
        // Tr_x at e, and Tr_{x⁻¹} at x.
        let tr = |x: &[f64]| right_translation(g, x).jacobian(&e);
        let tr_back = |x: &[f64], x_inv: &[f64]| right_translation(g, x_inv).jacobian(x);
        let (tr_a_back, tr_b_back) = (tr_back(&a, &a_inv)?, tr_back(&b, &b_inv)?);
        let (tr_ab, tr_ab_back) = (tr(&ab)?, tr_back(&ab, &ab_inv)?);
        let ad = conjugation(g, &a, &a_inv).jacobian(&e)?;
        let mut xs = Vec::with_capacity(deg);
        let mut ys = Vec::with_capacity(deg);
        let mut w = Vec::with_capacity(deg);
        for v in ws {
            let pr1 = g.comp().prs[0].jacobian(c)?.mul_vec(v);
            let pr2 = g.comp().prs[1].jacobian(c)?.mul_vec(v);
            let u = tr_a_back.mul_vec(&pr1);
            let vv = tr_b_back.mul_vec(&pr2);
            let adv = ad.mul_vec(&vv);
            w.push(u.iter().zip(&adv).map(|(x, y)| x + y).collect::<Vec<f64>>());
            xs.push(pr1);
            ys.push(pr2);
        }
        // K̂_x(u₁, …) = Tr_{x⁻¹} K_x(Tr_x u₁, …)
        let k_ab_w = {
            let lifted: Vec<Vec<f64>> = w.iter().map(|x| tr_ab.mul_vec(x)).collect();
            tr_ab_back.mul_vec(&k.eval_at(&ab, &lifted)?)
        };
        let k_a_u = tr_a_back.mul_vec(&k.eval_at(&a, &xs)?);
        let k_b_v = ad.mul_vec(&tr_b_back.mul_vec(&k.eval_at(&b, &ys)?));
        let diff: Vec<f64> = (0..n).map(|i| k_ab_w[i] - k_a_u[i] - k_b_v[i]).collect();
        Ok(max_abs(&tr_ab.mul_vec(&diff)))
    };
    let best = max_over_samples(&draws, residual)?;
    let m = report_from(draws, best);
    Ok(MultReport::new(s, t, m, samples, DEFAULT_MULT_TOL))
}

/// Residuals of closure under `Tm` of the image and kernel distributions of
/// a projection `K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureReport {
    pub image: DerivationReport,
    pub kernel: DerivationReport,
}

impl ClosureReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.image.passes(tol) && self.kernel.passes(tol)
    }
}

/// Orthogonal projection of `z` onto the null space of `c`.
fn project_to_kernel(c: &Mat<f64>, z: &[f64]) -> Vec<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..c.rows() {
        let mut r = c.row(i).to_vec();
        for q in &basis {
            let d: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            r.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let norm = r.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-10 {
            basis.push(r.into_iter().map(|a| a / norm).collect());
        }
    }
    let mut out = z.to_vec();
    for q in &basis {
        let d: f64 = out.iter().zip(q).map(|(a, b)| a * b).sum();
        out.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
    }
    out
}

fn matrix(k: &VForm, p: &[f64]) -> Result<Mat<f64>> {
    let n = k.dim();
    Ok(Mat::from_rows(n, n, k.coeffs_at(p)?))
}

fn complement(p: &Mat<f64>) -> Mat<f64> {
    let n = p.rows();
    let mut q = Mat::identity(n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] -= p[(i, j)];
        }
    }
    q
}

/// Samples composable pairs `(X, Y)` inside `Im K` (resp. `ker K`) and
/// measures how far `Tm(X, Y)` leaves it.
pub fn check_distribution_closure(
    g: &Groupoid,
    k: &VForm,
    sampler: &mut Sampler,
    samples: usize,
) -> Result<ClosureReport> {
    check_dims(g, k, None)?;
    if k.degree() != 1 {
        return Err(Error::DegreeMismatch(format!(
            "distribution closure needs a projection, found degree {}",
            k.degree()
        )));
    }
    let n = g.arrows().dim();
    let comp = g.comp();
    let draws = (0..samples)
        .map(|_| Ok((sampler.point(&comp.chart)?, sampler.vectors(1, 2 * n))))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<Vec<f64>> = draws
        .iter()
        .map(|(c, _)| comp.prs[0].apply(c))
        .collect::<Result<_>>()?;
    check_projection(k, &points)?;
    let run = |kernel: bool| -> Result<DerivationReport> {
        let residual = |(c, zs): &(Vec<f64>, Vec<Vec<f64>>)| -> Result<f64> {
            let a = comp.prs[0].apply(c)?;
            let b = comp.prs[1].apply(c)?;
            let ab = g.mult().apply(c)?;
            let pick = |p: Mat<f64>| if kernel { complement(&p) } else { p };
            let (pa, pb) = (pick(matrix(k, &a)?), pick(matrix(k, &b)?));
            // X = P_a x, Y = P_b y with Ts X = Tt Y.
            let ca = g.source().jacobian(&a)?.mul(&pa);
            let cb = g.target().jacobian(&b)?.mul(&pb);
            let m = ca.rows();
            let mut cons = Mat::zeros(m, 2 * n);
            for i in 0..m {
                for j in 0..n {
                    cons[(i, j)] = ca[(i, j)];
                    cons[(i, n + j)] = -cb[(i, j)];
                }
            }
            let z = project_to_kernel(&cons, &zs[0]);
            let x = pa.mul_vec(&z[..n]);
            let y = pb.mul_vec(&z[n..]);
            let pair: Vec<f64> = x.iter().chain(&y).copied().collect();
            let joined = comp.join.jacobian(&[a, b].concat())?.mul_vec(&pair);
            let tm = g.mult().jacobian(c)?.mul_vec(&joined);
            let p_ab = matrix(k, &ab)?;
            let leak = if kernel { p_ab } else { complement(&p_ab) };
            Ok(max_abs(&leak.mul_vec(&tm)))
        };
        let best = max_over_samples(&draws, residual)?;
        Ok(report_from(draws.clone(), best))
    };
    Ok(ClosureReport {
        image: run(false)?,
        kernel: run(true)?,
    })
}
