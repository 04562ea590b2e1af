use rayon::prelude::*;
use serde::Serialize;

use super::VForm;
use crate::error::{Error, Result};
use crate::sampling::Sampler;
use crate::smooth::jet::{constants, values};
use crate::smooth::linalg::{max_abs_diff, Mat};
use crate::smooth::{Chart, Jet, SmoothMap};

/// Point and vectors at which a check attained its largest residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Worst {
    pub point: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Outcome of a sampled identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivationReport {
    pub max_residual: f64,
    pub samples: usize,
    pub worst: Option<Worst>,
}

impl DerivationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol
    }

    /// Combines two reports over the same samples by max-reduction.
    pub fn merge(self, other: DerivationReport) -> DerivationReport {
        let samples = self.samples.max(other.samples);
        if other.max_residual > self.max_residual {
            DerivationReport { samples, ..other }
        } else {
            DerivationReport { samples, ..self }
        }
    }
}

/// Evaluates `residual` on every sample in parallel and returns the largest
/// value with the index of the first sample attaining it. NaN counts as
/// infinite. The result does not depend on scheduling.
pub fn max_over_samples<S, F>(samples: &[S], residual: F) -> Result<(f64, usize)>
where
    S: Sync,
    F: Fn(&S) -> Result<f64> + Sync,
{
    let values = samples
        .par_iter()
        .map(|s| residual(s).map(|r| if r.is_nan() { f64::INFINITY } else { r }))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values
        .iter()
        .enumerate()
        .fold((0.0, 0), |(best, at), (i, &r)| if r > best { (r, i) } else { (best, at) }))
}

pub(crate) fn report_from(samples: Vec<(Vec<f64>, Vec<Vec<f64>>)>, (max_residual, at): (f64, usize)) -> DerivationReport {
    let n = samples.len();
    let worst = samples.into_iter().nth(at).map(|(point, vectors)| Worst { point, vectors });
    DerivationReport {
        max_residual,
        samples: n,
        worst,
    }
}

/// Residual of `K₂(Tf X₁, …, Tf X_k) = Tf K₁(X₁, …, X_k)` over random points of
/// `chart` and random vectors.
pub fn check_f_related(
    f: &SmoothMap,
    chart: &Chart,
    k1: &VForm,
    k2: &VForm,
    sampler: &mut Sampler,
    samples: usize,
) -> Result<DerivationReport> {
    if k1.degree() != k2.degree() {
        return Err(Error::DegreeMismatch(format!(
            "relating a {}-form to a {}-form",
            k1.degree(),
            k2.degree()
        )));
    }
    if f.source_dim() != k1.dim() || f.target_dim() != k2.dim() || chart.dim() != k1.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.source_dim(),
            found: k1.dim(),
            context: "f-relatedness charts",
        });
    }
    let draws = (0..samples)
        .map(|_| Ok((sampler.point(chart)?, sampler.vectors(k1.degree(), k1.dim()))))
        .collect::<Result<Vec<_>>>()?;
    let best = max_over_samples(&draws, |(p, vs)| related_residual(f, k1, k2, p, vs))?;
    Ok(report_from(draws, best))
}

pub(crate) fn related_residual(
    f: &SmoothMap,
    k1: &VForm,
    k2: &VForm,
    p: &[f64],
    vs: &[Vec<f64>],
) -> Result<f64> {
    let x = constants(p);
    let jac: Mat<f64> = f.jacobian(p)?;
    let fx = f.eval(&x)?;
    let pushed: Vec<Vec<Jet>> = vs.iter().map(|v| constants(&jac.mul_vec(v))).collect();
    let lhs = values(&k2.eval_on(&fx, &pushed)?);
    let jv: Vec<Vec<Jet>> = vs.iter().map(|v| constants(v)).collect();
    let rhs = jac.mul_vec(&values(&k1.eval_on(&x, &jv)?));
    Ok(max_abs_diff(&lhs, &rhs))
}
