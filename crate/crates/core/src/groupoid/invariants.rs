use serde::Serialize;

use super::Groupoid;
use crate::error::Result;
use crate::sampling::Sampler;
use crate::smooth::linalg::max_abs_diff;

/// Largest residual of each groupoid axiom over the samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub residuals: Vec<(&'static str, f64)>,
    pub samples: usize,
}

impl InvariantReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|r| r.0 == name).map(|r| r.1)
    }
}

const NAMES: [&str; 10] = [
    "unit_source",
    "unit_target",
    "composable",
    "source_mult",
    "target_mult",
    "join",
    "associativity",
    "unit_law",
    "inverse_law",
    "inverse_source",
];

/// Checks the groupoid axioms at random objects, arrows and strings of
/// levels 2 and 3 (when present).
pub fn check_invariants(g: &Groupoid, sampler: &mut Sampler, samples: usize) -> Result<InvariantReport> {
    let mut worst = [0.0f64; NAMES.len()];
    let mut bump = |i: usize, r: f64| {
        let r = if r.is_nan() { f64::INFINITY } else { r };
        worst[i] = worst[i].max(r);
    };
    let (s, t, e, inv) = (g.source(), g.target(), g.unit(), g.inverse());
    for _ in 0..samples {
        let x = sampler.point(g.objects())?;
        let ex = e.apply(&x)?;
        bump(0, max_abs_diff(&s.apply(&ex)?, &x));
        bump(1, max_abs_diff(&t.apply(&ex)?, &x));

        let c2 = sampler.point(&g.comp().chart)?;
        let (a, b) = (g.comp().prs[0].apply(&c2)?, g.comp().prs[1].apply(&c2)?);
        let ab = g.mult().apply(&c2)?;
        bump(2, max_abs_diff(&s.apply(&a)?, &t.apply(&b)?));
        bump(3, max_abs_diff(&s.apply(&ab)?, &s.apply(&b)?));
        bump(4, max_abs_diff(&t.apply(&ab)?, &t.apply(&a)?));

        for p in 2..=g.max_level() {
            let sc = g.strings(p)?;
            let c = sampler.point(&sc.chart)?;
            let parts: Vec<f64> = sc
                .prs
                .iter()
                .map(|pr| pr.apply(&c))
                .collect::<Result<Vec<_>>>()?
                .concat();
            bump(5, max_abs_diff(&sc.join.apply(&parts)?, &c));
            if p == 3 {
                let gs: Vec<Vec<f64>> = sc.prs.iter().map(|pr| pr.apply(&c)).collect::<Result<_>>()?;
                let left = g.multiply(&g.multiply(&gs[0], &gs[1])?, &gs[2])?;
                let right = g.multiply(&gs[0], &g.multiply(&gs[1], &gs[2])?)?;
                bump(6, max_abs_diff(&left, &right));
            }
        }

        let h = sampler.point(g.arrows())?;
        let (sh, th) = (s.apply(&h)?, t.apply(&h)?);
        bump(7, max_abs_diff(&g.multiply(&e.apply(&th)?, &h)?, &h));
        bump(7, max_abs_diff(&g.multiply(&h, &e.apply(&sh)?)?, &h));
        let hi = inv.apply(&h)?;
        bump(8, max_abs_diff(&g.multiply(&h, &hi)?, &e.apply(&th)?));
        bump(8, max_abs_diff(&g.multiply(&hi, &h)?, &e.apply(&sh)?));
        bump(9, max_abs_diff(&s.apply(&hi)?, &th));
    }
    Ok(InvariantReport {
        residuals: NAMES.iter().copied().zip(worst).collect(),
        samples,
    })
}
