//! The nerve of a Lie groupoid up to level 3, the simplicial differential
//! `δ = Σ (−1)^i ∂_i*`, and derivation towers `K_p` with the checks that
//! `D_p = L_{K_p}` commutes with degeneracies, `δ` and `d`.
//!
//! Level 0 is the object chart, level 1 the arrow chart. For `p ≥ 2`,
//! `∂_0` drops the first arrow, `∂_p` the last, and `∂_i` multiplies
//! `g_i g_{i+1}`; at `p = 1`, `∂_0 = s` and `∂_1 = t`. The degeneracy `s_i`
//! inserts the unit `1_{t(g_{i+1})}` at position `i`, or `1_{s(g_{p−1})}` at
//! the end.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::related::{related_residual, report_from};
use crate::forms::{
    exterior_d, lie_derivative, max_over_samples, pullback, restricted_product, DerivationReport,
    SForm, VForm,
};
use crate::groupoid::{check_multiplicative, Groupoid};
use crate::sampling::Sampler;
use crate::smooth::jet::{constants, values};
use crate::smooth::linalg::max_abs_diff;
use crate::smooth::{Chart, SmoothMap};

/// Highest nerve level supported.
pub const MAX_NERVE_LEVEL: usize = 3;

/// `G^(p)` with its face maps to level `p − 1` and degeneracies from it.
#[derive(Clone, Debug)]
pub struct NerveLevel {
    pub p: usize,
    pub chart: Chart,
    /// `∂_i: G^(p) → G^(p−1)`, `i = 0..=p`.
    pub faces: Vec<SmoothMap>,
    /// `s_i: G^(p−1) → G^(p)`, `i = 0..p`.
    pub degeneracies: Vec<SmoothMap>,
}

/// Nerve charts with their simplicial structure, levels `0..=p_max`.
#[derive(Clone, Debug)]
pub struct Nerve {
    levels: Vec<NerveLevel>,
}

impl Nerve {
    pub fn level(&self, p: usize) -> Result<&NerveLevel> {
        self.levels.get(p).ok_or(Error::MissingNerveLevel {
            groupoid: "nerve".into(),
            level: p,
        })
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[NerveLevel] {
        &self.levels
    }
}

/// Builds `N(G)` up to level `p_max ≤ 3`.
pub fn build_nerve(g: &Groupoid, p_max: usize) -> Result<Nerve> {
    if p_max > MAX_NERVE_LEVEL || p_max > g.max_level() {
        return Err(Error::MissingNerveLevel {
            groupoid: g.name().to_string(),
            level: p_max,
        });
    }
    let mut levels = vec![NerveLevel {
        p: 0,
        chart: g.objects().clone(),
        faces: vec![],
        degeneracies: vec![],
    }];
    if p_max >= 1 {
        levels.push(NerveLevel {
            p: 1,
            chart: g.arrows().clone(),
            faces: vec![g.source().clone(), g.target().clone()],
            degeneracies: vec![g.unit().clone()],
        });
    }
    for p in 2..=p_max {
        let sc = g.strings(p)?;
        let below = g.strings(p - 1)?;
        let join_below = |maps: Vec<SmoothMap>| below.join.after(&SmoothMap::stack(maps));
        let mut faces = Vec::with_capacity(p + 1);
        for i in 0..=p {
            let maps: Vec<SmoothMap> = if i == 0 {
                sc.prs[1..].to_vec()
            } else if i == p {
                sc.prs[..p - 1].to_vec()
            } else {
                let pair = SmoothMap::stack(vec![sc.prs[i - 1].clone(), sc.prs[i].clone()]);
                let prod = g.mult().after(&g.comp().join.after(&pair));
                let mut m = sc.prs[..i - 1].to_vec();
                m.push(prod);
                m.extend_from_slice(&sc.prs[i + 1..]);
                m
            };
            faces.push(join_below(maps));
        }
        let mut degeneracies = Vec::with_capacity(p);
        for i in 0..p {
            let mut maps = below.prs.clone();
            let unit = if i < p - 1 {
                g.unit().after(&g.target().after(&below.prs[i]))
            } else {
                g.unit().after(&g.source().after(&below.prs[p - 2]))
            };
            maps.insert(i, unit);
            degeneracies.push(sc.join.after(&SmoothMap::stack(maps)));
        }
        levels.push(NerveLevel {
            p,
            chart: sc.chart.clone(),
            faces,
            degeneracies,
        });
    }
    Ok(Nerve { levels })
}

/// Worst residual of the simplicial identities over random nerve points.
pub fn check_simplicial(nerve: &Nerve, sampler: &mut Sampler, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let lv = &nerve.levels;
    for _ in 0..samples {
        for p in 1..=nerve.max_level() {
            let x = sampler.point(&lv[p].chart)?;
            let y = sampler.point(&lv[p - 1].chart)?;
            // ∂_i ∂_j = ∂_{j−1} ∂_i, i < j
            if p >= 2 {
                for j in 0..=p {
                    for i in 0..j {
                        let a = lv[p - 1].faces[i].apply(&lv[p].faces[j].apply(&x)?)?;
                        let b = lv[p - 1].faces[j - 1].apply(&lv[p].faces[i].apply(&x)?)?;
                        worst = worst.max(max_abs_diff(&a, &b));
                    }
                }
            }
            for i in 0..p {
                let sy = lv[p].degeneracies[i].apply(&y)?;
                for j in 0..=p {
                    let lhs = lv[p].faces[j].apply(&sy)?;
                    let rhs = if j == i || j == i + 1 {
                        y.clone()
                    } else if j < i {
                        lv[p - 1].degeneracies[i - 1].apply(&lv[p - 1].faces[j].apply(&y)?)?
                    } else {
                        lv[p - 1].degeneracies[i].apply(&lv[p - 1].faces[j - 1].apply(&y)?)?
                    };
                    worst = worst.max(max_abs_diff(&lhs, &rhs));
                }
            }
            // s_j s_i = s_i s_{j−1}, i < j
            if p >= 2 {
                let z = sampler.point(&lv[p - 2].chart)?;
                for j in 0..p {
                    for i in 0..j {
                        let a = lv[p].degeneracies[j].apply(&lv[p - 1].degeneracies[i].apply(&z)?)?;
                        let b = lv[p].degeneracies[i].apply(&lv[p - 1].degeneracies[j - 1].apply(&z)?)?;
                        worst = worst.max(max_abs_diff(&a, &b));
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// `δω = Σ_i (−1)^i ∂_i*ω` for a form `ω` on level `p − 1`.
pub fn delta(nerve: &Nerve, p: usize, omega: &SForm) -> Result<SForm> {
    let level = nerve.level(p)?;
    if p == 0 {
        return Err(Error::MissingNerveLevel {
            groupoid: "nerve".into(),
            level: 0,
        });
    }
    let terms = level
        .faces
        .iter()
        .enumerate()
        .map(|(i, f)| Ok((if i % 2 == 0 { 1.0 } else { -1.0 }, pullback(f, omega)?)))
        .collect::<Result<Vec<_>>>()?;
    SForm::linear_combination(&terms)
}

/// An element of the double complex `Ω^q(G^(p))`: components indexed by
/// `(p, q)`.
#[derive(Clone, Debug, Default)]
pub struct Cochain {
    pub parts: Vec<(usize, SForm)>,
}

impl Cochain {
    pub fn single(p: usize, omega: SForm) -> Self {
        Cochain { parts: vec![(p, omega)] }
    }

    fn add(&mut self, p: usize, omega: SForm) {
        match self
            .parts
            .iter_mut()
            .find(|(q, w)| *q == p && w.degree() == omega.degree())
        {
            Some((_, w)) => *w = w.clone() + omega,
            None => self.parts.push((p, omega)),
        }
    }
}

/// `D = δ + (−1)^p d` on the double complex. Components that would land
/// above the top nerve level are dropped.
pub fn total_d(nerve: &Nerve, c: &Cochain) -> Result<Cochain> {
    let mut out = Cochain::default();
    for (p, w) in &c.parts {
        if *p < nerve.max_level() {
            out.add(p + 1, delta(nerve, p + 1, w)?);
        }
        if w.degree() < w.dim() {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            out.add(*p, exterior_d(w).scale(sign));
        }
    }
    Ok(out)
}

/// Vector-valued forms `K_0 = K_M, K_1 = K, K_2, …` on the nerve charts.
#[derive(Clone, Debug)]
pub struct DerivationTower {
    pub levels: Vec<VForm>,
}

impl DerivationTower {
    pub fn degree(&self) -> usize {
        self.levels[0].degree()
    }

    /// The tower with `K_p` replaced by `K_p + eps·Z`.
    pub fn perturbed(&self, p: usize, z: &VForm, eps: f64) -> Result<DerivationTower> {
        let mut levels = self.levels.clone();
        let kp = levels.get(p).ok_or(Error::MissingNerveLevel {
            groupoid: "tower".into(),
            level: p,
        })?;
        levels[p] = VForm::linear_combination(&[(1.0, kp.clone()), (eps, z.clone())])?;
        Ok(DerivationTower { levels })
    }
}

/// `K^{(p)}`, the restriction of `K × ⋯ × K` to `G^(p)`, for every level of
/// the nerve. Fails unless `K` is multiplicative over `K_M`.
pub fn lift_tower(g: &Groupoid, nerve: &Nerve, k: &VForm, k_m: &VForm) -> Result<DerivationTower> {
    let mut sampler = Sampler::new(0x70_7765).derive(g.name());
    let r = check_multiplicative(g, k, k_m, &mut sampler, 20)?;
    if !r.pass {
        return Err(Error::Hypothesis(format!(
            "K is not multiplicative (residual {:.3e})",
            r.max_residual()
        )));
    }
    lift_tower_unchecked(g, nerve, k, k_m)
}

/// [`lift_tower`] without the multiplicativity check.
pub fn lift_tower_unchecked(g: &Groupoid, nerve: &Nerve, k: &VForm, k_m: &VForm) -> Result<DerivationTower> {
    let mut levels = vec![k_m.clone()];
    if nerve.max_level() >= 1 {
        levels.push(k.clone());
    }
    for p in 2..=nerve.max_level() {
        let sc = g.strings(p)?;
        let parts: Vec<(SmoothMap, VForm)> = sc.prs.iter().map(|pr| (pr.clone(), k.clone())).collect();
        levels.push(restricted_product(&parts, &sc.join)?);
    }
    Ok(DerivationTower { levels })
}

/// Worst residual of `K_p` being `∂_j`- and `s_i`-related to `K_{p−1}`.
pub fn check_tower(nerve: &Nerve, tower: &DerivationTower, sampler: &mut Sampler, samples: usize) -> Result<DerivationReport> {
    let k = tower.degree();
    let mut report = DerivationReport {
        max_residual: 0.0,
        samples,
        worst: None,
    };
    for p in 1..=nerve.max_level() {
        let lv = nerve.level(p)?;
        for (maps, from, to, chart) in [
            (&lv.faces, p, p - 1, &lv.chart),
            (&lv.degeneracies, p - 1, p, &nerve.level(p - 1)?.chart),
        ] {
            for f in maps {
                let draws = (0..samples)
                    .map(|_| Ok((sampler.point(chart)?, sampler.vectors(k, chart.dim()))))
                    .collect::<Result<Vec<_>>>()?;
                let (k1, k2) = (&tower.levels[from], &tower.levels[to]);
                let best = max_over_samples(&draws, |(x, vs)| related_residual(f, k1, k2, x, vs))?;
                report = report.merge(report_from(draws, best));
            }
        }
    }
    Ok(report)
}

/// Residuals of the three relations characterizing the derivation
/// `D = (L_{K_0}, L_{K_1}, …)` of the double complex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BssReport {
    /// `s_i* ∘ D_p = D_{p−1} ∘ s_i*`
    pub face_rel: DerivationReport,
    /// `D_p ∘ δ = δ ∘ D_{p−1}`
    pub del_comm: DerivationReport,
    /// `D_p ∘ d = (−1)^k d ∘ D_p`
    pub de_rham: DerivationReport,
}

impl BssReport {
    pub fn max_residual(&self) -> f64 {
        self.face_rel
            .max_residual
            .max(self.del_comm.max_residual)
            .max(self.de_rham.max_residual)
    }
}

/// Compares two forms on a chart at random points.
fn compare(a: &SForm, b: &SForm, chart: &Chart, sampler: &mut Sampler, samples: usize) -> Result<DerivationReport> {
    let draws = (0..samples)
        .map(|_| Ok((sampler.point(chart)?, Vec::new())))
        .collect::<Result<Vec<_>>>()?;
    let best = max_over_samples(&draws, |(x, _)| {
        let c = constants(x);
        Ok(max_abs_diff(&values(&a.coeffs(&c)?), &values(&b.coeffs(&c)?)))
    })?;
    Ok(report_from(draws, best))
}

/// Checks the relations on random test 1-forms (functions on level 0) at
/// every level of the nerve.
pub fn check_bss_derivation(
    nerve: &Nerve,
    tower: &DerivationTower,
    sampler: &mut Sampler,
    samples: usize,
) -> Result<BssReport> {
    let k = tower.degree();
    let empty = || DerivationReport {
        max_residual: 0.0,
        samples,
        worst: None,
    };
    let (mut face_rel, mut del_comm, mut de_rham) = (empty(), empty(), empty());
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let test_form = |s: &mut Sampler, dim: usize| {
        let q = if dim == 0 { 0 } else { 1 };
        s.random_sform(dim, q)
    };
    for p in 0..=nerve.max_level() {
        let lv = nerve.level(p)?;
        let kp = &tower.levels[p];
        let dim = lv.chart.dim();
        let omega = test_form(sampler, dim);
        if omega.degree() < dim {
            let lhs = lie_derivative(kp, &exterior_d(&omega))?;
            let rhs = exterior_d(&lie_derivative(kp, &omega)?).scale(sign);
            de_rham = de_rham.merge(compare(&lhs, &rhs, &lv.chart, sampler, samples)?);
        }
        if p == 0 {
            continue;
        }
        let below = nerve.level(p - 1)?;
        let kb = &tower.levels[p - 1];
        for s in &lv.degeneracies {
            let lhs = pullback(s, &lie_derivative(kp, &omega)?)?;
            let rhs = lie_derivative(kb, &pullback(s, &omega)?)?;
            face_rel = face_rel.merge(compare(&lhs, &rhs, &below.chart, sampler, samples)?);
        }
        let eta = test_form(sampler, below.chart.dim());
        let lhs = lie_derivative(kp, &delta(nerve, p, &eta)?)?;
        let rhs = delta(nerve, p, &lie_derivative(kb, &eta)?)?;
        del_comm = del_comm.merge(compare(&lhs, &rhs, &lv.chart, sampler, samples)?);
    }
    Ok(BssReport {
        face_rel,
        del_comm,
        de_rham,
    })
}
