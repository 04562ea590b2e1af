//! Lie groupoids in global charts, their tangent and Whitney-sum lifts, a zoo
//! of examples, and the multiplicativity checks for vector-valued forms.
//!
//! Arrows compose as `m(g, h) = gh` when `s(g) = t(h)`. Strings of `p`
//! composable arrows `(g₁, …, g_p)` with `s(g_i) = t(g_{i+1})` live on an
//! explicit chart with projections `pr_i` onto the arrow chart and a `join`
//! map back from the concatenated arrow coordinates, `join ∘ (pr₁, …, pr_p) = id`.

mod invariants;
mod mult;
mod tangent;
pub mod zoo;

use crate::error::{Error, Result};
use crate::smooth::{Chart, SmoothMap};

pub use invariants::{check_invariants, InvariantReport};
pub use mult::{
    check_distribution_closure, check_multiplicative, check_unit_inverse_related,
    lie_group_mult_check, mult_lift, ClosureReport, MultReport, DEFAULT_MULT_TOL,
};
pub use tangent::{tangent_groupoid, whitney_sum};

/// Chart of `G^(p)` with its arrow projections.
#[derive(Clone, Debug)]
pub struct StringChart {
    pub chart: Chart,
    /// `pr_i: G^(p) → G`, `i = 1..p`.
    pub prs: Vec<SmoothMap>,
    /// `G^p → G^(p)` on concatenated arrow coordinates.
    pub join: SmoothMap,
}

impl StringChart {
    pub fn level(&self) -> usize {
        self.prs.len()
    }
}

#[derive(Clone, Debug)]
pub struct Groupoid {
    name: String,
    arrows: Chart,
    objects: Chart,
    source: SmoothMap,
    target: SmoothMap,
    unit: SmoothMap,
    inverse: SmoothMap,
    /// `m: G^(2) → G` on the level-2 string chart.
    mult: SmoothMap,
    /// String charts for levels `1..=max_level`; level 1 is the arrow chart.
    strings: Vec<StringChart>,
}

impl Groupoid {
    /// Assembles a groupoid from its structure maps and string charts for
    /// levels `2, 3, …`. Dimensions are validated; the groupoid axioms are
    /// not (see [`check_invariants`]).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: impl Into<String>,
        arrows: Chart,
        objects: Chart,
        source: SmoothMap,
        target: SmoothMap,
        unit: SmoothMap,
        inverse: SmoothMap,
        mult: SmoothMap,
        higher: Vec<StringChart>,
    ) -> Result<Self> {
        let (g, m) = (arrows.dim(), objects.dim());
        let dims = [
            ("source", &source, g, m),
            ("target", &target, g, m),
            ("unit", &unit, m, g),
            ("inverse", &inverse, g, g),
        ];
        for (what, map, from, to) in dims {
            check_map(what, map, from, to)?;
        }
        if higher.is_empty() {
            return Err(Error::Config("a groupoid needs a level-2 string chart".into()));
        }
        for (i, sc) in higher.iter().enumerate() {
            let p = i + 2;
            if sc.prs.len() != p {
                return Err(Error::Config(format!("string chart {p} has {} projections", sc.prs.len())));
            }
            for pr in &sc.prs {
                check_map("projection", pr, sc.chart.dim(), g)?;
            }
            check_map("join", &sc.join, p * g, sc.chart.dim())?;
        }
        check_map("multiplication", &mult, higher[0].chart.dim(), g)?;
        let level1 = StringChart {
            chart: arrows.clone(),
            prs: vec![SmoothMap::identity(g)],
            join: SmoothMap::identity(g),
        };
        let mut strings = vec![level1];
        strings.extend(higher);
        Ok(Groupoid {
            name: name.into(),
            arrows,
            objects,
            source,
            target,
            unit,
            inverse,
            mult,
            strings,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arrows(&self) -> &Chart {
        &self.arrows
    }

    pub fn objects(&self) -> &Chart {
        &self.objects
    }

    pub fn source(&self) -> &SmoothMap {
        &self.source
    }

    pub fn target(&self) -> &SmoothMap {
        &self.target
    }

    pub fn unit(&self) -> &SmoothMap {
        &self.unit
    }

    pub fn inverse(&self) -> &SmoothMap {
        &self.inverse
    }

    pub fn mult(&self) -> &SmoothMap {
        &self.mult
    }

    /// The chart of composable pairs.
    pub fn comp(&self) -> &StringChart {
        &self.strings[1]
    }

    /// String chart of level `p ≥ 1`.
    pub fn strings(&self, p: usize) -> Result<&StringChart> {
        if p == 0 || p > self.strings.len() {
            return Err(Error::MissingNerveLevel {
                groupoid: self.name.clone(),
                level: p,
            });
        }
        Ok(&self.strings[p - 1])
    }

    pub fn max_level(&self) -> usize {
        self.strings.len()
    }

    pub fn is_group(&self) -> bool {
        self.objects.dim() == 0
    }

    /// `gh` for a composable pair given in arrow coordinates.
    pub fn multiply(&self, g: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        let pair: Vec<f64> = g.iter().chain(h).copied().collect();
        let c = self.comp().join.apply(&pair)?;
        self.mult.apply(&c)
    }

    pub(crate) fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

fn check_map(what: &str, map: &SmoothMap, from: usize, to: usize) -> Result<()> {
    if map.source_dim() != from || map.target_dim() != to {
        return Err(Error::Config(format!(
            "{what} map is R^{} -> R^{}, expected R^{from} -> R^{to}",
            map.source_dim(),
            map.target_dim()
        )));
    }
    Ok(())
}
