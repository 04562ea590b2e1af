//! Concrete groupoids: pair, Lie groups, unit, products, vector bundles,
//! trivial gauge groupoids and semidirect products.

use super::{Groupoid, StringChart};
use crate::error::{Error, Result};
use crate::expr::ExprFn;
use crate::sampling::Sampler;
use crate::smooth::linalg::max_abs_diff;
use crate::smooth::{Chart, SmoothMap};

/// Highest string level built by the zoo constructors.
pub const ZOO_LEVELS: usize = 3;

/// Tolerance for validating representation axioms of an action.
pub const ACTION_TOL: f64 = 1e-9;

fn range(start: usize, len: usize) -> impl Iterator<Item = usize> {
    start..start + len
}

/// `x ↦ a(x) + b(x)` for two maps with a common source.
fn add_maps(a: &SmoothMap, b: &SmoothMap) -> SmoothMap {
    let r = a.target_dim();
    let src: Vec<String> = (1..=r).map(|i| format!("x{i} + x{}", i + r)).collect();
    let add = SmoothMap::parse(&src.join(";"), 2 * r, r).expect("generated sum map parses");
    add.after(&SmoothMap::stack(vec![a.clone(), b.clone()]))
}

fn negate(a: &SmoothMap) -> SmoothMap {
    let r = a.target_dim();
    let src: Vec<String> = (1..=r).map(|i| format!("-x{i}")).collect();
    SmoothMap::parse(&src.join(";"), r, r)
        .expect("generated negation parses")
        .after(a)
}

/// The pair groupoid `M × M ⇉ M`: an arrow `(x, y)` goes from `s = y` to
/// `t = x`, and `(x, y)(y, z) = (x, z)`. Strings of level `p` are points
/// `(x₀, …, x_p)` of `M^{p+1}`.
pub fn pair(m: &Chart) -> Groupoid {
    let d = m.dim();
    let arrows = Chart::product(m, m).renamed(format!("{}²", m.name()));
    let mut higher = Vec::new();
    for p in 2..=ZOO_LEVELS {
        let parts: Vec<&Chart> = std::iter::repeat(m).take(p + 1).collect();
        let chart = Chart::product_all(&format!("{}^{}", m.name(), p + 1), &parts);
        let n = chart.dim();
        let prs = (1..=p)
            .map(|j| SmoothMap::select(n, range((j - 1) * d, 2 * d).collect()))
            .collect();
        // (a₁, b₁, …, a_p, b_p) ↦ (a₁, …, a_p, b_p)
        let mut idx: Vec<usize> = (0..p).flat_map(|j| range(2 * d * j, d)).collect();
        idx.extend(range(2 * d * (p - 1) + d, d));
        higher.push(StringChart {
            chart,
            prs,
            join: SmoothMap::select(2 * d * p, idx),
        });
    }
    let mult = SmoothMap::select(3 * d, range(0, d).chain(range(2 * d, d)).collect());
    Groupoid::from_parts(
        format!("pair({})", m.name()),
        arrows,
        m.clone(),
        SmoothMap::block(2 * d, d, d),
        SmoothMap::block(2 * d, 0, d),
        SmoothMap::select(d, range(0, d).chain(range(0, d)).collect()),
        SmoothMap::select(2 * d, range(d, d).chain(range(0, d)).collect()),
        mult,
        higher,
    )
    .expect("pair groupoid dimensions are consistent")
}

/// A Lie group `G ⇉ pt` from its multiplication `G × G → G`, unit and
/// inversion. Strings are points of `G^p`.
pub fn group(name: &str, chart: &Chart, mult: SmoothMap, unit: Vec<f64>, inverse: SmoothMap) -> Result<Groupoid> {
    let n = chart.dim();
    if unit.len() != n {
        return Err(Error::Config(format!("unit has {} coordinates, group has {n}", unit.len())));
    }
    let mut higher = Vec::new();
    for p in 2..=ZOO_LEVELS {
        let parts: Vec<&Chart> = std::iter::repeat(chart).take(p).collect();
        let c = Chart::product_all(&format!("{}^{p}", chart.name()), &parts);
        let prs = (0..p).map(|j| SmoothMap::block(n * p, j * n, n)).collect();
        higher.push(StringChart {
            chart: c,
            prs,
            join: SmoothMap::identity(n * p),
        });
    }
    Groupoid::from_parts(
        name,
        chart.clone(),
        Chart::new("pt", 0),
        SmoothMap::constant(n, vec![]),
        SmoothMap::constant(n, vec![]),
        SmoothMap::constant(0, unit),
        inverse,
        mult,
        higher,
    )
}

/// The abelian group `(R^m, +)`.
pub fn abelian(m: usize) -> Groupoid {
    let chart = Chart::new(format!("R{m}"), m);
    let sum: Vec<String> = (1..=m).map(|i| format!("x{i} + x{}", i + m)).collect();
    let neg: Vec<String> = (1..=m).map(|i| format!("-x{i}")).collect();
    group(
        &format!("R{m}"),
        &chart,
        SmoothMap::parse(&sum.join(";"), 2 * m, m).expect("sum parses"),
        vec![0.0; m],
        SmoothMap::parse(&neg.join(";"), m, m).expect("negation parses"),
    )
    .expect("abelian group dimensions are consistent")
}

/// The affine group of the line in coordinates `(a, b)`, `a > 0`, acting as
/// `x ↦ ax + b`: `(a, b)(c, d) = (ac, ad + b)`.
pub fn aff1() -> Groupoid {
    let chart = Chart::new("Aff(1)", 2)
        .with_bounds(vec![(0.5, 2.0), (-1.0, 1.0)])
        .with_domain(ExprFn::parse("x1", 2).expect("predicate parses"));
    let mult = SmoothMap::parse("x1*x3; x1*x4 + x2", 4, 2).expect("mult parses");
    let inv = SmoothMap::parse("1/x1; -x2/x1", 2, 2)
        .expect("inverse parses")
        .on(&chart);
    group("Aff(1)", &chart, mult, vec![1.0, 0.0], inv).expect("Aff(1) dimensions are consistent")
}

/// The unit groupoid `M ⇉ M`: only identity arrows.
pub fn unit(m: &Chart) -> Groupoid {
    let d = m.dim();
    let mut higher = Vec::new();
    for p in 2..=ZOO_LEVELS {
        higher.push(StringChart {
            chart: m.clone(),
            prs: vec![SmoothMap::identity(d); p],
            join: SmoothMap::block(d * p, 0, d),
        });
    }
    Groupoid::from_parts(
        format!("unit({})", m.name()),
        m.clone(),
        m.clone(),
        SmoothMap::identity(d),
        SmoothMap::identity(d),
        SmoothMap::identity(d),
        SmoothMap::identity(d),
        SmoothMap::identity(d),
        higher,
    )
    .expect("unit groupoid dimensions are consistent")
}

/// The product groupoid `G₁ × G₂ ⇉ M₁ × M₂`.
pub fn product(g1: &Groupoid, g2: &Groupoid) -> Groupoid {
    let (n1, n2) = (g1.arrows().dim(), g2.arrows().dim());
    let levels = g1.max_level().min(g2.max_level());
    let mut higher = Vec::new();
    for p in 2..=levels {
        let (a, b) = (g1.strings(p).unwrap(), g2.strings(p).unwrap());
        let chart = Chart::product(&a.chart, &b.chart);
        let prs = a
            .prs
            .iter()
            .zip(&b.prs)
            .map(|(x, y)| SmoothMap::product(&[x.clone(), y.clone()]))
            .collect();
        let w = n1 + n2;
        let idx: Vec<usize> = (0..p)
            .flat_map(|j| range(j * w, n1))
            .chain((0..p).flat_map(|j| range(j * w + n1, n2)))
            .collect();
        let join = SmoothMap::product(&[a.join.clone(), b.join.clone()]).after(&SmoothMap::select(w * p, idx));
        higher.push(StringChart { chart, prs, join });
    }
    let both = |f: &SmoothMap, g: &SmoothMap| SmoothMap::product(&[f.clone(), g.clone()]);
    Groupoid::from_parts(
        format!("{}×{}", g1.name(), g2.name()),
        Chart::product(g1.arrows(), g2.arrows()),
        Chart::product(g1.objects(), g2.objects()),
        both(g1.source(), g2.source()),
        both(g1.target(), g2.target()),
        both(g1.unit(), g2.unit()),
        both(g1.inverse(), g2.inverse()),
        both(g1.mult(), g2.mult()),
        higher,
    )
    .expect("product groupoid dimensions are consistent")
}

/// The trivial vector bundle `M × R^r ⇉ M` with fiberwise addition.
pub fn vector_bundle(m: &Chart, r: usize) -> Groupoid {
    let name = format!("vb({}, R{r})", m.name());
    product(&unit(m), &abelian(r)).with_name(name)
}

/// The gauge groupoid of the trivial principal `R^m`-bundle over `M`, in the
/// chart `(x, y, k)` with `(x, y, k₁)(y, z, k₂) = (x, z, k₁ + k₂)`.
pub fn gauge(m: &Chart, group_dim: usize) -> Groupoid {
    let name = format!("gauge({}, R{group_dim})", m.name());
    product(&pair(m), &abelian(group_dim)).with_name(name)
}

/// The semidirect product `G ⋉ E` for a representation of `G` on the trivial
/// bundle `E = M × R^r`, given by `action(g, e) = g·e` (linear in `e`, mapping
/// the fiber over `s(g)` to the fiber over `t(g)`). An arrow `(g, e)` carries
/// `e` over `t(g)` and `(g₁, e₁)(g₂, e₂) = (g₁g₂, e₁ + g₁·e₂)`.
///
/// Linearity, functoriality and unitality of the action are validated at
/// sample points.
pub fn semidirect(g: &Groupoid, action: SmoothMap, r: usize) -> Result<Groupoid> {
    let n = g.arrows().dim();
    if action.source_dim() != n + r || action.target_dim() != r {
        return Err(Error::Config(format!(
            "action must be R^{} -> R^{r}, found R^{} -> R^{}",
            n + r,
            action.source_dim(),
            action.target_dim()
        )));
    }
    validate_action(g, &action, r)?;
    let fiber = Chart::new(format!("R{r}"), r);
    let bg = SmoothMap::block(n + r, 0, n);
    let be = SmoothMap::block(n + r, n, r);
    let unit = SmoothMap::stack(vec![g.unit().clone(), SmoothMap::constant(g.objects().dim(), vec![0.0; r])]);
    let inv_g = g.inverse().after(&bg);
    let inverse = SmoothMap::stack(vec![
        inv_g.clone(),
        negate(&action.after(&SmoothMap::stack(vec![inv_g, be.clone()]))),
    ]);
    let mut higher = Vec::new();
    let mut mult = None;
    for p in 2..=g.max_level() {
        let base = g.strings(p)?;
        let c = base.chart.dim();
        let total = c + p * r;
        let chart = Chart::product(&base.chart, &Chart::new(format!("R{}", p * r), p * r));
        let prs = base
            .prs
            .iter()
            .enumerate()
            .map(|(j, pr)| {
                SmoothMap::stack(vec![
                    pr.after(&SmoothMap::block(total, 0, c)),
                    SmoothMap::block(total, c + j * r, r),
                ])
            })
            .collect();
        let w = n + r;
        let idx: Vec<usize> = (0..p)
            .flat_map(|j| range(j * w, n))
            .chain((0..p).flat_map(|j| range(j * w + n, r)))
            .collect();
        let join = SmoothMap::product(&[base.join.clone(), SmoothMap::identity(p * r)])
            .after(&SmoothMap::select(w * p, idx));
        if p == 2 {
            let cc = SmoothMap::block(total, 0, c);
            let e1 = SmoothMap::block(total, c, r);
            let e2 = SmoothMap::block(total, c + r, r);
            let g1 = base.prs[0].after(&cc);
            let acted = action.after(&SmoothMap::stack(vec![g1, e2]));
            mult = Some(SmoothMap::stack(vec![g.mult().after(&cc), add_maps(&e1, &acted)]));
        }
        higher.push(StringChart { chart, prs, join });
    }
    Groupoid::from_parts(
        format!("{}⋉R{r}", g.name()),
        Chart::product(g.arrows(), &fiber),
        g.objects().clone(),
        g.source().after(&bg),
        g.target().after(&bg),
        unit,
        inverse,
        mult.expect("level 2 always present"),
        higher,
    )
}

fn validate_action(g: &Groupoid, action: &SmoothMap, r: usize) -> Result<()> {
    let mut s = Sampler::new(0x5eed).derive(g.name());
    let act = |gp: &[f64], e: &[f64]| -> Result<Vec<f64>> {
        let x: Vec<f64> = gp.iter().chain(e).copied().collect();
        action.apply(&x)
    };
    let (mut lin, mut fun, mut uni) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let c = s.point(&g.comp().chart)?;
        let gp = g.comp().prs[0].apply(&c)?;
        let hp = g.comp().prs[1].apply(&c)?;
        let (e1, e2, lambda) = (s.vector(r), s.vector(r), s.uniform(-2.0, 2.0));
        let comb: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| a + lambda * b).collect();
        let (a, b1, b2) = (act(&gp, &comb)?, act(&gp, &e1)?, act(&gp, &e2)?);
        let expect: Vec<f64> = b1.iter().zip(&b2).map(|(x, y)| x + lambda * y).collect();
        lin = lin.max(max_abs_diff(&a, &expect));
        let gh = g.mult().apply(&c)?;
        fun = fun.max(max_abs_diff(&act(&gp, &act(&hp, &e1)?)?, &act(&gh, &e1)?));
        let x = s.point(g.objects())?;
        uni = uni.max(max_abs_diff(&act(&g.unit().apply(&x)?, &e1)?, &e1));
    }
    for (axiom, residual) in [("linearity", lin), ("functoriality", fun), ("unit", uni)] {
        if residual > ACTION_TOL {
            return Err(Error::Representation { axiom, residual });
        }
    }
    Ok(())
}

/// The example representation of the pair groupoid of `R` on `R × R`:
/// `(x, y)·e = e (1 + x²)/(1 + y²)`.
pub fn pair_action_example() -> SmoothMap {
    SmoothMap::parse("x3*(1 + x1^2)/(1 + x2^2)", 3, 1).expect("action parses")
}

/// Zoo entries constructible by name, with their parameter meaning.
pub const ZOO: &[(&str, &str)] = &[
    ("pair", "pair groupoid M×M ⇉ M; params: dim"),
    ("aff1", "affine group of the line Aff(1) ⇉ pt"),
    ("abelian", "abelian group R^m ⇉ pt; params: dim"),
    ("unit", "unit groupoid M ⇉ M; params: dim"),
    ("vector-bundle", "trivial vector bundle M×R^r ⇉ M; params: dim, fiber_dim"),
    ("gauge", "gauge groupoid of M×R^m; params: dim, group_dim"),
    ("semidirect-pair", "pair groupoid of R acting on R by e(1+x²)/(1+y²)"),
];

/// Builds a zoo groupoid by name; `dim` and `extra` fill the parameters.
pub fn by_name(name: &str, dim: usize, extra: usize) -> Result<Groupoid> {
    let m = Chart::new(format!("R{dim}"), dim);
    Ok(match name {
        "pair" => pair(&m),
        "aff1" => aff1(),
        "abelian" => abelian(dim),
        "unit" => unit(&m),
        "vector-bundle" => vector_bundle(&m, extra),
        "gauge" => gauge(&m, extra),
        "semidirect-pair" => semidirect(&pair(&Chart::new("R1", 1)), pair_action_example(), 1)?,
        other => return Err(Error::Config(format!("unknown zoo groupoid `{other}`"))),
    })
}
