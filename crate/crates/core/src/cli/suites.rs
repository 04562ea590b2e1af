//! The catalog of verification suites a scenario can request.

use crate::bundle::{
    check_curvature_identity, connection_to_k, curvature_f, k_to_connection, Connection, TrivialBundle,
};
use crate::error::{Error, Result};
use crate::forms::{
    check_f_related, cocurvature, conjugated_projection, curvature, exterior_d, fn_bracket,
    lie_commutator, lie_derivative, max_over_samples, nijenhuis, product_form, restricted_product,
    SForm, VForm,
};
use crate::groupoid::{
    check_distribution_closure, check_invariants, check_multiplicative, mult_lift, zoo, Groupoid,
};
use crate::nerve::{build_nerve, check_bss_derivation, check_simplicial, delta, lift_tower_unchecked};
use crate::sampling::Sampler;
use crate::smooth::jet::constants;
use crate::smooth::linalg::max_abs_diff;
use crate::smooth::{Chart, Jet, SmoothMap};

use super::scenario::{Scenario, SuiteDecl};

/// `(name, default tolerance, default samples, description)`.
pub const SUITES: &[(&str, (f64, usize, &str))] = &[
    ("fn-defining-property", (1e-8, 100, "L_[K,L] = [L_K, L_L] on random forms")),
    ("vector-field-bracket", (1e-10, 50, "degree-0 bracket equals the Jacobian Lie bracket")),
    ("nijenhuis", (1e-8, 50, "½[K,K] = N_K")),
    ("curvature-splitting", (1e-8, 50, "½[K,K] = R_K + R̄_K for projections")),
    ("heisenberg-curvature", (1e-10, 50, "R_K(∂x, ∂y) = ∂z for the Heisenberg projection")),
    ("naturality", (1e-7, 50, "brackets of f-related forms are f-related")),
    ("2-frolicher", (1e-7, 30, "[K,L]^(2) = [K^(2), L^(2)] on composable pairs")),
    ("groupoid-invariants", (1e-9, 50, "groupoid axioms at random samples")),
    ("multiplicative", (1e-7, 50, "check_multiplicative of declared forms")),
    ("compatible", (1e-7, 50, "brackets of multiplicative forms are multiplicative")),
    ("distribution-closure", (1e-9, 30, "image and kernel of a projection closed under Tm")),
    ("connection-round-trip", (1e-9, 50, "connections ↔ multiplicative projections")),
    ("curvature-identity", (1e-8, 30, "R'_K = s*F − t*F and F(∂x, ∂y) = 1 for A = x dy")),
    ("nerve-simplicial", (1e-12, 100, "face and degeneracy identities")),
    ("nerve-delta", (1e-9, 20, "δ² = 0")),
    ("nerve-bss", (1e-7, 10, "D commutes with degeneracies, δ and d")),
];

pub fn defaults(name: &str) -> Option<(f64, usize)> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, (t, s, _))| (*t, *s))
}

/// Largest residual and the number of samples it was taken over.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub max_residual: f64,
    pub samples: usize,
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    decl: &'a SuiteDecl,
    samples: usize,
}

impl Ctx<'_> {
    fn forms(&self) -> Result<Vec<VForm>> {
        self.decl.forms.iter().map(|f| self.scenario.form(f)).collect()
    }

    fn outcome(&self, max_residual: f64) -> Outcome {
        Outcome {
            max_residual,
            samples: self.samples,
        }
    }
}

pub fn run_suite(scenario: &Scenario, decl: &SuiteDecl, sampler: &mut Sampler) -> Result<Outcome> {
    let (_, default_samples) =
        defaults(&decl.suite).ok_or_else(|| Error::Config(format!("unknown suite `{}`", decl.suite)))?;
    let ctx = Ctx {
        scenario,
        decl,
        samples: decl.samples.unwrap_or(default_samples),
    };
    let s = sampler;
    match decl.suite.as_str() {
        "fn-defining-property" => defining_property(&ctx, s),
        "vector-field-bracket" => vector_field_bracket(&ctx, s),
        "nijenhuis" => nijenhuis_suite(&ctx, s),
        "curvature-splitting" => curvature_splitting(&ctx, s),
        "heisenberg-curvature" => heisenberg_curvature(&ctx, s),
        "naturality" => naturality(&ctx, s),
        "2-frolicher" => two_frolicher(&ctx, s),
        "groupoid-invariants" => {
            let g = scenario.groupoid()?;
            Ok(ctx.outcome(check_invariants(&g, s, ctx.samples)?.max_residual()))
        }
        "multiplicative" => multiplicative(&ctx, s),
        "compatible" => compatible(&ctx, s),
        "distribution-closure" => closure(&ctx, s),
        "connection-round-trip" => round_trip(&ctx, s),
        "curvature-identity" => curvature_identity(&ctx, s),
        "nerve-simplicial" => {
            let g = scenario.groupoid()?;
            let n = build_nerve(&g, g.max_level().min(3))?;
            Ok(ctx.outcome(check_simplicial(&n, s, ctx.samples)?))
        }
        "nerve-delta" => nerve_delta(&ctx, s),
        "nerve-bss" => nerve_bss(&ctx, s),
        other => Err(Error::Config(format!("unknown suite `{other}`"))),
    }
}

fn heisenberg() -> VForm {
    VForm::from_terms(3, 1, &[(2, &[2], "1"), (2, &[1], "-x1")]).expect("fixed form parses")
}

/// Max over `samples` random points of `chart` of the coefficient difference.
fn compare_v(a: &VForm, b: &VForm, chart: &Chart, s: &mut Sampler, samples: usize) -> Result<f64> {
    let pts = (0..samples).map(|_| s.point(chart)).collect::<Result<Vec<_>>>()?;
    Ok(max_over_samples(&pts, |p| Ok(max_abs_diff(&a.coeffs_at(p)?, &b.coeffs_at(p)?)))?.0)
}

fn compare_s(a: &SForm, b: &SForm, chart: &Chart, s: &mut Sampler, samples: usize) -> Result<f64> {
    let pts = (0..samples).map(|_| s.point(chart)).collect::<Result<Vec<_>>>()?;
    Ok(max_over_samples(&pts, |p| Ok(max_abs_diff(&a.coeffs_at(p)?, &b.coeffs_at(p)?)))?.0)
}

fn pair_of(ctx: &Ctx, s: &mut Sampler, defaults: &[(usize, usize)], dim: usize) -> Result<Vec<(VForm, VForm)>> {
    let forms = ctx.forms()?;
    match forms.len() {
        0 => Ok(defaults
            .iter()
            .map(|&(k, l)| (s.random_vform(dim, k), s.random_vform(dim, l)))
            .collect()),
        2 => Ok(vec![(forms[0].clone(), forms[1].clone())]),
        n => Err(Error::Config(format!("suite `{}` takes 0 or 2 forms, got {n}", ctx.decl.suite))),
    }
}

fn defining_property(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (k, l) in pair_of(ctx, s, &[(1, 1), (1, 2), (0, 1)], 3)? {
        let n = k.dim();
        let chart = Chart::new(format!("R{n}"), n);
        let br = fn_bracket(&k, &l)?;
        for p in 0..=1 {
            let omega = s.random_sform(n, p);
            let lhs = lie_derivative(&br, &omega)?;
            let rhs = lie_commutator(&k, &l, &omega)?;
            worst = worst.max(compare_s(&lhs, &rhs, &chart, s, ctx.samples)?);
        }
    }
    Ok(ctx.outcome(worst))
}

/// Jacobian of a vector field by forward differentiation of its components.
fn field_jacobian(x: &VForm, p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = x.dim();
    (0..n)
        .map(|j| {
            let mut pt = constants(p);
            pt[j] = Jet::seeded(p[j], 0);
            Ok(x.coeffs(&pt)?.iter().map(|c| c.derivative(0)).collect())
        })
        .collect()
}

fn vector_field_bracket(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (x, y) in pair_of(ctx, s, &[(0, 0), (0, 0)], 3)? {
        if x.degree() != 0 || y.degree() != 0 {
            return Err(Error::Config("vector-field-bracket needs degree-0 forms".into()));
        }
        let n = x.dim();
        let chart = Chart::new(format!("R{n}"), n);
        let br = fn_bracket(&x, &y)?;
        let pts = (0..ctx.samples).map(|_| s.point(&chart)).collect::<Result<Vec<_>>>()?;
        let (r, _) = max_over_samples(&pts, |p| {
            // [X, Y] = DY·X − DX·Y, with column j of the Jacobian ∂_j.
            let (xv, yv) = (x.coeffs_at(p)?, y.coeffs_at(p)?);
            let (dx, dy) = (field_jacobian(&x, p)?, field_jacobian(&y, p)?);
            let expect: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| dy[j][i] * xv[j] - dx[j][i] * yv[j]).sum())
                .collect();
            Ok(max_abs_diff(&br.coeffs_at(p)?, &expect))
        })?;
        worst = worst.max(r);
    }
    Ok(ctx.outcome(worst))
}

fn nijenhuis_suite(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let mut forms = ctx.forms()?;
    if forms.is_empty() {
        forms = vec![s.random_vform(3, 1), s.random_vform(2, 1)];
    }
    let mut worst: f64 = 0.0;
    for k in forms {
        let chart = Chart::new(format!("R{}", k.dim()), k.dim());
        let half = fn_bracket(&k, &k)?.scale(0.5);
        worst = worst.max(compare_v(&half, &nijenhuis(&k)?, &chart, s, ctx.samples)?);
    }
    Ok(ctx.outcome(worst))
}

fn curvature_splitting(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let mut forms = ctx.forms()?;
    if forms.is_empty() {
        let flat = VForm::from_terms(3, 1, &[(2, &[2], "1"), (2, &[0], "-x2"), (2, &[1], "-x1")])?;
        let p0 = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        forms = vec![heisenberg(), flat, conjugated_projection(s.unit_upper_triangular(3), p0)?];
    }
    let mut worst: f64 = 0.0;
    for k in forms {
        let chart = Chart::new(format!("R{}", k.dim()), k.dim());
        let half = fn_bracket(&k, &k)?.scale(0.5);
        let sum = curvature(&k)? + cocurvature(&k)?;
        worst = worst.max(compare_v(&half, &sum, &chart, s, ctx.samples)?);
    }
    Ok(ctx.outcome(worst))
}

fn heisenberg_curvature(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let r = curvature(&heisenberg())?;
    let chart = Chart::new("R3", 3);
    let pts = (0..ctx.samples).map(|_| s.point(&chart)).collect::<Result<Vec<_>>>()?;
    let (worst, _) = max_over_samples(&pts, |p| {
        let v = r.eval_at(p, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])?;
        Ok(max_abs_diff(&v, &[0.0, 0.0, 1.0]))
    })?;
    Ok(ctx.outcome(worst))
}

/// Transports forms on `R²` along `f(x, y) = (x, y + x²)` and checks that
/// brackets of `f`-related forms are `f`-related.
fn naturality(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let f = SmoothMap::parse("x1; x2 + x1^2", 2, 2)?;
    let f_inv = SmoothMap::parse("x1; x2 - x1^2", 2, 2)?;
    let chart = Chart::new("R2", 2);
    let push = |k: &VForm| restricted_product(&[(f_inv.clone(), k.clone())], &f);
    let mut worst: f64 = 0.0;
    for (k, l) in pair_of(ctx, s, &[(1, 0), (1, 1)], 2)? {
        let br = fn_bracket(&k, &l)?;
        let br_pushed = fn_bracket(&push(&k)?, &push(&l)?)?;
        let r = check_f_related(&f, &chart, &br, &br_pushed, s, ctx.samples)?;
        worst = worst.max(r.max_residual);
        // Through the projection M × M → M.
        let pr = SmoothMap::block(4, 0, 2);
        let (k2, l2) = (s.random_vform(2, k.degree()), s.random_vform(2, l.degree()));
        let prod = fn_bracket(&product_form(&[k.clone(), k2])?, &product_form(&[l.clone(), l2])?)?;
        let r = check_f_related(&pr, &Chart::new("R2×R2", 4), &prod, &br, s, ctx.samples)?;
        worst = worst.max(r.max_residual);
    }
    Ok(ctx.outcome(worst))
}

fn pair_product_forms(s: &mut Sampler) -> Result<(Groupoid, VForm, VForm, VForm, VForm)> {
    let g = zoo::pair(&Chart::new("R2", 2));
    let (km, lm) = (s.random_vform(2, 1), s.random_vform(2, 0));
    let k = product_form(&[km.clone(), km.clone()])?;
    let l = product_form(&[lm.clone(), lm.clone()])?;
    Ok((g, k, km, l, lm))
}

fn two_frolicher(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let (g, k, l) = if ctx.decl.forms.is_empty() {
        let (g, k, _, l, _) = pair_product_forms(s)?;
        (g, k, l)
    } else {
        let f = ctx.forms()?;
        if f.len() != 2 {
            return Err(Error::Config("2-frolicher takes 0 or 2 forms".into()));
        }
        (ctx.scenario.groupoid()?, f[0].clone(), f[1].clone())
    };
    let lhs = mult_lift(&g, &fn_bracket(&k, &l)?)?;
    let rhs = fn_bracket(&mult_lift(&g, &k)?, &mult_lift(&g, &l)?)?;
    Ok(ctx.outcome(compare_v(&lhs, &rhs, &g.comp().chart, s, ctx.samples)?))
}

/// Declared `[K, K_M]`, or the identities.
fn form_and_base(ctx: &Ctx, g: &Groupoid) -> Result<(VForm, VForm)> {
    let f = ctx.forms()?;
    match f.len() {
        0 => Ok((VForm::identity(g.arrows().dim()), VForm::identity(g.objects().dim()))),
        2 => Ok((f[0].clone(), f[1].clone())),
        n => Err(Error::Config(format!("suite `{}` takes 0 or 2 forms, got {n}", ctx.decl.suite))),
    }
}

fn multiplicative(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let g = ctx.scenario.groupoid()?;
    let (k, km) = form_and_base(ctx, &g)?;
    Ok(ctx.outcome(check_multiplicative(&g, &k, &km, s, ctx.samples)?.max_residual()))
}

fn x_dy() -> Result<Connection> {
    Connection::parse(&TrivialBundle::new(Chart::new("R2", 2), 1), &["0; x1"])
}

fn compatible(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let (g, k, km, l, lm) = pair_product_forms(s)?;
    let r = check_multiplicative(&g, &fn_bracket(&k, &l)?, &fn_bracket(&km, &lm)?, s, ctx.samples)?;
    worst = worst.max(r.max_residual());

    let conn = x_dy()?;
    let g = conn.bundle().gauge_groupoid();
    let k = connection_to_k(&conn);
    let rk = curvature(&k)?;
    let zero = VForm::zero(2, 1);
    for (l, lm) in [(VForm::identity(5), VForm::identity(2)), (rk, VForm::zero(2, 2))] {
        let r = check_multiplicative(&g, &fn_bracket(&k, &l)?, &fn_bracket(&zero, &lm)?, s, ctx.samples)?;
        worst = worst.max(r.max_residual());
    }
    Ok(ctx.outcome(worst))
}

fn closure(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let (g, k) = match ctx.forms()?.as_slice() {
        [] => {
            let conn = x_dy()?;
            (conn.bundle().gauge_groupoid(), connection_to_k(&conn))
        }
        [k] => (ctx.scenario.groupoid()?, k.clone()),
        _ => return Err(Error::Config("distribution-closure takes 0 or 1 forms".into())),
    };
    let r = check_distribution_closure(&g, &k, s, ctx.samples)?;
    Ok(ctx.outcome(r.image.max_residual.max(r.kernel.max_residual)))
}

fn connections(ctx: &Ctx, s: &mut Sampler) -> Result<Vec<Connection>> {
    if let Some(c) = ctx.scenario.connection()? {
        return Ok(vec![c]);
    }
    let b = TrivialBundle::new(Chart::new("R2", 2), 1);
    Ok(vec![
        Connection::flat(&b),
        Connection::parse(&b, &["0; x1"])?,
        Connection::parse(&b, &["0; x1^2"])?,
        Connection::new(&b, vec![s.random_sform(2, 1)])?,
    ])
}

fn round_trip(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let conns = connections(ctx, s)?;
    for conn in &conns {
        let b = conn.bundle();
        let k = connection_to_k(conn);
        let back = k_to_connection(b, &k)?;
        let g = b.gauge_groupoid();
        worst = worst.max(compare_v(&k, &connection_to_k(&back), g.arrows(), s, ctx.samples)?);
        for (a, a2) in conn.potential().iter().zip(back.potential()) {
            worst = worst.max(compare_s(a, a2, b.base(), s, ctx.samples)?);
        }
    }
    // The identity is not a connection projection.
    let b = conns[0].bundle();
    let w = 2 * b.base_dim() + b.group_dim();
    if k_to_connection(b, &VForm::identity(w)).is_ok() {
        worst = f64::INFINITY;
    }
    Ok(ctx.outcome(worst))
}

fn curvature_identity(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut conns = connections(ctx, s)?;
    if ctx.scenario.connection.is_none() {
        conns.pop();
        let f = curvature_f(&x_dy()?)?;
        let chart = Chart::new("R2", 2);
        let one = SForm::parse_function("1", 2)?;
        let pts = (0..ctx.samples).map(|_| s.point(&chart)).collect::<Result<Vec<_>>>()?;
        for p in &pts {
            worst = worst.max((f[0].coeffs_at(p)?[0] - one.coeffs_at(p)?[0]).abs());
        }
    }
    for conn in conns {
        let r = check_curvature_identity(&conn, s, ctx.samples)?;
        worst = worst.max(r.identity.max_residual).max(r.vertical);
    }
    Ok(ctx.outcome(worst))
}

fn nerve_delta(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let g = ctx.scenario.groupoid()?;
    let n = build_nerve(&g, g.max_level().min(3))?;
    let mut worst: f64 = 0.0;
    for p in 0..=n.max_level().saturating_sub(2) {
        let lv = n.level(p)?;
        for q in 0..=lv.chart.dim().min(1) {
            let w = s.random_sform(lv.chart.dim(), q);
            let dd = delta(&n, p + 2, &delta(&n, p + 1, &w)?)?;
            let zero = SForm::zero(dd.dim(), dd.degree());
            worst = worst.max(compare_s(&dd, &zero, &n.level(p + 2)?.chart, s, ctx.samples)?);
        }
    }
    // d and δ commute.
    let lv = n.level(1)?;
    let w = s.random_sform(n.level(0)?.chart.dim(), 0);
    let a = exterior_d(&delta(&n, 1, &w)?);
    let b = delta(&n, 1, &exterior_d(&w))?;
    worst = worst.max(compare_s(&a, &b, &lv.chart, s, ctx.samples)?);
    Ok(ctx.outcome(worst))
}

fn nerve_bss(ctx: &Ctx, s: &mut Sampler) -> Result<Outcome> {
    let g = ctx.scenario.groupoid()?;
    let n = build_nerve(&g, g.max_level().min(3))?;
    let (k, km) = form_and_base(ctx, &g)?;
    let mut tower = lift_tower_unchecked(&g, &n, &k, &km)?;
    if let Some(eps) = ctx.decl.perturb {
        let z = s.random_vform(n.level(2)?.chart.dim(), k.degree());
        tower = tower.perturbed(2, &z, eps)?;
    }
    let r = check_bss_derivation(&n, &tower, s, ctx.samples)?;
    Ok(ctx.outcome(r.max_residual()))
}

