//! The derivations `i_K`, `d`, `L_K` and everything built from them.

use super::index::{binomial, factorial, permutations, sort_with_sign, Basis};
use super::sform::{contract, SForm};
use super::vform::{apply_coeffs, apply_matrix, VForm};
use crate::error::{Error, Result};
use crate::expr::ExprFn;
use crate::smooth::jet::point_depth;
use crate::smooth::{Jet, Mat, SmoothMap, MAX_DEPTH};

/// Largest tolerated `max|K² − K|` for a form treated as a projection.
pub const PROJECTION_TOL: f64 = 1e-9;

fn same_chart(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
            context: "forms on different charts",
        });
    }
    Ok(())
}

fn sign(exp: usize) -> f64 {
    if exp % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The point `x` with `ε_dir` seeded along coordinate `j`.
fn seeded(x: &[Jet], j: usize, dir: usize) -> Vec<Jet> {
    let mut y = x.to_vec();
    y[j] = y[j].with_direction(dir, &Jet::constant(1.0));
    y
}

fn fresh_direction(x: &[Jet]) -> Result<usize> {
    let e = point_depth(x);
    if e >= MAX_DEPTH {
        return Err(Error::DepthExhausted(MAX_DEPTH));
    }
    Ok(e)
}

/// `i_K ω` for `K ∈ Ω^k(N, TN)` and `ω ∈ Ω^p(N)`, through the shuffle
/// expansion of
/// `(i_K ω)(X₁, …) = 1/(k!(p−1)!) Σ_σ sgn σ · ω(K(X_σ1, …, X_σk), X_σ(k+1), …)`.
///
/// For `k = 0` this is the interior product with a vector field. `p = 0`
/// gives the zero form of degree `k − 1`.
pub fn insert(k_form: &VForm, omega: &SForm) -> Result<SForm> {
    same_chart(k_form.dim(), omega.dim())?;
    let (n, k, p) = (omega.dim(), k_form.degree(), omega.degree());
    if p == 0 {
        return zero_of_degree(n, k, 1);
    }
    let q = k + p - 1;
    let out = Basis::get(n, q);
    let (bk, bp) = (Basis::get(n, k), Basis::get(n, p));
    let wk = bk.len();
    // For each output index: (sign, index into K's coefficients, index into ω's).
    let mut plan: Vec<Vec<(f64, usize, usize)>> = Vec::with_capacity(out.len());
    for idx in out.subsets() {
        let mut terms = Vec::new();
        for a in bk.subsets().iter().filter(|a| a.iter().all(|i| idx.contains(i))) {
            let b: Vec<usize> = idx.iter().copied().filter(|i| !a.contains(i)).collect();
            let joined: Vec<usize> = a.iter().chain(&b).copied().collect();
            let shuffle = sort_with_sign(&joined).unwrap().1;
            let ra = bk.rank(a);
            for i in 0..n {
                let mut ib = vec![i];
                ib.extend(&b);
                if let Some((rw, s)) = bp.rank_signed(&ib) {
                    terms.push((shuffle * s, i * wk + ra, rw));
                }
            }
        }
        plan.push(terms);
    }
    let (kf, w) = (k_form.clone(), omega.clone());
    Ok(SForm::from_fn(n, q, move |x| {
        let (ck, cw) = (kf.coeffs(x)?, w.coeffs(x)?);
        Ok(plan
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|&(s, a, b)| (ck[a] * cw[b]).scale(s))
                    .sum()
            })
            .collect())
    }))
}

/// `i_K ω` by the literal normalized sum over all of `S_{k+p−1}`, evaluated
/// on basis vectors. Slow; kept as an independent oracle for [`insert`].
pub fn insert_by_permutations(k_form: &VForm, omega: &SForm) -> Result<SForm> {
    same_chart(k_form.dim(), omega.dim())?;
    let (n, k, p) = (omega.dim(), k_form.degree(), omega.degree());
    if p == 0 {
        return zero_of_degree(n, k, 1);
    }
    let q = k + p - 1;
    let out = Basis::get(n, q);
    let perms = permutations(q);
    let norm = 1.0 / (factorial(k) * factorial(p - 1));
    let (kf, w) = (k_form.clone(), omega.clone());
    Ok(SForm::from_fn(n, q, move |x| {
        let (ck, cw) = (kf.coeffs(x)?, w.coeffs(x)?);
        let unit = |j: usize| {
            let mut v = vec![Jet::ZERO; n];
            v[j] = Jet::constant(1.0);
            v
        };
        Ok(out
            .subsets()
            .iter()
            .map(|idx| {
                let mut acc = Jet::ZERO;
                for (perm, s) in &perms {
                    let args: Vec<Vec<Jet>> = perm.iter().map(|&a| unit(idx[a])).collect();
                    let kv = apply_coeffs(&ck, n, &args[..k]);
                    let mut rest = vec![kv];
                    rest.extend_from_slice(&args[k..]);
                    acc += contract(&cw, n, &rest).scale(*s);
                }
                acc.scale(norm)
            })
            .collect())
    }))
}

fn zero_of_degree(n: usize, k: usize, minus: usize) -> Result<SForm> {
    if k < minus {
        return Err(Error::DegreeMismatch(
            "insertion of a vector field into a function has no degree".into(),
        ));
    }
    Ok(SForm::zero(n, k - minus))
}

/// Coefficients of `ω` at `x` differentiated along every coordinate:
/// entry `j` holds `∂_j ω_J` for all `J`.
pub(crate) fn partials<F>(x: &[Jet], dim: usize, eval: F) -> Result<Vec<Vec<Jet>>>
where
    F: Fn(&[Jet]) -> Result<Vec<Jet>>,
{
    let e = fresh_direction(x)?;
    (0..dim)
        .map(|j| Ok(eval(&seeded(x, j, e))?.iter().map(|v| v.part(e)).collect()))
        .collect()
}

/// Exterior derivative by forward differentiation of the coefficients.
pub fn exterior_d(omega: &SForm) -> SForm {
    let (n, p) = (omega.dim(), omega.degree());
    let out = Basis::get(n, p + 1);
    let bp = Basis::get(n, p);
    // (dω)_I = Σ_a (−1)^a ∂_{i_a} ω_{I∖i_a}
    let plan: Vec<Vec<(f64, usize, usize)>> = out
        .subsets()
        .iter()
        .map(|idx| {
            (0..idx.len())
                .map(|a| {
                    let rest: Vec<usize> = idx.iter().enumerate().filter(|(b, _)| *b != a).map(|(_, &i)| i).collect();
                    (sign(a), idx[a], bp.rank(&rest))
                })
                .collect()
        })
        .collect();
    let w = omega.clone();
    SForm::from_fn(n, p + 1, move |x| {
        if plan.is_empty() {
            return Ok(Vec::new());
        }
        let d = partials(x, n, |y| w.coeffs(y))?;
        Ok(plan
            .iter()
            .map(|terms| terms.iter().map(|&(s, j, r)| d[j][r].scale(s)).sum())
            .collect())
    })
}

/// `L_K ω = d i_K ω − (−1)^{k−1} i_K dω`.
///
/// On functions this reads `L_K f = (−1)^k i_K df`, so `L_X f = X(f)` for a
/// vector field and `L_Id ω = −dω`.
pub fn lie_derivative(k_form: &VForm, omega: &SForm) -> Result<SForm> {
    same_chart(k_form.dim(), omega.dim())?;
    let (n, k, p) = (omega.dim(), k_form.degree(), omega.degree());
    if k + p > n {
        return Ok(SForm::zero(n, k + p));
    }
    let second = insert(k_form, &exterior_d(omega))?;
    let c = -sign(k + 1);
    if p == 0 {
        return Ok(second.scale(c));
    }
    let first = exterior_d(&insert(k_form, omega)?);
    SForm::linear_combination(&[(1.0, first), (c, second)])
}

/// The graded commutator `[L_K, L_L] ω = L_K L_L ω − (−1)^{kl} L_L L_K ω`.
pub fn lie_commutator(k_form: &VForm, l_form: &VForm, omega: &SForm) -> Result<SForm> {
    let (k, l) = (k_form.degree(), l_form.degree());
    let a = lie_derivative(k_form, &lie_derivative(l_form, omega)?)?;
    let b = lie_derivative(l_form, &lie_derivative(k_form, omega)?)?;
    SForm::linear_combination(&[(1.0, a), (-sign(k * l), b)])
}

/// The Frölicher–Nijenhuis bracket, read off from `L_{[K,L]} = [L_K, L_L]`
/// applied to the coordinate functions: `L_M x^i = (−1)^m M^i` for an
/// `m`-form `M`.
pub fn fn_bracket(k_form: &VForm, l_form: &VForm) -> Result<VForm> {
    same_chart(k_form.dim(), l_form.dim())?;
    let n = k_form.dim();
    let m = k_form.degree() + l_form.degree();
    if m > n {
        return Ok(VForm::zero(n, m));
    }
    let comps = (0..n)
        .map(|i| {
            let x_i = SForm::coordinate(n, i);
            Ok(lie_commutator(k_form, l_form, &x_i)?.scale(sign(m)))
        })
        .collect::<Result<Vec<_>>>()?;
    VForm::from_components(comps)
}

/// Pullback `f*ω` through a smooth map, by Jacobian contraction.
pub fn pullback(f: &SmoothMap, omega: &SForm) -> Result<SForm> {
    if f.target_dim() != omega.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.target_dim(),
            found: omega.dim(),
            context: "pullback target chart",
        });
    }
    let (n, p) = (f.source_dim(), omega.degree());
    let out = Basis::get(n, p);
    let (f, w) = (f.clone(), omega.clone());
    Ok(SForm::from_fn(n, p, move |x| {
        let y = f.eval(x)?;
        let c = w.coeffs(&y)?;
        if p == 0 {
            return Ok(c);
        }
        let jac = f.jacobian_jet(x)?;
        let cols: Vec<Vec<Jet>> = (0..n).map(|j| jac.column(j)).collect();
        Ok(out
            .subsets()
            .iter()
            .map(|idx| {
                let vs: Vec<Vec<Jet>> = idx.iter().map(|&j| cols[j].clone()).collect();
                contract(&c, w.dim(), &vs)
            })
            .collect())
    }))
}

/// `K` and its coordinate partials `∂_j K` at `x`, for an endomorphism field.
fn endo_with_partials(k_form: &VForm, x: &[Jet]) -> Result<(Vec<Jet>, Vec<Vec<Jet>>)> {
    let c = k_form.coeffs(x)?;
    let d = partials(x, k_form.dim(), |y| k_form.coeffs(y))?;
    Ok((c, d))
}

fn column(m: &[Jet], n: usize, a: usize) -> Vec<Jet> {
    (0..n).map(|i| m[i * n + a]).collect()
}

/// `D_U (K e_a) = Σ_j U^j ∂_j K e_a`: the derivative of the field `x ↦ K(x)e_a`.
fn directional(d: &[Vec<Jet>], n: usize, u: &[Jet], a: usize) -> Vec<Jet> {
    let mut out = vec![Jet::ZERO; n];
    for (j, uj) in u.iter().enumerate() {
        if uj.norm_inf() == 0.0 {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += *uj * d[j][i * n + a];
        }
    }
    out
}

fn require_endomorphism(k_form: &VForm, what: &str) -> Result<()> {
    if k_form.degree() != 1 {
        return Err(Error::DegreeMismatch(format!(
            "{what} needs a 1-form, found degree {}",
            k_form.degree()
        )));
    }
    Ok(())
}

/// The Nijenhuis tensor from its defining formula
/// `N_K(X, Y) = [KX, KY] − K([KX, Y] + [X, KY]) + K²[X, Y]`,
/// with `X, Y` extended as coordinate-constant fields.
pub fn nijenhuis(k_form: &VForm) -> Result<VForm> {
    require_endomorphism(k_form, "the Nijenhuis tensor")?;
    let n = k_form.dim();
    let pairs = Basis::get(n, 2);
    let kf = k_form.clone();
    Ok(VForm::from_fn(n, 2, move |x| {
        let w = pairs.len();
        let mut out = vec![Jet::ZERO; n * w];
        let (c, d) = endo_with_partials(&kf, x)?;
        for (r, ab) in pairs.subsets().iter().enumerate() {
            let (a, b) = (ab[0], ab[1]);
            let (kx, ky) = (column(&c, n, a), column(&c, n, b));
            // [KX, KY] = D_{KX}(KY) − D_{KY}(KX); [KX, Y] = −D_Y(KX); [X, KY] = D_X(KY).
            let d_kx_ky = directional(&d, n, &kx, b);
            let d_ky_kx = directional(&d, n, &ky, a);
            let d_y_kx: Vec<Jet> = (0..n).map(|i| d[b][i * n + a]).collect();
            let d_x_ky: Vec<Jet> = (0..n).map(|i| d[a][i * n + b]).collect();
            let inner: Vec<Jet> = (0..n).map(|i| d_x_ky[i] - d_y_kx[i]).collect();
            let k_inner = apply_matrix(&c, &inner);
            for i in 0..n {
                out[i * w + r] = d_kx_ky[i] - d_ky_kx[i] - k_inner[i];
            }
        }
        Ok(out)
    }))
}

/// `max |K² − K|` at `x`, on value parts.
pub fn projection_residual(c: &[Jet], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let sq: f64 = (0..n).map(|a| c[i * n + a].value() * c[a * n + j].value()).sum();
            worst = worst.max((sq - c[i * n + j].value()).abs());
        }
    }
    worst
}

/// Curvature of a projection, `R_K(X, Y) = K([(Id − K)X, (Id − K)Y])`.
///
/// Every evaluation checks `K² = K` at the evaluation point and fails with
/// [`Error::NotAProjection`] beyond [`PROJECTION_TOL`].
pub fn curvature(k_form: &VForm) -> Result<VForm> {
    require_endomorphism(k_form, "projection curvature")?;
    let n = k_form.dim();
    let pairs = Basis::get(n, 2);
    let kf = k_form.clone();
    Ok(VForm::from_fn(n, 2, move |x| {
        let w = pairs.len();
        let mut out = vec![Jet::ZERO; n * w];
        let (c, d) = endo_with_partials(&kf, x)?;
        let residual = projection_residual(&c, n);
        if residual > PROJECTION_TOL {
            return Err(Error::NotAProjection {
                residual,
                tolerance: PROJECTION_TOL,
            });
        }
        for (r, ab) in pairs.subsets().iter().enumerate() {
            let (a, b) = (ab[0], ab[1]);
            let hx: Vec<Jet> = (0..n).map(|i| unit(i, a) - c[i * n + a]).collect();
            let hy: Vec<Jet> = (0..n).map(|i| unit(i, b) - c[i * n + b]).collect();
            // D_U(HY) = −D_U(K e_b), so [HX, HY] = −D_{HX}(K e_b) + D_{HY}(K e_a).
            let t1 = directional(&d, n, &hx, b);
            let t2 = directional(&d, n, &hy, a);
            let bracket: Vec<Jet> = (0..n).map(|i| t2[i] - t1[i]).collect();
            for (i, v) in apply_matrix(&c, &bracket).into_iter().enumerate() {
                out[i * w + r] = v;
            }
        }
        Ok(out)
    }))
}

fn unit(i: usize, j: usize) -> Jet {
    Jet::constant(if i == j { 1.0 } else { 0.0 })
}

/// Co-curvature: the curvature of the complementary projection `Id − K`.
pub fn cocurvature(k_form: &VForm) -> Result<VForm> {
    require_endomorphism(k_form, "projection co-curvature")?;
    curvature(&(VForm::identity(k_form.dim()) - k_form.clone()))
}

/// Checks `K² = K` at the given points; returns the worst residual.
pub fn check_projection(k_form: &VForm, points: &[Vec<f64>]) -> Result<f64> {
    require_endomorphism(k_form, "a projection")?;
    let mut worst: f64 = 0.0;
    for p in points {
        let c = k_form.coeffs(&crate::smooth::jet::constants(p))?;
        worst = worst.max(projection_residual(&c, k_form.dim()));
    }
    if worst > PROJECTION_TOL {
        return Err(Error::NotAProjection {
            residual: worst,
            tolerance: PROJECTION_TOL,
        });
    }
    Ok(worst)
}

/// The projection field `S(x) P₀ S(x)⁻¹` for a constant projection matrix `P₀`
/// and an invertible matrix field `S` (row-major, `n²` components).
pub fn conjugated_projection(s: ExprFn, p0: Vec<f64>) -> Result<VForm> {
    let n = s.arity_in();
    if s.arity_out() != n * n || p0.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: s.arity_out().min(p0.len()),
            context: "conjugating matrix entries",
        });
    }
    let p = Mat::from_rows(n, n, p0.iter().map(|&v| Jet::constant(v)).collect());
    Ok(VForm::from_fn(n, 1, move |x| {
        let sm = Mat::from_rows(n, n, s.eval(x)?);
        // Columns of S⁻¹ solve S y = e_j.
        let inv_cols = (0..n)
            .map(|j| sm.solve(&(0..n).map(|i| unit(i, j)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let inv = Mat::from_columns(n, &inv_cols);
        let k = sm.mul(&p).mul(&inv);
        Ok((0..n).flat_map(|i| k.row(i).to_vec()).collect())
    }))
}

/// The form on `N` whose value is assembled from forms `K_j` on charts `N_j`
/// through maps `pr_j: N → N_j` and a map `join: Π N_j → N`:
///
/// `K(X₁, …) = T join (K₁(Tpr₁ X₁, …), …, K_p(Tpr_p X₁, …))`.
///
/// When `join ∘ (pr₁, …, pr_p) = id_N` and `Π K_j` preserves the image of
/// `T(pr₁, …, pr_p)`, this is the restriction of `K₁ × ⋯ × K_p` to `N`; with
/// `join` the identity of a product chart it is the product form itself.
pub fn restricted_product(parts: &[(SmoothMap, VForm)], join: &SmoothMap) -> Result<VForm> {
    let n = join.target_dim();
    let degree = parts.first().map_or(0, |(_, k)| k.degree());
    let mut total = 0;
    for (pr, k) in parts {
        if pr.source_dim() != n || pr.target_dim() != k.dim() || k.degree() != degree {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: pr.source_dim(),
                context: "restricted product factor",
            });
        }
        total += k.dim();
    }
    if join.source_dim() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: join.source_dim(),
            context: "restricted product join",
        });
    }
    let basis = Basis::get(n, degree);
    let parts = parts.to_vec();
    let join = join.clone();
    Ok(VForm::from_fn(n, degree, move |x| {
        let w = basis.len();
        let mut y = Vec::with_capacity(total);
        let mut factors = Vec::with_capacity(parts.len());
        for (pr, k) in &parts {
            let px = pr.eval(x)?;
            let jac = if degree > 0 { Some(pr.jacobian_jet(x)?) } else { None };
            let ck = k.coeffs(&px)?;
            y.extend_from_slice(&px);
            factors.push((jac, ck, k.dim()));
        }
        let jj = join.jacobian_jet(&y)?;
        let mut out = vec![Jet::ZERO; n * w];
        for (r, idx) in basis.subsets().iter().enumerate() {
            let mut stacked = Vec::with_capacity(total);
            for (jac, ck, dim) in &factors {
                let vs: Vec<Vec<Jet>> = idx
                    .iter()
                    .map(|&j| jac.as_ref().unwrap().column(j))
                    .collect();
                stacked.extend(apply_coeffs(ck, *dim, &vs));
            }
            for (i, v) in jj.mul_vec(&stacked).into_iter().enumerate() {
                out[i * w + r] = v;
            }
        }
        Ok(out)
    }))
}

/// The product form `K₁ × ⋯ × K_p` on the product of their charts.
pub fn product_form(parts: &[VForm]) -> Result<VForm> {
    let total: usize = parts.iter().map(VForm::dim).sum();
    let mut offset = 0;
    let mut factors = Vec::with_capacity(parts.len());
    for k in parts {
        factors.push((SmoothMap::block(total, offset, k.dim()), k.clone()));
        offset += k.dim();
    }
    restricted_product(&factors, &SmoothMap::identity(total))
}

/// Number of coefficients of a vector-valued `k`-form on an `n`-chart.
pub fn vform_len(n: usize, k: usize) -> usize {
    n * binomial(n, k)
}
