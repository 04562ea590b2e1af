use fnbrack::forms::{
    conjugated_projection, curvature, fn_bracket, nijenhuis, product_form, VForm,
};
use fnbrack::groupoid::{
    check_distribution_closure, check_invariants, check_multiplicative, check_unit_inverse_related,
    lie_group_mult_check, mult_lift, tangent_groupoid, whitney_sum, zoo, Groupoid,
};
use fnbrack::sampling::Sampler;
use fnbrack::smooth::{Chart, SmoothMap};
use fnbrack::Error;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn zoo_list() -> Vec<Groupoid> {
    let r1 = Chart::new("R1", 1);
    let r2 = Chart::new("R2", 2);
    vec![
        zoo::pair(&r2),
        zoo::aff1(),
        zoo::abelian(2),
        zoo::unit(&r2),
        zoo::vector_bundle(&r2, 1),
        zoo::gauge(&r1, 1),
        zoo::gauge(&r2, 1),
        zoo::semidirect(&zoo::pair(&r1), zoo::pair_action_example(), 1).unwrap(),
        zoo::product(&zoo::aff1(), &zoo::pair(&r1)),
    ]
}

fn projection_on_r2(s: &mut Sampler) -> VForm {
    conjugated_projection(s.unit_upper_triangular(2), vec![1.0, 0.0, 0.0, 0.0]).unwrap()
}

#[test]
fn zoo_satisfies_groupoid_axioms() {
    let s = Sampler::new(100);
    for g in zoo_list() {
        let r = check_invariants(&g, &mut s.derive(g.name()), 50).unwrap();
        assert!(r.passes(1e-9), "{}: {:?}", g.name(), r);
        let tg = tangent_groupoid(&g);
        let r = check_invariants(&tg, &mut s.derive(tg.name()), 20).unwrap();
        assert!(r.passes(1e-9), "{}: {:?}", tg.name(), r);
    }
}

#[test]
fn invariants_detect_a_broken_multiplication() {
    let r1 = Chart::new("R1", 1);
    let p = zoo::pair(&r1);
    // (x, y)(y, z) = (z, x) is not even source-compatible.
    let bad = Groupoid::from_parts(
        "bad",
        p.arrows().clone(),
        p.objects().clone(),
        p.source().clone(),
        p.target().clone(),
        p.unit().clone(),
        p.inverse().clone(),
        SmoothMap::select(3, vec![2, 0]),
        vec![p.strings(2).unwrap().clone()],
    )
    .unwrap();
    let r = check_invariants(&bad, &mut Sampler::new(1), 10).unwrap();
    assert!(r.get("source_mult").unwrap() > 1e-3);
    assert!(!r.passes(1e-9));
}

#[test]
fn whitney_sums_of_aff1() {
    let g = zoo::aff1();
    for k in [2, 3] {
        let w = whitney_sum(&g, k);
        assert_eq!(w.arrows().dim(), 2 * (k + 1));
        let r = check_invariants(&w, &mut Sampler::new(k as u64), 20).unwrap();
        assert!(r.passes(1e-9), "k = {k}: {r:?}");
    }
}

#[test]
fn whitney_source_on_pair_groupoid() {
    let w = whitney_sum(&zoo::pair(&Chart::new("R1", 1)), 2);
    // ((x, y), (u1, v1), (u2, v2)) ↦ (y, v1, v2)
    let out = w.source().apply(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    assert_eq!(out, vec![2.0, 4.0, 6.0]);
    let t = tangent_groupoid(&zoo::pair(&Chart::new("R1", 1)));
    let one = whitney_sum(&zoo::pair(&Chart::new("R1", 1)), 1);
    let x = [0.3, -0.2, 0.7, 0.1];
    assert_eq!(t.source().apply(&x).unwrap(), one.source().apply(&x).unwrap());
}

/// Central differences of the Aff(1) product.
fn tm_fd(g: [f64; 2], h: [f64; 2], x: [f64; 2], y: [f64; 2]) -> Vec<f64> {
    let m = |g: [f64; 2], h: [f64; 2]| [g[0] * h[0], g[0] * h[1] + g[1]];
    let e = 1e-6;
    let shift = |p: [f64; 2], v: [f64; 2], t: f64| [p[0] + t * v[0], p[1] + t * v[1]];
    let plus = m(shift(g, x, e), shift(h, y, e));
    let minus = m(shift(g, x, -e), shift(h, y, -e));
    (0..2).map(|i| (plus[i] - minus[i]) / (2.0 * e)).collect()
}

#[test]
fn tangent_multiplication_on_aff1() {
    let tg = tangent_groupoid(&zoo::aff1());
    let out = tg.multiply(&[2.0, 1.0, 1.0, 0.0], &[3.0, 4.0, 0.0, 1.0]).unwrap();
    assert_eq!(out, vec![6.0, 9.0, 3.0, 6.0]);
    assert!(max_diff(&out[2..], &tm_fd([2.0, 1.0], [3.0, 4.0], [1.0, 0.0], [0.0, 1.0])) < 1e-8);
}

#[test]
fn right_trivialized_tangent_product() {
    // Tm(X, Y) = Tr_{gh}(u + Ad_g v) with u = Tr_{g⁻¹} X, v = Tr_{h⁻¹} Y.
    // For Aff(1), right translation by (c, d) is (a, b) ↦ (ac, ad + b), with
    // Jacobian [[c, 0], [d, 1]]; Ad_{(a,b)} = [[1, 0], [-b, a]].
    let g = zoo::aff1();
    let tg = tangent_groupoid(&g);
    let mut s = Sampler::new(7);
    for _ in 0..30 {
        let a = s.point(g.arrows()).unwrap();
        let b = s.point(g.arrows()).unwrap();
        let (x, y) = (s.vector(2), s.vector(2));
        let tr = |p: &[f64], v: &[f64]| vec![p[0] * v[0], p[1] * v[0] + v[1]];
        let tr_inv = |p: &[f64], v: &[f64]| vec![v[0] / p[0], v[1] - p[1] * v[0] / p[0]];
        let u = tr_inv(&a, &x);
        let v = tr_inv(&b, &y);
        let ad_v = [v[0], -a[1] * v[0] + a[0] * v[1]];
        let ab = g.multiply(&a, &b).unwrap();
        let expect = tr(&ab, &[u[0] + ad_v[0], u[1] + ad_v[1]]);
        let got = tg
            .multiply(&[a.clone(), x].concat(), &[b.clone(), y].concat())
            .unwrap();
        assert!(max_diff(&got[..2], &ab) < 1e-12);
        assert!(max_diff(&got[2..], &expect) < 1e-8, "{got:?} vs {expect:?}");
    }
}

#[test]
fn identity_and_zero_are_multiplicative() {
    for g in zoo_list() {
        let (n, m) = (g.arrows().dim(), g.objects().dim());
        let mut s = Sampler::new(3).derive(g.name());
        let r = check_multiplicative(&g, &VForm::identity(n), &VForm::identity(m), &mut s, 20).unwrap();
        assert!(r.max_residual() < 1e-12, "{}: {r:?}", g.name());
        for deg in [1, 2] {
            let r = check_multiplicative(&g, &VForm::zero(n, deg), &VForm::zero(m, deg), &mut s, 10).unwrap();
            assert_eq!(r.max_residual(), 0.0);
            assert!(r.pass);
        }
    }
}

#[test]
fn product_forms_on_pair_groupoid() {
    let mut s = Sampler::new(4);
    let m = Chart::new("R2", 2);
    let g = zoo::pair(&m);
    for deg in [0, 1, 2] {
        let km = s.random_vform(2, deg);
        let k = product_form(&[km.clone(), km.clone()]).unwrap();
        let r = check_multiplicative(&g, &k, &km, &mut s, 30).unwrap();
        assert!(r.max_residual() < 1e-9, "degree {deg}: {r:?}");
        let r = check_unit_inverse_related(&g, &k, &km, &mut s, 20).unwrap();
        assert!(r.max_residual < 1e-9);
        // Mismatched factors are not multiplicative.
        let other = s.random_vform(2, deg);
        let k = product_form(&[km.clone(), other]).unwrap();
        let r = check_multiplicative(&g, &k, &km, &mut s, 30).unwrap();
        assert!(!r.pass, "degree {deg}");
    }
}

#[test]
fn multiplicative_check_rejects_bad_inputs() {
    let g = zoo::pair(&Chart::new("R1", 1));
    let mut s = Sampler::new(5);
    let r = check_multiplicative(&g, &VForm::identity(2), &VForm::zero(1, 2), &mut s, 5);
    assert!(matches!(r, Err(Error::DegreeMismatch(_))));
    let r = lie_group_mult_check(&g, &VForm::identity(2), &mut s, 5);
    assert!(matches!(r, Err(Error::NotAGroup(1))));
}

#[test]
fn lie_group_checkers_agree() {
    // Abelian: constant 1-forms are multiplicative. Constant 2-forms are not,
    // because of the cross terms K(X₁, Y₂) + K(Y₁, X₂).
    let g = zoo::abelian(3);
    let mut s = Sampler::new(6);
    for deg in [1, 2] {
        let k = VForm::from_fn(3, deg, {
            let c: Vec<f64> = (0..fnbrack::forms::vform_len(3, deg)).map(|_| s.uniform(-1.0, 1.0)).collect();
            move |_| Ok(fnbrack::smooth::jet::constants(&c))
        });
        let a = lie_group_mult_check(&g, &k, &mut Sampler::new(60), 20).unwrap();
        let b = check_multiplicative(&g, &k, &VForm::zero(0, deg), &mut Sampler::new(60), 20).unwrap();
        if deg == 1 {
            assert!(a.max_residual() < 1e-10 && b.max_residual() < 1e-10);
        } else {
            let (ra, rb) = (a.max_residual(), b.max_residual());
            assert!(ra > 1e-3 && (ra - rb).abs() < 1e-9, "{ra} vs {rb}");
        }
    }

    let g = zoo::aff1();
    let a = lie_group_mult_check(&g, &VForm::identity(2), &mut Sampler::new(61), 20).unwrap();
    assert!(a.max_residual() < 1e-9);

    // Right-trivially constant diag(0, 1), which does not commute with Ad.
    let k = VForm::parse("0; 0; -x2/x1; 1", 2, 1).unwrap();
    let a = lie_group_mult_check(&g, &k, &mut Sampler::new(62), 30).unwrap();
    let b = check_multiplicative(&g, &k, &VForm::zero(0, 1), &mut Sampler::new(62), 30).unwrap();
    assert!(!a.pass && !b.pass);
    let (ra, rb) = (a.m_related.max_residual, b.m_related.max_residual);
    assert!(ra > 1e-3 && (ra - rb).abs() < 0.1 * rb, "{ra} vs {rb}");
}

fn pair_forms(s: &mut Sampler) -> (Groupoid, VForm, VForm, VForm, VForm) {
    let g = zoo::pair(&Chart::new("R2", 2));
    let km = s.random_vform(2, 1);
    let lm = s.random_vform(2, 0);
    let k = product_form(&[km.clone(), km.clone()]).unwrap();
    let l = product_form(&[lm.clone(), lm.clone()]).unwrap();
    (g, k, km, l, lm)
}

#[test]
fn brackets_of_multiplicative_forms_are_multiplicative() {
    let mut s = Sampler::new(8);
    let (g, k, km, l, lm) = pair_forms(&mut s);
    for (a, am, b, bm) in [(&k, &km, &l, &lm), (&k, &km, &k, &km)] {
        let br = fn_bracket(a, b).unwrap();
        let brm = fn_bracket(am, bm).unwrap();
        let r = check_multiplicative(&g, &br, &brm, &mut s, 50).unwrap();
        assert!(r.max_residual() < 1e-7, "{r:?}");
    }
}

#[test]
fn bracket_commutes_with_mult_lift() {
    let mut s = Sampler::new(9);
    let (g, k, _, l, _) = pair_forms(&mut s);
    let lhs = mult_lift(&g, &fn_bracket(&k, &l).unwrap()).unwrap();
    let rhs = fn_bracket(&mult_lift(&g, &k).unwrap(), &mult_lift(&g, &l).unwrap()).unwrap();
    for _ in 0..20 {
        let c = s.point(&g.comp().chart).unwrap();
        let d = max_diff(&lhs.coeffs_at(&c).unwrap(), &rhs.coeffs_at(&c).unwrap());
        assert!(d < 1e-7, "{d}");
    }
}

#[test]
fn nijenhuis_and_curvature_are_multiplicative() {
    let mut s = Sampler::new(10);
    let (g, k, km, _, _) = pair_forms(&mut s);
    let r = check_multiplicative(&g, &nijenhuis(&k).unwrap(), &nijenhuis(&km).unwrap(), &mut s, 30).unwrap();
    assert!(r.max_residual() < 1e-7, "{r:?}");

    let pm = projection_on_r2(&mut s);
    let p = product_form(&[pm.clone(), pm.clone()]).unwrap();
    let r = check_multiplicative(&g, &p, &pm, &mut s, 30).unwrap();
    assert!(r.pass);
    let r = check_multiplicative(&g, &curvature(&p).unwrap(), &curvature(&pm).unwrap(), &mut s, 30).unwrap();
    assert!(r.max_residual() < 1e-7, "{r:?}");
}

#[test]
fn closure_of_image_and_kernel() {
    let mut s = Sampler::new(11);
    // Multiplicative projection: both distributions closed.
    let g = zoo::pair(&Chart::new("R2", 2));
    let pm = projection_on_r2(&mut s);
    let p = product_form(&[pm.clone(), pm.clone()]).unwrap();
    let r = check_distribution_closure(&g, &p, &mut s, 30).unwrap();
    assert!(r.passes(1e-9), "{r:?}");

    // On the gauge groupoid of R×R in (a, b, k): dk⊗∂k is multiplicative,
    // while (dk + k da)⊗∂k has a kernel that is not closed under Tm.
    let g = zoo::gauge(&Chart::new("R1", 1), 1);
    let good = VForm::from_terms(3, 1, &[(2, &[2], "1")]).unwrap();
    let bad = VForm::from_terms(3, 1, &[(2, &[2], "1"), (2, &[0], "x3")]).unwrap();
    let zero = VForm::zero(1, 1);
    let r = check_distribution_closure(&g, &good, &mut s, 30).unwrap();
    assert!(r.passes(1e-9), "{r:?}");
    assert!(check_multiplicative(&g, &good, &zero, &mut s, 30).unwrap().pass);
    let r = check_distribution_closure(&g, &bad, &mut s, 30).unwrap();
    assert!(r.image.passes(1e-9) && !r.kernel.passes(1e-3), "{r:?}");
    assert!(!check_multiplicative(&g, &bad, &zero, &mut s, 30).unwrap().pass);

    let r = check_distribution_closure(&g, &VForm::parse("1;1;0;0;1;0;0;0;1", 3, 1).unwrap(), &mut s, 5);
    assert!(matches!(r, Err(Error::NotAProjection { .. })));
}
