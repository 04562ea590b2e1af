use fnbrack::expr::ExprFn;
use fnbrack::forms::{
    check_f_related, cocurvature, conjugated_projection, curvature, exterior_d, fn_bracket, insert,
    insert_by_permutations, lie_commutator, lie_derivative, nijenhuis, product_form,
    restricted_product, SForm, VForm,
};
use fnbrack::sampling::Sampler;
use fnbrack::smooth::{Chart, SmoothMap};
use fnbrack::Error;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn max_form_diff_s(a: &SForm, b: &SForm, pts: &[Vec<f64>]) -> f64 {
    pts.iter()
        .map(|p| max_diff(&a.coeffs_at(p).unwrap(), &b.coeffs_at(p).unwrap()))
        .fold(0.0, f64::max)
}

fn max_form_diff_v(a: &VForm, b: &VForm, pts: &[Vec<f64>]) -> f64 {
    pts.iter()
        .map(|p| max_diff(&a.coeffs_at(p).unwrap(), &b.coeffs_at(p).unwrap()))
        .fold(0.0, f64::max)
}

fn points(s: &mut Sampler, dim: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| s.vector(dim)).collect()
}

/// Central-difference Lie bracket `[U, V] = DV·U − DU·V` of explicit fields.
fn bracket_fd(u: &dyn Fn(&[f64]) -> Vec<f64>, v: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> Vec<f64> {
    let h = 1e-5;
    let n = x.len();
    let dir = |f: &dyn Fn(&[f64]) -> Vec<f64>, w: &[f64]| -> Vec<f64> {
        let plus: Vec<f64> = x.iter().zip(w).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = x.iter().zip(w).map(|(a, b)| a - h * b).collect();
        let (fp, fm) = (f(&plus), f(&minus));
        (0..n).map(|i| (fp[i] - fm[i]) / (2.0 * h)).collect()
    };
    let (ux, vx) = (u(x), v(x));
    let dv_u = dir(v, &ux);
    let du_v = dir(u, &vx);
    (0..n).map(|i| dv_u[i] - du_v[i]).collect()
}

fn heisenberg() -> VForm {
    VForm::from_terms(3, 1, &[(2, &[2], "1"), (2, &[1], "-x1")]).unwrap()
}

#[test]
fn insertion_of_identity_scales_by_degree() {
    let mut s = Sampler::new(1);
    let pts = points(&mut s, 4, 10);
    for p in 1..=3 {
        let w = s.random_sform(4, p);
        let lhs = insert(&VForm::identity(4), &w).unwrap();
        assert!(max_form_diff_s(&lhs, &w.scale(p as f64), &pts) < 1e-12);
    }
}

#[test]
fn insertion_of_vector_field_is_contraction() {
    let mut s = Sampler::new(2);
    let w = s.random_sform(3, 2);
    let x = s.random_vform(3, 0);
    let iw = insert(&x, &w).unwrap();
    for _ in 0..10 {
        let (p, v) = (s.vector(3), s.vector(3));
        let xv = x.eval_at(&p, &[]).unwrap();
        let direct = w.eval_at(&p, &[xv, v.clone()]).unwrap();
        assert!((iw.eval_at(&p, &[v]).unwrap() - direct).abs() < 1e-12);
    }
}

#[test]
fn insertion_example_in_r3() {
    let k = VForm::from_terms(3, 2, &[(2, &[0, 1], "1")]).unwrap();
    let dz = SForm::basis(3, &[2]);
    for route in [insert(&k, &dz).unwrap(), insert_by_permutations(&k, &dz).unwrap()] {
        assert_eq!(route.degree(), 2);
        assert_eq!(route.coeffs_at(&[0.4, -0.2, 0.9]).unwrap(), vec![1.0, 0.0, 0.0]);
    }
}

#[test]
fn shuffle_and_permutation_insertions_agree() {
    let mut s = Sampler::new(3);
    let pts = points(&mut s, 4, 5);
    for k in 0..=2 {
        for p in 0..=3 {
            let (kf, w) = (s.random_vform(4, k), s.random_sform(4, p));
            if k == 0 && p == 0 {
                assert!(insert(&kf, &w).is_err());
                continue;
            }
            let a = insert(&kf, &w).unwrap();
            let b = insert_by_permutations(&kf, &w).unwrap();
            assert_eq!(a.degree() + 1, k + p);
            assert!(max_form_diff_s(&a, &b, &pts) < 1e-12, "k={k} p={p}");
        }
    }
}

#[test]
fn exterior_derivative_examples() {
    let x_dy = SForm::from_terms(2, 1, &[(&[1], "x1")]).unwrap();
    assert_eq!(exterior_d(&x_dy).coeffs_at(&[3.0, -1.0]).unwrap(), vec![1.0]);
    let theta = SForm::from_terms(3, 1, &[(&[2], "1"), (&[1], "-x1")]).unwrap();
    assert_eq!(
        exterior_d(&theta).coeffs_at(&[0.5, 0.5, 0.5]).unwrap(),
        vec![-1.0, 0.0, 0.0]
    );
}

#[test]
fn d_squared_vanishes() {
    let mut s = Sampler::new(4);
    let pts = points(&mut s, 3, 50);
    let f = SForm::from_exprs(
        3,
        0,
        ExprFn::from_components(3, vec![s.smooth_expr(3, 5)]).unwrap(),
    )
    .unwrap();
    let ddf = exterior_d(&exterior_d(&f));
    let w = s.random_sform(3, 1);
    let ddw = exterior_d(&exterior_d(&w));
    for p in &pts {
        assert!(ddf.coeffs_at(p).unwrap().iter().all(|v| v.abs() < 1e-9));
        assert!(ddw.coeffs_at(p).unwrap().iter().all(|v| v.abs() < 1e-9));
    }
}

#[test]
fn cartan_formula_for_vector_field() {
    let dx = VForm::parse_vector_field("1; 0", 2).unwrap();
    let x_dy = SForm::from_terms(2, 1, &[(&[1], "x1")]).unwrap();
    let l = lie_derivative(&dx, &x_dy).unwrap();
    assert_eq!(l.coeffs_at(&[0.7, 0.2]).unwrap(), vec![0.0, 1.0]);
}

#[test]
fn lie_derivative_along_identity_is_minus_d() {
    // Oracle: d i_Id ω − i_Id dω assembled from the permutation-sum insertion.
    let mut s = Sampler::new(5);
    let pts = points(&mut s, 3, 20);
    let id = VForm::identity(3);
    for p in 0..=2 {
        let w = s.random_sform(3, p);
        let dw = exterior_d(&w);
        let oracle = if p == 0 {
            insert_by_permutations(&id, &dw).unwrap().scale(-1.0)
        } else {
            exterior_d(&insert_by_permutations(&id, &w).unwrap())
                - insert_by_permutations(&id, &dw).unwrap()
        };
        let l = lie_derivative(&id, &w).unwrap();
        assert!(max_form_diff_s(&l, &oracle, &pts) < 1e-10);
        assert!(max_form_diff_s(&l, &dw.scale(-1.0), &pts) < 1e-10);
    }
}

#[test]
fn lie_derivative_leibniz_rule() {
    let mut s = Sampler::new(6);
    let pts = points(&mut s, 3, 20);
    let k = s.random_vform(3, 1);
    let f = s.random_sform(3, 0);
    let w = s.random_sform(3, 1);
    let lhs = lie_derivative(&k, &w.times(&f).unwrap()).unwrap();
    let rhs = lie_derivative(&k, &f).unwrap().wedge(&w).unwrap()
        + lie_derivative(&k, &w).unwrap().times(&f).unwrap();
    assert!(max_form_diff_s(&lhs, &rhs, &pts) < 1e-9);
}

#[test]
fn bracket_of_vector_fields() {
    let x_dy = VForm::parse_vector_field("0; x1", 2).unwrap();
    let dx = VForm::parse_vector_field("1; 0", 2).unwrap();
    let b = fn_bracket(&x_dy, &dx).unwrap();
    for p in [[0.0, 0.0], [1.5, -2.0]] {
        assert_eq!(b.coeffs_at(&p).unwrap(), vec![0.0, -1.0]);
    }
}

#[test]
fn vector_field_bracket_matches_jacobian_formula() {
    let mut s = Sampler::new(7);
    let (x, y) = (s.random_vform(3, 0), s.random_vform(3, 0));
    let b = fn_bracket(&x, &y).unwrap();
    for _ in 0..20 {
        let p = s.vector(3);
        let fd = bracket_fd(&|q| x.eval_at(q, &[]).unwrap(), &|q| y.eval_at(q, &[]).unwrap(), &p);
        assert!(max_diff(&b.coeffs_at(&p).unwrap(), &fd) < 1e-8);
    }
}

#[test]
fn graded_antisymmetry_and_identity() {
    let mut s = Sampler::new(8);
    let pts = points(&mut s, 3, 10);
    for (k, l) in [(0, 1), (1, 1), (1, 2), (0, 2)] {
        let (kf, lf) = (s.random_vform(3, k), s.random_vform(3, l));
        let a = fn_bracket(&kf, &lf).unwrap();
        let b = fn_bracket(&lf, &kf).unwrap();
        let sign = if (k * l) % 2 == 0 { -1.0 } else { 1.0 };
        assert!(max_form_diff_v(&a, &b.scale(sign), &pts) < 1e-8, "({k},{l})");
    }
    let id = VForm::identity(3);
    for l in 0..=2 {
        let lf = s.random_vform(3, l);
        let b = fn_bracket(&id, &lf).unwrap();
        assert!(max_form_diff_v(&b, &VForm::zero(3, l + 1), &pts) < 1e-9);
        // Brute force on a random form: [L_Id, L_L] ω = 0.
        let w = s.random_sform(3, 1);
        let c = lie_commutator(&id, &lf, &w).unwrap();
        assert!(max_form_diff_s(&c, &SForm::zero(3, l + 2), &pts) < 1e-9);
    }
}

#[test]
fn degree_overflow_gives_zero() {
    let mut s = Sampler::new(9);
    let b = fn_bracket(&s.random_vform(2, 1), &s.random_vform(2, 2)).unwrap();
    assert_eq!(b.degree(), 3);
    assert!(b.coeffs_at(&[0.1, 0.2]).unwrap().is_empty());
}

#[test]
fn produced_forms_are_antisymmetric() {
    let mut s = Sampler::new(10);
    let (k, l) = (s.random_vform(3, 1), s.random_vform(3, 1));
    let b = fn_bracket(&k, &l).unwrap();
    for _ in 0..10 {
        let (p, u, v) = (s.vector(3), s.vector(3), s.vector(3));
        let a = b.eval_at(&p, &[u.clone(), v.clone()]).unwrap();
        let c = b.eval_at(&p, &[v, u]).unwrap();
        assert!(a.iter().zip(&c).all(|(x, y)| (x + y).abs() < 1e-12));
    }
}

#[test]
fn defining_property_on_random_forms() {
    let mut s = Sampler::new(11);
    for (k, l) in [(1, 1), (1, 2), (0, 1), (2, 1)] {
        let (kf, lf) = (s.random_vform(3, k), s.random_vform(3, l));
        let b = fn_bracket(&kf, &lf).unwrap();
        for p in 0..=1 {
            let w = s.random_sform(3, p);
            let lhs = lie_derivative(&b, &w).unwrap();
            let rhs = lie_commutator(&kf, &lf, &w).unwrap();
            let pts = points(&mut s, 3, 10);
            assert!(max_form_diff_s(&lhs, &rhs, &pts) < 1e-8, "({k},{l}) p={p}");
        }
    }
}

#[test]
fn graded_jacobi_identity() {
    let mut s = Sampler::new(12);
    let pts = points(&mut s, 3, 5);
    for (a, b, c) in [(1, 1, 1), (0, 1, 1), (0, 0, 1)] {
        let (k, l, m) = (s.random_vform(3, a), s.random_vform(3, b), s.random_vform(3, c));
        let lhs = fn_bracket(&k, &fn_bracket(&l, &m).unwrap()).unwrap();
        let sign = if (a * b) % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = fn_bracket(&fn_bracket(&k, &l).unwrap(), &m).unwrap()
            + fn_bracket(&l, &fn_bracket(&k, &m).unwrap()).unwrap().scale(sign);
        assert!(max_form_diff_v(&lhs, &rhs, &pts) < 1e-7, "({a},{b},{c})");
    }
}

#[test]
fn nijenhuis_examples() {
    let pts = [vec![0.0, 0.0], vec![0.3, -1.2], vec![2.0, 1.0]];
    let n_id = nijenhuis(&VForm::identity(2)).unwrap();
    assert!(max_form_diff_v(&n_id, &VForm::zero(2, 2), &pts) == 0.0);
    let j = VForm::parse("0; -1; 1; 0", 2, 1).unwrap();
    for p in &pts {
        assert!(nijenhuis(&j).unwrap().coeffs_at(p).unwrap().iter().all(|v| v.abs() < 1e-12));
        let half = fn_bracket(&j, &j).unwrap().scale(0.5);
        assert!(half.coeffs_at(p).unwrap().iter().all(|v| v.abs() < 1e-12));
    }
    let k = VForm::parse("0; -(1 + x1^2); 1/(1 + x1^2); 0", 2, 1).unwrap();
    let half = fn_bracket(&k, &k).unwrap().scale(0.5);
    assert!(max_form_diff_v(&half, &nijenhuis(&k).unwrap(), &pts) < 1e-8);
}

#[test]
fn nijenhuis_is_half_self_bracket() {
    let mut s = Sampler::new(13);
    let pts = points(&mut s, 3, 50);
    let k = s.random_vform(3, 1);
    let half = fn_bracket(&k, &k).unwrap().scale(0.5);
    assert!(max_form_diff_v(&half, &nijenhuis(&k).unwrap(), &pts) < 1e-8);
}

#[test]
fn heisenberg_curvature() {
    let k = heisenberg();
    let r = curvature(&k).unwrap();
    let e = |i: usize| {
        let mut v = vec![0.0; 3];
        v[i] = 1.0;
        v
    };
    // Oracle: K applied to the finite-difference bracket of the horizontal fields.
    let hor = |v: Vec<f64>| {
        let k = k.clone();
        move |q: &[f64]| {
            let kv = k.eval_at(q, &[v.clone()]).unwrap();
            v.iter().zip(&kv).map(|(a, b)| a - b).collect::<Vec<f64>>()
        }
    };
    for p in [vec![0.0, 0.0, 0.0], vec![0.5, -1.0, 2.0]] {
        let value = r.eval_at(&p, &[e(0), e(1)]).unwrap();
        assert!(max_diff(&value, &[0.0, 0.0, 1.0]) < 1e-10);
        let fd = bracket_fd(&hor(e(0)), &hor(e(1)), &p);
        let oracle = k.eval_at(&p, &[fd]).unwrap();
        assert!(max_diff(&value, &oracle) < 1e-8);
    }
    let r_id = curvature(&VForm::identity(3)).unwrap();
    assert!(r_id.coeffs_at(&[0.1, 0.2, 0.3]).unwrap().iter().all(|v| *v == 0.0));
}

fn assert_rr(k: &VForm, pts: &[Vec<f64>]) {
    let half = fn_bracket(k, k).unwrap().scale(0.5);
    let sum = curvature(k).unwrap() + cocurvature(k).unwrap();
    assert!(max_form_diff_v(&half, &sum, pts) < 1e-8);
}

#[test]
fn bracket_splits_into_curvature_and_cocurvature() {
    let mut s = Sampler::new(14);
    let pts = points(&mut s, 3, 20);
    assert_rr(&heisenberg(), &pts);
    let flat = VForm::from_terms(3, 1, &[(2, &[2], "1"), (2, &[0], "-x2"), (2, &[1], "-x1")]).unwrap();
    assert_rr(&flat, &pts);
    let r = curvature(&flat).unwrap();
    assert!(max_form_diff_v(&r, &VForm::zero(3, 2), &pts) < 1e-12);
    let conj = conjugated_projection(
        s.unit_upper_triangular(3),
        vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    assert_rr(&conj, &pts);
}

#[test]
fn curvature_rejects_non_projection() {
    let k = VForm::parse("2; 0; 0; 1", 2, 1).unwrap();
    let r = curvature(&k).unwrap();
    assert!(matches!(
        r.coeffs_at(&[0.0, 0.0]),
        Err(Error::NotAProjection { .. })
    ));
}

#[test]
fn relatedness_through_a_diffeomorphism() {
    let mut s = Sampler::new(15);
    let f = SmoothMap::parse("x1; x2 + x1^2", 2, 2).unwrap();
    let f_inv = SmoothMap::parse("x1; x2 - x1^2", 2, 2).unwrap();
    let chart = Chart::new("R2", 2);
    let (k2, l2) = (s.random_vform(2, 1), s.random_vform(2, 0));
    let k1 = restricted_product(&[(f.clone(), k2.clone())], &f_inv).unwrap();
    let l1 = restricted_product(&[(f.clone(), l2.clone())], &f_inv).unwrap();
    assert!(check_f_related(&f, &chart, &k1, &k2, &mut s, 20).unwrap().max_residual < 1e-10);
    let b1 = fn_bracket(&k1, &l1).unwrap();
    let b2 = fn_bracket(&k2, &l2).unwrap();
    let r = check_f_related(&f, &chart, &b1, &b2, &mut s, 20).unwrap();
    assert!(r.max_residual < 1e-7, "{r:?}");
}

#[test]
fn relatedness_through_a_projection() {
    let mut s = Sampler::new(16);
    let (k2, l2) = (s.random_vform(2, 1), s.random_vform(2, 1));
    let (a, b) = (s.random_vform(1, 1), s.random_vform(1, 1));
    let k1 = product_form(&[k2.clone(), a]).unwrap();
    let l1 = product_form(&[l2.clone(), b]).unwrap();
    let pr = SmoothMap::block(3, 0, 2);
    let chart = Chart::new("R3", 3);
    let r = check_f_related(&pr, &chart, &k1, &k2, &mut s, 20).unwrap();
    assert!(r.max_residual < 1e-10);
    let r = check_f_related(
        &pr,
        &chart,
        &fn_bracket(&k1, &l1).unwrap(),
        &fn_bracket(&k2, &l2).unwrap(),
        &mut s,
        20,
    )
    .unwrap();
    assert!(r.max_residual < 1e-7, "{r:?}");
}
