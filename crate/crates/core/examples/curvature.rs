//! Curvature and co-curvature of the Heisenberg projection on R³.

use fnbrack::forms::{cocurvature, curvature, fn_bracket, VForm};

fn main() -> fnbrack::Result<()> {
    // K = (dz − x dy) ⊗ ∂z
    let k = VForm::from_terms(3, 1, &[(2, &[2], "1"), (2, &[1], "-x1")])?;
    let r = curvature(&k)?;
    let p = [0.7, -0.3, 2.0];
    let v = r.eval_at(&p, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])?;
    println!("R_K(∂x, ∂y) = {v:?}");

    let half = fn_bracket(&k, &k)?.scale(0.5).coeffs_at(&p)?;
    let sum = (r + cocurvature(&k)?).coeffs_at(&p)?;
    let gap = half.iter().zip(&sum).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("|½[K,K] − (R_K + R̄_K)| = {gap:.2e}");
    Ok(())
}
