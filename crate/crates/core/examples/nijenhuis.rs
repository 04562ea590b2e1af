//! Nijenhuis tensors of a constant complex structure and a deformed one.

use fnbrack::forms::{fn_bracket, nijenhuis, VForm};

fn main() -> fnbrack::Result<()> {
    let j = VForm::from_terms(2, 1, &[(1, &[0], "1"), (0, &[1], "-1")])?;
    println!("N_J = {:?}", nijenhuis(&j)?.coeffs_at(&[0.4, 1.1])?);

    let k = VForm::from_terms(3, 1, &[(1, &[0], "1"), (0, &[1], "-1"), (2, &[0], "x2^2"), (0, &[0], "x3*x1")])?;
    let p = [0.5, -1.0, 0.25];
    let n = nijenhuis(&k)?.coeffs_at(&p)?;
    let half = fn_bracket(&k, &k)?.scale(0.5).coeffs_at(&p)?;
    let gap = n.iter().zip(&half).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("N_K = {n:?}");
    println!("|½[K,K] − N_K| = {gap:.2e}");
    Ok(())
}
