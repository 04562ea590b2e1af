//! Brackets of vector-valued forms on R³ and the defining property
//! L_[K,L] = [L_K, L_L] at a point.

use fnbrack::forms::{fn_bracket, lie_commutator, lie_derivative, SForm, VForm};

fn main() -> fnbrack::Result<()> {
    // Two vector fields: the bracket is the usual Lie bracket.
    let x = VForm::parse_vector_field("1; 0; -x2", 3)?;
    let y = VForm::parse_vector_field("0; 1; x1", 3)?;
    let xy = fn_bracket(&x, &y)?;
    println!("[X, Y] at 0 = {:?}", xy.coeffs_at(&[0.0, 0.0, 0.0])?);

    // A degree-1 form against a vector-valued 1-form.
    let k = VForm::from_terms(3, 1, &[(0, &[1], "x3"), (2, &[0], "x1*x2")])?;
    let l = VForm::from_terms(3, 1, &[(1, &[2], "sin(x1)")])?;
    let kl = fn_bracket(&k, &l)?;
    println!("[K, L] has degree {}", kl.degree());

    let omega = SForm::from_terms(3, 1, &[(&[0], "x2"), (&[2], "exp(x1)")])?;
    let p = [0.3, -0.2, 0.9];
    let lhs = lie_derivative(&kl, &omega)?.coeffs_at(&p)?;
    let rhs = lie_commutator(&k, &l, &omega)?.coeffs_at(&p)?;
    let gap = lhs.iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("|L_[K,L] ω − [L_K, L_L] ω| = {gap:.2e}");
    Ok(())
}
