//! The groupoid zoo, axiom checks, and multiplicativity of forms.

use fnbrack::forms::{fn_bracket, product_form, VForm};
use fnbrack::groupoid::{check_invariants, check_multiplicative, zoo};
use fnbrack::sampling::Sampler;
use fnbrack::smooth::Chart;

fn main() -> fnbrack::Result<()> {
    let mut s = Sampler::new(7);
    for (name, _) in zoo::ZOO {
        let g = zoo::by_name(name, 1, 1)?;
        let r = check_invariants(&g, &mut s, 20)?;
        println!("{name:16} arrows {} objects {} axioms {:.1e}", g.arrows().dim(), g.objects().dim(), r.max_residual());
    }

    // On the pair groupoid, K × K is multiplicative, and so are brackets.
    let g = zoo::pair(&Chart::new("R2", 2));
    let (km, lm) = (s.random_vform(2, 1), s.random_vform(2, 0));
    let k = product_form(&[km.clone(), km.clone()])?;
    let l = product_form(&[lm.clone(), lm.clone()])?;
    let r = check_multiplicative(&g, &fn_bracket(&k, &l)?, &fn_bracket(&km, &lm)?, &mut s, 30)?;
    println!("[K, L] multiplicative: {} (residual {:.1e})", r.pass, r.max_residual());

    // A form that mixes the two factors is not.
    let bad = VForm::from_terms(4, 1, &[(0, &[2], "1")])?;
    let r = check_multiplicative(&g, &bad, &VForm::zero(2, 1), &mut s, 30)?;
    println!("mixing form multiplicative: {} (residual {:.1e})", r.pass, r.max_residual());
    Ok(())
}
