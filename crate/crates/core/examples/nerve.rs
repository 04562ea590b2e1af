//! The nerve of a groupoid: simplicial identities, δ² = 0, and the lift of
//! a multiplicative form to a derivation of the double complex.

use fnbrack::forms::VForm;
use fnbrack::groupoid::zoo;
use fnbrack::nerve::{build_nerve, check_bss_derivation, check_simplicial, delta, lift_tower};
use fnbrack::sampling::Sampler;

fn main() -> fnbrack::Result<()> {
    let g = zoo::aff1();
    let nerve = build_nerve(&g, 3)?;
    let mut s = Sampler::new(3);
    for p in 0..=nerve.max_level() {
        println!("level {p}: chart dimension {}", nerve.level(p)?.chart.dim());
    }
    println!("simplicial identities {:.1e}", check_simplicial(&nerve, &mut s, 50)?);

    let f = s.random_sform(nerve.level(0)?.chart.dim(), 0);
    let dd = delta(&nerve, 2, &delta(&nerve, 1, &f)?)?;
    let p = s.point(&nerve.level(2)?.chart)?;
    println!("δ²f at a point = {:?}", dd.coeffs_at(&p)?);

    let k = VForm::identity(g.arrows().dim());
    let tower = lift_tower(&g, &nerve, &k, &VForm::identity(g.objects().dim()))?;
    let r = check_bss_derivation(&nerve, &tower, &mut s, 5)?;
    println!("BSS relations {:.1e}", r.max_residual());
    Ok(())
}
