//! A connection on the trivial R-bundle over R², its multiplicative
//! projection on the gauge groupoid, and the curvature identity.

use fnbrack::bundle::{check_curvature_identity, connection_to_k, curvature_f, k_to_connection, Connection, TrivialBundle};
use fnbrack::forms::VForm;
use fnbrack::sampling::Sampler;
use fnbrack::smooth::Chart;

fn main() -> fnbrack::Result<()> {
    let bundle = TrivialBundle::new(Chart::new("R2", 2), 1);
    let conn = Connection::parse(&bundle, &["0; x1"])?;

    let f = curvature_f(&conn)?;
    let v = f[0].eval_at(&[0.2, 0.5], &[vec![1.0, 0.0], vec![0.0, 1.0]])?;
    println!("F(∂x, ∂y) = {v}");

    let k = connection_to_k(&conn);
    let back = k_to_connection(&bundle, &k)?;
    println!("recovered A = {:?} at (0.2, 0.5)", back.potential()[0].coeffs_at(&[0.2, 0.5])?);

    match k_to_connection(&bundle, &VForm::identity(5)) {
        Ok(_) => println!("identity accepted"),
        Err(e) => println!("identity rejected: {e}"),
    }

    let r = check_curvature_identity(&conn, &mut Sampler::new(1), 20)?;
    println!("R'_K = s*F − t*F residual {:.1e}", r.identity.max_residual);
    Ok(())
}
