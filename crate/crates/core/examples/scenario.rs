//! Runs a bundled scenario file and prints its report.

use std::path::PathBuf;

use fnbrack::cli::scenario::Scenario;
use fnbrack::cli::{run_scenario, RunOptions};

fn main() -> fnbrack::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "heisenberg-curvature".into());
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"));
    let report = run_scenario(&Scenario::load(&path)?, &RunOptions::default())?;
    println!("{}", report.to_json());
    Ok(())
}
