//! The `fnbrack` command line: scenario runs and one-shot computations.

pub mod scenario;
pub mod suites;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::index::Basis;
use crate::forms::{curvature, fn_bracket, nijenhuis, VForm};
use crate::groupoid::{check_multiplicative, zoo, DEFAULT_MULT_TOL};
use crate::sampling::Sampler;
use scenario::{Scenario, SuiteDecl};

/// Exit code when every suite passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when some suite fails its tolerance.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for unreadable or invalid input.
pub const EXIT_CONFIG: i32 = 2;

/// One line of the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Options overriding a scenario's own settings.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    /// Report `millis = 0` so reports are byte-identical across runs.
    pub zero_timing: bool,
}

fn run_one(scenario: &Scenario, decl: &SuiteDecl, index: usize, seed: u64, opts: &RunOptions) -> Result<SuiteResult> {
    let (default_tol, _) = suites::defaults(&decl.suite)
        .ok_or_else(|| Error::Config(format!("unknown suite `{}`", decl.suite)))?;
    let tolerance = opts.tolerance.or(decl.tolerance).unwrap_or(default_tol);
    let mut sampler = Sampler::new(seed).derive(&format!("{index}:{}", decl.suite));
    let start = Instant::now();
    let out = suites::run_suite(scenario, decl, &mut sampler)?;
    let millis = if opts.zero_timing {
        0
    } else {
        start.elapsed().as_millis() as u64
    };
    Ok(SuiteResult {
        suite: decl.suite.clone(),
        samples: out.samples,
        max_residual: out.max_residual,
        tolerance,
        pass: out.max_residual < tolerance,
        millis,
    })
}

/// Runs every suite of the scenario. Suites run in parallel; the report
/// lists them sorted by name.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    let seed = opts.seed.unwrap_or(scenario.seed);
    let mut results = scenario
        .suites
        .par_iter()
        .enumerate()
        .map(|(i, d)| run_one(scenario, d, i, seed, opts))
        .collect::<Result<Vec<_>>>()?;
    results.sort_by(|a, b| a.suite.cmp(&b.suite));
    Ok(Report {
        scenario: scenario.name.clone(),
        seed,
        pass: results.iter().all(|r| r.pass),
        suites: results,
    })
}

#[derive(Parser, Debug)]
#[command(name = "fnbrack", version, about = "Frölicher–Nijenhuis brackets and multiplicative forms on Lie groupoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the suites of a scenario file.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance applied to every suite.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report zero wall time so that reports are reproducible byte for byte.
        #[arg(long)]
        zero_timing: bool,
    },
    /// Print the components of [K, L] at a point.
    Bracket {
        #[arg(long)]
        dim: usize,
        /// Coefficients of K, `;`-separated in [i][J] order.
        #[arg(long)]
        k: String,
        #[arg(long)]
        k_degree: usize,
        #[arg(long)]
        l: String,
        #[arg(long)]
        l_degree: usize,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Print the components of N_K at a point.
    Nijenhuis {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        k: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Print R_K(X, Y) for a projection K.
    Curvature {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        k: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Check that K on a zoo groupoid is multiplicative over K_M.
    CheckMult {
        #[arg(long)]
        zoo: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        extra: usize,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        /// Coefficients of K on the arrows; the identity when omitted.
        #[arg(long)]
        k: Option<String>,
        /// Coefficients of K_M on the objects; the identity when omitted.
        #[arg(long)]
        k_m: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a single suite with its defaults.
    VerifySuite {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
        /// Zoo groupoid for suites that need one.
        #[arg(long, default_value = "pair")]
        zoo: String,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// List zoo groupoids and suites.
    ListZoo,
}

fn parse_point(src: &str) -> Result<Vec<f64>> {
    if src.trim().is_empty() {
        return Ok(Vec::new());
    }
    src.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("bad coordinate `{t}`: {e}")))
        })
        .collect()
}

fn print_components(k: &VForm, p: &[f64]) -> Result<()> {
    if p.len() != k.dim() {
        return Err(Error::Config(format!("point has {} coordinates, chart has {}", p.len(), k.dim())));
    }
    let c = k.coeffs_at(p)?;
    let basis = Basis::get(k.dim(), k.degree());
    let w = basis.len();
    if c.iter().all(|v| *v == 0.0) {
        println!("all components vanish");
    }
    for i in 0..k.dim() {
        for (r, idx) in basis.subsets().iter().enumerate() {
            let v = c[i * w + r];
            if v != 0.0 {
                let js: Vec<String> = idx.iter().map(|j| (j + 1).to_string()).collect();
                println!("{}_[{}] = {v}", i + 1, js.join(","));
            }
        }
    }
    Ok(())
}

fn print_report(report: &Report) {
    for r in &report.suites {
        println!(
            "{} {:<24} max_residual={:.3e} tol={:.0e} samples={} millis={}",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.max_residual,
            r.tolerance,
            r.samples,
            r.millis
        );
    }
    println!("{}", if report.pass { "all suites passed" } else { "some suites failed" });
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run {
            scenario,
            seed,
            tol,
            out,
            zero_timing,
        } => {
            let sc = Scenario::load(&scenario)?;
            let opts = RunOptions {
                seed,
                tolerance: tol,
                zero_timing,
            };
            let report = run_scenario(&sc, &opts)?;
            print_report(&report);
            if let Some(path) = out {
                std::fs::write(&path, report.to_json() + "\n")
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Bracket {
            dim,
            k,
            k_degree,
            l,
            l_degree,
            at,
        } => {
            let k = VForm::parse(&k, dim, k_degree)?;
            let l = VForm::parse(&l, dim, l_degree)?;
            print_components(&fn_bracket(&k, &l)?, &parse_point(&at)?)?;
            Ok(EXIT_PASS)
        }
        Command::Nijenhuis { dim, k, at } => {
            let k = VForm::parse(&k, dim, 1)?;
            print_components(&nijenhuis(&k)?, &parse_point(&at)?)?;
            Ok(EXIT_PASS)
        }
        Command::Curvature { dim, k, at, x, y } => {
            let k = VForm::parse(&k, dim, 1)?;
            let v = curvature(&k)?.eval_at(&parse_point(&at)?, &[parse_point(&x)?, parse_point(&y)?])?;
            let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            println!("({})", parts.join(", "));
            Ok(EXIT_PASS)
        }
        Command::CheckMult {
            zoo: name,
            dim,
            extra,
            degree,
            k,
            k_m,
            samples,
            seed,
        } => {
            let g = zoo::by_name(&name, dim, extra)?;
            let form = |src: Option<String>, n: usize| match src {
                Some(s) => VForm::parse(&s, n, degree),
                None if degree == 1 => Ok(VForm::identity(n)),
                None => Err(Error::Config("give --k and --k-m for degrees other than 1".into())),
            };
            let k = form(k, g.arrows().dim())?;
            let km = form(k_m, g.objects().dim())?;
            let r = check_multiplicative(&g, &k, &km, &mut Sampler::new(seed), samples)?;
            println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
            println!(
                "{} {} (tol {:.0e})",
                if r.pass { "PASS" } else { "FAIL" },
                g.name(),
                DEFAULT_MULT_TOL
            );
            Ok(if r.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::VerifySuite {
            suite,
            seed,
            samples,
            zoo: name,
            dim,
        } => {
            let decl = serde_json::json!({
                "name": suite,
                "seed": seed,
                "groupoid": {"zoo": name, "dim": dim},
                "suites": [{"suite": suite, "samples": samples}],
            });
            let sc = Scenario::from_json(&decl.to_string())?;
            let report = run_scenario(&sc, &RunOptions::default())?;
            print_report(&report);
            Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::ListZoo => {
            println!("groupoids:");
            for (name, about) in zoo::ZOO {
                println!("  {name:<16} {about}");
            }
            println!("suites:");
            for (name, (tol, samples, about)) in suites::SUITES {
                println!("  {name:<24} tol {tol:.0e}, {samples} samples: {about}");
            }
            Ok(EXIT_PASS)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("FNBRACK_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("FNBRACK_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::Config("FNBRACK_THREADS must be positive".into()));
        }
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match configure_threads().and_then(|_| execute(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
