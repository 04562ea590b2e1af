//! Exit gate: one PASS/FAIL line per acceptance criterion.

use std::path::PathBuf;
use std::time::Instant;

use fnbrack::bundle::{curvature_f, k_to_connection, TrivialBundle};
use fnbrack::cli::scenario::Scenario;
use fnbrack::cli::{run_scenario, Report, RunOptions};
use fnbrack::forms::{nijenhuis, VForm};
use fnbrack::sampling::Sampler;
use fnbrack::smooth::Chart;

struct Line {
    residual: f64,
    tol: f64,
    pass: bool,
    note: String,
}

impl Line {
    fn below(residual: f64, tol: f64) -> Line {
        Line {
            residual,
            tol,
            pass: residual < tol,
            note: String::new(),
        }
    }

    fn and(mut self, other: Line) -> Line {
        self.pass &= other.pass;
        if self.residual / self.tol < other.residual / other.tol {
            self.residual = other.residual;
            self.tol = other.tol;
        }
        self
    }

    fn note(mut self, note: impl Into<String>) -> Line {
        self.note = note.into();
        self
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn scenario(json: &str) -> Scenario {
    Scenario::from_json(json).expect("acceptance scenario is valid")
}

fn run(json: &str) -> Report {
    run_scenario(&scenario(json), &RunOptions::default()).expect("scenario runs")
}

/// Worst suite of a report, judged against `tol`.
fn judged(report: &Report, tol: f64) -> Line {
    let worst = report.suites.iter().fold(0.0f64, |m, r| m.max(r.max_residual));
    Line::below(worst, tol)
}

fn suite(name: &str, groupoid: &str, extra: &str) -> String {
    format!(r#"{{ "name": "{name}", "seed": 11, {groupoid} "suites": [ {{ "suite": "{name}" {extra} }} ] }}"#)
}

fn c1() -> Line {
    let start = Instant::now();
    let line = judged(&run(&suite("fn-defining-property", "", r#", "samples": 100"#)), 1e-8);
    let secs = start.elapsed().as_secs_f64();
    let timed = Line { pass: secs < 10.0, ..Line::below(0.0, 1.0) };
    line.and(timed).note(format!("{secs:.2}s of 10s"))
}

fn c2() -> Line {
    judged(&run(&suite("vector-field-bracket", "", r#", "samples": 50"#)), 1e-10)
}

fn c3() -> Line {
    let random = judged(&run(&suite("nijenhuis", "", r#", "samples": 50"#)), 1e-8);
    let j = VForm::from_terms(2, 1, &[(1, &[0], "1"), (0, &[1], "-1")]).unwrap();
    let n = nijenhuis(&j).unwrap();
    let mut s = Sampler::new(5);
    let chart = Chart::new("R2", 2);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = s.point(&chart).unwrap();
        worst = n.coeffs_at(&p).unwrap().iter().fold(worst, |m, c| m.max(c.abs()));
    }
    random.and(Line::below(worst, 1e-12))
}

fn c4() -> Line {
    let split = judged(&run(&suite("curvature-splitting", "", r#", "samples": 50"#)), 1e-8);
    let heis = judged(&run(&suite("heisenberg-curvature", "", r#", "samples": 50"#)), 1e-10);
    split.and(heis)
}

fn c5() -> Line {
    judged(&run(&suite("compatible", "", r#", "samples": 50"#)), 1e-7)
}

fn c6() -> Line {
    let trip = judged(&run(&suite("connection-round-trip", "", r#", "samples": 50"#)), 1e-9);
    let b = TrivialBundle::new(Chart::new("R2", 2), 1);
    let rejected = k_to_connection(&b, &VForm::identity(5)).is_err();
    let mut line = trip;
    line.pass &= rejected;
    line.note(if rejected { "Id rejected" } else { "Id accepted" })
}

fn c7() -> Line {
    // Covers A = 0, x dy, x² dy and F(∂x, ∂y) = 1 for A = x dy.
    let both = judged(&run(&suite("curvature-identity", "", r#", "samples": 30"#)), 1e-8);
    let b = TrivialBundle::new(Chart::new("R2", 2), 1);
    let conn = fnbrack::bundle::Connection::parse(&b, &["0; x1"]).unwrap();
    let f = curvature_f(&conn).unwrap();
    let v = f[0].eval_at(&[0.3, -0.7], &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    both.and(Line::below((v - 1.0).abs(), 1e-8))
}

fn c8() -> Line {
    let mut line = Line::below(0.0, 1.0);
    for g in [r#""zoo": "pair", "dim": 1"#, r#""zoo": "aff1""#] {
        let r = run(&format!(
            r#"{{ "name": "nerve", "seed": 8, "groupoid": {{ {g} }}, "suites": [
                {{ "suite": "nerve-simplicial", "samples": 100 }},
                {{ "suite": "nerve-delta", "samples": 20 }},
                {{ "suite": "nerve-bss", "samples": 10 }} ] }}"#
        ));
        for s in &r.suites {
            let tol = match s.suite.as_str() {
                "nerve-simplicial" => 1e-12,
                "nerve-delta" => 1e-9,
                _ => 1e-7,
            };
            line = line.and(Line::below(s.max_residual, tol));
        }
    }
    let perturbed = Scenario::load(&fixture("perturbed-tower.json")).unwrap();
    let r = run_scenario(&perturbed, &RunOptions::default()).unwrap();
    let detected = r.suites[0].max_residual;
    line.pass &= detected >= 1e-4;
    line.note(format!("perturbation residual {detected:.2e} (needs >= 1e-4)"))
}

fn c9() -> Line {
    let nat = judged(&run(&suite("naturality", "", r#", "samples": 50"#)), 1e-7);
    let two = judged(&run(&suite("2-frolicher", "", r#", "samples": 30"#)), 1e-7);
    nat.and(two)
}

fn c10() -> Line {
    let full = Scenario::load(&fixture("full-suite.json")).unwrap();
    let opts = RunOptions {
        zero_timing: true,
        ..RunOptions::default()
    };
    let start = Instant::now();
    let a = run_scenario(&full, &opts).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let b = run_scenario(&full, &opts).unwrap();
    let same = a.to_json() == b.to_json();
    let mut line = Line::below(secs, 60.0);
    line.pass &= same && a.pass;
    line.note(format!(
        "wall {secs:.2}s, reports {}, full suite {}",
        if same { "identical" } else { "differ" },
        if a.pass { "passes" } else { "fails" }
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Line); 10] = [
        ("FN defining property", c1),
        ("vector-field reduction", c2),
        ("half bracket equals Nijenhuis tensor", c3),
        ("curvature splitting", c4),
        ("brackets of multiplicative forms", c5),
        ("connection round trip", c6),
        ("curvature of multiplicative projection", c7),
        ("nerve suite", c8),
        ("naturality and 2-Frolicher", c9),
        ("determinism and wall time", c10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let l = f();
        failed += usize::from(!l.pass);
        println!(
            "{} criterion {}: {name}: residual {:.3e} (tol {:.0e}) {}ms {}",
            if l.pass { "PASS" } else { "FAIL" },
            i + 1,
            l.residual,
            l.tol,
            start.elapsed().as_millis(),
            l.note
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
