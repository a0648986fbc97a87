//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::path::PathBuf;
use std::time::Instant;

use orbita::orbitscan::twisted_example;
use orbita::verify::{counting_identities, double_coset_counts, run_case, run_spinor_suite, RunOptions, VerificationReport};
use serde_json::Value;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn note(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn report(&mut self, r: &VerificationReport, label: &str) {
        for c in r.checks.iter().filter(|c| !c.passed) {
            self.lines
                .push(format!("FAIL {label}: {}: observed {} expected {}", c.name, c.observed, c.expected));
        }
        let orbits = r.orbits.as_ref().map_or(String::new(), |o| format!(", {} orbits", o.orbits.len()));
        self.note(
            r.passed(),
            format!("{label}: {}/{} checks{orbits}", r.checks.iter().filter(|c| c.passed).count(), r.checks.len()),
        );
    }

    fn case(&mut self, id: &str, q: u32, golden: bool) {
        let label = format!("{id} q={q}");
        match run_case(id, q, &RunOptions::default()) {
            Ok(r) => {
                self.report(&r, &label);
                if golden {
                    self.golden(&r, id, q);
                }
            }
            Err(e) => self.note(false, format!("{label}: {e}")),
        }
    }

    fn golden(&mut self, r: &VerificationReport, id: &str, q: u32) {
        let path = golden_dir().join(format!("{id}-q{q}.json"));
        let stored: Value = match std::fs::read_to_string(&path).map(|s| serde_json::from_str(&s)) {
            Ok(Ok(v)) => v,
            _ => return self.note(false, format!("{id} q={q}: golden report {} unreadable", path.display())),
        };
        let doc = r.to_json();
        let keys = ["schema", "case", "q", "form_type", "total_singular", "orbits"];
        let same = keys.iter().all(|k| doc[k] == stored[k]);
        self.note(same, format!("{id} q={q}: matches golden report"));
    }
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn criterion_1(o: &mut Outcome) {
    for q in [5, 11, 7, 13] {
        o.case("A1-sym4", q, true);
    }
}

fn criterion_2(o: &mut Outcome) {
    for (outer, want_cent) in [(false, vec![12, 4, 3, 3]), (true, vec![2, 2])] {
        match twisted_example("Alt4", outer) {
            Ok(r) => {
                let mut cent: Vec<usize> = r.classes.iter().map(|c| c.centralizer).collect();
                cent.sort_unstable_by(|a, b| b.cmp(a));
                o.note(
                    cent == want_cent,
                    format!("Alt4 with {}: centralizers {cent:?}", r.sigma),
                );
            }
            Err(e) => o.note(false, format!("Alt4: {e}")),
        }
    }
}

fn criterion_3(o: &mut Outcome) {
    match counting_identities("F4", &[2, 3, 4, 5, 7, 8, 9, 11, 13, 16]) {
        Ok(r) => o.report(&r, "F4 identities"),
        Err(e) => o.note(false, format!("F4 identities: {e}")),
    }
}

fn criterion_4(o: &mut Outcome) {
    o.case("Sp4xSp4", 2, true);
    o.case("Sp4xSp4", 3, true);
}

fn criterion_5(o: &mut Outcome) {
    o.case("A3-adjoint-p2", 4, true);
    o.case("A3-adjoint-p2", 2, true);
}

fn criterion_6(o: &mut Outcome) {
    o.case("D4-so8-p2", 2, true);
}

fn criterion_7(o: &mut Outcome) {
    o.case("C3-lambda2", 2, true);
    o.case("C3-lambda2", 5, true);
}

fn criterion_8(o: &mut Outcome) {
    match run_spinor_suite(64) {
        Ok(r) => o.report(&r, "spinor suite"),
        Err(e) => o.note(false, format!("spinor suite: {e}")),
    }
}

fn criterion_9(o: &mut Outcome) {
    o.case("Sp6xSp6-diag", 7, false);
    match double_coset_counts(&[7, 13, 19]) {
        Ok(counts) => {
            let increasing = counts.windows(2).all(|w| w[0].1 < w[1].1);
            o.note(increasing, format!("distinct spectra {counts:?} strictly increasing"));
        }
        Err(e) => o.note(false, format!("double cosets: {e}")),
    }
}

fn criterion_10(o: &mut Outcome) {
    o.case("A2-adjoint", 5, true);
    o.case("A2-adjoint", 2, true);
    o.case("B2-adjoint", 5, true);
}

fn main() {
    // cargo passes harness flags such as --nocapture; only a name filter matters here
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(usize, fn(&mut Outcome)); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, run) in criteria {
        let name = format!("criterion_{n}");
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let mut o = Outcome::new();
        run(&mut o);
        for l in &o.lines {
            println!("    {l}");
        }
        println!(
            "criterion {n}: {} ({:.1} s)",
            if o.passed { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
        if !o.passed {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
