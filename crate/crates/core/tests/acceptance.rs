use std::time::{Duration, Instant};

use framecomplex::nerve::BoundRow;
use framecomplex::suites::{run_suite, Suite, SuiteReport};
use framecomplex::{Budget, Outcome};

const SEED: u64 = 20240917;

struct Line {
    id: usize,
    ok: bool,
    text: String,
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn suite_line(id: usize, suite: Suite, limit_s: u64, extra: impl Fn(&SuiteReport) -> Result<(), String>) -> (Line, SuiteReport) {
    let start = Instant::now();
    let report = run_suite(suite, SEED, &Budget::default());
    let elapsed = start.elapsed();
    let mut problems = Vec::new();
    if report.outcome != Outcome::Pass {
        for c in report.checks.iter().filter(|c| c.outcome != Outcome::Pass) {
            problems.push(format!("{} {} (expected {}): {:?}", c.verdict.check, c.verdict.outcome, c.expected, c.verdict.details));
        }
    }
    if let Err(e) = extra(&report) {
        problems.push(e);
    }
    if !within(elapsed, Duration::from_secs(limit_s)) {
        problems.push(format!("runtime {:.1}s over {limit_s}s", elapsed.as_secs_f64()));
    }
    let ok = problems.is_empty();
    let text = format!(
        "{suite} {:.1}s/{limit_s}s{}",
        elapsed.as_secs_f64(),
        if ok { String::new() } else { format!(" :: {}", problems.join("; ")) }
    );
    (Line { id, ok, text }, report)
}

fn notes_contain(report: &SuiteReport, check: &str, needle: &str) -> Result<(), String> {
    let c = report.check(check).ok_or_else(|| format!("missing check {check}"))?;
    if c.verdict.details.iter().any(|d| d.contains(needle)) {
        Ok(())
    } else {
        Err(format!("{check}: no detail containing {needle:?}"))
    }
}

fn row<'a>(report: &'a SuiteReport, family: &str, n: usize) -> Result<&'a BoundRow, String> {
    report.rows.iter().find(|r| r.family == family && r.n == n).ok_or_else(|| format!("missing row {family} n={n}"))
}

fn orbit_sizes(r: &SuiteReport) -> Result<(), String> {
    notes_contain(r, "vas0-IU-Z/2-n2-k1", "orbit 15/15")?;
    notes_contain(r, "vas0-HU-Z/2-n2-k1", "orbit 120/120")?;
    notes_contain(r, "vas0-IU-Z/2-n3-k1", "orbit 63/63")?;
    notes_contain(r, "vas0-IU-Z/2-n3-k2", "orbit 1890/1890")?;
    notes_contain(r, "vas0-IU-Z/3-n2-k1", "orbit 80/80")?;
    notes_contain(r, "vas0-HU-Z/3-n2-k1", "orbit 2160/2160")
}

fn kal5_rows(r: &SuiteReport) -> Result<(), String> {
    let u3 = row(r, "U", 3)?;
    if u3.bound != 1 || u3.verified_through < 1 || u3.method != "snf+pi1" {
        return Err(format!("U3 row {u3:?}"));
    }
    if u3.pi1 != Some(framecomplex::homology::Triviality::Trivial) {
        return Err("U3 pi1 not certified trivial".into());
    }
    let u4 = row(r, "U", 4)?;
    if u4.bound != 2 || u4.verified_through < 2 {
        return Err(format!("U4 row {u4:?}"));
    }
    if !u4.method.starts_with("snf") {
        return Err(format!("U4 H_0 and H_1 not exact over Z: {u4:?}"));
    }
    Ok(())
}

fn frame_rows(r: &SuiteReport) -> Result<(), String> {
    for (fam, n, bound) in [("IU", 2, -1), ("IU", 3, 0), ("HU", 2, -1), ("HU", 3, -1)] {
        let x = row(r, fam, n)?;
        if x.bound != bound || x.verified_through < bound {
            return Err(format!("{fam} n={n}: {x:?}"));
        }
    }
    notes_contain(r, "iu6-connected", "24633 elements")?;
    notes_contain(r, "charn", "390 vs 390")
}

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let mut reports = Vec::new();
    let plan: Vec<(usize, Suite, u64, fn(&SuiteReport) -> Result<(), String>)> = vec![
        (1, Suite::HomologyOracles, 10, |r| notes_contain(r, "opposite", "50/50")),
        (2, Suite::Coefficients, 30, |r| notes_contain(r, "wh1-hexagon-twisted", "coinvariants Z/2")),
        (3, Suite::DoubleComplex, 120, |_| Ok(())),
        (4, Suite::LinkSpheres, 30, |_| Ok(())),
        (5, Suite::StableRange, 120, |_| Ok(())),
        (6, Suite::Orbits, 300, orbit_sizes),
        (7, Suite::HyperbolicCompletion, 300, |r| {
            notes_contain(r, "b-w0-all-1-frames-Z/2-n2", "15/15")?;
            notes_contain(r, "b-w0-sample-1-frames-Z/2-n3", "100/100")?;
            notes_contain(r, "b-w0-sample-2-frames-Z/2-n3", "100/100")
        }),
        (8, Suite::Kal5, 1200, kal5_rows),
        (9, Suite::FrameBounds, 600, frame_rows),
        (10, Suite::Nerve, 600, |r| notes_contain(r, "p-n-t-random", "20/20")),
    ];
    for (id, suite, limit, extra) in plan {
        let (line, report) = suite_line(id, suite, limit, extra);
        println!("criterion {:>2} {}: {}", line.id, if line.ok { "PASS" } else { "FAIL" }, line.text);
        lines.push(line);
        reports.push(report);
    }

    let mut mismatched = Vec::new();
    for first in &reports {
        let again = run_suite(first.suite, SEED, &Budget::default());
        let a = serde_json::to_vec(first).unwrap();
        let b = serde_json::to_vec(&again).unwrap();
        if a != b {
            mismatched.push(first.suite.to_string());
        }
    }
    let ok = mismatched.is_empty();
    let text = if ok { "all 10 suites byte-identical on re-run".to_string() } else { format!("differs: {}", mismatched.join(", ")) };
    println!("criterion 11 {}: {text}", if ok { "PASS" } else { "FAIL" });
    lines.push(Line { id: 11, ok, text });

    let failed: Vec<String> = lines.iter().filter(|l| !l.ok).map(|l| format!("{}: {}", l.id, l.text)).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
