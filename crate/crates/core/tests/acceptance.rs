//! Full-scale acceptance battery, one line per criterion.

use std::time::{Duration, Instant};

use logchart::verify::{run_criterion, Scale, SuiteConfig, CRITERIA, DEFAULT_SEED};

#[test]
fn acceptance_criteria() {
    let cfg = SuiteConfig { scale: Scale::Full, seed: DEFAULT_SEED };
    let start = Instant::now();
    let mut failed = Vec::new();
    for &(id, _) in CRITERIA.iter() {
        let o = run_criterion(id, cfg);
        let mark = if o.passed { "PASS" } else { "FAIL" };
        println!("[{mark}] criterion {id}: {} | {} | {:.2?}", o.name, o.summary, o.duration);
        if !o.passed {
            println!("       counterexample: {}", o.counterexample.clone().unwrap_or_default());
            failed.push(id);
        }
    }
    let total = start.elapsed();
    let within = total <= Duration::from_secs(300);
    println!(
        "[{}] full suite wall-clock {:.2?} (limit 300s)",
        if within { "PASS" } else { "FAIL" },
        total
    );
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
    assert!(within, "full suite took {total:.2?}");
}

#[test]
fn smoke_suite_is_fast() {
    let cfg = SuiteConfig { scale: Scale::Smoke, seed: DEFAULT_SEED };
    let report = logchart::verify::run_suite(cfg);
    let ok = report.passed();
    println!(
        "[{}] smoke suite wall-clock {:.2?} (limit 30s)",
        if ok { "PASS" } else { "FAIL" },
        report.duration
    );
    for o in &report.outcomes {
        assert!(o.passed, "smoke criterion {}: {}", o.id, o.summary);
    }
    assert!(report.duration <= Duration::from_secs(30), "smoke suite took {:.2?}", report.duration);
}
