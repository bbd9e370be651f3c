//! One line per acceptance criterion; exits nonzero when any fails.
//! Set ZN_GAUGE_ACCEPTANCE_REPORTS to a directory to keep the JSON reports.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use zn_gauge::verify::run_suite;

const CRITERIA: [(u32, &str, &str, u64); 13] = [
    (1, "algebra", "operator algebra", 60),
    (2, "surfaces", "surface builder", 60),
    (3, "closed-form", "oracle closed form", 1),
    (4, "sampler", "sampler vs oracle", 120),
    (5, "resampling", "resampling identity", 600),
    (6, "decomposition", "vortex decomposition invariants", 0),
    (7, "census", "counting lemma census", 300),
    (8, "agreement", "agreement-probability bound", 120),
    (9, "s-beta", "S_β crucial bound", 180),
    (10, "theta", "θ asymptotics", 1),
    (11, "monotonicity", "Ginibre monotonicity", 300),
    (12, "envelope", "Wilson-loop envelope", 600),
    (13, "vortex-probability", "empirical vortex probability", 600),
];

fn main() -> ExitCode {
    let keep = std::env::var_os("ZN_GAUGE_ACCEPTANCE_REPORTS");
    let mut failed = 0;
    for (id, suite, title, budget) in CRITERIA {
        let start = Instant::now();
        let result = run_suite(suite, false);
        let elapsed = start.elapsed();
        let in_time = budget == 0 || elapsed <= Duration::from_secs(budget);
        let budget_text = if budget == 0 { "no time limit".to_string() } else { format!("limit {budget} s") };
        match result {
            Ok(report) => {
                let ok = report.passed && in_time;
                failed += usize::from(!ok);
                println!(
                    "criterion {id:>2} {} {title}: {} checks, {} failed, {:.1} s ({budget_text})",
                    if ok { "PASS" } else { "FAIL" },
                    report.checks.len(),
                    report.failures().count(),
                    elapsed.as_secs_f64()
                );
                for c in report.failures() {
                    println!("    {}: measured {:e}, target {:e}, margin {:e} {}", c.name, c.measured, c.target, c.margin, c.note);
                }
                if let Some(dir) = &keep {
                    let path = std::path::Path::new(dir).join(format!("{id:02}-{suite}.json"));
                    std::fs::write(path, report.to_json()).expect("report directory is writable");
                }
            }
            Err(e) => {
                failed += 1;
                println!("criterion {id:>2} FAIL {title}: {e}");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
