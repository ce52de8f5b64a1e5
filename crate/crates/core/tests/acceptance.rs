//! Acceptance harness: one PASS/FAIL line per criterion.
//! Pass `--big` (or set MGCAT_BIG=1) to add G2.

use std::time::Instant;

use mgcat_core::suites::{run, Session, Verdict, CRITERIA};

const DESK: [&str; 4] = ["A1", "A1xA1", "A2", "B2"];

fn main() {
    let big = std::env::args().any(|a| a == "--big")
        || std::env::var("MGCAT_BIG").is_ok_and(|v| v == "1");
    let mut names: Vec<&str> = DESK.to_vec();
    if big {
        names.push("G2");
    }
    let sessions: Vec<Session> = names
        .iter()
        .map(|n| Session::builtin(n).expect("builtin system"))
        .collect();
    let a3 = Session::builtin("A3").expect("builtin system");
    let mut failed = 0;
    for &(n, name, _) in &CRITERIA {
        let t0 = Instant::now();
        let mut verdicts: Vec<Verdict> = sessions.iter().map(|s| run(n, s)).collect();
        if n == 1 {
            verdicts.push(run(1, &a3));
        }
        let pass = verdicts.iter().all(|v| v.pass);
        let systems: Vec<String> = verdicts
            .iter()
            .map(|v| format!("{}{}", v.system, if v.pass { "" } else { "!" }))
            .collect();
        println!(
            "{} {n:>2} {name}: {} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            systems.join(" "),
            t0.elapsed().as_secs_f64()
        );
        for v in verdicts.iter().filter(|v| !v.pass) {
            println!("     {} {}", v.system, v.detail);
        }
        failed += usize::from(!pass);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
