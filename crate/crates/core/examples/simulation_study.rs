//! A reduced simulation sweep printed as a table. Pass a replicate count to
//! change the default of 100.
//!
//! cargo run --release --example simulation_study -- 300

use adafilter::{run_sweep, SweepConfig};

fn main() -> adafilter::Result<()> {
    let reps = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(100);
    let cfg = SweepConfig {
        reps,
        pi1: vec![0.05, 0.1, 0.15],
        rho: vec![-0.8, 0.8],
        ..SweepConfig::default()
    };
    let records = run_sweep(&cfg)?;
    println!(
        "{:<20} {:>2} {:>5} {:>5} {:>7} {:>7}",
        "method", "u", "rho", "pi1", "FWER", "TPR"
    );
    for r in &records {
        let s = &r.setting;
        println!(
            "{:<20} {:>2} {:>5} {:>5} {:>7.4} {:>7.4}",
            r.method.name(),
            s.u,
            s.rho,
            s.pi1,
            r.kfwer,
            r.tpr
        );
    }
    Ok(())
}
