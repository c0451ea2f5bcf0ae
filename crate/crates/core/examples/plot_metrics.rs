//! Runs a small sweep and renders its figure to `metrics_k1.svg` in the
//! directory given as the first argument (default: the system temp dir).
//!
//! cargo run --release --example plot_metrics -- out/

use adafilter::plot::plot_metrics;
use adafilter::{run_sweep, SweepConfig};
use std::path::PathBuf;

fn main() -> adafilter::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let cfg = SweepConfig {
        reps: 50,
        ..SweepConfig::default()
    };
    let records = run_sweep(&cfg)?;
    for path in plot_metrics(&records, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
