//! Augmenting an AdaFilter-AdaBon rejection set for FDX control.
//!
//! cargo run --release --example fdx_augmentation

use adafilter::metrics::false_discoveries;
use adafilter::simulate::{simulate_replicate, NoiseModel};
use adafilter::{
    build_paired_scores, run_adafilter_adabon, run_augmented_adabon, ProcedureContext,
    SimulationConfig,
};

fn main() -> adafilter::Result<()> {
    let cfg = SimulationConfig {
        pi1: 0.1,
        rho: -0.2,
        ..SimulationConfig::default()
    };
    let model = NoiseModel::for_config(&cfg)?;
    let (truth, p) = simulate_replicate(&cfg, &model, 3);
    let scores = build_paired_scores(&p, 2)?;

    for gamma in [0.05, 0.1, 0.2] {
        let ctx = ProcedureContext::new(2, 1, 0.05, 0.5, gamma)?;
        let base = run_adafilter_adabon(&scores, &ctx);
        let aug = run_augmented_adabon(&scores, &ctx);
        let v = false_discoveries(&aug, &truth);
        println!(
            "gamma {gamma:.2}: k-FWER set {:>3} -> augmented {:>3} (tau {:.5}), FDP {:.3}",
            base.num_rejected(),
            aug.num_rejected(),
            aug.threshold,
            v as f64 / aug.num_rejected().max(1) as f64
        );
    }
    Ok(())
}
