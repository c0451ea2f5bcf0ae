//! AdaFilter-Bon and AdaFilter-AdaBon on simulated data with known truth.
//!
//! cargo run --release --example adafilter_thresholds

use adafilter::metrics::{false_discoveries, tpr};
use adafilter::simulate::{simulate_replicate, NoiseModel};
use adafilter::{
    build_paired_scores, run_adafilter_adabon, run_adafilter_bon, ProcedureContext,
    SimulationConfig,
};

fn main() -> adafilter::Result<()> {
    let cfg = SimulationConfig {
        pi1: 0.15,
        rho: 0.2,
        ..SimulationConfig::default()
    };
    let model = NoiseModel::for_config(&cfg)?;
    let (truth, p) = simulate_replicate(&cfg, &model, 0);
    let scores = build_paired_scores(&p, cfg.u)?;
    let ctx = ProcedureContext::fwer(cfg.u, 0.05)?;

    println!(
        "{} of {} PC nulls are false at u = {}",
        truth.num_false(),
        cfg.m,
        cfg.u
    );
    for res in [
        run_adafilter_bon(&scores, &ctx),
        run_adafilter_adabon(&scores, &ctx),
    ] {
        println!(
            "{:<18} threshold {:.5}  rejections {:>3}  false {:>2}  TPR {:.3}  pi0_hat {}",
            res.method.name(),
            res.threshold,
            res.num_rejected(),
            false_discoveries(&res, &truth),
            tpr(&res, &truth),
            res.diagnostics
                .pi0_hat
                .map_or("-".into(), |v| format!("{v:.3}")),
        );
    }
    Ok(())
}
