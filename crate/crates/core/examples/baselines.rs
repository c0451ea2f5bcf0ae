//! The literature baselines applied to Fisher-combined PC p-values.
//!
//! cargo run --release --example baselines

use adafilter::simulate::{apply_methods, simulate_replicate, NoiseModel};
use adafilter::{BaselineOptions, Method, ProcedureContext, SimulationConfig};

fn main() -> adafilter::Result<()> {
    let cfg = SimulationConfig {
        pi1: 0.15,
        rho: 0.8,
        ..SimulationConfig::default()
    };
    let model = NoiseModel::for_config(&cfg)?;
    let (truth, p) = simulate_replicate(&cfg, &model, 11);
    let methods = [
        Method::Bonferroni,
        Method::Hochberg,
        Method::AdaptiveBonferroni,
        Method::AdaptiveHochberg,
        Method::AdafilterAdabon,
    ];
    let ctxs: Vec<ProcedureContext> = (2..=4)
        .map(|u| ProcedureContext::fwer(u, 0.05))
        .collect::<Result<_, _>>()?;
    let results = apply_methods(&p, &methods, &ctxs, &BaselineOptions::default())?;
    for (ctx, row) in ctxs.iter().zip(&results) {
        let labels = truth.with_level(ctx.u());
        println!("u = {} ({} false PC nulls)", ctx.u(), labels.num_false());
        for res in row.iter().flatten() {
            println!(
                "  {:<20} rejects {:>3}",
                res.method.name(),
                res.num_rejected()
            );
        }
    }
    Ok(())
}
