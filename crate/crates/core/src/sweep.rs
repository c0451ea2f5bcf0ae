//! Parameter sweeps: every method over a grid of `(π₁, ρ, u, k)` settings.
//!
//! Data depend only on `(π₁, ρ)` and the replicate index, so all `(u, k)`
//! contexts and all methods are evaluated on the same simulated matrices.

use crate::combiner::Combiner;
use crate::error::{Error, Result};
use crate::metrics::{aggregate_stats, MetricsRecord, ReplicateStats, Setting};
use crate::procedures::{Method, ProcedureContext};
use crate::simulate::{
    apply_methods, mix_seed, simulate_replicate, BaselineOptions, NoiseModel, SimulationConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A full simulation sweep. Every field has a default, so a config file
/// only lists what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub m: usize,
    pub n: usize,
    pub mu_magnitude: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub block_size: Option<usize>,
    pub alpha: f64,
    pub theta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub kappa: Option<usize>,
    pub combiner: Combiner,
    pub pi1: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<usize>,
    pub k: Vec<usize>,
    pub methods: Vec<Method>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m: 500,
            n: 4,
            mu_magnitude: 4.0,
            reps: 1000,
            master_seed: 20_240_601,
            block_size: None,
            alpha: 0.05,
            theta: 0.5,
            gamma: 0.1,
            lambda: 0.5,
            kappa: None,
            combiner: Combiner::Fisher,
            pi1: vec![0.025, 0.05, 0.075, 0.10, 0.125, 0.15],
            rho: vec![-0.8, -0.2, 0.2, 0.8],
            u: vec![2, 3, 4],
            k: vec![1],
            methods: vec![
                Method::AdafilterAdabon,
                Method::AdafilterBon,
                Method::Bonferroni,
                Method::Hochberg,
                Method::AdaptiveBonferroni,
                Method::AdaptiveHochberg,
            ],
        }
    }
}

impl SweepConfig {
    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn baseline_options(&self) -> BaselineOptions {
        BaselineOptions {
            combiner: self.combiner,
            lambda: self.lambda,
            kappa: self.kappa,
        }
    }

    /// The single-setting configuration for `(π₁, ρ)`.
    pub fn setting_config(&self, pi1: f64, rho: f64) -> SimulationConfig {
        let key = mix_seed(pi1.to_bits()) ^ mix_seed(rho.to_bits().rotate_left(17));
        SimulationConfig {
            m: self.m,
            n: self.n,
            pi1,
            rho,
            mu_magnitude: self.mu_magnitude,
            u: *self.u.first().unwrap_or(&2),
            reps: self.reps,
            master_seed: mix_seed(self.master_seed ^ key),
            block_size: self.block_size,
        }
    }

    /// All `(u, k)` contexts in sweep order.
    pub fn contexts(&self) -> Result<Vec<ProcedureContext>> {
        let mut out = Vec::new();
        for &k in &self.k {
            for &u in &self.u {
                out.push(ProcedureContext::new(
                    u, k, self.alpha, self.theta, self.gamma,
                )?);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.pi1.is_empty() || self.rho.is_empty() || self.u.is_empty() || self.k.is_empty() {
            return bad("pi1, rho, u and k must each list at least one value".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad(format!("lambda = {} must lie in (0, 1)", self.lambda));
        }
        if let Some(kappa) = self.kappa {
            if kappa < 1 || kappa > self.m {
                return bad(format!("kappa = {kappa} must lie in 1..={}", self.m));
            }
        }
        self.contexts()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        for &pi1 in &self.pi1 {
            for &rho in &self.rho {
                for &u in &self.u {
                    SimulationConfig {
                        u,
                        ..self.setting_config(pi1, rho)
                    }
                    .validate()?;
                }
            }
        }
        Ok(())
    }
}

/// Runs the sweep and returns one record per method and setting, ordered by
/// `k`, `u`, `ρ`, `π₁`, then method.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<MetricsRecord>> {
    cfg.validate()?;
    let ctxs = cfg.contexts()?;
    let options = cfg.baseline_options();
    let mut records = Vec::new();
    for &rho in &cfg.rho {
        for &pi1 in &cfg.pi1 {
            let sim = cfg.setting_config(pi1, rho);
            let model = NoiseModel::for_config(&sim)?;
            let per_rep: Vec<Vec<Vec<Option<ReplicateStats>>>> = (0..sim.reps)
                .into_par_iter()
                .map(|r| {
                    let (truth, p) = simulate_replicate(&sim, &model, r as u64);
                    let results = apply_methods(&p, &cfg.methods, &ctxs, &options)?;
                    Ok(results
                        .iter()
                        .zip(&ctxs)
                        .map(|(row, ctx)| {
                            let labels = truth.with_level(ctx.u());
                            row.iter()
                                .map(|res| res.as_ref().map(|r| ReplicateStats::new(r, &labels)))
                                .collect()
                        })
                        .collect())
                })
                .collect::<Result<_>>()?;
            for (c, ctx) in ctxs.iter().enumerate() {
                for (j, &method) in cfg.methods.iter().enumerate() {
                    if method.fwer_only() && ctx.k() > 1 {
                        continue;
                    }
                    let stats: Vec<ReplicateStats> = per_rep
                        .iter()
                        .map(|rep| rep[c][j].expect("method ran"))
                        .collect();
                    let setting = Setting {
                        u: ctx.u(),
                        k: ctx.k(),
                        alpha: ctx.alpha(),
                        pi1,
                        rho,
                        theta: ctx.theta(),
                        gamma: ctx.gamma(),
                    };
                    records.push(aggregate_stats(method, setting, &stats));
                }
            }
        }
    }
    let method_rank = |m: Method| {
        cfg.methods
            .iter()
            .position(|&x| x == m)
            .unwrap_or(usize::MAX)
    };
    records.sort_by(|a, b| {
        (a.setting.k, a.setting.u)
            .cmp(&(b.setting.k, b.setting.u))
            .then(a.setting.rho.total_cmp(&b.setting.rho))
            .then(a.setting.pi1.total_cmp(&b.setting.pi1))
            .then(method_rank(a.method).cmp(&method_rank(b.method)))
    });
    Ok(records)
}
