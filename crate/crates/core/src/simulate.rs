//! Synthetic meta-analysis data.
//!
//! Per replicate: each feature carries a signal with probability `π₁`; a
//! signal feature draws every study effect independently from `{0, μ}`.
//! Study noise is standard normal, independent across studies and
//! equicorrelated (ρ) within contiguous blocks of features. One-sided
//! p-values are `P_ij = 1 - Φ(μ_ij + ε_ij)`.
//!
//! Randomness is keyed, never shared: replicate `r` of a configuration owns a
//! ChaCha8 key derived from `(master_seed, r)`, and the effect draws and each
//! `(study, block)` noise draw read their own stream under that key. Output
//! is therefore identical for any thread count or evaluation order.

use crate::combiner::{build_paired_scores, Combiner, PValueMatrix};
use crate::dist::normal_sf;
use crate::error::{Error, Result};
use crate::procedures::{
    run_adafilter_adabon, run_adafilter_bon, run_adaptive_bonferroni, run_adaptive_hochberg,
    run_augmented_adabon, run_generalized_bonferroni, run_hochberg_kfwer, Method, ProcedureContext,
    RejectionResult,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Name of the random generator, recorded in output metadata.
pub const RNG_NAME: &str = "chacha8-keyed-v1";

/// One data-generating setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub m: usize,
    pub n: usize,
    pub pi1: f64,
    pub rho: f64,
    pub mu_magnitude: f64,
    /// Replicability level used for labeling.
    pub u: usize,
    pub reps: usize,
    pub master_seed: u64,
    /// Features per correlation block. Default: `m / 5` when `ρ >= 0`, `2`
    /// when `ρ < 0`.
    pub block_size: Option<usize>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            m: 500,
            n: 4,
            pi1: 0.1,
            rho: 0.2,
            mu_magnitude: 4.0,
            u: 2,
            reps: 1000,
            master_seed: 20_240_601,
            block_size: None,
        }
    }
}

impl SimulationConfig {
    pub fn block_size(&self) -> usize {
        self.block_size
            .unwrap_or(if self.rho >= 0.0 { self.m / 5 } else { 2 })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m < 1 {
            return bad("m must be at least 1".into());
        }
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if !(0.0..=1.0).contains(&self.pi1) {
            return bad(format!("pi1 = {} must lie in [0, 1]", self.pi1));
        }
        if !(self.rho > -1.0 && self.rho <= 1.0) {
            return bad(format!("rho = {} must lie in (-1, 1]", self.rho));
        }
        if !self.mu_magnitude.is_finite() {
            return bad("mu_magnitude must be finite".into());
        }
        if self.u < 2 || self.u > self.n {
            return bad(format!("u = {} must lie in 2..={}", self.u, self.n));
        }
        let bs = self.block_size();
        if bs == 0 || !self.m.is_multiple_of(bs) {
            return bad(format!(
                "block size {bs} does not divide m = {} (rho = {})",
                self.m, self.rho
            ));
        }
        // The equicorrelation matrix has eigenvalues 1 - ρ and 1 + (bs - 1)ρ.
        if bs > 1 && 1.0 + (bs as f64 - 1.0) * self.rho <= 0.0 {
            return bad(format!(
                "rho = {} is not a valid correlation for blocks of {bs} features",
                self.rho
            ));
        }
        Ok(())
    }
}

/// True effects and the derived status of each PC null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthLabels {
    m: usize,
    n: usize,
    u: usize,
    /// Row-major `m × n` effects.
    mu: Vec<f64>,
    is_false_pc_null: Vec<bool>,
}

impl TruthLabels {
    /// `H^{u/n}_i` is false iff at least `u` effects of feature `i` are non-zero.
    pub fn from_effects(m: usize, n: usize, u: usize, mu: Vec<f64>) -> Result<Self> {
        if mu.len() != m * n {
            return Err(Error::Domain(format!(
                "expected {} effects, got {}",
                m * n,
                mu.len()
            )));
        }
        let is_false_pc_null = mu
            .chunks_exact(n)
            .map(|row| row.iter().filter(|&&x| x != 0.0).count() >= u)
            .collect();
        Ok(Self {
            m,
            n,
            u,
            mu,
            is_false_pc_null,
        })
    }

    /// Labels for the same effects at another replicability level.
    pub fn with_level(&self, u: usize) -> Self {
        Self::from_effects(self.m, self.n, u, self.mu.clone()).expect("shape unchanged")
    }

    /// Labels built directly from a false-null indicator, without effects.
    pub fn from_flags(u: usize, is_false_pc_null: Vec<bool>) -> Self {
        Self {
            m: is_false_pc_null.len(),
            n: 0,
            u,
            mu: Vec::new(),
            is_false_pc_null,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn u(&self) -> usize {
        self.u
    }
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }
    pub fn is_false_pc_null(&self) -> &[bool] {
        &self.is_false_pc_null
    }
    pub fn num_false(&self) -> usize {
        self.is_false_pc_null.iter().filter(|&&b| b).count()
    }
    pub fn is_true_null(&self, i: usize) -> bool {
        !self.is_false_pc_null[i]
    }
}

/// Keyed random streams of one replicate.
#[derive(Debug, Clone, Copy)]
pub struct ReplicateStreams {
    master_seed: u64,
    replicate: u64,
}

const EFFECT_STREAM: u64 = 0;

impl ReplicateStreams {
    pub fn new(master_seed: u64, replicate: u64) -> Self {
        Self {
            master_seed,
            replicate,
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.replicate.to_le_bytes());
        key[16..24].copy_from_slice(b"adafiltr");
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        rng
    }

    pub fn effects(&self) -> ChaCha8Rng {
        self.rng(EFFECT_STREAM)
    }

    pub fn noise(&self, study: usize, block: usize) -> ChaCha8Rng {
        self.rng((1 << 63) | ((study as u64) << 40) | block as u64)
    }
}

/// Draws signal indicators and effects, labeled at `cfg.u`.
pub fn generate_effects<R: Rng>(cfg: &SimulationConfig, rng: &mut R) -> TruthLabels {
    let (m, n) = (cfg.m, cfg.n);
    let mut mu = vec![0.0; m * n];
    for row in mu.chunks_exact_mut(n) {
        if rng.random::<f64>() < cfg.pi1 {
            for x in row.iter_mut() {
                if rng.random_bool(0.5) {
                    *x = cfg.mu_magnitude;
                }
            }
        }
    }
    TruthLabels::from_effects(m, n, cfg.u, mu).expect("shape is consistent")
}

/// How correlated noise within a block is produced from iid normals.
#[derive(Debug, Clone)]
pub enum NoiseModel {
    /// `ε = √(1-ρ) z + √ρ w` with one shared `w` per block (ρ >= 0).
    SharedFactor { own: f64, shared: f64 },
    /// `ε = L z` with `L` the Cholesky factor of the block correlation.
    Cholesky(DMatrix<f64>),
}

impl NoiseModel {
    pub fn for_config(cfg: &SimulationConfig) -> Result<Self> {
        cfg.validate()?;
        let rho = cfg.rho;
        if rho >= 0.0 {
            return Ok(NoiseModel::SharedFactor {
                own: (1.0 - rho).sqrt(),
                shared: rho.sqrt(),
            });
        }
        let bs = cfg.block_size();
        let corr = DMatrix::from_fn(bs, bs, |i, j| if i == j { 1.0 } else { rho });
        let chol = corr.cholesky().ok_or_else(|| {
            Error::InvalidConfig(format!(
                "block correlation with rho = {rho} is not positive definite"
            ))
        })?;
        Ok(NoiseModel::Cholesky(chol.l()))
    }

    fn fill_block<R: Rng>(&self, rng: &mut R, out: &mut [f64], z: &mut Vec<f64>) {
        match self {
            NoiseModel::SharedFactor { own, shared } => {
                let w: f64 = rng.sample(StandardNormal);
                for e in out.iter_mut() {
                    let zi: f64 = rng.sample(StandardNormal);
                    *e = own * zi + shared * w;
                }
            }
            NoiseModel::Cholesky(l) => {
                z.clear();
                z.extend((0..out.len()).map(|_| rng.sample::<f64, _>(StandardNormal)));
                for (i, e) in out.iter_mut().enumerate() {
                    *e = (0..=i).map(|j| l[(i, j)] * z[j]).sum();
                }
            }
        }
    }
}

/// Row-major `m × n` noise matrix for one replicate.
pub fn generate_noise(
    cfg: &SimulationConfig,
    model: &NoiseModel,
    streams: &ReplicateStreams,
) -> Vec<f64> {
    let (m, n) = (cfg.m, cfg.n);
    let bs = cfg.block_size();
    let mut noise = vec![0.0; m * n];
    let mut column = vec![0.0; bs];
    let mut scratch = Vec::with_capacity(bs);
    for study in 0..n {
        for block in 0..m / bs {
            let mut rng = streams.noise(study, block);
            model.fill_block(&mut rng, &mut column, &mut scratch);
            for (offset, &e) in column.iter().enumerate() {
                noise[(block * bs + offset) * n + study] = e;
            }
        }
    }
    noise
}

/// `P_ij = 1 - Φ(μ_ij + ε_ij)`.
pub fn generate_pvalues(effects: &TruthLabels, noise: &[f64]) -> Result<PValueMatrix> {
    if noise.len() != effects.mu().len() {
        return Err(Error::Domain(format!(
            "noise has {} entries, effects {}",
            noise.len(),
            effects.mu().len()
        )));
    }
    let values = effects
        .mu()
        .iter()
        .zip(noise)
        .map(|(mu, e)| normal_sf(mu + e))
        .collect();
    PValueMatrix::from_row_major(effects.m(), effects.n(), values)
}

/// Data for replicate `r` of `cfg`.
pub fn simulate_replicate(
    cfg: &SimulationConfig,
    model: &NoiseModel,
    r: u64,
) -> (TruthLabels, PValueMatrix) {
    let streams = ReplicateStreams::new(cfg.master_seed, r);
    let truth = generate_effects(cfg, &mut streams.effects());
    let noise = generate_noise(cfg, model, &streams);
    let p = generate_pvalues(&truth, &noise).expect("generated p-values lie in [0, 1]");
    (truth, p)
}

/// Settings of the baseline procedures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineOptions {
    /// Combining function producing the baselines' PC p-values.
    pub combiner: Combiner,
    /// Adaptive Bonferroni tuning.
    pub lambda: f64,
    /// Adaptive Hochberg rank; `None` means `round(0.98 m)`.
    pub kappa: Option<usize>,
}

impl Default for BaselineOptions {
    fn default() -> Self {
        Self {
            combiner: Combiner::Fisher,
            lambda: 0.5,
            kappa: None,
        }
    }
}

impl BaselineOptions {
    pub fn kappa_for(&self, m: usize) -> usize {
        self.kappa
            .unwrap_or_else(|| ((0.98 * m as f64).round() as usize).max(1))
            .min(m)
    }
}

/// Runs each method under each context on one p-value matrix. Methods that
/// only support `k = 1` are skipped (yield `None`) for `k > 1`.
pub fn apply_methods(
    p: &PValueMatrix,
    methods: &[Method],
    ctxs: &[ProcedureContext],
    options: &BaselineOptions,
) -> Result<Vec<Vec<Option<RejectionResult>>>> {
    let mut by_u: Vec<(usize, crate::combiner::PairedScores, Option<Vec<f64>>)> = Vec::new();
    let needs_baseline = methods.iter().any(|m| !m.uses_filter());
    let mut out = Vec::with_capacity(ctxs.len());
    for ctx in ctxs {
        ctx.check_studies(p.n())?;
        let u = ctx.u();
        if !by_u.iter().any(|(v, _, _)| *v == u) {
            let scores = build_paired_scores(p, u)?;
            let pc = if needs_baseline {
                Some(options.combiner.pc_pvalues(p, u)?)
            } else {
                None
            };
            by_u.push((u, scores, pc));
        }
        let (_, scores, pc) = by_u
            .iter()
            .find(|(v, _, _)| *v == u)
            .expect("inserted above");
        let mut row = Vec::with_capacity(methods.len());
        for &method in methods {
            if method.fwer_only() && ctx.k() > 1 {
                row.push(None);
                continue;
            }
            let pc = || pc.as_deref().expect("computed when baselines requested");
            let res = match method {
                Method::AdafilterAdabon => run_adafilter_adabon(scores, ctx),
                Method::AdafilterBon => run_adafilter_bon(scores, ctx),
                Method::AugmentedAdabon => run_augmented_adabon(scores, ctx),
                Method::Bonferroni => run_generalized_bonferroni(pc(), ctx),
                Method::Hochberg => run_hochberg_kfwer(pc(), ctx),
                Method::AdaptiveBonferroni => run_adaptive_bonferroni(pc(), ctx, options.lambda)?,
                Method::AdaptiveHochberg => {
                    run_adaptive_hochberg(pc(), ctx, options.kappa_for(p.m()))?
                }
            };
            row.push(Some(res));
        }
        out.push(row);
    }
    Ok(out)
}

/// One replicate's data labels and procedure outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    /// Labels at `cfg.u`; use [`TruthLabels::with_level`] for other contexts.
    pub truth: TruthLabels,
    /// `results[c][j]`: context `c`, method `j`.
    pub results: Vec<Vec<Option<RejectionResult>>>,
}

/// Runs `cfg.reps` replicates in parallel. The returned vector is in
/// replicate order and does not depend on the number of worker threads.
pub fn run_replicates(
    cfg: &SimulationConfig,
    methods: &[Method],
    ctxs: &[ProcedureContext],
    options: &BaselineOptions,
) -> Result<Vec<ReplicateOutcome>> {
    let model = NoiseModel::for_config(cfg)?;
    for ctx in ctxs {
        ctx.check_studies(cfg.n)?;
    }
    (0..cfg.reps)
        .into_par_iter()
        .map(|r| {
            let (truth, p) = simulate_replicate(cfg, &model, r as u64);
            let results = apply_methods(&p, methods, ctxs, options)?;
            Ok(ReplicateOutcome {
                replicate: r,
                truth,
                results,
            })
        })
        .collect()
}

/// SplitMix64 finalizer, used to derive per-setting seeds.
pub fn mix_seed(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
