//! Rejection procedures for partial-conjunction nulls.
//!
//! The AdaFilter family works on [`PairedScores`](crate::combiner::PairedScores)
//! (Bonferroni-combined `S_i` with filtering `F_i`); the literature baselines
//! work on a plain vector of PC p-values. Every threshold is computed exactly
//! from the piecewise structure of its defining condition.

mod adafilter;
mod augment;
mod baselines;

pub use adafilter::{
    adabon_threshold, adafilter_bon_threshold, estimate_pi0, grid_surrogate_threshold,
    leave_one_out_threshold, run_adafilter_adabon, run_adafilter_bon, Pi0Estimate,
};
pub use augment::{augment_fdx, run_augmented_adabon};
pub use baselines::{
    run_adaptive_bonferroni, run_adaptive_hochberg, run_generalized_bonferroni, run_hochberg_kfwer,
};

use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Tuning shared by every procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcedureContext {
    u: usize,
    k: usize,
    alpha: f64,
    theta: f64,
    gamma: f64,
}

impl ProcedureContext {
    /// `u >= 2`, `k >= 1`, `0 < alpha <= 1`, `0 < theta < 1`, `0 < gamma < 1`.
    /// The upper bound `u <= n` is checked once the study count is known.
    pub fn new(u: usize, k: usize, alpha: f64, theta: f64, gamma: f64) -> Result<Self> {
        if u < 2 {
            return domain(format!("replicability level u = {u} must be at least 2"));
        }
        if k < 1 {
            return domain("tolerance k must be at least 1");
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return domain(format!("alpha = {alpha} must lie in (0, 1]"));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return domain(format!("theta = {theta} must lie in (0, 1)"));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return domain(format!("gamma = {gamma} must lie in (0, 1)"));
        }
        Ok(Self {
            u,
            k,
            alpha,
            theta,
            gamma,
        })
    }

    /// FWER control (`k = 1`) at `alpha` with `theta = 0.5` and `gamma = 0.1`.
    pub fn fwer(u: usize, alpha: f64) -> Result<Self> {
        Self::new(u, 1, alpha, 0.5, 0.1)
    }

    pub fn u(&self) -> usize {
        self.u
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `k · alpha`, the budget on the expected number of false rejections.
    pub fn level(&self) -> f64 {
        self.k as f64 * self.alpha
    }

    /// Checks `u <= n` for a study count `n`.
    pub fn check_studies(&self, n: usize) -> Result<()> {
        if self.u > n {
            return domain(format!(
                "replicability level u = {} exceeds n = {n}",
                self.u
            ));
        }
        Ok(())
    }
}

/// Procedures compared in the simulation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AdafilterAdabon,
    AdafilterBon,
    Bonferroni,
    Hochberg,
    AdaptiveBonferroni,
    AdaptiveHochberg,
    /// AdaFilter-AdaBon augmented for FDX / FDR control.
    AugmentedAdabon,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::AdafilterAdabon,
        Method::AdafilterBon,
        Method::Bonferroni,
        Method::Hochberg,
        Method::AdaptiveBonferroni,
        Method::AdaptiveHochberg,
        Method::AugmentedAdabon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::AdafilterAdabon => "adafilter-adabon",
            Method::AdafilterBon => "adafilter-bon",
            Method::Bonferroni => "bonferroni",
            Method::Hochberg => "hochberg",
            Method::AdaptiveBonferroni => "adaptive-bonferroni",
            Method::AdaptiveHochberg => "adaptive-hochberg",
            Method::AugmentedAdabon => "augmented-adabon",
        }
    }

    /// True for procedures that consume `(S_i, F_i)` pairs.
    pub fn uses_filter(self) -> bool {
        matches!(
            self,
            Method::AdafilterAdabon | Method::AdafilterBon | Method::AugmentedAdabon
        )
    }

    /// True for procedures defined only for `k = 1`.
    pub fn fwer_only(self) -> bool {
        matches!(self, Method::AdaptiveBonferroni | Method::AdaptiveHochberg)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::Domain(format!("unknown method '{s}'")))
    }
}

/// Extra quantities reported alongside a rejection set.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `π̂₀(t; θ)` at the operative threshold, when any feature survives.
    pub pi0_hat: Option<f64>,
    /// Features with `F_i < threshold` (0-based, ascending). `None` for
    /// procedures without a filter.
    pub survivors: Option<Vec<usize>>,
    /// Maximum of the finite candidate grid `{0, 1, F_i, S_i, S_i/θ}`.
    pub grid_threshold: Option<f64>,
    /// For augmented procedures, the k-FWER threshold being augmented.
    pub base_threshold: Option<f64>,
}

/// Outcome of one procedure on one data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionResult {
    pub method: Method,
    /// Operative threshold (`t̂`, `t̂_θ`, `τ̂`, or a baseline's critical value).
    pub threshold: f64,
    /// Rejected features, 0-based and ascending.
    pub rejected: Vec<usize>,
    pub diagnostics: Diagnostics,
}

impl RejectionResult {
    pub(crate) fn new(method: Method, threshold: f64, rejected: Vec<usize>) -> Self {
        Self {
            method,
            threshold,
            rejected,
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn num_rejected(&self) -> usize {
        self.rejected.len()
    }

    /// Rejection indicator per feature.
    pub fn mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &i in &self.rejected {
            mask[i] = true;
        }
        mask
    }
}

pub(crate) fn indices_where(values: &[f64], keep: impl Fn(f64) -> bool) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| keep(v))
        .map(|(i, _)| i)
        .collect()
}

pub(crate) fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}
