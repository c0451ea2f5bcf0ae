//! Single-study k-FWER procedures applied to PC p-values.

use super::{indices_where, Method, ProcedureContext, RejectionResult};
use crate::error::{domain, Error, Result};

/// Generalized Bonferroni: reject `p_i <= kα/m`.
pub fn run_generalized_bonferroni(p: &[f64], ctx: &ProcedureContext) -> RejectionResult {
    let m = p.len().max(1) as f64;
    let threshold = (ctx.level() / m).min(1.0);
    RejectionResult::new(
        Method::Bonferroni,
        threshold,
        indices_where(p, |v| v <= threshold),
    )
}

/// Step-up with non-decreasing critical values `crit(j)`, `j = 1..=m`:
/// reject the `j*` smallest p-values, `j* = max { j : p_(j) <= crit(j) }`.
/// Returns the rejected set and `crit(max(j*, 1))`.
fn step_up(p: &[f64], crit: impl Fn(usize) -> f64) -> (Vec<usize>, f64) {
    let mut sorted = p.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let j_star = (1..=sorted.len())
        .rev()
        .find(|&j| sorted[j - 1] <= crit(j))
        .unwrap_or(0);
    if j_star == 0 {
        return (Vec::new(), crit(1));
    }
    // Critical values are non-decreasing, so ties with p_(j*) are rejected too.
    let cut = sorted[j_star - 1];
    (indices_where(p, |v| v <= cut), crit(j_star))
}

/// Step-up k-FWER procedure with critical values `kα/m` for `j <= k` and
/// `kα/(m + k - j)` for `j > k`.
pub fn run_hochberg_kfwer(p: &[f64], ctx: &ProcedureContext) -> RejectionResult {
    let m = p.len();
    let k = ctx.k();
    let level = ctx.level();
    let crit = |j: usize| {
        let denom = if j <= k { m } else { m + k - j };
        (level / denom.max(1) as f64).min(1.0)
    };
    let (rejected, threshold) = step_up(p, crit);
    RejectionResult::new(Method::Hochberg, threshold, rejected)
}

fn require_fwer(method: Method, ctx: &ProcedureContext) -> Result<()> {
    if ctx.k() != 1 {
        return Err(Error::Unsupported(format!(
            "{method} controls the FWER only (k = 1), got k = {}",
            ctx.k()
        )));
    }
    Ok(())
}

/// Adaptive Bonferroni with `m̂₀ = (#{p_i > λ} + 1) / (1 - λ)`; rejects
/// `p_i <= α / m̂₀`.
pub fn run_adaptive_bonferroni(
    p: &[f64],
    ctx: &ProcedureContext,
    lambda: f64,
) -> Result<RejectionResult> {
    require_fwer(Method::AdaptiveBonferroni, ctx)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return domain(format!("lambda = {lambda} must lie in (0, 1)"));
    }
    let above = p.iter().filter(|&&v| v > lambda).count();
    let m0_hat = (above as f64 + 1.0) / (1.0 - lambda);
    let threshold = (ctx.alpha() / m0_hat).min(1.0);
    Ok(RejectionResult::new(
        Method::AdaptiveBonferroni,
        threshold,
        indices_where(p, |v| v <= threshold),
    ))
}

/// Estimated number of true nulls `n̂(κ) = (m - κ + 1) / (1 - p_(κ))`, clamped
/// to `[1, m]`.
pub(crate) fn null_count_estimate(sorted: &[f64], kappa: usize) -> f64 {
    let m = sorted.len() as f64;
    let p_kappa = sorted[kappa - 1];
    let raw = if p_kappa >= 1.0 {
        f64::INFINITY
    } else {
        (m - kappa as f64 + 1.0) / (1.0 - p_kappa)
    };
    raw.clamp(1.0, m)
}

/// Adaptive Hochberg step-up with critical values `α / min(n̂(κ), m - j + 1)`.
pub fn run_adaptive_hochberg(
    p: &[f64],
    ctx: &ProcedureContext,
    kappa: usize,
) -> Result<RejectionResult> {
    require_fwer(Method::AdaptiveHochberg, ctx)?;
    let m = p.len();
    if kappa < 1 || kappa > m {
        return domain(format!("kappa = {kappa} must lie in 1..={m}"));
    }
    let mut sorted = p.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n_hat = null_count_estimate(&sorted, kappa);
    let alpha = ctx.alpha();
    let crit = |j: usize| (alpha / n_hat.min((m - j + 1) as f64)).min(1.0);
    let (rejected, threshold) = step_up(p, crit);
    Ok(RejectionResult::new(
        Method::AdaptiveHochberg,
        threshold,
        rejected,
    ))
}
