//! AdaFilter-Bon and AdaFilter-AdaBon.
//!
//! Both thresholds are suprema of `{t : t · N(t) <= kα}`-type sets where
//! `N(t)` is a count that only changes at the data points. Between two
//! consecutive breakpoints `a < b` the count is constant on the half-open
//! piece `(a, b]` (a feature enters `#{F_i < t}` just after `F_i`, and leaves
//! `#{S_i >= θt}` just after `S_i / θ`), so the feasible part of each piece is
//! `(a, min(b, cap)]` for a closed-form `cap`. Sweeping the sorted breakpoints
//! therefore yields the exact supremum in `O(m log m)`.

use super::{indices_where, sorted_copy, Diagnostics, Method, ProcedureContext, RejectionResult};
use crate::combiner::PairedScores;
use crate::error::{domain, Error, Result};

/// `t̂ = sup { t ∈ [0, kα] : t · #{F_i < t} <= kα }`.
pub fn adafilter_bon_threshold(f: &[f64], ctx: &ProcedureContext) -> f64 {
    bon_threshold_sorted(&sorted_copy(f), ctx.level())
}

fn bon_threshold_sorted(sorted: &[f64], level: f64) -> f64 {
    // Piece [0, F_(1)] has count 0 and is always feasible.
    let mut best = sorted.first().map_or(level, |&v| v.min(level));
    let m = sorted.len();
    let mut j = 0;
    while j < m {
        let a = sorted[j];
        let mut next = j + 1;
        while next < m && sorted[next] == a {
            next += 1;
        }
        // On (a, b] exactly `next` filtering p-values lie below t.
        let b = sorted.get(next).copied().unwrap_or(f64::INFINITY);
        let hi = b.min(level / next as f64).min(level);
        if hi > a {
            best = hi;
        } else {
            // cap only shrinks and a only grows from here on.
            break;
        }
        j = next;
    }
    best
}

/// Rejects `{ i : S_i < t̂ }`.
pub fn run_adafilter_bon(scores: &PairedScores, ctx: &ProcedureContext) -> RejectionResult {
    let t = adafilter_bon_threshold(scores.f(), ctx);
    let mut res = RejectionResult::new(
        Method::AdafilterBon,
        t,
        indices_where(scores.s(), |s| s < t),
    );
    res.diagnostics.survivors = Some(indices_where(scores.f(), |f| f < t));
    res
}

/// `t̂_i`: the AdaFilter-Bon threshold recomputed with feature `i` counted
/// as surviving at every `t > 0`, i.e. with `F_i` replaced by 0.
pub fn leave_one_out_threshold(f: &[f64], i: usize, ctx: &ProcedureContext) -> Result<f64> {
    if i >= f.len() {
        return domain(format!(
            "feature index {i} out of range for m = {}",
            f.len()
        ));
    }
    let mut g = f.to_vec();
    g[i] = 0.0;
    Ok(adafilter_bon_threshold(&g, ctx))
}

/// Post-filter null-proportion estimate at a single `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pi0Estimate {
    pub t: f64,
    pub theta: f64,
    pub value: f64,
    /// `#{F_i < t}`.
    pub survivors: usize,
}

/// `π̂₀(t; θ) = #{F_i < t, S_i >= θt} / ((1 - θt) #{F_i < t})`.
pub fn estimate_pi0(scores: &PairedScores, t: f64, theta: f64) -> Result<Pi0Estimate> {
    if !(t > 0.0 && t <= 1.0) {
        return domain(format!("t = {t} must lie in (0, 1]"));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return domain(format!("theta = {theta} must lie in (0, 1)"));
    }
    let (mut survivors, mut large) = (0usize, 0usize);
    for (&s, &f) in scores.s().iter().zip(scores.f()) {
        if f < t {
            survivors += 1;
            if s >= theta * t {
                large += 1;
            }
        }
    }
    if survivors == 0 {
        return Err(Error::UndefinedEstimate { t });
    }
    Ok(Pi0Estimate {
        t,
        theta,
        value: large as f64 / ((1.0 - theta * t) * survivors as f64),
        survivors,
    })
}

/// AdaFilter-AdaBon threshold
/// `t̂_θ = sup { t ∈ [0, 1] : t · #{F_i < t, S_i >= θt} / (1 - θt) <= kα }`.
///
/// The condition is evaluated in product form, so an empty count gives 0.
/// Breakpoints are `{0, 1} ∪ {F_i} ∪ {S_i/θ}` (those `<= 1`); on a piece
/// `(a, b]` with count `c > 0` the condition reads `t <= kα / (c + θkα)`.
pub fn adabon_threshold(scores: &PairedScores, ctx: &ProcedureContext) -> f64 {
    adabon_threshold_raw(scores.s(), scores.f(), ctx.theta(), ctx.level())
}

fn adabon_threshold_raw(s: &[f64], f: &[f64], theta: f64, level: f64) -> f64 {
    let f_sorted = sorted_copy(f);
    // S_i/θ is monotone in S_i.
    let q_sorted: Vec<f64> = sorted_copy(s).into_iter().map(|v| v / theta).collect();

    let mut bounds = Vec::with_capacity(f.len() + s.len() + 2);
    bounds.push(0.0);
    bounds.push(1.0);
    bounds.extend(f_sorted.iter().copied().filter(|&v| v > 0.0 && v < 1.0));
    bounds.extend(q_sorted.iter().copied().filter(|&v| v > 0.0 && v < 1.0));
    bounds.sort_unstable_by(f64::total_cmp);
    bounds.dedup();

    let m = f.len();
    let (mut nf, mut nq) = (0usize, 0usize);
    let mut best = 0.0;
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        while nf < m && f_sorted[nf] <= a {
            nf += 1;
        }
        while nq < m && q_sorted[nq] <= a {
            nq += 1;
        }
        // On (a, b]: F_i < t  <=>  F_i <= a, and S_i < θt  <=>  S_i/θ <= a.
        // S_i < θt implies F_i < t, so the surviving-and-large count is a
        // difference of the two.
        let count = nf.saturating_sub(nq);
        let hi = if count == 0 {
            b
        } else {
            b.min(level / (count as f64 + theta * level))
        };
        if hi > a {
            best = hi;
        }
    }
    best
}

/// Maximum of the condition over the finite grid
/// `G = {0, 1} ∪ {F_i, S_i, S_i/θ : <= 1}`.
///
/// This grid misses the supremum whenever it lies strictly inside a piece
/// that begins at some `S_j/θ` where the count drops; see
/// [`adabon_threshold`] for the exact value. Kept as a diagnostic.
pub fn grid_surrogate_threshold(scores: &PairedScores, ctx: &ProcedureContext) -> f64 {
    let theta = ctx.theta();
    let level = ctx.level();
    let f_sorted = sorted_copy(scores.f());
    let s_sorted = sorted_copy(scores.s());
    let count = |t: f64| {
        let below_f = f_sorted.partition_point(|&v| v < t);
        let below_s = s_sorted.partition_point(|&v| v < theta * t);
        below_f.saturating_sub(below_s)
    };
    let candidates = scores
        .f()
        .iter()
        .chain(scores.s())
        .copied()
        .chain(scores.s().iter().map(|&v| v / theta))
        .chain([0.0, 1.0])
        .filter(|&t| t <= 1.0);
    candidates
        .filter(|&t| t * count(t) as f64 <= level * (1.0 - theta * t))
        .fold(0.0, f64::max)
}

/// Rejects `{ i : S_i < t̂_θ }`.
pub fn run_adafilter_adabon(scores: &PairedScores, ctx: &ProcedureContext) -> RejectionResult {
    let t = adabon_threshold(scores, ctx);
    let mut res = RejectionResult::new(
        Method::AdafilterAdabon,
        t,
        indices_where(scores.s(), |s| s < t),
    );
    let survivors = indices_where(scores.f(), |f| f < t);
    res.diagnostics = Diagnostics {
        pi0_hat: estimate_pi0(scores, t.max(f64::MIN_POSITIVE), ctx.theta())
            .ok()
            .map(|e| e.value),
        survivors: Some(survivors),
        grid_threshold: Some(grid_surrogate_threshold(scores, ctx)),
        base_threshold: None,
    };
    res
}
