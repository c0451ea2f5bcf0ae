//! Augmenting a k-FWER rejection set for FDX / FDR control.
//!
//! Given the AdaFilter-AdaBon threshold `t̂_θ`, the augmented procedure
//! rejects `{ i : S_i <= τ̂ }` with
//!
//! ```text
//! τ̂ = sup { τ ∈ [0, 1] : (#{t̂_θ <= S_i <= τ} + k) / (1 ∨ #{S_i <= τ}) <= γ }
//! ```
//!
//! The ratio is a right-continuous step function of `τ` that jumps at the
//! distinct `S_i`, so the feasible set is a union of pieces `[v_j, v_{j+1})`
//! and the supremum is the right end of the highest feasible piece. That end
//! point need not be feasible itself.

use super::{
    indices_where, run_adafilter_adabon, sorted_copy, Diagnostics, Method, ProcedureContext,
    RejectionResult,
};
use crate::combiner::PairedScores;

/// Augments the rejection set `{S_i < t_theta}` to `{S_i <= τ̂}`.
pub fn augment_fdx(s: &[f64], t_theta: f64, ctx: &ProcedureContext) -> RejectionResult {
    let tau = augmented_threshold(&sorted_copy(s), t_theta, ctx.k(), ctx.gamma());
    let mut res =
        RejectionResult::new(Method::AugmentedAdabon, tau, indices_where(s, |v| v <= tau));
    res.diagnostics.base_threshold = Some(t_theta);
    res
}

fn augmented_threshold(sorted: &[f64], t_theta: f64, k: usize, gamma: f64) -> f64 {
    let m = sorted.len();
    let below = sorted.partition_point(|&v| v < t_theta);
    // The piece [0, S_(1)) has no discoveries and ratio k > γ: never feasible.
    let mut tau = 0.0;
    let mut j = 0;
    while j < m {
        let v = sorted[j];
        let mut next = j + 1;
        while next < m && sorted[next] == v {
            next += 1;
        }
        // On [v, next distinct value): #{S <= τ} = next.
        let extra = next.saturating_sub(below);
        let feasible = (extra + k) as f64 <= gamma * next as f64;
        if feasible {
            tau = if next < m { sorted[next] } else { 1.0 };
        }
        j = next;
    }
    tau.min(1.0)
}

/// AdaFilter-AdaBon followed by augmentation.
pub fn run_augmented_adabon(scores: &PairedScores, ctx: &ProcedureContext) -> RejectionResult {
    let base = run_adafilter_adabon(scores, ctx);
    let mut res = augment_fdx(scores.s(), base.threshold, ctx);
    res.diagnostics = Diagnostics {
        base_threshold: Some(base.threshold),
        ..base.diagnostics
    };
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(k: usize, gamma: f64) -> ProcedureContext {
        ProcedureContext::new(2, k, 0.05, 0.5, gamma).unwrap()
    }

    #[test]
    fn examples() {
        let r = augment_fdx(&[0.01, 0.02, 0.9], 0.05, &ctx(1, 0.5));
        assert_eq!(r.threshold, 0.9);
        assert_eq!(r.rejected, vec![0, 1, 2]);

        let r = augment_fdx(&[0.5], 0.6, &ctx(1, 0.9));
        assert_eq!(r.threshold, 0.0);
        assert!(r.rejected.is_empty());

        // Every score already below t_theta: feasible from the second piece on.
        let r = augment_fdx(&[0.2, 0.4, 0.6, 0.8], 0.9, &ctx(1, 0.99));
        assert_eq!(r.threshold, 1.0);
        assert_eq!(r.rejected.len(), 4);
    }

    #[test]
    fn new_discoveries_alone_never_meet_gamma_below_one() {
        let r = augment_fdx(&[0.2, 0.4, 0.6, 0.8], 0.1, &ctx(1, 0.99));
        assert_eq!(r.threshold, 0.0);
        assert!(r.rejected.is_empty());
    }

    #[test]
    fn zero_scores_survive_tau_zero() {
        // Nothing feasible, but exact zeros satisfy S <= 0.
        let r = augment_fdx(&[0.0, 0.3], 0.0, &ctx(1, 0.1));
        assert_eq!(r.threshold, 0.0);
        assert_eq!(r.rejected, vec![0]);
    }

    #[test]
    fn ties_jump_together() {
        // Three tied values below t_theta: ratio 1/3 on [0.01, 0.5).
        let r = augment_fdx(&[0.01, 0.01, 0.01, 0.5], 0.02, &ctx(1, 0.4));
        assert_eq!(r.threshold, 0.5);
        assert_eq!(r.rejected, vec![0, 1, 2, 3]);
    }
}
