//! Error-rate and power estimates over simulation replicates.

use crate::error::{Error, Result};
use crate::procedures::{Method, RejectionResult};
use crate::simulate::TruthLabels;
use serde::{Deserialize, Serialize};

/// Number of rejected features whose PC null is true.
pub fn false_discoveries(result: &RejectionResult, truth: &TruthLabels) -> usize {
    result
        .rejected
        .iter()
        .filter(|&&i| truth.is_true_null(i))
        .count()
}

/// `|R ∩ false nulls| / (1 ∨ #false nulls)`.
pub fn tpr(result: &RejectionResult, truth: &TruthLabels) -> f64 {
    let hits = result
        .rejected
        .iter()
        .filter(|&&i| !truth.is_true_null(i))
        .count();
    hits as f64 / truth.num_false().max(1) as f64
}

/// Proportion of true nulls among the features surviving the filter, 0 when
/// nothing survives. Procedures without a filter keep every feature.
pub fn post_filter_null_proportion(result: &RejectionResult, truth: &TruthLabels) -> f64 {
    match &result.diagnostics.survivors {
        Some(surv) if surv.is_empty() => 0.0,
        Some(surv) => {
            surv.iter().filter(|&&i| truth.is_true_null(i)).count() as f64 / surv.len() as f64
        }
        None => (truth.m() - truth.num_false()) as f64 / truth.m().max(1) as f64,
    }
}

/// Per-replicate summary feeding [`aggregate_stats`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateStats {
    pub false_discoveries: usize,
    pub rejections: usize,
    pub tpr: f64,
    pub pi0_at_threshold: f64,
}

impl ReplicateStats {
    pub fn new(result: &RejectionResult, truth: &TruthLabels) -> Self {
        Self {
            false_discoveries: false_discoveries(result, truth),
            rejections: result.num_rejected(),
            tpr: tpr(result, truth),
            pi0_at_threshold: post_filter_null_proportion(result, truth),
        }
    }

    /// False discovery proportion `V / (1 ∨ |R|)`.
    pub fn fdp(&self) -> f64 {
        self.false_discoveries as f64 / self.rejections.max(1) as f64
    }
}

/// Parameters identifying one row of a metrics table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub u: usize,
    pub k: usize,
    pub alpha: f64,
    pub pi1: f64,
    pub rho: f64,
    pub theta: f64,
    pub gamma: f64,
}

/// Monte Carlo estimates for one method in one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub method: Method,
    pub setting: Setting,
    pub reps: usize,
    pub kfwer: f64,
    pub kfwer_se: f64,
    pub tpr: f64,
    pub tpr_se: f64,
    pub fdx: f64,
    pub fdx_se: f64,
    pub fdr: f64,
    pub fdr_se: f64,
    /// Mean of the true post-filter null proportion at the threshold.
    pub mean_pi0: f64,
}

/// Binomial standard error `sqrt(p(1-p)/reps)`.
pub fn binomial_se(p: f64, reps: usize) -> f64 {
    if reps == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / reps as f64).max(0.0).sqrt()
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, reps: usize) -> (f64, f64) {
    if reps == 0 {
        return (0.0, 0.0);
    }
    let mean = values.clone().sum::<f64>() / reps as f64;
    if reps < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    (mean, (var / reps as f64).sqrt())
}

/// Folds per-replicate summaries in order.
pub fn aggregate_stats(
    method: Method,
    setting: Setting,
    stats: &[ReplicateStats],
) -> MetricsRecord {
    let reps = stats.len();
    let frac = |pred: &dyn Fn(&ReplicateStats) -> bool| {
        if reps == 0 {
            0.0
        } else {
            stats.iter().filter(|s| pred(s)).count() as f64 / reps as f64
        }
    };
    let kfwer = frac(&|s| s.false_discoveries >= setting.k);
    let fdx = frac(&|s| s.fdp() >= setting.gamma);
    let (tpr, tpr_se) = mean_and_se(stats.iter().map(|s| s.tpr), reps);
    let (fdr, fdr_se) = mean_and_se(stats.iter().map(|s| s.fdp()), reps);
    let (mean_pi0, _) = mean_and_se(stats.iter().map(|s| s.pi0_at_threshold), reps);
    MetricsRecord {
        method,
        setting,
        reps,
        kfwer,
        kfwer_se: binomial_se(kfwer, reps),
        tpr,
        tpr_se,
        fdx,
        fdx_se: binomial_se(fdx, reps),
        fdr,
        fdr_se,
        mean_pi0,
    }
}

/// Aggregates aligned result and truth streams.
pub fn aggregate(
    method: Method,
    setting: Setting,
    results: &[RejectionResult],
    truths: &[TruthLabels],
) -> Result<MetricsRecord> {
    if results.len() != truths.len() {
        return Err(Error::Domain(format!(
            "{} results but {} truth labels",
            results.len(),
            truths.len()
        )));
    }
    let stats: Vec<_> = results
        .iter()
        .zip(truths)
        .map(|(r, t)| ReplicateStats::new(r, t))
        .collect();
    Ok(aggregate_stats(method, setting, &stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn result(rejected: Vec<usize>) -> RejectionResult {
        RejectionResult {
            method: Method::Bonferroni,
            threshold: 0.0,
            rejected,
            diagnostics: Default::default(),
        }
    }

    fn truth(false_nulls: &[usize], m: usize) -> TruthLabels {
        let mut flags = vec![false; m];
        for &i in false_nulls {
            flags[i] = true;
        }
        TruthLabels::from_flags(2, flags)
    }

    fn setting(k: usize, gamma: f64) -> Setting {
        Setting {
            u: 2,
            k,
            alpha: 0.05,
            pi1: 0.1,
            rho: 0.0,
            theta: 0.5,
            gamma,
        }
    }

    #[test]
    fn counting_examples() {
        // Null status: 0-based {1, 2} true nulls among m = 4 with false {0, 3}.
        let t = truth(&[0, 3], 4);
        assert_eq!(false_discoveries(&result(vec![0, 1]), &t), 1);
        assert_eq!(false_discoveries(&result(vec![]), &t), 0);
        let all_true = truth(&[], 3);
        assert_eq!(false_discoveries(&result(vec![0, 1, 2]), &all_true), 3);
    }

    #[test]
    fn tpr_examples() {
        let t = truth(&[0, 1, 2, 3], 6);
        assert_eq!(tpr(&result(vec![0, 1, 4]), &t), 0.5);
        assert_eq!(tpr(&result(vec![0]), &truth(&[], 3)), 0.0);
        assert_eq!(tpr(&result(vec![0, 1, 2, 3, 5]), &t), 1.0);
    }

    #[test]
    fn aggregate_examples() {
        let t = truth(&[0], 3);
        let rec = aggregate(
            Method::Bonferroni,
            setting(1, 0.1),
            &[result(vec![0])],
            std::slice::from_ref(&t),
        )
        .unwrap();
        assert_eq!(rec.kfwer, 0.0);
        let rec = aggregate(
            Method::Bonferroni,
            setting(2, 0.1),
            &[result(vec![1, 2])],
            std::slice::from_ref(&t),
        )
        .unwrap();
        assert_eq!(rec.kfwer, 1.0);
        // FDP 0 and 0.5 with γ = 0.4.
        let rec = aggregate(
            Method::Bonferroni,
            setting(1, 0.4),
            &[result(vec![0]), result(vec![0, 1])],
            &[t.clone(), t.clone()],
        )
        .unwrap();
        assert_eq!(rec.fdx, 0.5);
        assert_eq!(rec.fdr, 0.25);
        assert!(aggregate(Method::Bonferroni, setting(1, 0.4), &[], &[t]).is_err());
    }

    #[test]
    fn pi0_without_survivors_is_zero() {
        let mut r = result(vec![]);
        r.diagnostics.survivors = Some(vec![]);
        assert_eq!(post_filter_null_proportion(&r, &truth(&[0], 2)), 0.0);
        r.diagnostics.survivors = Some(vec![0, 1]);
        assert_eq!(post_filter_null_proportion(&r, &truth(&[0], 2)), 0.5);
    }

    proptest! {
        #[test]
        fn rate_relations(
            outcomes in prop::collection::vec((0usize..6, 0usize..6, prop::collection::vec(0usize..6, 0..6)), 1..40),
            k in 1usize..3,
            gamma in 0.05f64..0.95,
        ) {
            let m = 6;
            let mut results = Vec::new();
            let mut truths = Vec::new();
            for (a, b, mut rej) in outcomes {
                rej.sort_unstable();
                rej.dedup();
                let mut r = result(rej);
                r.diagnostics.survivors = Some((0..m).filter(|i| i % 2 == 0).collect());
                results.push(r);
                truths.push(truth(&[a, b], m));
            }
            let rec = aggregate(Method::Bonferroni, setting(k, gamma), &results, &truths).unwrap();
            prop_assert!(rec.fdr <= rec.fdx + gamma + 1e-12);
            for v in [rec.kfwer, rec.tpr, rec.fdx, rec.fdr, rec.mean_pi0] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if k == 1 {
                let any = results.iter().zip(&truths)
                    .filter(|(r, t)| false_discoveries(r, t) > 0).count() as f64 / results.len() as f64;
                prop_assert_eq!(rec.kfwer, any);
            }
        }
    }
}
