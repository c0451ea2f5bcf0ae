//! Order statistics and p-value combining functions.
//!
//! A feature's partial-conjunction (PC) null `H^{u/n}` says that fewer than
//! `u` of its `n` per-study nulls are false. The Bonferroni combination
//! `(n - u + 1) P_(u)` gives a valid PC p-value `S_i`; the same formula at
//! level `u - 1`, rescaled, gives the filtering p-value
//! `F_i = (n - u + 1) P_(u-1)` used by the AdaFilter procedures.

use crate::dist::chi_squared_sf_even;
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// An `m × n` grid of p-values: one row per feature, one column per study.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueMatrix {
    values: Vec<f64>,
    m: usize,
    n: usize,
}

impl PValueMatrix {
    /// Builds a matrix from row-major values.
    pub fn from_row_major(m: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if m < 1 {
            return domain("a p-value matrix needs at least one feature");
        }
        if n < 2 {
            return domain(format!(
                "a p-value matrix needs at least two studies, got {n}"
            ));
        }
        if values.len() != m * n {
            return domain(format!(
                "expected {} values for a {m}x{n} matrix, got {}",
                m * n,
                values.len()
            ));
        }
        if let Some(pos) = values.iter().position(|p| !is_unit(*p)) {
            return domain(format!(
                "p-value {} at feature {}, study {} is outside [0, 1]",
                values[pos],
                pos / n + 1,
                pos % n + 1
            ));
        }
        Ok(Self { values, m, n })
    }

    /// Builds a matrix from per-feature rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(m * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return domain(format!(
                    "feature {} has {} studies, expected {n}",
                    i + 1,
                    row.len()
                ));
            }
            values.extend_from_slice(row);
        }
        Self::from_row_major(m, n, values)
    }

    /// Number of features.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of studies.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

fn is_unit(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

fn check_row(row: &[f64]) -> Result<()> {
    if row.is_empty() {
        return domain("empty row");
    }
    match row.iter().find(|p| !is_unit(**p)) {
        Some(p) => domain(format!("p-value {p} is outside [0, 1]")),
        None => Ok(()),
    }
}

/// Ascending order statistics `P_(1) <= ... <= P_(n)` of a row.
pub fn order_statistics(row: &[f64]) -> Result<Vec<f64>> {
    check_row(row)?;
    let mut sorted = row.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(sorted)
}

fn bonferroni_sorted(sorted: &[f64], u: usize) -> f64 {
    let n = sorted.len();
    ((n - u + 1) as f64 * sorted[u - 1]).min(1.0)
}

/// Bonferroni-combined PC p-value `min(1, (n - u + 1) P_(u))`, for `1 <= u <= n`.
pub fn combine_bonferroni(row: &[f64], u: usize) -> Result<f64> {
    let sorted = order_statistics(row)?;
    if u < 1 || u > sorted.len() {
        return domain(format!("u = {u} must lie in 1..={}", sorted.len()));
    }
    Ok(bonferroni_sorted(&sorted, u))
}

/// Fisher-combined PC p-value together with a flag recording whether a zero
/// p-value forced the limit value 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherCombined {
    pub value: f64,
    pub zero_input: bool,
}

fn fisher_sorted(sorted: &[f64], u: usize) -> FisherCombined {
    let tail = &sorted[u - 1..];
    // P_(u) is the smallest value entering the statistic.
    if tail[0] == 0.0 {
        return FisherCombined {
            value: 0.0,
            zero_input: true,
        };
    }
    let statistic = -2.0 * tail.iter().map(|p| p.ln()).sum::<f64>();
    FisherCombined {
        value: chi_squared_sf_even(statistic, tail.len()),
        zero_input: false,
    }
}

/// Fisher-combined PC p-value `1 - W_u(-2 Σ_{j>=u} log P_(j))` where `W_u` is
/// the chi-squared cdf with `2 (n - u + 1)` degrees of freedom, `2 <= u <= n`.
pub fn combine_fisher(row: &[f64], u: usize) -> Result<FisherCombined> {
    let sorted = order_statistics(row)?;
    if u < 2 || u > sorted.len() {
        return domain(format!("u = {u} must lie in 2..={}", sorted.len()));
    }
    Ok(fisher_sorted(&sorted, u))
}

/// Combined PC p-values `S_i` with their filtering p-values `F_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedScores {
    s: Vec<f64>,
    f: Vec<f64>,
}

impl PairedScores {
    /// Wraps externally computed scores, checking `0 <= f[i] <= s[i] <= 1`.
    pub fn new(s: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if s.len() != f.len() {
            return domain(format!(
                "{} PC p-values but {} filtering p-values",
                s.len(),
                f.len()
            ));
        }
        for (i, (&si, &fi)) in s.iter().zip(&f).enumerate() {
            if !is_unit(si) || !is_unit(fi) {
                return domain(format!("scores of feature {} are outside [0, 1]", i + 1));
            }
            if fi > si {
                return domain(format!(
                    "feature {}: filtering p-value {fi} exceeds PC p-value {si}",
                    i + 1
                ));
            }
        }
        Ok(Self { s, f })
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

fn check_u(matrix: &PValueMatrix, u: usize) -> Result<()> {
    if u < 2 || u > matrix.n() {
        return Err(Error::Domain(format!(
            "replicability level u = {u} must lie in 2..={}",
            matrix.n()
        )));
    }
    Ok(())
}

/// `S_i = min(1, (n-u+1) P_(u))` and `F_i = min(1, (n-u+1) P_(u-1))` for
/// every feature, in feature order.
pub fn build_paired_scores(matrix: &PValueMatrix, u: usize) -> Result<PairedScores> {
    check_u(matrix, u)?;
    let n = matrix.n();
    let scale = (n - u + 1) as f64;
    let mut buf = vec![0.0; n];
    let mut s = Vec::with_capacity(matrix.m());
    let mut f = Vec::with_capacity(matrix.m());
    for row in matrix.rows() {
        buf.copy_from_slice(row);
        buf.sort_unstable_by(f64::total_cmp);
        s.push((scale * buf[u - 1]).min(1.0));
        f.push((scale * buf[u - 2]).min(1.0));
    }
    Ok(PairedScores { s, f })
}

/// Fisher-combined PC p-values for every feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherScores {
    pub values: Vec<f64>,
    /// Number of features whose value was set to 0 because a p-value was 0.
    pub zero_inputs: usize,
}

pub fn fisher_pc_pvalues(matrix: &PValueMatrix, u: usize) -> Result<FisherScores> {
    check_u(matrix, u)?;
    let mut buf = vec![0.0; matrix.n()];
    let mut zero_inputs = 0;
    let values = matrix
        .rows()
        .map(|row| {
            buf.copy_from_slice(row);
            buf.sort_unstable_by(f64::total_cmp);
            let c = fisher_sorted(&buf, u);
            zero_inputs += usize::from(c.zero_input);
            c.value
        })
        .collect();
    Ok(FisherScores {
        values,
        zero_inputs,
    })
}

/// Combining function applied to produce PC p-values for the baseline
/// procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    Bonferroni,
    Fisher,
}

impl Combiner {
    pub fn pc_pvalues(self, matrix: &PValueMatrix, u: usize) -> Result<Vec<f64>> {
        match self {
            Combiner::Bonferroni => {
                check_u(matrix, u)?;
                let mut buf = vec![0.0; matrix.n()];
                Ok(matrix
                    .rows()
                    .map(|row| {
                        buf.copy_from_slice(row);
                        buf.sort_unstable_by(f64::total_cmp);
                        bonferroni_sorted(&buf, u)
                    })
                    .collect())
            }
            Combiner::Fisher => Ok(fisher_pc_pvalues(matrix, u)?.values),
        }
    }
}

impl std::str::FromStr for Combiner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bonferroni" | "bon" => Ok(Combiner::Bonferroni),
            "fisher" => Ok(Combiner::Fisher),
            other => domain(format!(
                "unknown combiner '{other}' (expected bonferroni or fisher)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn order_statistics_examples() {
        assert_eq!(
            order_statistics(&[0.3, 0.1, 0.2]).unwrap(),
            vec![0.1, 0.2, 0.3]
        );
        assert_eq!(order_statistics(&[0.5, 0.5]).unwrap(), vec![0.5, 0.5]);
        assert_eq!(order_statistics(&[1.0]).unwrap(), vec![1.0]);
        assert!(order_statistics(&[0.2, 1.5]).is_err());
        assert!(order_statistics(&[f64::NAN]).is_err());
    }

    #[test]
    fn bonferroni_examples() {
        let row = [0.01, 0.20, 0.30, 0.40];
        assert!((combine_bonferroni(&row, 2).unwrap() - 0.60).abs() < 1e-15);
        assert_eq!(combine_bonferroni(&[0.0; 4], 2).unwrap(), 0.0);
        assert_eq!(combine_bonferroni(&[0.5, 0.6], 2).unwrap(), 0.6);
        assert!(combine_bonferroni(&row, 0).is_err());
        assert!(combine_bonferroni(&row, 5).is_err());
    }

    #[test]
    fn fisher_examples() {
        assert_eq!(combine_fisher(&[0.3, 0.5], 2).unwrap().value, 0.5);
        for u in 2..=4 {
            assert_eq!(combine_fisher(&[1.0; 4], u).unwrap().value, 1.0);
        }
        // Frozen from an incomplete-gamma evaluation of P(χ²_4 > -2 ln 0.12).
        let v = combine_fisher(&[0.1, 0.2, 0.3, 0.4], 3).unwrap();
        assert!(
            (v.value - 0.374_431_624_344_010_9).abs() < 1e-12,
            "{}",
            v.value
        );
        assert!(!v.zero_input);
    }

    #[test]
    fn fisher_zero_is_flagged() {
        let v = combine_fisher(&[0.0, 0.0, 0.2, 0.4], 2).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.zero_input);
        // A zero below P_(u) does not enter the statistic.
        let v = combine_fisher(&[0.0, 0.1, 0.2, 0.4], 2).unwrap();
        assert!(v.value > 0.0 && !v.zero_input);
        assert!(combine_fisher(&[0.1, 0.2], 1).is_err());
    }

    #[test]
    fn paired_score_examples() {
        let m = PValueMatrix::from_rows(&[[0.01, 0.20, 0.30, 0.40]]).unwrap();
        let sc = build_paired_scores(&m, 2).unwrap();
        assert!((sc.s()[0] - 0.60).abs() < 1e-15);
        assert!((sc.f()[0] - 0.03).abs() < 1e-15);

        let m = PValueMatrix::from_rows(&[[0.0; 4], [1.0; 4]]).unwrap();
        let sc = build_paired_scores(&m, 2).unwrap();
        assert_eq!(sc.s(), &[0.0, 1.0]);
        assert_eq!(sc.f(), &[0.0, 1.0]);
        assert!(build_paired_scores(&m, 1).is_err());
        assert!(build_paired_scores(&m, 5).is_err());
    }

    #[test]
    fn matrix_validation() {
        assert!(PValueMatrix::from_rows(&[[0.1]]).is_err());
        assert!(PValueMatrix::from_rows::<[f64; 2]>(&[]).is_err());
        assert!(PValueMatrix::from_rows(&[[0.1, -0.1]]).is_err());
        assert!(PValueMatrix::from_rows(&[vec![0.1, 0.2], vec![0.3]]).is_err());
        assert!(PairedScores::new(vec![0.1], vec![0.2]).is_err());
    }

    fn rows(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64], n)
    }

    proptest! {
        #[test]
        fn filter_matches_rescaled_lower_level(row in rows(5), u in 2usize..=5) {
            let n = row.len();
            let m = PValueMatrix::from_rows(std::slice::from_ref(&row)).unwrap();
            let sc = build_paired_scores(&m, u).unwrap();
            let sorted = order_statistics(&row).unwrap();
            // Unclamped f_Bon(row; u - 1) = (n - u + 2) P_(u-1).
            let lower = (n - u + 2) as f64 * sorted[u - 2];
            let via_lower = ((n - u + 1) as f64 / (n - u + 2) as f64 * lower).min(1.0);
            prop_assert!((sc.f()[0] - via_lower).abs() <= 1e-12);
            prop_assert!(sc.f()[0] <= sc.s()[0]);
            prop_assert_eq!(sc.s()[0], combine_bonferroni(&row, u).unwrap());
        }

        #[test]
        fn fisher_at_u_equals_n_is_max(row in prop::collection::vec(1e-300..=1.0f64, 2..8)) {
            let n = row.len();
            let max = row.iter().cloned().fold(0.0, f64::max);
            let v = combine_fisher(&row, n).unwrap().value;
            prop_assert!((v - max).abs() <= 1e-12);
        }
    }
}
