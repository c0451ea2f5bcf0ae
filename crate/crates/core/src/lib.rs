//! Partial-conjunction testing across studies with AdaFilter.
//!
//! For an `m × n` matrix of p-values (features by studies) and a replicability
//! level `u`, a feature is a partial-conjunction (PC) non-null when at least
//! `u` of its studies carry a signal. The procedures here select PC
//! non-nulls with generalized family-wise error (k-FWER) or false discovery
//! exceedance (FDX) control.
//!
//! ```
//! use adafilter::{build_paired_scores, run_adafilter_adabon, PValueMatrix, ProcedureContext};
//!
//! let p = PValueMatrix::from_rows(&[
//!     [1e-6, 2e-6, 0.30],
//!     [0.40, 0.50, 0.60],
//!     [1e-5, 0.90, 0.80],
//! ])?;
//! let scores = build_paired_scores(&p, 2)?;
//! let ctx = ProcedureContext::fwer(2, 0.05)?;
//! let result = run_adafilter_adabon(&scores, &ctx);
//! assert_eq!(result.rejected, vec![0]);
//! # Ok::<(), adafilter::Error>(())
//! ```

pub mod cli;
pub mod combiner;
pub mod dist;
pub mod error;
pub mod metrics;
pub mod plot;
pub mod procedures;
pub mod simulate;
pub mod sweep;

pub use combiner::{
    build_paired_scores, combine_bonferroni, combine_fisher, fisher_pc_pvalues, Combiner,
    FisherCombined, PValueMatrix, PairedScores,
};
pub use error::{Error, Result};
pub use metrics::{aggregate, MetricsRecord, Setting};
pub use procedures::*;
pub use simulate::{run_replicates, BaselineOptions, SimulationConfig, TruthLabels, RNG_NAME};
pub use sweep::{run_sweep, SweepConfig};
