//! Bonferroni and Fisher partial-conjunction p-values for one feature, and
//! the paired (S, F) scores of a small matrix.
//!
//! cargo run --example combine_pvalues

use adafilter::{build_paired_scores, combine_bonferroni, combine_fisher, PValueMatrix};

fn main() -> adafilter::Result<()> {
    let row = [0.01, 0.04, 0.3, 0.7];
    for u in 2..=row.len() {
        let fisher = combine_fisher(&row, u)?;
        println!(
            "u = {u}: Bonferroni {:.6}  Fisher {:.6}",
            combine_bonferroni(&row, u)?,
            fisher.value
        );
    }

    let p = PValueMatrix::from_rows(&[[1e-6, 2e-4, 0.6], [0.02, 0.5, 0.9], [1e-3, 1e-3, 1e-3]])?;
    let scores = build_paired_scores(&p, 2)?;
    println!("\nfeature      S           F");
    for i in 0..p.m() {
        println!("{:>7}  {:.3e}  {:.3e}", i + 1, scores.s()[i], scores.f()[i]);
    }
    Ok(())
}
