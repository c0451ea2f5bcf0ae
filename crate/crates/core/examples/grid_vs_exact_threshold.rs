//! The finite candidate grid {0, 1, F_i, S_i, S_i/θ} can stop short of the
//! AdaBon supremum. Prints a two-feature instance where it does, and how
//! often the two disagree on random instances.
//!
//! cargo run --release --example grid_vs_exact_threshold

use adafilter::{adabon_threshold, grid_surrogate_threshold, PairedScores, ProcedureContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rejected(s: &[f64], t: f64) -> Vec<usize> {
    (0..s.len()).filter(|&i| s[i] < t).collect()
}

fn main() -> adafilter::Result<()> {
    let ctx = ProcedureContext::new(2, 1, 0.05, 0.5, 0.1)?;
    let scores = PairedScores::new(vec![0.02, 0.9], vec![0.02, 0.001])?;
    let exact = adabon_threshold(&scores, &ctx);
    let grid = grid_surrogate_threshold(&scores, &ctx);
    println!("s = (0.02, 0.9), f = (0.02, 0.001), theta = 0.5, alpha = 0.05");
    println!(
        "  exact supremum {exact:.6} rejects {:?}",
        rejected(scores.s(), exact)
    );
    println!(
        "  grid maximum   {grid:.6} rejects {:?}",
        rejected(scores.s(), grid)
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 2000;
    let mut differ = 0;
    for _ in 0..trials {
        let m = rng.random_range(1..100);
        let s: Vec<f64> = (0..m).map(|_| rng.random::<f64>().powi(3)).collect();
        let f: Vec<f64> = s.iter().map(|&v| v * rng.random::<f64>()).collect();
        let sc = PairedScores::new(s, f)?;
        let (e, g) = (
            adabon_threshold(&sc, &ctx),
            grid_surrogate_threshold(&sc, &ctx),
        );
        if rejected(sc.s(), e) != rejected(sc.s(), g) {
            differ += 1;
        }
    }
    println!("rejection sets differ on {differ} of {trials} random instances");
    Ok(())
}
