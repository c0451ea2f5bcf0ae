//! Instance generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use adafilter::{PairedScores, ProcedureContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense grid resolution.
pub const TICKS: u64 = 1_000_000;
pub const STEP: f64 = 1.0 / TICKS as f64;
/// Instance values are multiples of this many grid steps.
pub const LATTICE: u64 = 10;

pub fn tick(t: u64) -> f64 {
    t as f64 / TICKS as f64
}

/// A random `(S, F)` instance with tuning.
#[derive(Debug, Clone)]
pub struct Instance {
    pub scores: PairedScores,
    pub ctx: ProcedureContext,
}

fn lattice_value(rng: &mut ChaCha8Rng) -> u64 {
    let cells = TICKS / LATTICE;
    let x: f64 = match rng.random_range(0..10) {
        0 => return 0,
        1 => return TICKS,
        2..=5 => rng.random::<f64>().powi(4),
        6..=7 => rng.random::<f64>() * 0.1,
        _ => rng.random::<f64>(),
    };
    ((x * cells as f64).ceil() as u64).min(cells) * LATTICE
}

/// `S` and `F <= S` on the lattice `LATTICE · STEP`, with atoms at 0 and 1.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let m = rng.random_range(1..=200);
    let mut s = Vec::with_capacity(m);
    let mut f = Vec::with_capacity(m);
    for _ in 0..m {
        let st = lattice_value(rng);
        let ft = match rng.random_range(0..10) {
            0 => 0,
            1 => st,
            _ => {
                let ratio = rng.random::<f64>().powi(2);
                ((st as f64 * ratio / LATTICE as f64).floor() as u64) * LATTICE
            }
        };
        s.push(tick(st));
        f.push(tick(ft));
    }
    let k = [1, 1, 2, 5][rng.random_range(0..4)];
    let alpha = [0.05, 0.1, 0.2][rng.random_range(0..3)];
    let theta = [0.1, 0.5, 0.9][rng.random_range(0..3)];
    let gamma = [0.1, 0.2, 0.5][rng.random_range(0..3)];
    Instance {
        scores: PairedScores::new(s, f).expect("F <= S by construction"),
        ctx: ProcedureContext::new(2, k, alpha, theta, gamma).unwrap(),
    }
}

/// The fixed battery of instances used by the exactness checks.
pub fn battery(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng)).collect()
}

/// Counts `#{v < t}` (or `<=`) for nondecreasing queries `t`.
pub struct Sweep {
    sorted: Vec<f64>,
    pos: usize,
    inclusive: bool,
}

impl Sweep {
    pub fn strict(values: impl IntoIterator<Item = f64>) -> Self {
        Self::build(values, false)
    }

    pub fn inclusive(values: impl IntoIterator<Item = f64>) -> Self {
        Self::build(values, true)
    }

    fn build(values: impl IntoIterator<Item = f64>, inclusive: bool) -> Self {
        let mut sorted: Vec<f64> = values.into_iter().collect();
        sorted.sort_by(f64::total_cmp);
        Self {
            sorted,
            pos: 0,
            inclusive,
        }
    }

    pub fn count(&mut self, t: f64) -> usize {
        while self.pos < self.sorted.len()
            && (self.sorted[self.pos] < t || (self.inclusive && self.sorted[self.pos] == t))
        {
            self.pos += 1;
        }
        self.pos
    }
}

/// Largest `t = lo + j·step`, `j = 0..=n`, accepted by `ok` (queried in
/// increasing order), or `None`.
pub fn max_feasible(lo: f64, step: f64, n: u64, mut ok: impl FnMut(f64) -> bool) -> Option<f64> {
    let mut best = None;
    for j in 0..=n {
        let t = lo + j as f64 * step;
        if ok(t) {
            best = Some(t);
        }
    }
    best
}

fn bon_feasible(f: &[f64], level: f64) -> impl FnMut(f64) -> bool {
    let mut below = Sweep::strict(f.iter().copied());
    move |t| t * below.count(t) as f64 <= level
}

fn adabon_feasible(s: &[f64], f: &[f64], theta: f64, level: f64) -> impl FnMut(f64) -> bool {
    let mut survivors = Sweep::strict(f.iter().copied());
    // F_i < t and S_i < θt together  <=>  max(F_i, S_i/θ) < t.
    let mut small = Sweep::strict(f.iter().zip(s).map(|(&fi, &si)| fi.max(si / theta)));
    move |t| t * (survivors.count(t) - small.count(t)) as f64 / (1.0 - theta * t) <= level
}

/// Dense-grid supremum: the largest feasible grid point at step `STEP`,
/// refined at step `1e-12` within the following cell.
pub fn dense_sup(upper: f64, make: impl Fn() -> Box<dyn FnMut(f64) -> bool>) -> (f64, f64) {
    let n = (upper * TICKS as f64).round() as u64;
    let coarse = max_feasible(0.0, STEP, n, make()).expect("t = 0 is feasible");
    let fine_steps = if coarse >= upper { 0 } else { 1_000_000 };
    let fine = max_feasible(coarse, 1e-12, fine_steps, make()).unwrap_or(coarse);
    (coarse, fine)
}

/// Dense-grid `t̂` for AdaFilter-Bon: `(coarse, refined)`.
pub fn oracle_bon(inst: &Instance) -> (f64, f64) {
    let f = inst.scores.f().to_vec();
    let level = inst.ctx.level();
    dense_sup(level.min(1.0), || Box::new(bon_feasible(&f, level)))
}

/// Dense-grid `t̂_θ` for AdaFilter-AdaBon: `(coarse, refined)`.
pub fn oracle_adabon(inst: &Instance) -> (f64, f64) {
    let (s, f) = (inst.scores.s().to_vec(), inst.scores.f().to_vec());
    let (theta, level) = (inst.ctx.theta(), inst.ctx.level());
    dense_sup(1.0, || Box::new(adabon_feasible(&s, &f, theta, level)))
}

/// Dense-grid `τ̂` for the augmentation of `{S < t_theta}`. Instance values
/// lie on the grid and the feasible set is a union of `[v, v')` pieces, so
/// the supremum is one step above the largest feasible grid point.
pub fn oracle_augment(s: &[f64], t_theta: f64, k: usize, gamma: f64) -> f64 {
    let below = s.iter().filter(|&&v| v < t_theta).count();
    let mut at_most = Sweep::inclusive(s.iter().copied());
    let mut best: Option<u64> = None;
    for j in 0..=TICKS {
        let tau = tick(j);
        let r = at_most.count(tau);
        if (r.saturating_sub(below) + k) as f64 / r.max(1) as f64 <= gamma {
            best = Some(j);
        }
    }
    match best {
        None => 0.0,
        Some(j) if j == TICKS => 1.0,
        Some(j) => tick(j + 1),
    }
}

pub fn strictly_below(s: &[f64], t: f64) -> Vec<usize> {
    (0..s.len()).filter(|&i| s[i] < t).collect()
}

pub fn at_most(s: &[f64], t: f64) -> Vec<usize> {
    (0..s.len()).filter(|&i| s[i] <= t).collect()
}
