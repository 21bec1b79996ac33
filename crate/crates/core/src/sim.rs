//! Behavioral Monte Carlo simulation of a cascade MNL consumer.
//!
//! Each trial draws `U_0 ~ Gumbel(0, 1)`, one utility per displayed exposure
//! `U_{i,k} ~ Gumbel(ln beta_{i,k}, 1)` and a patience level. The consumer
//! buys the best product of the first stage whose maximum utility beats
//! `U_0`, and moves on only while the patience budget covers everything
//! browsed so far.
//!
//! The patience budget is coupled to a uniform draw `V`: "B >= q" is read as
//! `V < F(q)`, which reproduces the survival function exactly for every
//! patience model, step tables included.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ensure_feasible, Assortment, Instance};

/// Outcome of one simulated consumer. Stage indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimOutcome {
    Purchase { product: usize, stage: usize },
    /// Ran out of patience after browsing `last_stage_browsed` (< m - 1).
    Abandoned { last_stage_browsed: usize },
    /// Browsed every stage without buying.
    Exhausted,
}

/// `location - ln(-ln u)` for `u` in (0, 1).
#[inline]
pub fn gumbel_from_uniform(location: f64, u: f64) -> f64 {
    location - (-u.ln()).ln()
}

pub fn sample_gumbel<R: Rng + ?Sized>(location: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    gumbel_from_uniform(location, u)
}

/// Generator for trial `trial` of a run seeded with `seed`. Every trial owns
/// its own ChaCha stream, so results do not depend on how trials are batched.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Precomputed display plan for fast repeated simulation.
#[derive(Debug, Clone)]
struct Plan {
    /// per stage: (product, mean utility)
    stages: Vec<Vec<(usize, f64)>>,
    /// `F(cost browsed through stage t)` for continuing past stage t
    survive_after: Vec<f64>,
}

impl Plan {
    fn new(inst: &Instance, a: &Assortment) -> Self {
        let m = inst.m();
        let mut stages = vec![Vec::new(); m];
        let mut cost = vec![0.0; m];
        for i in 0..inst.n() {
            for k in 0..inst.w() {
                for (z, stage) in stages.iter_mut().enumerate() {
                    if a.get(i, k, z) {
                        stage.push((i, inst.weight(i, k).ln()));
                        cost[z] += inst.product(i).patience_cost;
                    }
                }
            }
        }
        let mut acc = 0.0;
        let survive_after = cost
            .iter()
            .map(|c| {
                acc += c;
                inst.patience().survival(acc)
            })
            .collect();
        Plan { stages, survive_after }
    }

    /// Returns the outcome and the patience level `V`.
    fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> (SimOutcome, f64) {
        let outside = sample_gumbel(0.0, rng);
        let level: f64 = rng.sample(Open01);
        let m = self.stages.len();
        for t in 0..m {
            let mut best: Option<(usize, f64)> = None;
            for &(product, location) in &self.stages[t] {
                let u = sample_gumbel(location, rng);
                // strict comparison keeps the lower product index on ties
                if best.is_none_or(|(_, b)| u > b) {
                    best = Some((product, u));
                }
            }
            if let Some((product, u)) = best {
                if u > outside {
                    return (SimOutcome::Purchase { product, stage: t }, level);
                }
            }
            if t + 1 < m && level >= self.survive_after[t] {
                return (SimOutcome::Abandoned { last_stage_browsed: t }, level);
            }
        }
        (SimOutcome::Exhausted, level)
    }
}

/// Simulates one consumer facing the feasible assortment `a`.
pub fn simulate_consumer<R: Rng + ?Sized>(inst: &Instance, a: &Assortment, rng: &mut R) -> Result<SimOutcome> {
    ensure_feasible(inst, a)?;
    Ok(Plan::new(inst, a).run(rng).0)
}

/// Empirical frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
}

impl Estimate {
    fn from_count(count: u64, trials: u64) -> Self {
        let p = count as f64 / trials as f64;
        Estimate { estimate: p, std_error: (p * (1.0 - p) / trials as f64).sqrt() }
    }
}

/// Aggregated Monte Carlo estimates. `purchase[i][t]` and `reach[t]` are
/// indexed like the closed-form report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityEstimates {
    pub trials: u64,
    pub seed: u64,
    pub purchase: Vec<Vec<Estimate>>,
    pub no_purchase: Estimate,
    /// Fraction of consumers whose patience covers the cost before each
    /// stage, whether or not they bought earlier.
    pub reach: Vec<Estimate>,
    /// Fraction of consumers who actually browsed each stage.
    pub browsed: Vec<Estimate>,
    pub abandoned: Estimate,
    pub exhausted: Estimate,
}

#[derive(Debug, Clone)]
struct Counts {
    purchase: Vec<u64>,
    reach: Vec<u64>,
    browsed: Vec<u64>,
    abandoned: u64,
    exhausted: u64,
}

impl Counts {
    fn new(n: usize, m: usize) -> Self {
        Counts { purchase: vec![0; n * m], reach: vec![0; m], browsed: vec![0; m], abandoned: 0, exhausted: 0 }
    }

    fn merge(mut self, other: Counts) -> Counts {
        self.purchase.iter_mut().zip(&other.purchase).for_each(|(a, b)| *a += b);
        self.reach.iter_mut().zip(&other.reach).for_each(|(a, b)| *a += b);
        self.browsed.iter_mut().zip(&other.browsed).for_each(|(a, b)| *a += b);
        self.abandoned += other.abandoned;
        self.exhausted += other.exhausted;
        self
    }
}

const BATCH: u64 = 1 << 14;

/// Runs `trials` independent consumers. Deterministic for a fixed seed.
pub fn estimate_probabilities(inst: &Instance, a: &Assortment, trials: u64, seed: u64) -> Result<ProbabilityEstimates> {
    ensure_feasible(inst, a)?;
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    let (n, m) = (inst.n(), inst.m());
    let plan = Plan::new(inst, a);
    let base = ChaCha8Rng::seed_from_u64(seed);
    let batches = trials.div_ceil(BATCH);
    let counts = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut c = Counts::new(n, m);
            for trial in (b * BATCH)..((b + 1) * BATCH).min(trials) {
                let mut rng = base.clone();
                rng.set_stream(trial);
                let (outcome, level) = plan.run(&mut rng);
                c.reach[0] += 1;
                for t in 1..m {
                    if level < plan.survive_after[t - 1] {
                        c.reach[t] += 1;
                    } else {
                        break;
                    }
                }
                let browsed = match outcome {
                    SimOutcome::Purchase { product, stage } => {
                        c.purchase[product * m + stage] += 1;
                        stage
                    }
                    SimOutcome::Abandoned { last_stage_browsed } => {
                        c.abandoned += 1;
                        last_stage_browsed
                    }
                    SimOutcome::Exhausted => {
                        c.exhausted += 1;
                        m - 1
                    }
                };
                c.browsed[..=browsed].iter_mut().for_each(|r| *r += 1);
            }
            c
        })
        .reduce(|| Counts::new(n, m), Counts::merge);
    let bought: u64 = counts.purchase.iter().sum();
    Ok(ProbabilityEstimates {
        trials,
        seed,
        purchase: (0..n)
            .map(|i| (0..m).map(|t| Estimate::from_count(counts.purchase[i * m + t], trials)).collect())
            .collect(),
        no_purchase: Estimate::from_count(trials - bought, trials),
        reach: counts.reach.iter().map(|&r| Estimate::from_count(r, trials)).collect(),
        browsed: counts.browsed.iter().map(|&r| Estimate::from_count(r, trials)).collect(),
        abandoned: Estimate::from_count(counts.abandoned, trials),
        exhausted: Estimate::from_count(counts.exhausted, trials),
    })
}
