use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, PatienceModel, Product};
use crate::error::{Error, Result};

/// Which patience family a generated instance draws from. Ranges are
/// inclusive and sampled uniformly.
#[derive(Debug, Clone, PartialEq)]
pub enum PatienceFamily {
    Exponential { rate: (f64, f64) },
    Deterministic { budget: (f64, f64) },
    /// Fair coin between the two families above.
    Mixed { rate: (f64, f64), budget: (f64, f64) },
}

/// Sampling ranges for random instances. Weights follow
/// `weights[k] = base * decay^k` with `decay` in `(0, 1]`, so burnout holds
/// by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorProfile {
    pub revenue: (f64, f64),
    pub base_weight: (f64, f64),
    pub decay: (f64, f64),
    pub cost: (f64, f64),
    pub patience: PatienceFamily,
}

impl Default for GeneratorProfile {
    fn default() -> Self {
        GeneratorProfile {
            revenue: (1.0, 10.0),
            base_weight: (0.2, 2.0),
            decay: (0.4, 1.0),
            cost: (0.1, 1.0),
            patience: PatienceFamily::Mixed { rate: (0.2, 1.5), budget: (0.5, 3.0) },
        }
    }
}

impl GeneratorProfile {
    /// Named presets used by the CLI: `default`, `exponential`,
    /// `deterministic`, `burnout` (steep decay) and `patient` (zero costs).
    pub fn named(name: &str) -> Result<Self> {
        let base = GeneratorProfile::default();
        Ok(match name {
            "default" | "mixed" => base,
            "exponential" => GeneratorProfile {
                patience: PatienceFamily::Exponential { rate: (0.2, 1.5) },
                ..base
            },
            "deterministic" => GeneratorProfile {
                patience: PatienceFamily::Deterministic { budget: (0.5, 3.0) },
                ..base
            },
            "burnout" => GeneratorProfile { decay: (0.1, 0.5), ..base },
            "patient" => GeneratorProfile { cost: (0.0, 0.0), ..base },
            other => {
                return Err(Error::OutOfRange(format!(
                    "unknown generator profile `{other}` (expected default, exponential, deterministic, burnout, patient)"
                )))
            }
        })
    }

    /// Fixed base weight and decay, useful in tests.
    pub fn geometric(base_weight: f64, decay: f64) -> Self {
        GeneratorProfile { base_weight: (base_weight, base_weight), decay: (decay, decay), ..Default::default() }
    }

    fn check(&self) -> Result<()> {
        let ranges = [
            ("revenue", self.revenue, 0.0),
            ("base_weight", self.base_weight, f64::MIN_POSITIVE),
            ("decay", self.decay, f64::MIN_POSITIVE),
            ("cost", self.cost, 0.0),
        ];
        for (name, (lo, hi), floor) in ranges {
            if !(lo.is_finite() && hi.is_finite() && lo >= floor && lo <= hi) {
                return Err(Error::OutOfRange(format!("generator range `{name}` = ({lo}, {hi})")));
            }
        }
        if self.decay.1 > 1.0 {
            return Err(Error::OutOfRange("generator decay must not exceed 1".into()));
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Deterministic random instance for a fixed seed.
pub fn generate_instance(
    seed: u64,
    n: usize,
    m: usize,
    d: usize,
    w: usize,
    profile: &GeneratorProfile,
) -> Result<Instance> {
    if n == 0 || m == 0 || d == 0 || w == 0 {
        return Err(Error::OutOfRange("n, m, d and w must all be positive".into()));
    }
    profile.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let products = (0..n)
        .map(|_| {
            let revenue = draw(&mut rng, profile.revenue);
            let cost = draw(&mut rng, profile.cost);
            let base = draw(&mut rng, profile.base_weight);
            let decay = draw(&mut rng, profile.decay);
            let weights = (0..w).map(|k| base * decay.powi(k as i32)).collect();
            Product::new(revenue, cost, weights)
        })
        .collect();
    let patience = match &profile.patience {
        PatienceFamily::Exponential { rate } => PatienceModel::Exponential { rate: draw(&mut rng, *rate) },
        PatienceFamily::Deterministic { budget } => {
            PatienceModel::Deterministic { budget: draw(&mut rng, *budget) }
        }
        PatienceFamily::Mixed { rate, budget } => {
            if rng.gen_bool(0.5) {
                PatienceModel::Exponential { rate: draw(&mut rng, *rate) }
            } else {
                PatienceModel::Deterministic { budget: draw(&mut rng, *budget) }
            }
        }
    };
    Instance::new(products, m, d, w, patience)
}
