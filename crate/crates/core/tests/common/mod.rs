#![allow(dead_code)]

use cascade_mnl::model::{enumerate_feasible, generate_instance, Assortment, GeneratorProfile, Instance, PatienceModel, Product};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LN2: f64 = std::f64::consts::LN_2;

pub fn pair() -> Instance {
    Instance::new(
        vec![Product::new(1.0, 1.0, vec![1.0]), Product::new(2.0, 1.0, vec![2.0])],
        2,
        1,
        1,
        PatienceModel::Exponential { rate: LN2 },
    )
    .unwrap()
}

pub fn single() -> Instance {
    Instance::new(
        vec![Product::new(1.0, 0.0, vec![2.0, 1.0])],
        2,
        1,
        2,
        PatienceModel::Exponential { rate: 3.0 },
    )
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance with each dimension drawn uniformly from `1..=max`.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize, d: usize, w: usize) -> Instance {
    let (n, m, d, w) = (rng.gen_range(1..=n), rng.gen_range(1..=m), rng.gen_range(1..=d), rng.gen_range(1..=w));
    generate_instance(rng.gen(), n, m, d, w, &GeneratorProfile::default()).unwrap()
}

/// Uniform draw from the feasible assortments (which must be few).
pub fn random_feasible(inst: &Instance, rng: &mut ChaCha8Rng, nonempty: bool) -> Assortment {
    let all: Vec<Assortment> =
        enumerate_feasible(inst).unwrap().filter(|a| !nonempty || !a.is_empty()).collect();
    all[rng.gen_range(0..all.len())].clone()
}

pub mod golden;
