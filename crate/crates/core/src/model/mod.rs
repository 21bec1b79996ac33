//! Domain types of the cascade MNL model: products, instances, patience
//! distributions and multi-stage assortments.

mod assortment;
mod enumerate;
mod generate;
pub mod io;
mod patience;

pub(crate) use assortment::{ensure_feasible, outranks};
pub use assortment::{stage_schedules, validate_assortment, Assortment, Placement, Violation};
pub use enumerate::{enumerate_feasible, enumerate_feasible_with_ceiling, FeasibleAssortments, DEFAULT_ENUMERATION_CEILING};
pub use generate::{generate_instance, GeneratorProfile, PatienceFamily};
pub use patience::{PatienceModel, REACH_TOL};

use crate::error::{Error, Result};

/// A product with its revenue, browsing cost and per-exposure attraction
/// weights `weights[k] = exp(mu_{i,k})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub revenue: f64,
    pub patience_cost: f64,
    pub weights: Vec<f64>,
}

impl Product {
    pub fn new(revenue: f64, patience_cost: f64, weights: Vec<f64>) -> Self {
        Product { revenue, patience_cost, weights }
    }
}

/// A validated problem instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    products: Vec<Product>,
    stages: usize,
    capacity: usize,
    exposures: usize,
    patience: PatienceModel,
}

impl Instance {
    /// Builds an instance and checks every invariant, including burnout
    /// (nonincreasing weights) and the patience-decline assumption.
    pub fn new(
        products: Vec<Product>,
        stages: usize,
        capacity: usize,
        exposures: usize,
        patience: PatienceModel,
    ) -> Result<Self> {
        if products.is_empty() {
            return Err(Error::Validation("instance needs at least one product".into()));
        }
        for (name, value) in [("m", stages), ("d", capacity), ("w", exposures)] {
            if value == 0 {
                return Err(Error::Validation(format!("{name} must be positive")));
            }
        }
        for (i, p) in products.iter().enumerate() {
            if !(p.revenue.is_finite() && p.revenue >= 0.0) {
                return Err(Error::Validation(format!(
                    "product {i}: revenue must be finite and nonnegative"
                )));
            }
            if !(p.patience_cost.is_finite() && p.patience_cost >= 0.0) {
                return Err(Error::Validation(format!(
                    "product {i}: patience cost must be finite and nonnegative"
                )));
            }
            if p.weights.len() != exposures {
                return Err(Error::Validation(format!(
                    "product {i}: expected {exposures} weights, got {}",
                    p.weights.len()
                )));
            }
            for (k, &b) in p.weights.iter().enumerate() {
                if !(b.is_finite() && b > 0.0) {
                    return Err(Error::Validation(format!(
                        "product {i}, exposure {k}: weight must be positive and finite"
                    )));
                }
                if k > 0 && b > p.weights[k - 1] {
                    return Err(Error::Validation(format!(
                        "Assumption 2 violated at product {i}, exposure {k}"
                    )));
                }
            }
        }
        patience.validate()?;
        Ok(Instance { products, stages, capacity, exposures, patience })
    }

    /// Number of products `n`.
    pub fn n(&self) -> usize {
        self.products.len()
    }

    /// Number of stages `m`.
    pub fn m(&self) -> usize {
        self.stages
    }

    /// Per-stage capacity `d`.
    pub fn d(&self) -> usize {
        self.capacity
    }

    /// Exposure cap `w`.
    pub fn w(&self) -> usize {
        self.exposures
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn product(&self, i: usize) -> &Product {
        &self.products[i]
    }

    pub fn patience(&self) -> &PatienceModel {
        &self.patience
    }

    pub fn weight(&self, i: usize, k: usize) -> f64 {
        self.products[i].weights[k]
    }

    /// `gamma_{i,k} = r_i * beta_{i,k}`.
    pub fn gamma(&self, i: usize, k: usize) -> f64 {
        self.products[i].revenue * self.products[i].weights[k]
    }

    /// Products that can never contribute revenue.
    pub fn zero_revenue_products(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.products[i].revenue == 0.0).collect()
    }

    /// Same instance with a different patience distribution.
    pub fn with_patience(&self, patience: PatienceModel) -> Result<Self> {
        Instance::new(self.products.clone(), self.stages, self.capacity, self.exposures, patience)
    }

    /// Same products restricted to a different stage count.
    pub fn with_stages(&self, stages: usize) -> Result<Self> {
        Instance::new(self.products.clone(), stages, self.capacity, self.exposures, self.patience.clone())
    }
}
