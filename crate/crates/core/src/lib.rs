//! Assortment optimization under the cascade multinomial logit (C-MNL) model.
//!
//! A consumer browses a sequence of stages. Each stage shows at most `d`
//! products, a product may be shown in up to `w` stages with nonincreasing
//! attraction per exposure, and browsing consumes a product-dependent share of
//! a random patience budget. The crate provides:
//!
//! * [`model`]: instances, assortments, feasibility checks, enumeration and a
//!   seeded instance generator;
//! * [`choice`]: closed-form purchase probabilities and expected revenue;
//! * [`sim`]: a behavioral Monte Carlo simulator of the consumer;
//! * [`oracle`]: exhaustive ground truth;
//! * [`single_stage`]: the exact capacitated single-stage MNL optimum;
//! * [`dp`]: the geometric-grid dynamic program for the patience-free problem;
//! * [`acme`]: the combined approximation algorithm;
//! * [`cli`]: the `cmnl` command-line front end.

pub mod acme;
pub mod choice;
pub mod cli;
pub mod dp;
pub mod error;
pub mod model;
pub mod oracle;
pub mod sim;
pub mod single_stage;

pub use error::{Error, Result};
pub use model::{Assortment, Instance, PatienceModel, Placement, Product};
