use crate::error::{Error, Result};

/// Absolute slack used whenever a survival probability is compared with a
/// reachability threshold.
pub const REACH_TOL: f64 = 1e-12;

/// Distribution of the consumer's patience budget `B`, described through its
/// survival function `F(q) = P(B >= q)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PatienceModel {
    /// `F(q) = exp(-rate * q)`.
    Exponential { rate: f64 },
    /// The budget is the constant `budget`: `F(q) = 1` for `q <= budget`, else 0.
    Deterministic { budget: f64 },
    /// Right-continuous step function through `(q, survival)` breakpoints:
    /// `F(q)` is the survival of the last breakpoint with `q_k <= q`.
    /// The first breakpoint must be `(0, 1)`.
    Table { points: Vec<(f64, f64)> },
}

impl PatienceModel {
    pub fn survival(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 1.0;
        }
        match self {
            PatienceModel::Exponential { rate } => (-rate * q).exp(),
            PatienceModel::Deterministic { budget } => {
                if q <= *budget {
                    1.0
                } else {
                    0.0
                }
            }
            PatienceModel::Table { points } => {
                let idx = points.partition_point(|&(pq, _)| pq <= q);
                // idx >= 1 because points[0].0 == 0 <= q
                points[idx.saturating_sub(1)].1
            }
        }
    }

    /// Checks the structural invariants (`F(0) = 1`, monotonicity) and the
    /// patience-decline assumption `F(q2) >= F(q1 + q2) / F(q1)`.
    pub fn validate(&self) -> Result<()> {
        match self {
            PatienceModel::Exponential { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(Error::Validation(format!(
                        "exponential patience rate must be positive and finite, got {rate}"
                    )));
                }
            }
            PatienceModel::Deterministic { budget } => {
                if budget.is_nan() || *budget < 0.0 {
                    return Err(Error::Validation(format!(
                        "deterministic patience budget must be nonnegative, got {budget}"
                    )));
                }
            }
            PatienceModel::Table { points } => {
                let Some(&(q0, s0)) = points.first() else {
                    return Err(Error::Validation("patience table has no points".into()));
                };
                if q0 != 0.0 || s0 != 1.0 {
                    return Err(Error::Validation(format!(
                        "patience table must start at (0, 1), got ({q0}, {s0})"
                    )));
                }
                for (idx, pair) in points.windows(2).enumerate() {
                    let ((qa, sa), (qb, sb)) = (pair[0], pair[1]);
                    if !(qb.is_finite() && qb > qa) {
                        return Err(Error::Validation(format!(
                            "patience table breakpoints must be strictly ascending (point {})",
                            idx + 1
                        )));
                    }
                    if !(0.0..=1.0).contains(&sb) || sb > sa {
                        return Err(Error::Validation(format!(
                            "patience table survival must be nonincreasing in [0, 1] (point {})",
                            idx + 1
                        )));
                    }
                }
            }
        }
        self.check_assumption_one()
    }

    /// Exponential and deterministic budgets satisfy the assumption
    /// analytically; tables are checked on every pair of breakpoints.
    pub fn check_assumption_one(&self) -> Result<()> {
        let PatienceModel::Table { points } = self else {
            return Ok(());
        };
        for &(q1, f1) in points {
            if f1 <= 0.0 {
                continue;
            }
            for &(q2, f2) in points {
                let joint = self.survival(q1 + q2);
                if f2 * f1 < joint - REACH_TOL {
                    return Err(Error::Validation(format!(
                        "Assumption 1 violated: F({q2}) = {f2} < F({q1} + {q2}) / F({q1}) = {}",
                        joint / f1
                    )));
                }
            }
        }
        Ok(())
    }

    /// `sup { q >= 0 : F(q) >= rho }`, infinite when `rho = 0` or when the
    /// survival never drops below `rho`.
    ///
    /// For tables the supremum may not be attained; callers re-check `F`.
    pub fn budget_cap(&self, rho: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::OutOfRange(format!("rho must lie in [0, 1], got {rho}")));
        }
        if rho == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(match self {
            PatienceModel::Exponential { rate } => -rho.ln() / rate,
            PatienceModel::Deterministic { budget } => *budget,
            PatienceModel::Table { points } => {
                let last_ok = points.iter().rposition(|&(_, s)| s >= rho);
                match last_ok {
                    Some(k) if k + 1 < points.len() => points[k + 1].0,
                    Some(_) => f64::INFINITY,
                    None => 0.0,
                }
            }
        })
    }

    /// True when `F(q) >= rho` up to [`REACH_TOL`].
    pub fn reaches(&self, q: f64, rho: f64) -> bool {
        self.survival(q) >= rho - REACH_TOL
    }
}
