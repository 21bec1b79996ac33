//! Closed-form evaluation of an assortment: stage reachability, purchase
//! probabilities, expected revenue `f` and the patience-free revenue `g`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Assortment, Instance};
use crate::model::ensure_feasible;

/// Per-stage aggregates of an assortment.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSums {
    /// `sum_{i,k} x_{i,k,z} beta_{i,k}`
    pub weight: Vec<f64>,
    /// `sum_{i,k} x_{i,k,z} r_i beta_{i,k}`
    pub revenue_weight: Vec<f64>,
    /// `sum_{i,k} x_{i,k,z} c_i`
    pub cost: Vec<f64>,
}

impl StageSums {
    /// Aggregates without checking feasibility or shape.
    pub fn of(inst: &Instance, a: &Assortment) -> Self {
        let m = inst.m();
        let mut sums = StageSums { weight: vec![0.0; m], revenue_weight: vec![0.0; m], cost: vec![0.0; m] };
        for (i, p) in inst.products().iter().enumerate() {
            for (k, &beta) in p.weights.iter().enumerate() {
                for z in 0..m {
                    if a.get(i, k, z) {
                        sums.weight[z] += beta;
                        sums.revenue_weight[z] += p.revenue * beta;
                        sums.cost[z] += p.patience_cost;
                    }
                }
            }
        }
        sums
    }

    /// Patience cost accumulated before each stage.
    pub fn cost_prefix(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.cost
            .iter()
            .map(|c| {
                let before = acc;
                acc += c;
                before
            })
            .collect()
    }

    pub fn total_cost(&self) -> f64 {
        self.cost.iter().sum()
    }

    /// Revenue with stage `t` discounted by `reach[t]`.
    fn revenue(&self, reach: impl Fn(usize, f64) -> f64) -> f64 {
        let mut before = 0.0;
        let mut cost_before = 0.0;
        let mut total = 0.0;
        for t in 0..self.weight.len() {
            let after = before + self.weight[t];
            if self.revenue_weight[t] != 0.0 {
                total += reach(t, cost_before) * self.revenue_weight[t] / ((1.0 + before) * (1.0 + after));
            }
            before = after;
            cost_before += self.cost[t];
        }
        total
    }

    /// `f(x)` from the aggregates.
    pub fn expected_revenue(&self, inst: &Instance) -> f64 {
        let patience = inst.patience();
        self.revenue(|t, q| if t == 0 { 1.0 } else { patience.survival(q) })
    }

    /// `g(x)`: expected revenue with every stage reachable.
    pub fn g_value(&self) -> f64 {
        self.revenue(|_, _| 1.0)
    }
}

/// Output of [`evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub per_stage_reachability: Vec<f64>,
    /// `purchase_prob[i][t]`
    pub purchase_prob: Vec<Vec<f64>>,
    pub no_purchase_prob: f64,
    pub f_value: f64,
    pub g_value: f64,
}

fn stage_reach(inst: &Instance, prefix: &[f64], t: usize) -> f64 {
    if t == 0 {
        1.0
    } else {
        inst.patience().survival(prefix[t])
    }
}

/// Probability the consumer can browse stage `t` (0-based).
pub fn reachability(inst: &Instance, a: &Assortment, t: usize) -> Result<f64> {
    ensure_feasible(inst, a)?;
    if t >= inst.m() {
        return Err(Error::OutOfRange(format!("stage {t} outside 0..{}", inst.m())));
    }
    let sums = StageSums::of(inst, a);
    Ok(stage_reach(inst, &sums.cost_prefix(), t))
}

fn probability_from(inst: &Instance, a: &Assortment, sums: &StageSums, prefix: &[f64], i: usize, t: usize) -> f64 {
    let shown: f64 = (0..inst.w()).filter(|&k| a.get(i, k, t)).map(|k| inst.weight(i, k)).sum();
    if shown == 0.0 {
        return 0.0;
    }
    let before: f64 = sums.weight[..t].iter().sum();
    let after = before + sums.weight[t];
    stage_reach(inst, prefix, t) * shown / ((1.0 + before) * (1.0 + after))
}

/// Probability of buying product `i` in stage `t` (both 0-based).
pub fn choice_probability(inst: &Instance, a: &Assortment, i: usize, t: usize) -> Result<f64> {
    ensure_feasible(inst, a)?;
    if i >= inst.n() || t >= inst.m() {
        return Err(Error::OutOfRange(format!("(product {i}, stage {t}) outside {}x{}", inst.n(), inst.m())));
    }
    let sums = StageSums::of(inst, a);
    Ok(probability_from(inst, a, &sums, &sums.cost_prefix(), i, t))
}

pub fn expected_revenue(inst: &Instance, a: &Assortment) -> Result<f64> {
    ensure_feasible(inst, a)?;
    Ok(StageSums::of(inst, a).expected_revenue(inst))
}

pub fn g_value(inst: &Instance, a: &Assortment) -> Result<f64> {
    ensure_feasible(inst, a)?;
    Ok(StageSums::of(inst, a).g_value())
}

/// Full closed-form report for a feasible assortment.
pub fn evaluate(inst: &Instance, a: &Assortment) -> Result<EvaluationReport> {
    ensure_feasible(inst, a)?;
    let sums = StageSums::of(inst, a);
    let prefix = sums.cost_prefix();
    let per_stage_reachability = (0..inst.m()).map(|t| stage_reach(inst, &prefix, t)).collect();
    let purchase_prob: Vec<Vec<f64>> = (0..inst.n())
        .map(|i| (0..inst.m()).map(|t| probability_from(inst, a, &sums, &prefix, i, t)).collect())
        .collect();
    let bought: f64 = purchase_prob.iter().flatten().sum();
    Ok(EvaluationReport {
        per_stage_reachability,
        purchase_prob,
        no_purchase_prob: 1.0 - bought,
        f_value: sums.expected_revenue(inst),
        g_value: sums.g_value(),
    })
}
