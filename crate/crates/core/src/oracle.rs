//! Exhaustive ground truth over the feasible set.

use crate::choice::StageSums;
use crate::error::Result;
use crate::model::{ensure_feasible, enumerate_feasible, outranks, Assortment, Instance};

/// Maximizes the expected revenue `f` over every feasible assortment.
/// Ties go to the lexicographically smallest placement list.
pub fn brute_force_opt(inst: &Instance) -> Result<(Assortment, f64)> {
    best_by(inst, |sums| Some(sums.expected_revenue(inst)))
}

/// Maximizes `g` over feasible assortments whose total patience cost `q`
/// satisfies `F(q) >= rho`. The empty assortment always qualifies.
pub fn brute_force_p1(inst: &Instance, rho: f64) -> Result<(Assortment, f64)> {
    let patience = inst.patience();
    patience.budget_cap(rho)?;
    best_by(inst, |sums| patience.reaches(sums.total_cost(), rho).then(|| sums.g_value()))
}

fn best_by(inst: &Instance, score: impl Fn(&StageSums) -> Option<f64>) -> Result<(Assortment, f64)> {
    let mut best = Assortment::empty_for(inst);
    let mut best_value = score(&StageSums::of(inst, &best)).unwrap_or(0.0);
    for a in enumerate_feasible(inst)? {
        if let Some(value) = score(&StageSums::of(inst, &a)) {
            if outranks(value, &a, best_value, &best) {
                best = a;
                best_value = value;
            }
        }
    }
    Ok((best, best_value))
}

/// Drops every placement after the last stage whose reachability under `a`
/// is at least `rho`. Stage 0 is always kept.
pub fn truncate_at_reachability(inst: &Instance, a: &Assortment, rho: f64) -> Result<Assortment> {
    ensure_feasible(inst, a)?;
    let prefix = StageSums::of(inst, a).cost_prefix();
    let last = (0..inst.m())
        .rev()
        .find(|&t| t == 0 || inst.patience().reaches(prefix[t], rho))
        .unwrap_or(0);
    Ok(a.truncated_after(last))
}
