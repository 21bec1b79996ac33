//! ACME: solve the patience-free surrogate with the grid DP, solve the
//! single-stage problem exactly, and keep whichever earns more.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::choice::{evaluate, StageSums};
use crate::dp::{check_epsilon, dp_solve_with, DpOptions, DpStats};
use crate::error::{Error, Result};
use crate::model::{ensure_feasible, Assortment, Instance};
use crate::single_stage::solve_single_stage;

pub const DEFAULT_RHO: f64 = 0.5;
pub const DEFAULT_EPSILON: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Dp,
    SingleStage,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Dp => "dp",
            Branch::SingleStage => "single-stage",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchOutcome {
    pub branch: Branch,
    pub f_value: f64,
    pub g_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub assortment: Assortment,
    pub f_value: f64,
    pub g_value: f64,
    pub winning_branch: Branch,
    pub rho: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub certified_ratio: f64,
    /// the DP branch did not run, so `certified_ratio` is not guaranteed
    pub guarantee_degraded: bool,
    pub per_stage_reachability: Vec<f64>,
    pub branches: Vec<BranchOutcome>,
    pub dp_stats: Option<DpStats>,
    pub warnings: Vec<String>,
    pub wall_time: Duration,
}

/// `(1 - e(1 + e)) / (1 + e(1 + e))^2`.
pub fn kappa(epsilon: f64) -> f64 {
    let t = epsilon * (1.0 + epsilon);
    (1.0 - t) / ((1.0 + t) * (1.0 + t))
}

/// `kappa(e) rho (1 - rho) / 2`.
pub fn certified_ratio(rho: f64, epsilon: f64) -> f64 {
    kappa(epsilon) * rho * (1.0 - rho) / 2.0
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("rho must lie in (0, 1), got {rho}")))
    }
}

pub fn solve_acme(inst: &Instance, rho: f64, epsilon: f64) -> Result<SolveReport> {
    solve_acme_with(inst, rho, epsilon, &DpOptions::default())
}

pub fn solve_acme_with(inst: &Instance, rho: f64, epsilon: f64, opts: &DpOptions) -> Result<SolveReport> {
    let start = Instant::now();
    check_rho(rho)?;
    check_epsilon(epsilon)?;

    let (single, dp) = rayon::join(|| solve_single_stage(inst), || dp_solve_with(inst, rho, epsilon, opts));
    let (single, _) = single;
    let single_f = StageSums::of(inst, &single).expected_revenue(inst);
    let mut branches = vec![];
    let mut warnings = vec![];
    let mut degraded = false;
    let mut dp_stats = None;
    let mut best = (Branch::SingleStage, single.clone(), single_f);

    match dp {
        Ok(sol) => {
            let sums = StageSums::of(inst, &sol.assortment);
            let f = sums.expected_revenue(inst);
            assert!(
                f >= rho * sol.g_value - 1e-9 * sol.g_value.max(1.0),
                "DP branch violates f >= rho g: f = {f}, g = {}",
                sol.g_value
            );
            branches.push(BranchOutcome { branch: Branch::Dp, f_value: f, g_value: sol.g_value });
            if f > single_f {
                best = (Branch::Dp, sol.assortment, f);
            }
            dp_stats = Some(sol.stats);
        }
        Err(Error::Refused { reason, estimate }) => {
            degraded = true;
            warnings.push(format!(
                "DP branch refused ({reason}; estimated {estimate:.3e} steps); returning the single-stage solution without the ACME guarantee"
            ));
        }
        Err(Error::DegenerateGrid(_)) => {
            warnings.push("every product has zero revenue; DP branch skipped".into());
        }
        Err(e) => return Err(e),
    }
    branches.push(BranchOutcome {
        branch: Branch::SingleStage,
        f_value: single_f,
        g_value: StageSums::of(inst, &single).g_value(),
    });

    let (winning_branch, assortment, _) = best;
    ensure_feasible(inst, &assortment)?;
    let eval = evaluate(inst, &assortment)?;
    Ok(SolveReport {
        assortment,
        f_value: eval.f_value,
        g_value: eval.g_value,
        winning_branch,
        rho,
        epsilon,
        kappa: kappa(epsilon),
        certified_ratio: certified_ratio(rho, epsilon),
        guarantee_degraded: degraded,
        per_stage_reachability: eval.per_stage_reachability,
        branches,
        dp_stats,
        warnings,
        wall_time: start.elapsed(),
    })
}

/// One report per entry of `rhos`, in input order.
pub fn sweep_reports(inst: &Instance, rhos: &[f64], epsilon: f64, opts: &DpOptions) -> Result<Vec<SolveReport>> {
    if rhos.is_empty() {
        return Err(Error::Validation("at least one rho is required".into()));
    }
    rhos.iter().try_for_each(|&r| check_rho(r))?;
    rhos.par_iter().map(|&rho| solve_acme_with(inst, rho, epsilon, opts)).collect()
}

/// The report with the largest `f` across `rhos`; ties go to the smaller rho.
pub fn sweep_rho(inst: &Instance, rhos: &[f64], epsilon: f64) -> Result<SolveReport> {
    let reports = sweep_reports(inst, rhos, epsilon, &DpOptions::default())?;
    Ok(best_of(reports))
}

pub(crate) fn best_of(reports: Vec<SolveReport>) -> SolveReport {
    reports
        .into_iter()
        .reduce(|a, b| {
            if b.f_value > a.f_value || (b.f_value == a.f_value && b.rho < a.rho) {
                b
            } else {
                a
            }
        })
        .expect("nonempty sweep")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PatienceModel, Product};
    use crate::oracle::brute_force_opt;

    fn pair() -> Instance {
        Instance::new(
            vec![Product::new(1.0, 1.0, vec![1.0]), Product::new(2.0, 1.0, vec![2.0])],
            2,
            1,
            1,
            PatienceModel::Exponential { rate: std::f64::consts::LN_2 },
        )
        .unwrap()
    }

    #[test]
    fn kappa_values() {
        assert!((kappa(0.5) - 0.25 / 1.75f64.powi(2)).abs() < 1e-15);
        assert!((certified_ratio(0.5, 0.5) - 0.0816326530612245 * 0.125).abs() < 1e-12);
        assert!(certified_ratio(0.5, 1e-9) <= 0.125);
    }

    #[test]
    fn pair_certified_bound() {
        let inst = pair();
        let rep = solve_acme(&inst, 0.5, 0.5).unwrap();
        let (_, opt) = brute_force_opt(&inst).unwrap();
        assert!(rep.f_value >= rep.certified_ratio * opt);
        assert!((rep.f_value - crate::choice::expected_revenue(&inst, &rep.assortment).unwrap()).abs() < 1e-12);
        assert_eq!(rep.branches.len(), 2);
    }

    #[test]
    fn single_stage_instance() {
        let inst = pair().with_stages(1).unwrap();
        let rep = solve_acme(&inst, 0.5, 0.3).unwrap();
        let (_, opt) = brute_force_opt(&inst).unwrap();
        assert_eq!(rep.f_value, opt);
        assert_eq!(rep.winning_branch, Branch::SingleStage);
    }

    #[test]
    fn zero_revenue_falls_back() {
        let inst = Instance::new(
            vec![Product::new(0.0, 1.0, vec![1.0])],
            2,
            1,
            1,
            PatienceModel::Exponential { rate: 1.0 },
        )
        .unwrap();
        let rep = solve_acme(&inst, 0.5, 0.3).unwrap();
        assert_eq!(rep.f_value, 0.0);
        assert!(!rep.guarantee_degraded);
        assert_eq!(rep.warnings.len(), 1);
    }

    #[test]
    fn refusal_degrades() {
        let opts = DpOptions { max_runs: 0.5, ..Default::default() };
        let rep = solve_acme_with(&pair(), 0.5, 0.3, &opts).unwrap();
        assert!(rep.guarantee_degraded);
        assert_eq!(rep.winning_branch, Branch::SingleStage);
    }

    #[test]
    fn sweep_picks_best_and_validates() {
        let inst = pair();
        let one = sweep_rho(&inst, &[0.5], 0.3).unwrap();
        assert_eq!(one.f_value, solve_acme(&inst, 0.5, 0.3).unwrap().f_value);
        let many = sweep_rho(&inst, &[0.25, 0.5, 0.75], 0.3).unwrap();
        assert!(many.f_value >= one.f_value);
        assert!(sweep_rho(&inst, &[], 0.3).is_err());
        assert!(sweep_rho(&inst, &[1.0], 0.3).is_err());
    }
}
