//! Geometric-grid dynamic program for the patience-constrained surrogate:
//! maximize `g(x)` subject to `F(total cost of x) >= rho`.
//!
//! For every guess of the per-stage sums `(mu_z, nu_z)` on geometric grids,
//! products are discretized, a table of minimum patience cost per scaled cell
//! is filled, and every terminal cell within the budget yields a candidate.
//! The best candidate by exact `g` is returned.

mod grid;
mod table;

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::choice::StageSums;
use crate::error::{Error, Result};
use crate::model::{outranks, Assortment, Instance, PatienceModel};

pub(crate) use grid::check_epsilon;
pub use grid::{build_grids, epsilon_upper_bound, DiscretizedInstance, Grids, Guess, GuessSpace};
pub use table::{fill_table, Cell, DpMode, DpTable, TableLimits};

/// `sup { q : F(q) >= rho }`, the patience budget `C_rho`.
pub fn patience_budget_cap(patience: &PatienceModel, rho: f64) -> Result<f64> {
    patience.budget_cap(rho)
}

/// Factors of the worst-case operation count
/// `m^w (d (d/e + 1))^{2m} |I| |J| n (d + 1)^m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityEstimate {
    pub schedules_factor: f64,
    pub table_factor: f64,
    pub gamma_grid: usize,
    pub beta_grid: usize,
    pub products: usize,
    pub count_factor: f64,
    pub total: f64,
}

pub fn complexity_estimate(inst: &Instance, epsilon: f64) -> Result<ComplexityEstimate> {
    let grids = build_grids(inst, epsilon)?;
    let (m, d, w) = (inst.m() as f64, inst.d() as f64, inst.w() as f64);
    let schedules_factor = m.powf(w);
    let table_factor = (d * (d / epsilon + 1.0)).powf(2.0 * m);
    let count_factor = (d + 1.0).powf(m);
    let total = schedules_factor
        * table_factor
        * grids.gamma.len() as f64
        * grids.beta.len() as f64
        * inst.n() as f64
        * count_factor;
    Ok(ComplexityEstimate {
        schedules_factor,
        table_factor,
        gamma_grid: grids.gamma.len(),
        beta_grid: grids.beta.len(),
        products: inst.n(),
        count_factor,
        total,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct DpOptions {
    pub mode: DpMode,
    /// distinct tables to fill before refusing
    pub max_runs: f64,
    pub limits: TableLimits,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { mode: DpMode::Sparse, max_runs: 2.0e6, limits: TableLimits::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DpStats {
    pub gamma_grid: usize,
    pub beta_grid: usize,
    /// `(|I| |J|)^m`
    pub guess_count: f64,
    pub distinct_columns: usize,
    pub table_runs: u64,
    pub steps: u64,
    pub candidates_evaluated: usize,
    pub budget_cap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub assortment: Assortment,
    pub g_value: f64,
    pub total_cost: f64,
    pub stats: DpStats,
}

/// Solves the surrogate with default options.
pub fn dp_solve(inst: &Instance, rho: f64, epsilon: f64) -> Result<DpSolution> {
    dp_solve_with(inst, rho, epsilon, &DpOptions::default())
}

#[derive(Default)]
struct Search {
    seen: HashSet<Vec<u16>>,
    best: Option<(f64, f64, Assortment)>,
    steps: u64,
    runs: u64,
}

impl Search {
    fn offer(&mut self, g: f64, cost: f64, a: Assortment) {
        let better = match &self.best {
            None => true,
            Some((bg, _, b)) => outranks(g, &a, *bg, b),
        };
        if better {
            self.best = Some((g, cost, a));
        }
    }

    fn merge(mut self, other: Search) -> Search {
        self.steps += other.steps;
        self.runs += other.runs;
        if self.seen.len() < other.seen.len() {
            let mut seen = other.seen;
            seen.extend(self.seen.drain());
            self.seen = seen;
        } else {
            self.seen.extend(other.seen);
        }
        if let Some((g, c, a)) = other.best {
            self.offer(g, c, a);
        }
        self
    }
}

pub fn dp_solve_with(inst: &Instance, rho: f64, epsilon: f64, opts: &DpOptions) -> Result<DpSolution> {
    let cap = patience_budget_cap(inst.patience(), rho)?;
    let grids = build_grids(inst, epsilon)?;
    let space = GuessSpace::new(inst, &grids);
    let runs = space.class_count();
    if runs > opts.max_runs {
        return Err(Error::Refused {
            reason: format!("{runs:.3e} distinct DP tables exceed the ceiling of {:.3e}", opts.max_runs),
            estimate: complexity_estimate(inst, epsilon)?.total,
        });
    }
    let slack = if cap.is_finite() { cap + 1e-9 * cap.abs().max(1.0) } else { cap };
    let patience = inst.patience();
    let run = |mut acc: Search, class: u64| -> Result<Search> {
        let disc = space.discretization(inst, &grids, class);
        let table = fill_table(inst, &disc, opts.mode, opts.limits)?;
        acc.steps += table.steps();
        acc.runs += 1;
        for (picks, cost) in table.terminal_choices() {
            if cost > slack || acc.seen.contains(&picks) {
                continue;
            }
            let a = table.assortment_from(&picks).compacted();
            acc.seen.insert(picks);
            let sums = StageSums::of(inst, &a);
            let total = sums.total_cost();
            if patience.reaches(total, rho) {
                acc.offer(sums.g_value(), total, a);
            }
        }
        Ok(acc)
    };
    let search = (0..runs as u64)
        .into_par_iter()
        .try_fold(Search::default, run)
        .try_reduce(Search::default, |a, b| Ok(a.merge(b)))?;
    let mut search = search;
    search.offer(0.0, 0.0, Assortment::empty_for(inst));
    let (g_value, total_cost, assortment) = search.best.expect("empty assortment offered");
    Ok(DpSolution {
        assortment,
        g_value,
        total_cost,
        stats: DpStats {
            gamma_grid: grids.gamma.len(),
            beta_grid: grids.beta.len(),
            guess_count: space.guess_count(),
            distinct_columns: space.distinct_columns(),
            table_runs: search.runs,
            steps: search.steps,
            candidates_evaluated: search.seen.len(),
            budget_cap: cap,
        },
    })
}
