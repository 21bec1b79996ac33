//! Exact optimum of the single-stage capacitated MNL assortment problem,
//! `max_{|S| <= d} sum_{i in S} r_i b_i / (1 + sum_{i in S} b_i)` with
//! `b_i` the first-exposure weight.
//!
//! `f(S) >= lambda` holds iff `sum_{i in S} b_i (r_i - lambda) >= lambda`, so
//! the optimum is the top-`d` set by score `b_i (r_i - lambda)` (positive
//! scores only) at `lambda = f*`. The ranking only changes at the pairwise
//! crossing points of the score lines, so sweeping `lambda` over those
//! breakpoints and the gaps between them visits every candidate set.

use std::collections::BTreeSet;

use crate::model::{Assortment, Instance, Placement};

/// Revenue of showing `set` in the first stage.
pub fn single_stage_value(inst: &Instance, set: &[usize]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &i in set {
        let b = inst.weight(i, 0);
        num += inst.product(i).revenue * b;
        den += b;
    }
    num / (1.0 + den)
}

fn breakpoints(inst: &Instance) -> Vec<f64> {
    let n = inst.n();
    let line = |i: usize| (inst.weight(i, 0), inst.product(i).revenue * inst.weight(i, 0));
    let mut points = vec![0.0];
    for i in 0..n {
        points.push(inst.product(i).revenue);
        let (bi, gi) = line(i);
        for j in (i + 1)..n {
            let (bj, gj) = line(j);
            if bi != bj {
                points.push((gi - gj) / (bi - bj));
            }
        }
    }
    points.retain(|p| p.is_finite() && *p >= 0.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

fn top_set(inst: &Instance, lambda: f64) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = (0..inst.n())
        .map(|i| (inst.weight(i, 0) * (inst.product(i).revenue - lambda), i))
        .filter(|&(s, _)| s > 0.0)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut set: Vec<usize> = scored.into_iter().take(inst.d()).map(|(_, i)| i).collect();
    set.sort_unstable();
    set
}

/// All candidate sets produced by the breakpoint sweep, plus the empty set.
pub fn candidate_sets(inst: &Instance) -> BTreeSet<Vec<usize>> {
    let points = breakpoints(inst);
    let mut probes = points.clone();
    probes.extend(points.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    probes.push(points.last().copied().unwrap_or(0.0) + 1.0);
    let mut sets: BTreeSet<Vec<usize>> = probes.into_iter().map(|l| top_set(inst, l)).collect();
    sets.insert(Vec::new());
    sets
}

/// Optimal single-stage assortment (stage 0, first exposures) and its value.
/// Ties go to the lexicographically smallest index set.
pub fn solve_single_stage(inst: &Instance) -> (Assortment, f64) {
    let mut best: Vec<usize> = Vec::new();
    let mut best_value = 0.0;
    // BTreeSet iterates in lexicographic order, so strict > keeps the smallest tie
    for set in candidate_sets(inst) {
        let value = single_stage_value(inst, &set);
        if value > best_value {
            best_value = value;
            best = set;
        }
    }
    let placements: Vec<Placement> =
        best.iter().map(|&product| Placement { product, exposure: 0, stage: 0 }).collect();
    let a = Assortment::from_placements(inst.n(), inst.w(), inst.m(), &placements)
        .expect("single-stage placements fit any instance");
    (a, best_value)
}
