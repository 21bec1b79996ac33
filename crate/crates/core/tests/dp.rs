mod common;

use std::collections::BTreeMap;

use cascade_mnl::acme::kappa;
use cascade_mnl::choice::{g_value, StageSums};
use cascade_mnl::dp::{
    build_grids, complexity_estimate, dp_solve, dp_solve_with, fill_table, patience_budget_cap, Cell,
    DiscretizedInstance, DpMode, DpOptions, Grids, Guess, GuessSpace, TableLimits,
};
use cascade_mnl::model::{enumerate_feasible, validate_assortment, Assortment, Instance, PatienceModel, Product};
use cascade_mnl::oracle::brute_force_p1;
use cascade_mnl::Error;

fn cost(inst: &Instance, a: &Assortment) -> f64 {
    StageSums::of(inst, a).total_cost()
}

/// Smallest grid index whose value is at least `x` (index 0 for `x = 0`).
fn bracket(grid: &[f64], x: f64) -> usize {
    grid.iter().position(|&g| g >= x * (1.0 - 1e-12)).expect("grid covers every stage sum")
}

fn bracketing_guess(inst: &Instance, grids: &Grids, a: &Assortment) -> Guess {
    let sums = StageSums::of(inst, a);
    Guess {
        gamma: sums.revenue_weight.iter().map(|&x| bracket(&grids.gamma, x)).collect(),
        beta: sums.weight.iter().map(|&x| bracket(&grids.beta, x)).collect(),
    }
}

#[test]
fn distortion_bounds_on_bracketing_guess() {
    let mut rng = common::rng(606);
    let eps = 0.5;
    let t = eps * (1.0 + eps);
    for _ in 0..40 {
        let inst = common::random_instance(&mut rng, 5, 2, 2, 2).with_stages(2).unwrap();
        let (star, g_star) = brute_force_p1(&inst, 0.5).unwrap();
        let Ok(grids) = build_grids(&inst, eps) else { continue };
        let guess = bracketing_guess(&inst, &grids, &star);
        let disc = DiscretizedInstance::new(&inst, &grids, &guess);
        let cell = disc.cell_of(&star).expect("bracketing guess admits the optimum");
        let table = fill_table(&inst, &disc, DpMode::Sparse, TableLimits::default()).unwrap();
        let h = table.min_cost(inst.n(), &cell).unwrap();
        assert!(h <= cost(&inst, &star) + 1e-12);
        let x = table.reconstruct(&cell).unwrap();
        assert_eq!(disc.cell_of(&x).unwrap(), cell);
        let (sx, ss) = (StageSums::of(&inst, &x), StageSums::of(&inst, &star));
        for z in 0..inst.m() {
            assert!(sx.revenue_weight[z] >= (1.0 - t) * ss.revenue_weight[z] - 1e-12);
            assert!(sx.weight[z] <= (1.0 + t) * ss.weight[z] + 1e-12);
        }
        assert!(g_value(&inst, &x).unwrap() >= kappa(eps) * g_star - 1e-12);
        assert!(dp_solve(&inst, 0.5, eps).unwrap().g_value >= g_value(&inst, &x).unwrap() - 1e-12);
    }
}

#[test]
fn table_matches_enumeration_on_every_class() {
    let mut rng = common::rng(17);
    for _ in 0..6 {
        let inst = common::random_instance(&mut rng, 3, 2, 2, 2);
        let Ok(grids) = build_grids(&inst, 0.5) else { continue };
        let space = GuessSpace::new(&inst, &grids);
        let all: Vec<Assortment> = enumerate_feasible(&inst).unwrap().collect();
        for class in 0..space.class_count() as u64 {
            let disc = space.discretization(&inst, &grids, class);
            assert_eq!(disc, DiscretizedInstance::new(&inst, &grids, &space.representative(class)));
            let mut best: BTreeMap<Cell, f64> = BTreeMap::new();
            for a in &all {
                if let Some(c) = disc.cell_of(a) {
                    let e = best.entry(c).or_insert(f64::INFINITY);
                    *e = e.min(cost(&inst, a));
                }
            }
            let modes: &[DpMode] = if class % 17 == 0 { &[DpMode::Sparse, DpMode::Dense] } else { &[DpMode::Sparse] };
            for &mode in modes {
                let table = fill_table(&inst, &disc, mode, TableLimits::default()).unwrap();
                let got = table.terminal_cells();
                assert_eq!(got.len(), best.len());
                for (c, h) in got {
                    assert!((h - best[&c]).abs() <= 1e-12, "{h} vs {}", best[&c]);
                    let a = table.reconstruct(&c).unwrap();
                    assert!(validate_assortment(&inst, &a).unwrap().is_empty());
                    assert_eq!(disc.cell_of(&a).unwrap(), c);
                }
            }
        }
    }
}

#[test]
fn sparse_and_dense_solutions_agree() {
    let mut rng = common::rng(3);
    let dense = DpOptions { mode: DpMode::Dense, ..Default::default() };
    for _ in 0..8 {
        let inst = common::random_instance(&mut rng, 3, 2, 1, 2);
        let a = dp_solve(&inst, 0.5, 0.5).unwrap();
        let b = dp_solve_with(&inst, 0.5, 0.5, &dense).unwrap();
        assert_eq!(a.assortment, b.assortment);
        assert_eq!(a.g_value, b.g_value);
        assert!(b.stats.steps >= a.stats.steps);
    }
}

#[test]
fn surrogate_constraint_is_respected() {
    let mut rng = common::rng(99);
    for _ in 0..20 {
        let inst = common::random_instance(&mut rng, 4, 3, 2, 2);
        for rho in [0.2, 0.5, 0.9] {
            let s = dp_solve(&inst, rho, 0.4).unwrap();
            assert!(inst.patience().survival(s.total_cost) >= rho - 1e-12);
            assert!(validate_assortment(&inst, &s.assortment).unwrap().is_empty());
            assert!(s.assortment.is_gap_free());
            let (exact_a, exact) = brute_force_p1(&inst, rho).unwrap();
            assert!(exact_a.is_gap_free());
            assert!(s.g_value <= exact + 1e-12);
            assert!(s.g_value >= kappa(0.4) * exact - 1e-12);
        }
    }
}

#[test]
fn budget_caps() {
    let exp = PatienceModel::Exponential { rate: 2.0 };
    assert!((patience_budget_cap(&exp, 0.5).unwrap() - std::f64::consts::LN_2 / 2.0).abs() < 1e-15);
    assert_eq!(patience_budget_cap(&exp, 0.0).unwrap(), f64::INFINITY);
    assert_eq!(patience_budget_cap(&PatienceModel::Deterministic { budget: 1.5 }, 0.3).unwrap(), 1.5);
    let table = PatienceModel::Table { points: vec![(0.0, 1.0), (1.0, 0.6), (2.0, 0.2)] };
    assert_eq!(patience_budget_cap(&table, 0.5).unwrap(), 2.0);
    assert!(patience_budget_cap(&exp, -0.1).is_err());
}

#[test]
fn full_reachability_needs_zero_cost() {
    let inst = common::pair();
    let s = dp_solve(&inst, 1.0, 0.5).unwrap();
    assert!(s.assortment.is_empty());
    assert_eq!(s.g_value, 0.0);
}

#[test]
fn refusals_and_degenerate_grids() {
    let inst = common::random_instance(&mut common::rng(5), 5, 2, 2, 2);
    let tiny = DpOptions { limits: TableLimits { max_states: 1, max_dense_cells: 1 }, ..Default::default() };
    assert!(matches!(dp_solve_with(&inst, 0.5, 0.5, &tiny), Err(Error::Refused { .. })));
    let dense = DpOptions { mode: DpMode::Dense, ..tiny };
    assert!(matches!(dp_solve_with(&inst, 0.5, 0.5, &dense), Err(Error::Refused { .. })));
    let zero = Instance::new(vec![Product::new(0.0, 1.0, vec![1.0])], 1, 1, 1, PatienceModel::Exponential { rate: 1.0 })
        .unwrap();
    match dp_solve(&zero, 0.5, 0.5) {
        Err(Error::DegenerateGrid(msg)) => assert!(msg.contains("exact-p1")),
        other => panic!("expected degenerate grid, got {other:?}"),
    }
    assert!(dp_solve(&inst, 0.5, 0.7).is_err());
}

#[test]
fn complexity_scaling() {
    let inst = common::random_instance(&mut common::rng(8), 3, 1, 2, 2);
    let c1 = complexity_estimate(&inst, 0.5).unwrap();
    let c2 = complexity_estimate(&inst.with_stages(2).unwrap(), 0.5).unwrap();
    assert_eq!(c2.table_factor, c1.table_factor * c1.table_factor);
}
