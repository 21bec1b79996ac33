mod common;

use cascade_mnl::acme::{certified_ratio, solve_acme, solve_acme_with, sweep_reports, sweep_rho, Branch};
use cascade_mnl::choice::expected_revenue;
use cascade_mnl::dp::{DpOptions, TableLimits};
use cascade_mnl::model::validate_assortment;
use cascade_mnl::oracle::brute_force_opt;

#[test]
fn certified_bound_on_random_instances() {
    let mut rng = common::rng(2718);
    for _ in 0..25 {
        let inst = common::random_instance(&mut rng, 4, 3, 2, 2);
        let (_, opt) = brute_force_opt(&inst).unwrap();
        let rep = solve_acme(&inst, 0.5, 0.5).unwrap();
        assert!(rep.f_value >= rep.certified_ratio * opt - 1e-12);
        assert!(rep.f_value <= opt + 1e-12);
        assert!(validate_assortment(&inst, &rep.assortment).unwrap().is_empty());
        assert!(rep.assortment.is_gap_free());
        assert!((rep.f_value - expected_revenue(&inst, &rep.assortment).unwrap()).abs() <= 1e-12);
        let single = rep.branches.iter().find(|b| b.branch == Branch::SingleStage).unwrap();
        assert!(rep.f_value >= single.f_value);
    }
}

#[test]
fn sweep_dominates_each_rho() {
    let mut rng = common::rng(31);
    let rhos = [0.25, 0.5, 0.75];
    for _ in 0..10 {
        let inst = common::random_instance(&mut rng, 4, 2, 2, 2);
        let best = sweep_rho(&inst, &rhos, 0.5).unwrap();
        for r in sweep_reports(&inst, &rhos, 0.5, &DpOptions::default()).unwrap() {
            assert!(best.f_value >= r.f_value);
            if r.f_value == best.f_value {
                assert!(best.rho <= r.rho);
            }
        }
    }
}

#[test]
fn certified_ratio_peaks_at_half() {
    let peak = certified_ratio(0.5, 0.3);
    for rho in [0.1, 0.3, 0.45, 0.55, 0.9] {
        assert!(certified_ratio(rho, 0.3) < peak);
    }
    assert!(peak > 0.0 && peak <= 0.125);
}

#[test]
fn refusal_degrades_to_single_stage() {
    let inst = common::random_instance(&mut common::rng(4), 5, 2, 2, 2);
    let opts = DpOptions { limits: TableLimits { max_states: 1, max_dense_cells: 1 }, ..Default::default() };
    let rep = solve_acme_with(&inst, 0.5, 0.5, &opts).unwrap();
    assert!(rep.guarantee_degraded);
    assert_eq!(rep.winning_branch, Branch::SingleStage);
    assert!(rep.warnings[0].contains("refused"));
    assert!(rep.dp_stats.is_none());
}

#[test]
fn invalid_parameters() {
    let inst = common::pair();
    assert!(solve_acme(&inst, 0.0, 0.3).is_err());
    assert!(solve_acme(&inst, 1.0, 0.3).is_err());
    assert!(solve_acme(&inst, 0.5, 0.0).is_err());
    assert!(solve_acme(&inst, 0.5, 0.7).is_err());
}
