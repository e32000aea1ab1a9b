//! Cross-solver checks: all six solvers share the same fixed point, sweep
//! order only affects speed, and traces stay well-formed.

use mdp_reach::gridworld::{build_mdp_2d, parse_grid, NoiseModel};
use mdp_reach::synth::{random_absorbing_mdp, RandomMdpConfig};
use mdp_reach::{
    mfpt_vi, value_iteration, value_residual, Accuracy, SolverConfig, SolverKind,
};

fn cfg(epsilon: f64) -> SolverConfig {
    SolverConfig {
        epsilon,
        mfpt_period: 3,
        mfpt_accuracy: Accuracy::Direct,
        max_iterations: 1000,
    }
}

#[test]
fn all_six_solvers_share_the_fixed_point() {
    let epsilon = 1e-8;
    for (seed, gamma) in [(1u64, 0.9), (2, 0.95), (3, 0.9), (4, 0.95), (5, 0.9)] {
        let mdp = random_absorbing_mdp(
            &RandomMdpConfig {
                num_states: 40 + (seed as usize * 7) % 21,
                num_actions: 2 + (seed as usize % 3),
                max_successors: 4,
                discount: gamma,
                reward_scale: 1.0,
            },
            seed,
        );
        let reference = value_iteration(&mdp, &cfg(epsilon)).unwrap();
        for kind in SolverKind::ALL {
            let run_cfg = SolverConfig {
                mfpt_period: if kind.is_vi_family() { 3 } else { 1 },
                ..cfg(epsilon)
            };
            let result = kind.solve(&mdp, &run_cfg).unwrap();
            let gap = value_residual(&reference.values, &result.values).unwrap();
            assert!(
                gap <= 10.0 * epsilon,
                "seed {seed} solver {kind}: gap {gap:e}"
            );
        }
    }
}

#[test]
fn sweep_order_does_not_change_the_fixed_point() {
    let epsilon = 1e-8;
    for seed in 10..14u64 {
        let mdp = random_absorbing_mdp(&RandomMdpConfig::default(), seed);
        let vi = value_iteration(&mdp, &cfg(epsilon)).unwrap();
        for kind in [SolverKind::ViPs, SolverKind::MfptVi] {
            let result = kind.solve(&mdp, &cfg(epsilon)).unwrap();
            assert!(value_residual(&vi.values, &result.values).unwrap() <= 10.0 * epsilon);
        }
        // Never recomputing the landscape after the first iteration only
        // affects the ordering, not the fixed point.
        let frozen_order = SolverConfig {
            mfpt_period: usize::MAX,
            ..cfg(epsilon)
        };
        let result = mfpt_vi(&mdp, &frozen_order).unwrap();
        assert!(result.trace.converged());
        assert!(value_residual(&vi.values, &result.values).unwrap() <= 10.0 * epsilon);
    }
}

#[test]
fn mfpt_vi_period_does_not_change_final_policy_on_grid() {
    let mut text = String::new();
    for y in 0..20 {
        for x in 0..20 {
            let ch = if (x, y) == (16, 13) {
                'G'
            } else if (5..8).contains(&x) && (4..12).contains(&y) {
                '#'
            } else {
                '.'
            };
            text.push(ch);
        }
        text.push('\n');
    }
    let grid = parse_grid(&text).unwrap();
    let mdp = build_mdp_2d(&grid, NoiseModel::default(), 100.0, -1.0, 0.95).unwrap();
    let run = |period: usize| {
        let config = SolverConfig {
            epsilon: 1e-6,
            mfpt_period: period,
            ..SolverConfig::default()
        };
        mfpt_vi(&mdp, &config).unwrap()
    };
    let p1 = run(1);
    let p3 = run(3);
    assert!(p1.trace.converged() && p3.trace.converged());
    assert_eq!(p1.policy, p3.policy);
}

#[test]
fn traces_are_well_formed_across_solvers() {
    let mdp = random_absorbing_mdp(&RandomMdpConfig::default(), 77);
    for kind in SolverKind::ALL {
        let result = kind.solve(&mdp, &cfg(1e-8)).unwrap();
        let records = &result.trace.records;
        assert!(!records.is_empty(), "{kind}");
        assert!(result.trace.converged(), "{kind}");
        for pair in records.windows(2) {
            assert!(pair[0].iteration < pair[1].iteration, "{kind}");
            assert!(pair[0].cumulative <= pair[1].cumulative, "{kind}");
        }
        assert!(records.iter().all(|r| r.delta >= 0.0), "{kind}");
        // PI-family deltas are mismatch counts.
        if !kind.is_vi_family() {
            assert!(records.iter().all(|r| r.delta.fract() == 0.0), "{kind}");
        }
    }
}
