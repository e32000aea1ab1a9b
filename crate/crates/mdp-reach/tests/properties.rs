//! Property tests over random models: stochasticity, Bellman operator
//! structure, metric behaviour of the residual, linear-solver consistency,
//! and the first-passage recursion.

use proptest::prelude::*;

use mdp_reach::linsolve::{solve, solve_iterative, SparseMatrix};
use mdp_reach::synth::{random_absorbing_chain, random_absorbing_mdp, RandomMdpConfig};
use mdp_reach::{
    bellman_backup, build_mfpt_system, compute_mfpt, greedy_policy, induced_chain,
    mfpt_policy_update, multi_goal_landscape, rank_states_by_mfpt, validate_mdp, value_residual,
    Accuracy, ActionId, Policy, ReachabilityLandscape, StateId, ValueFunction,
};

fn small_mdp(seed: u64, num_states: usize, num_actions: usize, gamma: f64) -> mdp_reach::Mdp {
    random_absorbing_mdp(
        &RandomMdpConfig {
            num_states,
            num_actions,
            max_successors: 4,
            discount: gamma,
            reward_scale: 1.0,
        },
        seed,
    )
}

// (n, V1, V2) with matching lengths.
fn two_value_functions() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (2usize..30).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(-10.0..10.0f64, n),
            prop::collection::vec(-10.0..10.0f64, n),
        )
    })
}

type DominantSystem = (usize, Vec<Vec<(usize, f64)>>, Vec<f64>);

// Strictly diagonally dominant sparse system with a known solution.
fn dominant_system() -> impl Strategy<Value = DominantSystem> {
    (2usize..200).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(
                prop::collection::vec((0usize..n, -1.0..1.0f64), 0..4),
                n,
            ),
            prop::collection::vec(-5.0..5.0f64, n),
        )
    })
}

fn assemble_dominant(n: usize, rows: &[Vec<(usize, f64)>]) -> SparseMatrix {
    let mut triplets = Vec::new();
    for (r, entries) in rows.iter().enumerate() {
        let mut off: Vec<(usize, f64)> = Vec::new();
        for &(c, v) in entries {
            if c != r && !off.iter().any(|(oc, _)| *oc == c) {
                off.push((c, v));
            }
        }
        let dominance: f64 = off.iter().map(|(_, v)| v.abs()).sum::<f64>() + 1.0;
        triplets.push((r, r, dominance));
        for (c, v) in off {
            triplets.push((r, c, v));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn models_and_induced_chains_are_row_stochastic(
        seed in any::<u64>(),
        n in 2usize..30,
        m in 1usize..5,
    ) {
        let mdp = small_mdp(seed, n, m, 0.9);
        prop_assert!(validate_mdp(&mdp).ok());
        let chain = induced_chain(&mdp, &Policy::uniform(n, ActionId(0)));
        for s in chain.states() {
            let total: f64 = chain.row(s).iter().map(|(_, p)| p).sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn backup_is_monotone(
        seed in any::<u64>(),
        (n, base, bump) in (2usize..30).prop_flat_map(|n| (
            Just(n),
            prop::collection::vec(-10.0..10.0f64, n),
            prop::collection::vec(0.0..5.0f64, n),
        )),
    ) {
        let mdp = small_mdp(seed, n, 3, 0.9);
        let lower = ValueFunction::from_values(base.clone());
        let raised = ValueFunction::from_values(
            base.iter().zip(&bump).map(|(v, b)| v + b).collect(),
        );
        for s in mdp.states() {
            let (lo, _) = bellman_backup(&mdp, &lower, s);
            let (hi, _) = bellman_backup(&mdp, &raised, s);
            prop_assert!(lo <= hi + 1e-12);
        }
    }

    #[test]
    fn backup_is_a_gamma_contraction(
        seed in any::<u64>(),
        (n, v1, v2) in two_value_functions(),
    ) {
        let gamma = 0.9;
        let mdp = small_mdp(seed, n, 3, gamma);
        let a = ValueFunction::from_values(v1.clone());
        let b = ValueFunction::from_values(v2.clone());
        let sup: f64 = v1
            .iter()
            .zip(&v2)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        for s in mdp.states() {
            let (ba, _) = bellman_backup(&mdp, &a, s);
            let (bb, _) = bellman_backup(&mdp, &b, s);
            prop_assert!((ba - bb).abs() <= gamma * sup + 1e-9);
        }
    }

    #[test]
    fn greedy_policy_agrees_with_backup(
        seed in any::<u64>(),
        (n, values, _) in two_value_functions(),
    ) {
        let mdp = small_mdp(seed, n, 4, 0.9);
        let v = ValueFunction::from_values(values);
        let policy = greedy_policy(&mdp, &v);
        for s in mdp.states() {
            prop_assert_eq!(policy.action(s), bellman_backup(&mdp, &v, s).1);
        }
    }

    #[test]
    fn residual_behaves_like_a_metric(
        (n, v1, v2) in two_value_functions(),
        v3_seed in prop::collection::vec(-10.0..10.0f64, 2..30),
    ) {
        let a = ValueFunction::from_values(v1.clone());
        let b = ValueFunction::from_values(v2.clone());
        let v3: Vec<f64> = (0..n).map(|i| v3_seed[i % v3_seed.len()]).collect();
        let c = ValueFunction::from_values(v3);
        let dab = value_residual(&a, &b).unwrap();
        let dba = value_residual(&b, &a).unwrap();
        prop_assert_eq!(dab, dba);
        prop_assert_eq!(value_residual(&a, &a).unwrap(), 0.0);
        if dab == 0.0 {
            prop_assert_eq!(v1, v2);
        }
        let dac = value_residual(&a, &c).unwrap();
        let dbc = value_residual(&b, &c).unwrap();
        prop_assert!(dac <= dab + dbc + 1e-12);
    }

    #[test]
    fn lu_recovers_known_solutions(
        (n, rows, x) in dominant_system(),
    ) {
        let a = assemble_dominant(n, &rows);
        let b = a.mul_vec(&x);
        let solved = solve(&a, &b).unwrap();
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (xi, si) in x.iter().zip(&solved) {
            prop_assert!((xi - si).abs() <= 1e-6 * scale);
        }
        let bound = 1e-6 * (1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        prop_assert!(a.residual_norm(&solved, &b) <= bound);
    }

    #[test]
    fn gauss_seidel_agrees_with_lu(
        (n, rows, x) in dominant_system(),
    ) {
        let a = assemble_dominant(n, &rows);
        let b = a.mul_vec(&x);
        let direct = solve(&a, &b).unwrap();
        let iterative = solve_iterative(&a, &b, 1e-8, 10_000).unwrap();
        for (d, i) in direct.iter().zip(&iterative) {
            prop_assert!((d - i).abs() <= 1e-4);
        }
    }

    #[test]
    fn mfpt_satisfies_first_step_recursion(
        seed in any::<u64>(),
        n in 2usize..40,
    ) {
        let (chain, goal) = random_absorbing_chain(n, 0.3, seed);
        let landscape = compute_mfpt(&chain, goal, Accuracy::Direct);
        prop_assert_eq!(landscape.value(goal), 0.0);
        for s in chain.states() {
            if s == goal {
                continue;
            }
            // Every state descends toward the goal almost surely, so all
            // values are finite and the recursion holds over the full row.
            prop_assert!(landscape.is_finite(s));
            prop_assert!(landscape.value(s) >= 1.0 - 1e-9);
            let mut expected = 1.0;
            for &(succ, p) in chain.row(s) {
                if succ != goal {
                    expected += p * landscape.value(succ);
                }
            }
            prop_assert!((expected - landscape.value(s)).abs() <= 1e-6);
        }
    }

    #[test]
    fn full_system_route_matches_compute_mfpt(
        seed in any::<u64>(),
        n in 2usize..30,
    ) {
        let (chain, goal) = random_absorbing_chain(n, 0.3, seed);
        let (matrix, rhs, index_map) = build_mfpt_system(&chain, goal);
        let x = solve(&matrix, &rhs).unwrap();
        let landscape = compute_mfpt(&chain, goal, Accuracy::Direct);
        for (k, s) in index_map.iter().enumerate() {
            prop_assert!((x[k] - landscape.value(*s)).abs() <= 1e-6);
        }
    }

    #[test]
    fn ranking_is_a_permutation(
        seed in any::<u64>(),
        n in 2usize..40,
    ) {
        let (chain, goal) = random_absorbing_chain(n, 0.3, seed);
        let landscape = compute_mfpt(&chain, goal, Accuracy::Direct);
        let order = rank_states_by_mfpt(&landscape);
        let mut sorted: Vec<usize> = order.iter().map(|s| s.0).collect();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn mfpt_policy_update_is_scale_invariant(
        seed in any::<u64>(),
        n in 2usize..25,
        scale in 0.01..100.0f64,
    ) {
        let mdp = small_mdp(seed, n, 3, 0.9);
        let chain = induced_chain(&mdp, &Policy::uniform(n, ActionId(0)));
        let landscape = multi_goal_landscape(&chain, mdp.goal_states(), Accuracy::Direct);
        let scaled = ReachabilityLandscape::from_parts(
            landscape.values().iter().map(|v| v * scale).collect(),
            landscape.goals().to_vec(),
            landscape.sentinel() * scale,
        );
        prop_assert_eq!(
            mfpt_policy_update(&mdp, &landscape),
            mfpt_policy_update(&mdp, &scaled)
        );
    }

    #[test]
    fn clipping_bounds_all_values(
        seed in any::<u64>(),
        n in 2usize..25,
        clip in 0.5..200.0f64,
    ) {
        let (chain, goal) = random_absorbing_chain(n, 0.3, seed);
        let landscape = compute_mfpt(&chain, goal, Accuracy::Direct);
        let clipped = mdp_reach::clip_landscape(&landscape, clip);
        prop_assert_eq!(clipped.len(), n);
        for (s, v) in clipped.iter().enumerate() {
            prop_assert!(*v >= 0.0 && *v <= clip);
            if StateId(s) == goal {
                prop_assert_eq!(*v, 0.0);
            }
        }
    }
}

#[test]
fn residual_zero_only_for_equal_vectors() {
    let a = ValueFunction::from_values(vec![1.0, 2.0, 3.0]);
    let b = ValueFunction::from_values(vec![1.0, 2.0, 3.0 + 1e-12]);
    assert!(value_residual(&a, &b).unwrap() > 0.0);
}
