//! Seeded random absorbing models for benchmarks and cross-solver checks.
//!
//! Every generator guarantees the absorbing property by construction: state
//! 0 is the goal and each state keeps at least one edge toward a
//! lower-indexed state, so the goal is reachable from everywhere through the
//! union of action edges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mdp::{ActionId, MarkovChain, Mdp, MdpBuilder, StateId};

/// Shape of a random absorbing MDP.
#[derive(Debug, Clone, Copy)]
pub struct RandomMdpConfig {
    pub num_states: usize,
    pub num_actions: usize,
    /// Upper bound on successors per (state, action) row.
    pub max_successors: usize,
    pub discount: f64,
    /// Rewards are drawn uniformly from `[-reward_scale, reward_scale]`.
    pub reward_scale: f64,
}

impl Default for RandomMdpConfig {
    fn default() -> Self {
        RandomMdpConfig {
            num_states: 20,
            num_actions: 3,
            max_successors: 4,
            discount: 0.9,
            reward_scale: 1.0,
        }
    }
}

fn distinct_successors(
    rng: &mut ChaCha8Rng,
    num_states: usize,
    count: usize,
    forced: Option<usize>,
) -> Vec<usize> {
    let mut successors: Vec<usize> = Vec::with_capacity(count);
    if let Some(f) = forced {
        successors.push(f);
    }
    while successors.len() < count {
        let candidate = rng.random_range(0..num_states);
        if !successors.contains(&candidate) {
            successors.push(candidate);
        }
    }
    successors
}

/// Random absorbing MDP with goal at state 0 and dense-enough random rows.
pub fn random_absorbing_mdp(config: &RandomMdpConfig, seed: u64) -> Mdp {
    assert!(config.num_states >= 2, "need at least a goal and one state");
    assert!(config.num_actions >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.num_states;
    let max_succ = config.max_successors.clamp(1, n);
    let mut builder = MdpBuilder::new(n, config.num_actions, config.discount);
    builder.goal(StateId(0));
    for s in 1..n {
        for a in 0..config.num_actions {
            let count = rng.random_range(1..=max_succ);
            // Action 0 always steps toward a lower index, which keeps the
            // union graph absorbing into the goal.
            let forced = if a == 0 {
                Some(rng.random_range(0..s))
            } else {
                None
            };
            let successors = distinct_successors(&mut rng, n, count, forced);
            let mut weights: Vec<f64> = (0..successors.len())
                .map(|_| rng.random_range(0.05..1.0))
                .collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            for (succ, w) in successors.iter().zip(&weights) {
                let reward = rng.random_range(-config.reward_scale..=config.reward_scale);
                builder.transition(StateId(s), ActionId(a), StateId(*succ), *w, reward);
            }
        }
    }
    builder.build().expect("generated rows are well-formed")
}

/// Random absorbing chain with goal at state 0; `pull` is the minimum mass
/// each state sends toward lower-indexed states (keeps hitting times small).
pub fn random_absorbing_chain(num_states: usize, pull: f64, seed: u64) -> (MarkovChain, StateId) {
    assert!(num_states >= 2);
    assert!((0.0..1.0).contains(&pull));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let goal = StateId(0);
    let mut rows: Vec<Vec<(StateId, f64)>> = Vec::with_capacity(num_states);
    rows.push(vec![(goal, 1.0)]);
    for s in 1..num_states {
        let down = rng.random_range(0..s);
        let mut targets = vec![down];
        let extra = rng.random_range(0..=3usize.min(num_states - 1));
        for _ in 0..extra {
            let candidate = rng.random_range(0..num_states);
            if !targets.contains(&candidate) {
                targets.push(candidate);
            }
        }
        let mut weights: Vec<f64> = (0..targets.len())
            .map(|_| rng.random_range(0.05..1.0))
            .collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        // Blend toward the lower-indexed target to bound expected hitting times.
        let mut row: Vec<(StateId, f64)> = targets
            .iter()
            .zip(&weights)
            .map(|(t, w)| (StateId(*t), w * (1.0 - pull)))
            .collect();
        row[0].1 += pull;
        rows.push(row);
    }
    let chain = MarkovChain::from_rows(rows).expect("generated rows are stochastic");
    (chain, goal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{check_absorbing, validate_mdp};

    #[test]
    fn random_mdps_are_valid_and_absorbing() {
        for seed in 0..10 {
            let mdp = random_absorbing_mdp(&RandomMdpConfig::default(), seed);
            assert!(validate_mdp(&mdp).ok(), "seed {seed}");
            assert!(check_absorbing(&mdp), "seed {seed}");
        }
    }

    #[test]
    fn random_chains_are_stochastic_and_deterministic_per_seed() {
        let (a, goal) = random_absorbing_chain(8, 0.3, 42);
        let (b, _) = random_absorbing_chain(8, 0.3, 42);
        assert_eq!(a, b);
        assert_eq!(goal, StateId(0));
        for s in a.states() {
            let sum: f64 = a.row(s).iter().map(|(_, p)| p).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }
}
