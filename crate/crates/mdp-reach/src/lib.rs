//! Solvers for absorbing Markov decision processes, built around
//! mean-first-passage-time (MFPT) reachability landscapes.
//!
//! The crate provides the classic dynamic-programming solvers (value
//! iteration, prioritized sweeping, policy iteration with iterative or
//! exact evaluation) next to two reachability-guided variants: `mfpt-vi`
//! sweeps states in ascending order of their expected first passage time to
//! the goal set, and `mfpt-pi` steers policy improvement by the same
//! landscape. All six share one configuration type and emit per-iteration
//! convergence traces with component timings.
//!
//! Modules:
//! - [`mdp`]: the model, policies, value functions, Bellman operators.
//! - [`linsolve`]: sparse LU and Gauss-Seidel kernels.
//! - [`mfpt`]: first-passage systems and reachability landscapes.
//! - [`solvers`]: the six solvers and their traces.
//! - [`gridworld`]: ASCII-map 2D/3D benchmark builders and rollouts.
//! - [`synth`]: seeded random absorbing models for testing and benchmarks.

pub mod gridworld;
pub mod linsolve;
pub mod mdp;
pub mod mfpt;
pub mod solvers;
pub mod synth;

pub use mdp::{
    bellman_backup, check_absorbing, greedy_policy, induced_chain, policy_mismatch,
    validate_mdp, value_residual, ActionId, MarkovChain, Mdp, MdpBuilder, MdpError, Policy,
    StateId, Transition, ValueFunction,
};
pub use mfpt::{
    build_mfpt_system, clip_landscape, compute_mfpt, multi_goal_landscape, rank_states_by_mfpt,
    Accuracy, ReachabilityLandscape, MFPT_MAX,
};
pub use solvers::{
    mfpt_pi, mfpt_policy_update, mfpt_vi, policy_evaluation_iterative, policy_evaluation_linear,
    policy_iteration, policy_iteration_le, value_iteration, vi_prioritized_sweeping,
    ConvergenceTrace, SolveResult, SolverConfig, SolverError, SolverKind, TerminationStatus,
};
