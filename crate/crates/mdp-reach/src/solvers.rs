//! The six solvers with uniform interfaces, convergence traces, and
//! per-component timing.
//!
//! Value-iteration family (in-place sweeps; the convergence delta is the
//! max value change of a sweep):
//! - `vi`: Bellman sweeps in state-index order.
//! - `vi-ps`: prioritized sweeping, descending |ΔV| from the previous sweep.
//! - `mfpt-vi`: sweeps ordered by ascending mean first passage time to the
//!   goal set, recomputed every `mfpt_period` iterations.
//!
//! Policy-iteration family (the convergence delta is the policy mismatch
//! count between rounds):
//! - `pi`: iterative policy evaluation + greedy improvement.
//! - `pi-le`: evaluation by direct linear solve of `(I − γPᵠ)·V = rᵠ`.
//! - `mfpt-pi`: greedy improvement followed by a reachability-greedy policy
//!   update; the round's improved and reachability policies must agree to
//!   terminate.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::linsolve::{self, LinError, SparseMatrix};
use crate::mdp::{
    bellman_backup, greedy_policy, induced_chain, policy_mismatch, ActionId, Mdp, MdpError,
    Policy, StateId, ValueFunction,
};
use crate::mfpt::{
    multi_goal_landscape, rank_states_by_mfpt, Accuracy, ReachabilityLandscape,
};

/// Errors from solver configuration and the evaluation paths.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("epsilon {0} must be positive")]
    NonPositiveEpsilon(f64),
    #[error("mfpt_period must be at least 1")]
    ZeroMfptPeriod,
    #[error("max_iterations must be at least 1")]
    ZeroIterationCap,
    #[error("mfpt fast-path tolerance {0} must be positive")]
    NonPositiveMfptTolerance(f64),
    #[error(transparent)]
    Model(#[from] MdpError),
    #[error(transparent)]
    Linear(#[from] LinError),
}

/// Shared solver knobs. The discount lives on the [`Mdp`] itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Convergence threshold on the per-iteration delta.
    pub epsilon: f64,
    /// Iterations between landscape recomputations in the mfpt solvers.
    pub mfpt_period: usize,
    /// Accuracy of the landscape solves.
    pub mfpt_accuracy: Accuracy,
    /// Safety cap on iterations (and on evaluation sweeps).
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 1e-6,
            mfpt_period: 3,
            mfpt_accuracy: Accuracy::Direct,
            max_iterations: 1000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(SolverError::NonPositiveEpsilon(self.epsilon));
        }
        if self.mfpt_period == 0 {
            return Err(SolverError::ZeroMfptPeriod);
        }
        if self.max_iterations == 0 {
            return Err(SolverError::ZeroIterationCap);
        }
        if let Accuracy::Fast { tol } = self.mfpt_accuracy {
            if !tol.is_finite() || tol <= 0.0 {
                return Err(SolverError::NonPositiveMfptTolerance(tol));
            }
        }
        Ok(())
    }
}

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationStatus {
    Converged,
    IterationCapReached,
}

/// Wall time spent in each algorithm component during one iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComponentTimes {
    pub bellman: Duration,
    pub policy_evaluation: Duration,
    pub policy_improvement: Duration,
    pub mfpt: Duration,
    pub sort: Duration,
}

impl ComponentTimes {
    fn add(&mut self, other: &ComponentTimes) {
        self.bellman += other.bellman;
        self.policy_evaluation += other.policy_evaluation;
        self.policy_improvement += other.policy_improvement;
        self.mfpt += other.mfpt;
        self.sort += other.sort;
    }
}

/// One trace row: the convergence delta plus timing for one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Max value change (VI family) or policy mismatch count (PI family).
    pub delta: f64,
    /// Wall time since the solve started, at the end of this iteration.
    pub cumulative: Duration,
    pub components: ComponentTimes,
}

/// Per-iteration convergence record of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub records: Vec<IterationRecord>,
    pub status: TerminationStatus,
}

impl ConvergenceTrace {
    pub fn num_iterations(&self) -> usize {
        self.records.len()
    }

    pub fn converged(&self) -> bool {
        self.status == TerminationStatus::Converged
    }

    /// Total wall time covered by the recorded iterations.
    pub fn total_time(&self) -> Duration {
        self.records.last().map(|r| r.cumulative).unwrap_or_default()
    }

    /// Component times summed over all iterations.
    pub fn component_totals(&self) -> ComponentTimes {
        let mut totals = ComponentTimes::default();
        for r in &self.records {
            totals.add(&r.components);
        }
        totals
    }
}

/// Values, policy, and trace returned by every solver.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub values: ValueFunction,
    pub policy: Policy,
    pub trace: ConvergenceTrace,
}

struct TraceBuilder {
    start: Instant,
    records: Vec<IterationRecord>,
}

impl TraceBuilder {
    fn new() -> Self {
        TraceBuilder {
            start: Instant::now(),
            records: Vec::new(),
        }
    }

    fn push(&mut self, iteration: usize, delta: f64, components: ComponentTimes) {
        debug_assert!(self
            .records
            .last()
            .map(|r| r.iteration < iteration)
            .unwrap_or(true));
        self.records.push(IterationRecord {
            iteration,
            delta,
            cumulative: self.start.elapsed(),
            components,
        });
    }

    fn finish(self, status: TerminationStatus) -> ConvergenceTrace {
        ConvergenceTrace {
            records: self.records,
            status,
        }
    }
}

// One in-place Bellman sweep over `order`; returns the max value change.
fn sweep_in_order(mdp: &Mdp, values: &mut ValueFunction, order: &[StateId]) -> f64 {
    let mut delta = 0.0f64;
    for &s in order {
        let (v, _) = bellman_backup(mdp, values, s);
        delta = delta.max((v - values.value(s)).abs());
        values.set(s, v);
    }
    delta
}

/// Classic value iteration: in-place Bellman sweeps in state order until
/// the max value change drops to `epsilon`.
pub fn value_iteration(mdp: &Mdp, cfg: &SolverConfig) -> Result<SolveResult, SolverError> {
    cfg.validate()?;
    let order: Vec<StateId> = mdp.states().collect();
    let mut values = ValueFunction::zeros(mdp.num_states());
    let mut trace = TraceBuilder::new();
    let mut status = TerminationStatus::IterationCapReached;
    for iteration in 1..=cfg.max_iterations {
        let t = Instant::now();
        let delta = sweep_in_order(mdp, &mut values, &order);
        let components = ComponentTimes {
            bellman: t.elapsed(),
            ..Default::default()
        };
        trace.push(iteration, delta, components);
        if delta <= cfg.epsilon {
            status = TerminationStatus::Converged;
            break;
        }
    }
    let policy = greedy_policy(mdp, &values);
    Ok(SolveResult {
        values,
        policy,
        trace: trace.finish(status),
    })
}

/// Value iteration with prioritized sweeping: each sweep visits states in
/// descending order of the value change they saw in the previous sweep.
pub fn vi_prioritized_sweeping(
    mdp: &Mdp,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolverError> {
    cfg.validate()?;
    let n = mdp.num_states();
    let mut order: Vec<StateId> = mdp.states().collect();
    let mut priorities = vec![0.0f64; n];
    let mut values = ValueFunction::zeros(n);
    let mut trace = TraceBuilder::new();
    let mut status = TerminationStatus::IterationCapReached;
    for iteration in 1..=cfg.max_iterations {
        let mut components = ComponentTimes::default();
        if iteration > 1 {
            let t = Instant::now();
            order.sort_unstable_by(|a, b| {
                priorities[b.0]
                    .total_cmp(&priorities[a.0])
                    .then(a.0.cmp(&b.0))
            });
            components.sort = t.elapsed();
        }
        let t = Instant::now();
        let mut delta = 0.0f64;
        for &s in &order {
            let (v, _) = bellman_backup(mdp, &values, s);
            let change = (v - values.value(s)).abs();
            priorities[s.0] = change;
            delta = delta.max(change);
            values.set(s, v);
        }
        components.bellman = t.elapsed();
        trace.push(iteration, delta, components);
        if delta <= cfg.epsilon {
            status = TerminationStatus::Converged;
            break;
        }
    }
    let policy = greedy_policy(mdp, &values);
    Ok(SolveResult {
        values,
        policy,
        trace: trace.finish(status),
    })
}

/// Value iteration prioritized by the reachability landscape.
pub fn mfpt_vi(mdp: &Mdp, cfg: &SolverConfig) -> Result<SolveResult, SolverError> {
    mfpt_vi_observed(mdp, cfg, &mut |_, _| {})
}

/// [`mfpt_vi`] with a callback invoked on every recomputed landscape,
/// receiving the iteration index it was computed at.
pub fn mfpt_vi_observed(
    mdp: &Mdp,
    cfg: &SolverConfig,
    on_landscape: &mut dyn FnMut(usize, &ReachabilityLandscape),
) -> Result<SolveResult, SolverError> {
    cfg.validate()?;
    assert!(!mdp.goal_states().is_empty(), "mfpt-vi needs a goal state");
    let mut values = ValueFunction::zeros(mdp.num_states());
    let mut order: Vec<StateId> = mdp.states().collect();
    let mut trace = TraceBuilder::new();
    let mut status = TerminationStatus::IterationCapReached;
    for iteration in 1..=cfg.max_iterations {
        let mut components = ComponentTimes::default();
        if (iteration - 1) % cfg.mfpt_period == 0 {
            // The chain of the running greedy policy; over the zero value
            // function on the first iteration.
            let t = Instant::now();
            let policy = greedy_policy(mdp, &values);
            let chain = induced_chain(mdp, &policy);
            let landscape = multi_goal_landscape(&chain, mdp.goal_states(), cfg.mfpt_accuracy);
            components.mfpt = t.elapsed();
            on_landscape(iteration, &landscape);
            let t = Instant::now();
            order = rank_states_by_mfpt(&landscape);
            components.sort = t.elapsed();
        }
        let t = Instant::now();
        let delta = sweep_in_order(mdp, &mut values, &order);
        components.bellman = t.elapsed();
        trace.push(iteration, delta, components);
        if delta <= cfg.epsilon {
            status = TerminationStatus::Converged;
            break;
        }
    }
    let policy = greedy_policy(mdp, &values);
    Ok(SolveResult {
        values,
        policy,
        trace: trace.finish(status),
    })
}

// Per-sweep stopping threshold that keeps the evaluated values within
// `epsilon` of the true V^pi: a sweep delta of d leaves at most d*gamma/(1-gamma)
// of error, so the sweeps stop at epsilon*(1-gamma)/gamma (for gamma near 1).
fn evaluation_sweep_tolerance(epsilon: f64, gamma: f64) -> f64 {
    if gamma > 0.5 && gamma < 1.0 {
        epsilon * (1.0 - gamma) / gamma
    } else {
        epsilon
    }
}

// Fixed-policy in-place sweeps until the values are within epsilon of V^pi.
// `start` seeds the sweep; the solvers warm-start from the previous round's
// values, which only changes how many sweeps the evaluation needs.
fn evaluate_policy_from(
    mdp: &Mdp,
    policy: &Policy,
    epsilon: f64,
    max_sweeps: usize,
    start: ValueFunction,
) -> (ValueFunction, TerminationStatus) {
    let gamma = mdp.discount();
    let tolerance = evaluation_sweep_tolerance(epsilon, gamma);
    let mut values = start;
    debug_assert_eq!(values.len(), mdp.num_states());
    let mut status = TerminationStatus::IterationCapReached;
    for _ in 1..=max_sweeps {
        let mut delta = 0.0f64;
        for s in mdp.states() {
            let mut v = 0.0;
            for t in mdp.transitions(s, policy.action(s)) {
                v += t.probability * (t.reward + gamma * values.value(t.successor));
            }
            delta = delta.max((v - values.value(s)).abs());
            values.set(s, v);
        }
        if delta <= tolerance {
            status = TerminationStatus::Converged;
            break;
        }
    }
    (values, status)
}

fn evaluate_policy(
    mdp: &Mdp,
    policy: &Policy,
    epsilon: f64,
    max_sweeps: usize,
) -> (ValueFunction, TerminationStatus) {
    evaluate_policy_from(
        mdp,
        policy,
        epsilon,
        max_sweeps,
        ValueFunction::zeros(mdp.num_states()),
    )
}

/// Iterative policy evaluation: fixed-policy Bellman sweeps from the zero
/// value function until the result is within `cfg.epsilon` of the true
/// policy value (or the iteration cap is recorded).
pub fn policy_evaluation_iterative(
    mdp: &Mdp,
    policy: &Policy,
    cfg: &SolverConfig,
) -> Result<(ValueFunction, TerminationStatus), SolverError> {
    cfg.validate()?;
    policy.validate_for(mdp)?;
    Ok(evaluate_policy(mdp, policy, cfg.epsilon, cfg.max_iterations))
}

/// Exact policy evaluation: solves `(I − γPᵠ)·V = rᵠ` directly.
pub fn policy_evaluation_linear(mdp: &Mdp, policy: &Policy) -> Result<ValueFunction, SolverError> {
    policy.validate_for(mdp)?;
    let n = mdp.num_states();
    let gamma = mdp.discount();
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n];
    for s in mdp.states() {
        let mut diag = 1.0;
        let mut reward = 0.0;
        for t in mdp.transitions(s, policy.action(s)) {
            reward += t.probability * t.reward;
            if t.successor == s {
                diag -= gamma * t.probability;
            } else {
                triplets.push((s.0, t.successor.0, -gamma * t.probability));
            }
        }
        if diag != 0.0 {
            triplets.push((s.0, s.0, diag));
        }
        rhs[s.0] = reward;
    }
    let matrix = SparseMatrix::from_triplets(n, n, &triplets)
        .expect("transition rows produce a well-formed system");
    let solution = linsolve::solve(&matrix, &rhs)?;
    Ok(ValueFunction::from_values(solution))
}

// Greedy improvement that keeps the incumbent action on numerical ties.
// Pure argmax lets policy iteration oscillate forever between policies whose
// exact values coincide and differ only by evaluation rounding; keeping the
// incumbent unless some action is strictly better restores the classical
// finite-termination guarantee.
fn improve_policy_sticky(mdp: &Mdp, values: &ValueFunction, incumbent: &Policy) -> Policy {
    let gamma = mdp.discount();
    let mut actions = Vec::with_capacity(mdp.num_states());
    for s in mdp.states() {
        let mut best_q = f64::NEG_INFINITY;
        let mut best_action = ActionId(0);
        let mut incumbent_q = f64::NEG_INFINITY;
        for a in mdp.actions() {
            let mut q = 0.0;
            for t in mdp.transitions(s, a) {
                q += t.probability * (t.reward + gamma * values.value(t.successor));
            }
            if q > best_q {
                best_q = q;
                best_action = a;
            }
            if a == incumbent.action(s) {
                incumbent_q = q;
            }
        }
        let tie_band = 1e-9 * (1.0 + best_q.abs());
        if incumbent_q >= best_q - tie_band {
            actions.push(incumbent.action(s));
        } else {
            actions.push(best_action);
        }
    }
    Policy::from_actions(actions)
}

fn policy_iteration_impl(
    mdp: &Mdp,
    cfg: &SolverConfig,
    linear_evaluation: bool,
) -> Result<SolveResult, SolverError> {
    cfg.validate()?;
    let n = mdp.num_states();
    let mut policy = Policy::uniform(n, ActionId(0));
    let mut values = ValueFunction::zeros(n);
    let mut trace = TraceBuilder::new();
    let mut status = TerminationStatus::IterationCapReached;
    for iteration in 1..=cfg.max_iterations {
        let mut components = ComponentTimes::default();
        let t = Instant::now();
        values = if linear_evaluation {
            policy_evaluation_linear(mdp, &policy)?
        } else {
            evaluate_policy(mdp, &policy, cfg.epsilon, cfg.max_iterations).0
        };
        components.policy_evaluation = t.elapsed();
        let t = Instant::now();
        let improved = improve_policy_sticky(mdp, &values, &policy);
        components.policy_improvement = t.elapsed();
        let delta = policy_mismatch(&policy, &improved)? as f64;
        trace.push(iteration, delta, components);
        policy = improved;
        if delta == 0.0 {
            status = TerminationStatus::Converged;
            break;
        }
    }
    if status == TerminationStatus::IterationCapReached {
        // The cap fired between improvement and evaluation; make the
        // returned values the evaluation of the returned policy.
        values = if linear_evaluation {
            policy_evaluation_linear(mdp, &policy)?
        } else {
            evaluate_policy(mdp, &policy, cfg.epsilon, cfg.max_iterations).0
        };
    }
    Ok(SolveResult {
        values,
        policy,
        trace: trace.finish(status),
    })
}

/// Policy iteration with iterative evaluation; terminates when two
/// consecutive policies agree everywhere.
pub fn policy_iteration(mdp: &Mdp, cfg: &SolverConfig) -> Result<SolveResult, SolverError> {
    policy_iteration_impl(mdp, cfg, false)
}

/// Policy iteration with the evaluation step solved as a linear system.
pub fn policy_iteration_le(mdp: &Mdp, cfg: &SolverConfig) -> Result<SolveResult, SolverError> {
    policy_iteration_impl(mdp, cfg, true)
}

/// Reachability-greedy policy: per state, the action minimizing the
/// expected landscape value of the successor. Ties break toward the lowest
/// action index; goal states take action 0.
pub fn mfpt_policy_update(mdp: &Mdp, landscape: &ReachabilityLandscape) -> Policy {
    assert_eq!(landscape.len(), mdp.num_states(), "landscape length mismatch");
    let mut policy = Policy::uniform(mdp.num_states(), ActionId(0));
    for s in mdp.states() {
        if mdp.is_goal(s) {
            continue;
        }
        let mut best_cost = f64::INFINITY;
        let mut best_action = ActionId(0);
        for a in mdp.actions() {
            let mut cost = 0.0;
            for t in mdp.transitions(s, a) {
                cost += t.probability * landscape.value(t.successor);
            }
            if cost < best_cost {
                best_cost = cost;
                best_action = a;
            }
        }
        policy.set(s, best_action);
    }
    policy
}

/// Policy iteration guided by the reachability landscape.
pub fn mfpt_pi(mdp: &Mdp, cfg: &SolverConfig) -> Result<SolveResult, SolverError> {
    mfpt_pi_observed(mdp, cfg, &mut |_, _| {})
}

/// [`mfpt_pi`] with a callback invoked on every recomputed landscape.
///
/// Each round evaluates the current policy, improves it greedily into `π`,
/// computes the landscape of the chain `π` induces, and derives the
/// reachability-greedy `π'`; the round converges when `π = π'` and otherwise
/// seeds the next round with `π'`. When the value-greedy and
/// reachability-greedy criteria never coincide this loop would revisit a
/// seed policy and cycle forever, so a revisit permanently switches the
/// remaining rounds to plain policy iteration.
pub fn mfpt_pi_observed(
    mdp: &Mdp,
    cfg: &SolverConfig,
    on_landscape: &mut dyn FnMut(usize, &ReachabilityLandscape),
) -> Result<SolveResult, SolverError> {
    cfg.validate()?;
    assert!(!mdp.goal_states().is_empty(), "mfpt-pi needs a goal state");
    let n = mdp.num_states();
    let mut seed = Policy::uniform(n, ActionId(0));
    let mut seen: HashSet<(Policy, usize)> = HashSet::new();
    let mut mfpt_active = true;
    let mut trace = TraceBuilder::new();
    let mut status = TerminationStatus::IterationCapReached;
    let mut final_policy = seed.clone();
    let mut final_values = ValueFunction::zeros(n);
    let mut values_follow_policy = false;
    for iteration in 1..=cfg.max_iterations {
        let phase = (iteration - 1) % cfg.mfpt_period;
        if mfpt_active && !seen.insert((seed.clone(), phase)) {
            mfpt_active = false;
        }
        let mut components = ComponentTimes::default();
        let t = Instant::now();
        let mut values = evaluate_policy(mdp, &seed, cfg.epsilon, cfg.max_iterations).0;
        components.policy_evaluation = t.elapsed();
        let do_mfpt = mfpt_active && phase == 0;
        // Ties stick to the seed only in the plain improvement rounds, whose
        // termination compares consecutive policies; the reachability rounds
        // terminate on cycle detection and use the pure greedy policy.
        let t = Instant::now();
        let improved = if do_mfpt {
            greedy_policy(mdp, &values)
        } else {
            improve_policy_sticky(mdp, &values, &seed)
        };
        components.policy_improvement = t.elapsed();

        if do_mfpt {
            let t = Instant::now();
            let chain = induced_chain(mdp, &improved);
            let landscape = multi_goal_landscape(&chain, mdp.goal_states(), cfg.mfpt_accuracy);
            components.mfpt = t.elapsed();
            on_landscape(iteration, &landscape);
            let t = Instant::now();
            let reach_greedy = mfpt_policy_update(mdp, &landscape);
            components.policy_improvement += t.elapsed();
            let delta = policy_mismatch(&improved, &reach_greedy)? as f64;
            if delta == 0.0 {
                if improved != seed {
                    let t = Instant::now();
                    values =
                        evaluate_policy(mdp, &improved, cfg.epsilon, cfg.max_iterations).0;
                    components.policy_evaluation += t.elapsed();
                }
                trace.push(iteration, delta, components);
                final_policy = improved;
                final_values = values;
                values_follow_policy = true;
                status = TerminationStatus::Converged;
                break;
            }
            trace.push(iteration, delta, components);
            final_policy = improved;
            final_values = values;
            values_follow_policy = false;
            seed = reach_greedy;
        } else {
            let delta = policy_mismatch(&seed, &improved)? as f64;
            trace.push(iteration, delta, components);
            if delta == 0.0 {
                final_policy = improved;
                final_values = values;
                values_follow_policy = true;
                status = TerminationStatus::Converged;
                break;
            }
            final_policy = improved.clone();
            final_values = values;
            values_follow_policy = false;
            seed = improved;
        }
    }
    if !values_follow_policy {
        final_values = evaluate_policy(mdp, &final_policy, cfg.epsilon, cfg.max_iterations).0;
    }
    Ok(SolveResult {
        values: final_values,
        policy: final_policy,
        trace: trace.finish(status),
    })
}

/// Name-addressable handle on the six solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Vi,
    ViPs,
    MfptVi,
    Pi,
    PiLe,
    MfptPi,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::Vi,
        SolverKind::ViPs,
        SolverKind::MfptVi,
        SolverKind::Pi,
        SolverKind::PiLe,
        SolverKind::MfptPi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Vi => "vi",
            SolverKind::ViPs => "vi-ps",
            SolverKind::MfptVi => "mfpt-vi",
            SolverKind::Pi => "pi",
            SolverKind::PiLe => "pi-le",
            SolverKind::MfptPi => "mfpt-pi",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        SolverKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn is_vi_family(self) -> bool {
        matches!(self, SolverKind::Vi | SolverKind::ViPs | SolverKind::MfptVi)
    }

    pub fn is_mfpt_family(self) -> bool {
        matches!(self, SolverKind::MfptVi | SolverKind::MfptPi)
    }

    pub fn solve(self, mdp: &Mdp, cfg: &SolverConfig) -> Result<SolveResult, SolverError> {
        match self {
            SolverKind::Vi => value_iteration(mdp, cfg),
            SolverKind::ViPs => vi_prioritized_sweeping(mdp, cfg),
            SolverKind::MfptVi => mfpt_vi(mdp, cfg),
            SolverKind::Pi => policy_iteration(mdp, cfg),
            SolverKind::PiLe => policy_iteration_le(mdp, cfg),
            SolverKind::MfptPi => mfpt_pi(mdp, cfg),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverKind::from_name(s).ok_or_else(|| {
            format!(
                "unknown solver '{s}' (expected one of: {})",
                SolverKind::ALL.map(|k| k.name()).join(", ")
            )
        })
    }
}
