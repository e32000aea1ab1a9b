//! Core MDP data model: states, actions, sparse transition rows, rewards,
//! policies, value functions, and the Bellman machinery shared by every
//! solver.
//!
//! A model is a tuple (S, A, T, R, γ) with `T_a(s, s')` stored as a sparse
//! list of `(successor, probability, reward)` per `(state, action)` and a
//! non-empty set of absorbing goal states. Fixing a policy turns the model
//! into a [`MarkovChain`].

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Tolerance for row-stochasticity checks: probabilities per (state, action)
/// must sum to 1 within this bound.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Builders renormalize rows whose sum deviates from 1 by less than this and
/// reject anything worse.
pub const ROW_RENORMALIZE_TOLERANCE: f64 = 1e-6;

/// Dense state index in `[0, num_states)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

/// Dense action index in `[0, num_actions)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// One sparse transition entry: taking an action may land in `successor`
/// with `probability`, yielding `reward`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub successor: StateId,
    pub probability: f64,
    pub reward: f64,
}

/// Errors from model construction and the dimension-checked operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MdpError {
    #[error("model must have at least one state and one action")]
    EmptyModel,
    #[error("discount {0} outside [0, 1]")]
    InvalidDiscount(f64),
    #[error("model has no goal states")]
    NoGoalStates,
    #[error("state index {id} out of range (num_states = {num_states})")]
    InvalidStateId { id: usize, num_states: usize },
    #[error("action index {id} out of range (num_actions = {num_actions})")]
    InvalidActionId { id: usize, num_actions: usize },
    #[error("probability {probability} for ({state}, {action}) -> {successor} outside [0, 1]")]
    InvalidProbability {
        state: StateId,
        action: ActionId,
        successor: StateId,
        probability: f64,
    },
    #[error("non-finite reward for ({state}, {action}) -> {successor}")]
    NonFiniteReward {
        state: StateId,
        action: ActionId,
        successor: StateId,
    },
    #[error("duplicate successor {successor} in row ({state}, {action})")]
    DuplicateSuccessor {
        state: StateId,
        action: ActionId,
        successor: StateId,
    },
    #[error("row ({state}, {action}) sums to {sum}, too far from 1 to renormalize")]
    RowSumViolation {
        state: StateId,
        action: ActionId,
        sum: f64,
    },
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// A single invariant violation reported by [`validate_mdp`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    RowSumViolation {
        state: StateId,
        action: ActionId,
        sum: f64,
    },
    NegativeProbability {
        state: StateId,
        action: ActionId,
        successor: StateId,
        probability: f64,
    },
    ExcessiveProbability {
        state: StateId,
        action: ActionId,
        successor: StateId,
        probability: f64,
    },
    ZeroProbabilityEntry {
        state: StateId,
        action: ActionId,
        successor: StateId,
    },
    DuplicateSuccessor {
        state: StateId,
        action: ActionId,
        successor: StateId,
    },
    InvalidSuccessor {
        state: StateId,
        action: ActionId,
        successor: StateId,
    },
    GoalNotAbsorbing { goal: StateId, action: ActionId },
    InvalidDiscount { discount: f64 },
    NoGoalStates,
    InvalidGoal { goal: StateId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowSumViolation { state, action, sum } => {
                write!(f, "row ({state}, {action}) sums to {sum}, expected 1")
            }
            Violation::NegativeProbability {
                state,
                action,
                successor,
                probability,
            } => write!(
                f,
                "negative probability {probability} on ({state}, {action}) -> {successor}"
            ),
            Violation::ExcessiveProbability {
                state,
                action,
                successor,
                probability,
            } => write!(
                f,
                "probability {probability} > 1 on ({state}, {action}) -> {successor}"
            ),
            Violation::ZeroProbabilityEntry {
                state,
                action,
                successor,
            } => write!(
                f,
                "zero-probability entry on ({state}, {action}) -> {successor}"
            ),
            Violation::DuplicateSuccessor {
                state,
                action,
                successor,
            } => write!(f, "duplicate successor {successor} in row ({state}, {action})"),
            Violation::InvalidSuccessor {
                state,
                action,
                successor,
            } => write!(f, "successor {successor} out of range in row ({state}, {action})"),
            Violation::GoalNotAbsorbing { goal, action } => {
                write!(f, "goal {goal} is not absorbing under {action}")
            }
            Violation::InvalidDiscount { discount } => {
                write!(f, "discount {discount} outside [0, 1]")
            }
            Violation::NoGoalStates => write!(f, "no goal states"),
            Violation::InvalidGoal { goal } => write!(f, "goal {goal} out of range"),
        }
    }
}

/// Outcome of [`validate_mdp`]: `ok()` or the list of violations found.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "ok")
        } else {
            writeln!(f, "{} violation(s):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  - {v}")?;
            }
            Ok(())
        }
    }
}

/// Immutable MDP model. Construct through [`MdpBuilder`].
#[derive(Debug, Clone)]
pub struct Mdp {
    num_states: usize,
    num_actions: usize,
    discount: f64,
    // rows[s * num_actions + a], each sorted by successor index
    rows: Vec<Vec<Transition>>,
    goals: Vec<StateId>,
    goal_mask: Vec<bool>,
}

impl Mdp {
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Goal states in ascending order.
    pub fn goal_states(&self) -> &[StateId] {
        &self.goals
    }

    pub fn is_goal(&self, state: StateId) -> bool {
        self.goal_mask[state.0]
    }

    /// Sparse transition row for `(state, action)`, sorted by successor.
    pub fn transitions(&self, state: StateId, action: ActionId) -> &[Transition] {
        assert!(state.0 < self.num_states, "state {state} out of range");
        assert!(action.0 < self.num_actions, "action {action} out of range");
        &self.rows[state.0 * self.num_actions + action.0]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states).map(StateId)
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> {
        (0..self.num_actions).map(ActionId)
    }

    /// Assembles a model without any invariant checking. Intended for data
    /// that will be inspected with [`validate_mdp`]; prefer [`MdpBuilder`].
    pub fn from_parts_unchecked(
        num_states: usize,
        num_actions: usize,
        discount: f64,
        rows: Vec<Vec<Transition>>,
        goals: Vec<StateId>,
    ) -> Self {
        assert_eq!(rows.len(), num_states * num_actions, "row count mismatch");
        let mut goal_mask = vec![false; num_states];
        for g in &goals {
            if g.0 < num_states {
                goal_mask[g.0] = true;
            }
        }
        Mdp {
            num_states,
            num_actions,
            discount,
            rows,
            goals,
            goal_mask,
        }
    }
}

/// Incremental model builder. Rows are validated and renormalized on
/// [`build`](MdpBuilder::build); goal states are forced absorbing.
#[derive(Debug, Clone)]
pub struct MdpBuilder {
    num_states: usize,
    num_actions: usize,
    discount: f64,
    rows: Vec<Vec<Transition>>,
    goals: Vec<StateId>,
}

impl MdpBuilder {
    pub fn new(num_states: usize, num_actions: usize, discount: f64) -> Self {
        MdpBuilder {
            num_states,
            num_actions,
            discount,
            rows: vec![Vec::new(); num_states * num_actions],
            goals: Vec::new(),
        }
    }

    /// Appends one transition entry; entries for a row may arrive in any order.
    pub fn transition(
        &mut self,
        state: StateId,
        action: ActionId,
        successor: StateId,
        probability: f64,
        reward: f64,
    ) -> &mut Self {
        assert!(state.0 < self.num_states, "state {state} out of range");
        assert!(action.0 < self.num_actions, "action {action} out of range");
        self.rows[state.0 * self.num_actions + action.0].push(Transition {
            successor,
            probability,
            reward,
        });
        self
    }

    pub fn goal(&mut self, state: StateId) -> &mut Self {
        self.goals.push(state);
        self
    }

    pub fn build(&self) -> Result<Mdp, MdpError> {
        if self.num_states == 0 || self.num_actions == 0 {
            return Err(MdpError::EmptyModel);
        }
        if !self.discount.is_finite() || !(0.0..=1.0).contains(&self.discount) {
            return Err(MdpError::InvalidDiscount(self.discount));
        }
        if self.goals.is_empty() {
            return Err(MdpError::NoGoalStates);
        }
        let mut goals = self.goals.clone();
        goals.sort_unstable();
        goals.dedup();
        for g in &goals {
            if g.0 >= self.num_states {
                return Err(MdpError::InvalidStateId {
                    id: g.0,
                    num_states: self.num_states,
                });
            }
        }
        let mut goal_mask = vec![false; self.num_states];
        for g in &goals {
            goal_mask[g.0] = true;
        }

        let mut rows = Vec::with_capacity(self.rows.len());
        #[allow(clippy::needless_range_loop)]
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                let state = StateId(s);
                let action = ActionId(a);
                if goal_mask[s] {
                    // Goals are absorbing by construction: self-loop, no reward.
                    rows.push(vec![Transition {
                        successor: state,
                        probability: 1.0,
                        reward: 0.0,
                    }]);
                    continue;
                }
                let raw = &self.rows[s * self.num_actions + a];
                let mut row = Vec::with_capacity(raw.len());
                for t in raw {
                    if t.successor.0 >= self.num_states {
                        return Err(MdpError::InvalidStateId {
                            id: t.successor.0,
                            num_states: self.num_states,
                        });
                    }
                    if !t.probability.is_finite() || t.probability < 0.0 || t.probability > 1.0 {
                        return Err(MdpError::InvalidProbability {
                            state,
                            action,
                            successor: t.successor,
                            probability: t.probability,
                        });
                    }
                    if !t.reward.is_finite() {
                        return Err(MdpError::NonFiniteReward {
                            state,
                            action,
                            successor: t.successor,
                        });
                    }
                    if t.probability > 0.0 {
                        row.push(*t);
                    }
                }
                row.sort_by_key(|t| t.successor);
                for pair in row.windows(2) {
                    if pair[0].successor == pair[1].successor {
                        return Err(MdpError::DuplicateSuccessor {
                            state,
                            action,
                            successor: pair[0].successor,
                        });
                    }
                }
                let sum: f64 = row.iter().map(|t| t.probability).sum();
                if (sum - 1.0).abs() >= ROW_RENORMALIZE_TOLERANCE {
                    return Err(MdpError::RowSumViolation { state, action, sum });
                }
                for t in &mut row {
                    t.probability /= sum;
                }
                rows.push(row);
            }
        }

        Ok(Mdp {
            num_states: self.num_states,
            num_actions: self.num_actions,
            discount: self.discount,
            rows,
            goals,
            goal_mask,
        })
    }
}

/// Checks every model invariant and reports each violation with the
/// offending (state, action) instead of failing fast.
pub fn validate_mdp(mdp: &Mdp) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !mdp.discount.is_finite() || !(0.0..=1.0).contains(&mdp.discount) {
        report.violations.push(Violation::InvalidDiscount {
            discount: mdp.discount,
        });
    }
    if mdp.goals.is_empty() {
        report.violations.push(Violation::NoGoalStates);
    }
    for g in &mdp.goals {
        if g.0 >= mdp.num_states {
            report.violations.push(Violation::InvalidGoal { goal: *g });
        }
    }
    for s in 0..mdp.num_states {
        for a in 0..mdp.num_actions {
            let state = StateId(s);
            let action = ActionId(a);
            let row = &mdp.rows[s * mdp.num_actions + a];
            let mut seen = HashSet::new();
            let mut sum = 0.0;
            for t in row {
                sum += t.probability;
                if t.successor.0 >= mdp.num_states {
                    report.violations.push(Violation::InvalidSuccessor {
                        state,
                        action,
                        successor: t.successor,
                    });
                    continue;
                }
                if t.probability < 0.0 {
                    report.violations.push(Violation::NegativeProbability {
                        state,
                        action,
                        successor: t.successor,
                        probability: t.probability,
                    });
                } else if t.probability > 1.0 {
                    report.violations.push(Violation::ExcessiveProbability {
                        state,
                        action,
                        successor: t.successor,
                        probability: t.probability,
                    });
                } else if t.probability == 0.0 {
                    report.violations.push(Violation::ZeroProbabilityEntry {
                        state,
                        action,
                        successor: t.successor,
                    });
                }
                if !seen.insert(t.successor) {
                    report.violations.push(Violation::DuplicateSuccessor {
                        state,
                        action,
                        successor: t.successor,
                    });
                }
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                report
                    .violations
                    .push(Violation::RowSumViolation { state, action, sum });
            }
            if mdp.goal_mask.get(s).copied().unwrap_or(false) {
                let absorbing =
                    row.len() == 1 && row[0].successor == state && row[0].probability == 1.0;
                if !absorbing {
                    report
                        .violations
                        .push(Violation::GoalNotAbsorbing { goal: state, action });
                }
            }
        }
    }
    report
}

/// True iff every state has some action sequence with positive probability
/// of reaching a goal (graph reachability over the union of action edges).
pub fn check_absorbing(mdp: &Mdp) -> bool {
    let n = mdp.num_states;
    // Reverse adjacency over all actions, then BFS from the goal set.
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for a in 0..mdp.num_actions {
            for t in &mdp.rows[s * mdp.num_actions + a] {
                if t.probability > 0.0 && t.successor.0 < n {
                    reverse[t.successor.0].push(s);
                }
            }
        }
    }
    let mut reached = vec![false; n];
    let mut queue: Vec<usize> = mdp.goals.iter().map(|g| g.0).collect();
    for q in &queue {
        reached[*q] = true;
    }
    while let Some(v) = queue.pop() {
        for &u in &reverse[v] {
            if !reached[u] {
                reached[u] = true;
                queue.push(u);
            }
        }
    }
    reached.iter().all(|r| *r)
}

/// Per-state value estimates, dense over all states.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    values: Vec<f64>,
}

impl ValueFunction {
    pub fn zeros(num_states: usize) -> Self {
        ValueFunction {
            values: vec![0.0; num_states],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        ValueFunction { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, state: StateId) -> f64 {
        self.values[state.0]
    }

    pub fn set(&mut self, state: StateId, value: f64) {
        self.values[state.0] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// One action per state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Policy {
    actions: Vec<ActionId>,
}

impl Policy {
    /// Policy assigning the same action everywhere.
    pub fn uniform(num_states: usize, action: ActionId) -> Self {
        Policy {
            actions: vec![action; num_states],
        }
    }

    pub fn from_actions(actions: Vec<ActionId>) -> Self {
        Policy { actions }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn action(&self, state: StateId) -> ActionId {
        self.actions[state.0]
    }

    pub fn set(&mut self, state: StateId, action: ActionId) {
        self.actions[state.0] = action;
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    /// Errors unless the policy has one in-range action per state of `mdp`.
    pub fn validate_for(&self, mdp: &Mdp) -> Result<(), MdpError> {
        if self.actions.len() != mdp.num_states() {
            return Err(MdpError::DimensionMismatch {
                expected: mdp.num_states(),
                actual: self.actions.len(),
            });
        }
        for a in &self.actions {
            if a.0 >= mdp.num_actions() {
                return Err(MdpError::InvalidActionId {
                    id: a.0,
                    num_actions: mdp.num_actions(),
                });
            }
        }
        Ok(())
    }
}

/// Sparse row-stochastic matrix: the chain a policy induces on an MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    rows: Vec<Vec<(StateId, f64)>>,
}

impl MarkovChain {
    /// Validating constructor; rows must be sorted-or-sortable successor
    /// distributions summing to 1 within [`ROW_SUM_TOLERANCE`].
    pub fn from_rows(rows: Vec<Vec<(StateId, f64)>>) -> Result<Self, MdpError> {
        let n = rows.len();
        let mut sorted = rows;
        for (i, row) in sorted.iter_mut().enumerate() {
            row.sort_by_key(|(s, _)| *s);
            let mut sum = 0.0;
            for (s, p) in row.iter() {
                if s.0 >= n {
                    return Err(MdpError::InvalidStateId {
                        id: s.0,
                        num_states: n,
                    });
                }
                if !p.is_finite() || *p < 0.0 || *p > 1.0 {
                    return Err(MdpError::InvalidProbability {
                        state: StateId(i),
                        action: ActionId(0),
                        successor: *s,
                        probability: *p,
                    });
                }
                sum += *p;
            }
            for pair in row.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(MdpError::DuplicateSuccessor {
                        state: StateId(i),
                        action: ActionId(0),
                        successor: pair[0].0,
                    });
                }
            }
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(MdpError::RowSumViolation {
                    state: StateId(i),
                    action: ActionId(0),
                    sum,
                });
            }
        }
        Ok(MarkovChain { rows: sorted })
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    /// Sparse outgoing distribution of `state`, sorted by successor.
    pub fn row(&self, state: StateId) -> &[(StateId, f64)] {
        &self.rows[state.0]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.rows.len()).map(StateId)
    }
}

/// One Bellman backup at `state`: the maximal expected one-step return
/// `max_a Σ_{s'} T_a(s,s')·(R_a(s,s') + γ·V(s'))` and its maximizer.
/// Ties break toward the lowest action index.
pub fn bellman_backup(mdp: &Mdp, values: &ValueFunction, state: StateId) -> (f64, ActionId) {
    debug_assert_eq!(values.len(), mdp.num_states());
    let gamma = mdp.discount();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_action = ActionId(0);
    for a in 0..mdp.num_actions() {
        let action = ActionId(a);
        let mut q = 0.0;
        for t in mdp.transitions(state, action) {
            q += t.probability * (t.reward + gamma * values.value(t.successor));
        }
        if q > best_value {
            best_value = q;
            best_action = action;
        }
    }
    (best_value, best_action)
}

/// Greedy policy w.r.t. `values`: the per-state maximizer of the backup.
pub fn greedy_policy(mdp: &Mdp, values: &ValueFunction) -> Policy {
    let actions = mdp
        .states()
        .map(|s| bellman_backup(mdp, values, s).1)
        .collect();
    Policy::from_actions(actions)
}

/// The Markov chain obtained by following `policy`: row `s` is the
/// distribution of the chosen action.
pub fn induced_chain(mdp: &Mdp, policy: &Policy) -> MarkovChain {
    assert_eq!(policy.len(), mdp.num_states(), "policy length mismatch");
    let rows = mdp
        .states()
        .map(|s| {
            mdp.transitions(s, policy.action(s))
                .iter()
                .map(|t| (t.successor, t.probability))
                .collect()
        })
        .collect();
    MarkovChain { rows }
}

/// Maximum absolute per-state difference between two value functions.
pub fn value_residual(v: &ValueFunction, v_next: &ValueFunction) -> Result<f64, MdpError> {
    if v.len() != v_next.len() {
        return Err(MdpError::DimensionMismatch {
            expected: v.len(),
            actual: v_next.len(),
        });
    }
    Ok(v.values()
        .iter()
        .zip(v_next.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Number of states where two policies disagree.
pub fn policy_mismatch(p1: &Policy, p2: &Policy) -> Result<usize, MdpError> {
    if p1.len() != p2.len() {
        return Err(MdpError::DimensionMismatch {
            expected: p1.len(),
            actual: p2.len(),
        });
    }
    Ok(p1
        .actions()
        .iter()
        .zip(p2.actions())
        .filter(|(a, b)| a != b)
        .count())
}
