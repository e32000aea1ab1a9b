//! Mean-first-passage-time reachability landscapes.
//!
//! For a Markov chain with transition matrix `p` and a target state `j`, the
//! mean first passage time `μ_i` (expected number of hops to first reach `j`
//! from `i`) satisfies the first-step recursion
//!
//! ```text
//! μ_i = 1 + Σ_{k≠j} p_ik · μ_k,     μ_j = 0,
//! ```
//!
//! which is the linear system `(P̃ − I)·μ = −1` over the non-target states,
//! with `P̃` the chain minus the target row and column. The per-state μ values
//! form a *reachability landscape*: low μ means the goal is easy to reach and
//! the state carries high influence on convergence. The landscape only has to
//! order states, so an exact solve is optional and degenerate states simply
//! receive a large sentinel.

use crate::linsolve::{self, LinError, SparseMatrix};
use crate::mdp::{MarkovChain, StateId};

/// Sentinel MFPT for states that cannot (or are not known to) reach the
/// goal: larger than any meaningful finite passage time.
pub const MFPT_MAX: f64 = 1e9;

// Budget for the degradation path taken when the direct solve hits a
// numerically singular block (states whose goal paths carry probabilities
// below machine precision). The Gauss-Seidel iterates climb monotonically
// toward the minimal solution, so a state whose recursion residual has not
// stabilized within the budget has a passage time beyond numeric reach.
const FALLBACK_SWEEPS: usize = 20_000;
const FALLBACK_RESIDUAL_TOL: f64 = 1e-3;

/// Accuracy of the linear solve behind a landscape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Accuracy {
    /// Sparse LU; residual at solver precision.
    Direct,
    /// Gauss-Seidel down to the given residual tolerance.
    Fast { tol: f64 },
}

impl Accuracy {
    /// The fast path at the default ordering tolerance of 1e-3.
    pub fn fast_default() -> Self {
        Accuracy::Fast { tol: 1e-3 }
    }
}

/// Per-state MFPT-to-goal values with a finite/sentinel distinction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachabilityLandscape {
    mfpt: Vec<f64>,
    goals: Vec<StateId>,
    sentinel: f64,
}

impl ReachabilityLandscape {
    pub fn len(&self) -> usize {
        self.mfpt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mfpt.is_empty()
    }

    /// MFPT of one state (the sentinel for unreachable states).
    pub fn value(&self, state: StateId) -> f64 {
        self.mfpt[state.0]
    }

    pub fn values(&self) -> &[f64] {
        &self.mfpt
    }

    /// Goal states this landscape measures distance to, ascending.
    pub fn goals(&self) -> &[StateId] {
        &self.goals
    }

    pub fn sentinel(&self) -> f64 {
        self.sentinel
    }

    pub fn is_finite(&self, state: StateId) -> bool {
        self.mfpt[state.0] != self.sentinel
    }

    /// Assembles a landscape from precomputed values. Goal entries must be 0
    /// and every index in range.
    pub fn from_parts(mfpt: Vec<f64>, goals: Vec<StateId>, sentinel: f64) -> Self {
        let mut goals = goals;
        goals.sort_unstable();
        goals.dedup();
        for g in &goals {
            assert!(g.0 < mfpt.len(), "goal {g} out of range");
            assert_eq!(mfpt[g.0], 0.0, "goal {g} must have zero MFPT");
        }
        ReachabilityLandscape {
            mfpt,
            goals,
            sentinel,
        }
    }
}

/// Builds the `(n−1)×(n−1)` first-passage system for `goal`: the matrix
/// `P̃ − I` over non-goal states, a right-hand side of all −1, and the map
/// from compressed row index back to [`StateId`].
pub fn build_mfpt_system(
    chain: &MarkovChain,
    goal: StateId,
) -> (SparseMatrix, Vec<f64>, Vec<StateId>) {
    let n = chain.num_states();
    assert!(goal.0 < n, "goal {goal} out of range");
    let index_map: Vec<StateId> = (0..n).map(StateId).filter(|s| *s != goal).collect();
    let mut compressed = vec![usize::MAX; n];
    for (k, s) in index_map.iter().enumerate() {
        compressed[s.0] = k;
    }
    let mut triplets = Vec::new();
    for (k, s) in index_map.iter().enumerate() {
        let mut diag = -1.0;
        for &(succ, p) in chain.row(*s) {
            if succ == goal {
                continue;
            }
            if succ == *s {
                diag += p;
            } else {
                triplets.push((k, compressed[succ.0], p));
            }
        }
        if diag != 0.0 {
            triplets.push((k, k, diag));
        }
    }
    let dim = index_map.len();
    let matrix = SparseMatrix::from_triplets(dim, dim, &triplets)
        .expect("chain rows produce a well-formed system");
    (matrix, vec![-1.0; dim], index_map)
}

// Bounded Gauss-Seidel from zero, returning the iterate and a per-state
// stability flag (small recursion residual). Rows with a vanishing diagonal
// stay at zero and unstable.
fn gauss_seidel_bounded(a: &SparseMatrix, b: &[f64], max_sweeps: usize) -> (Vec<f64>, Vec<bool>) {
    let n = a.n_rows();
    let mut x = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut solvable = vec![false; n];
    for r in 0..n {
        let (cols, vals) = a.row(r);
        if let Some(i) = cols.iter().position(|&c| c == r) {
            if vals[i].abs() >= linsolve::PIVOT_TOLERANCE {
                diag[r] = vals[i];
                solvable[r] = true;
            }
        }
    }
    let residuals = |x: &[f64]| -> Vec<f64> {
        a.mul_vec(x)
            .iter()
            .zip(b)
            .map(|(ax, bi)| (ax - bi).abs())
            .collect()
    };
    for sweep in 1..=max_sweeps {
        for r in 0..n {
            if !solvable[r] {
                continue;
            }
            let (cols, vals) = a.row(r);
            let mut acc = b[r];
            for (&c, &v) in cols.iter().zip(vals) {
                if c != r {
                    acc -= v * x[c];
                }
            }
            x[r] = acc / diag[r];
        }
        if sweep % 64 == 0 {
            let worst = residuals(&x).into_iter().fold(0.0, f64::max);
            if worst <= FALLBACK_RESIDUAL_TOL {
                break;
            }
        }
    }
    let stable: Vec<bool> = residuals(&x)
        .iter()
        .zip(&solvable)
        .map(|(r, ok)| *ok && *r <= FALLBACK_RESIDUAL_TOL)
        .collect();
    (x, stable)
}

// States with a positive-probability path to the goal, via reverse BFS.
fn states_reaching(chain: &MarkovChain, goal: StateId) -> Vec<bool> {
    let n = chain.num_states();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        for &(succ, p) in chain.row(StateId(s)) {
            if p > 0.0 {
                reverse[succ.0].push(s);
            }
        }
    }
    let mut reached = vec![false; n];
    reached[goal.0] = true;
    let mut queue = vec![goal.0];
    while let Some(v) = queue.pop() {
        for &u in &reverse[v] {
            if !reached[u] {
                reached[u] = true;
                queue.push(u);
            }
        }
    }
    reached
}

/// Solves the first-passage system for `goal` and returns the landscape.
///
/// The system is restricted to states that can reach the goal at all; every
/// other state gets the sentinel, as does any state whose solved value comes
/// back negative, non-finite, or at sentinel scale. A solve that fails on a
/// numerically singular block degrades per state instead of erroring: the
/// stabilized part of the landscape survives, the rest keeps the sentinel.
pub fn compute_mfpt(chain: &MarkovChain, goal: StateId, accuracy: Accuracy) -> ReachabilityLandscape {
    let n = chain.num_states();
    assert!(goal.0 < n, "goal {goal} out of range");
    let mut mfpt = vec![MFPT_MAX; n];
    mfpt[goal.0] = 0.0;

    let reached = states_reaching(chain, goal);
    let solve_set: Vec<StateId> = (0..n)
        .map(StateId)
        .filter(|s| reached[s.0] && *s != goal)
        .collect();
    if solve_set.is_empty() {
        return ReachabilityLandscape {
            mfpt,
            goals: vec![goal],
            sentinel: MFPT_MAX,
        };
    }

    let mut compressed = vec![usize::MAX; n];
    for (k, s) in solve_set.iter().enumerate() {
        compressed[s.0] = k;
    }
    // (P̃ − I) restricted to the reaching set; transitions out of the set
    // lead to infinite-MFPT states and are dropped from the recursion.
    let mut triplets = Vec::new();
    for (k, s) in solve_set.iter().enumerate() {
        let mut diag = -1.0;
        for &(succ, p) in chain.row(*s) {
            if succ == goal || !reached[succ.0] {
                continue;
            }
            if succ == *s {
                diag += p;
            } else {
                triplets.push((k, compressed[succ.0], p));
            }
        }
        if diag != 0.0 {
            triplets.push((k, k, diag));
        }
    }
    let dim = solve_set.len();
    let matrix = SparseMatrix::from_triplets(dim, dim, &triplets)
        .expect("chain rows produce a well-formed system");
    let rhs = vec![-1.0; dim];
    let solution: Result<Vec<f64>, LinError> = match accuracy {
        Accuracy::Direct => linsolve::solve(&matrix, &rhs),
        Accuracy::Fast { tol } => {
            linsolve::solve_iterative(&matrix, &rhs, tol, linsolve::DEFAULT_MAX_SWEEPS)
        }
    };
    let accept = |v: f64| v.is_finite() && (0.0..MFPT_MAX).contains(&v);
    match solution {
        Ok(x) => {
            for (k, s) in solve_set.iter().enumerate() {
                if accept(x[k]) {
                    mfpt[s.0] = x[k];
                }
            }
        }
        Err(_) => {
            // A block of the system is singular at machine precision; keep
            // whatever part of the landscape stabilizes and leave the rest
            // at the sentinel.
            let (x, stable) = gauss_seidel_bounded(&matrix, &rhs, FALLBACK_SWEEPS);
            for (k, s) in solve_set.iter().enumerate() {
                if stable[k] && accept(x[k]) {
                    mfpt[s.0] = x[k];
                }
            }
        }
    }
    ReachabilityLandscape {
        mfpt,
        goals: vec![goal],
        sentinel: MFPT_MAX,
    }
}

/// Landscape for a set of goals: one single-goal landscape per goal,
/// combined per state by taking the minimum. Every goal maps to 0.
pub fn multi_goal_landscape(
    chain: &MarkovChain,
    goals: &[StateId],
    accuracy: Accuracy,
) -> ReachabilityLandscape {
    assert!(!goals.is_empty(), "goal set must be non-empty");
    let mut sorted: Vec<StateId> = goals.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut combined = compute_mfpt(chain, sorted[0], accuracy);
    for goal in &sorted[1..] {
        let single = compute_mfpt(chain, *goal, accuracy);
        for (dst, src) in combined.mfpt.iter_mut().zip(&single.mfpt) {
            if *src < *dst {
                *dst = *src;
            }
        }
    }
    combined.goals = sorted;
    combined
}

/// All states ordered by ascending MFPT; ties break toward the lower
/// [`StateId`], which also places sentinel states last in a stable order.
pub fn rank_states_by_mfpt(landscape: &ReachabilityLandscape) -> Vec<StateId> {
    let mut order: Vec<StateId> = (0..landscape.len()).map(StateId).collect();
    order.sort_unstable_by(|a, b| {
        landscape.mfpt[a.0]
            .total_cmp(&landscape.mfpt[b.0])
            .then(a.0.cmp(&b.0))
    });
    order
}

/// Per-state `min(μ, clip)` with the sentinel mapped to `clip`; the
/// visualization-export form of a landscape.
pub fn clip_landscape(landscape: &ReachabilityLandscape, clip: f64) -> Vec<f64> {
    assert!(clip > 0.0, "clip must be positive");
    landscape
        .mfpt
        .iter()
        .map(|&v| if v == landscape.sentinel { clip } else { v.min(clip) })
        .collect()
}
