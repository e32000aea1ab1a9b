//! ASCII grid-world builders: 2D maps with the eight compass moves plus
//! idle, 3D maps with the six axis moves plus idle.
//!
//! Map format: `.` free, `#` obstacle, `G` goal, `S` start; one row per
//! line, 3D layers separated by blank lines, trailing newline optional.
//!
//! Transition model: the intended move keeps mass `1 − η`; the rest is split
//! uniformly over the other on-grid moves of the state. An intended move
//! into an obstacle or off the grid resolves to staying in place, so
//! obstacle cells are entered by noise only and the action set stays uniform
//! across states. Entering a goal cell pays `goal_reward`, entering an
//! obstacle cell pays `obstacle_penalty`, everything else pays 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mdp::{ActionId, Mdp, MdpBuilder, MdpError, Policy, StateId};

/// 2D action order; index is the [`ActionId`].
pub const ACTION_NAMES_2D: [&str; 9] = ["N", "NE", "E", "SE", "S", "SW", "W", "NW", "idle"];

/// 3D action order; index is the [`ActionId`].
pub const ACTION_NAMES_3D: [&str; 7] = ["N", "E", "S", "W", "top", "bottom", "idle"];

// (dx, dy, dz) with y growing downward (row index) and z growing with later
// layer blocks.
const MOVES_2D: [(i64, i64, i64); 9] = [
    (0, -1, 0),
    (1, -1, 0),
    (1, 0, 0),
    (1, 1, 0),
    (0, 1, 0),
    (-1, 1, 0),
    (-1, 0, 0),
    (-1, -1, 0),
    (0, 0, 0),
];

const MOVES_3D: [(i64, i64, i64); 7] = [
    (0, -1, 0),
    (1, 0, 0),
    (0, 1, 0),
    (-1, 0, 0),
    (0, 0, 1),
    (0, 0, -1),
    (0, 0, 0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Free,
    Obstacle,
    Goal,
    Start,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GridError {
    #[error("line {line} has a different length than the first row")]
    RaggedGrid { line: usize },
    #[error("map contains no goal cell")]
    NoGoal,
    #[error("unknown cell character '{ch}' at line {line}, column {col}")]
    UnknownCell { ch: char, line: usize, col: usize },
    #[error("map contains more than one start cell")]
    MultipleStarts,
    #[error("expected a {expected} grid")]
    DimensionMismatch { expected: &'static str },
    #[error("noise {0} outside [0, 1)")]
    InvalidNoise(f64),
    #[error(transparent)]
    Mdp(#[from] MdpError),
}

/// Rectangular 2D or 3D cell map with at least one goal.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    layers: usize,
    // index (z * height + y) * width + x
    cells: Vec<CellKind>,
}

impl GridMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn is_3d(&self) -> bool {
        self.layers > 1
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, x: usize, y: usize, z: usize) -> CellKind {
        self.cells[(z * self.height + y) * self.width + x]
    }

    /// State of the cell at `(x, y, z)`; states are cell indices.
    pub fn state_id(&self, x: usize, y: usize, z: usize) -> StateId {
        StateId((z * self.height + y) * self.width + x)
    }

    /// Inverse of [`state_id`](GridMap::state_id).
    pub fn coords(&self, state: StateId) -> (usize, usize, usize) {
        let per_layer = self.width * self.height;
        let z = state.0 / per_layer;
        let rest = state.0 % per_layer;
        (rest % self.width, rest / self.width, z)
    }

    pub fn start(&self) -> Option<StateId> {
        self.cells
            .iter()
            .position(|c| *c == CellKind::Start)
            .map(StateId)
    }

    pub fn goals(&self) -> Vec<StateId> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == CellKind::Goal)
            .map(|(i, _)| StateId(i))
            .collect()
    }
}

/// Probability mass η diverted from the intended move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    eta: f64,
}

impl NoiseModel {
    pub fn new(eta: f64) -> Result<Self, GridError> {
        if !eta.is_finite() || !(0.0..1.0).contains(&eta) {
            return Err(GridError::InvalidNoise(eta));
        }
        Ok(NoiseModel { eta })
    }

    /// Deterministic transitions.
    pub fn none() -> Self {
        NoiseModel { eta: 0.0 }
    }

    pub fn eta(self) -> f64 {
        self.eta
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel { eta: 0.1 }
    }
}

/// Parses an ASCII map; blank lines separate the layers of a 3D map.
pub fn parse_grid(text: &str) -> Result<GridMap, GridError> {
    // (original line number, row characters) grouped into layer blocks
    let mut blocks: Vec<Vec<(usize, &str)>> = Vec::new();
    let mut current: Vec<(usize, &str)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push((idx + 1, line));
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    if blocks.is_empty() {
        return Err(GridError::NoGoal);
    }

    let width = blocks[0][0].1.chars().count();
    let height = blocks[0].len();
    let mut cells = Vec::new();
    let mut goal_count = 0usize;
    let mut start_count = 0usize;
    for block in &blocks {
        if block.len() != height {
            return Err(GridError::RaggedGrid {
                line: block[0].0,
            });
        }
        for (line_no, row) in block {
            let mut row_cells = 0usize;
            for (col, ch) in row.chars().enumerate() {
                let kind = match ch {
                    '.' => CellKind::Free,
                    '#' => CellKind::Obstacle,
                    'G' => CellKind::Goal,
                    'S' => CellKind::Start,
                    other => {
                        return Err(GridError::UnknownCell {
                            ch: other,
                            line: *line_no,
                            col: col + 1,
                        })
                    }
                };
                match kind {
                    CellKind::Goal => goal_count += 1,
                    CellKind::Start => start_count += 1,
                    _ => {}
                }
                cells.push(kind);
                row_cells += 1;
            }
            if row_cells != width {
                return Err(GridError::RaggedGrid { line: *line_no });
            }
        }
    }
    if goal_count == 0 {
        return Err(GridError::NoGoal);
    }
    if start_count > 1 {
        return Err(GridError::MultipleStarts);
    }
    Ok(GridMap {
        width,
        height,
        layers: blocks.len(),
        cells,
    })
}

fn build_mdp(
    grid: &GridMap,
    moves: &[(i64, i64, i64)],
    noise: NoiseModel,
    goal_reward: f64,
    obstacle_penalty: f64,
    gamma: f64,
) -> Result<Mdp, GridError> {
    let eta = noise.eta();
    let num_actions = moves.len();
    let mut builder = MdpBuilder::new(grid.num_cells(), num_actions, gamma);
    for goal in grid.goals() {
        builder.goal(goal);
    }

    let entry_reward = |target: StateId| -> f64 {
        let (x, y, z) = grid.coords(target);
        match grid.cell(x, y, z) {
            CellKind::Goal => goal_reward,
            CellKind::Obstacle => obstacle_penalty,
            _ => 0.0,
        }
    };

    let mut raw_targets: Vec<Option<StateId>> = vec![None; num_actions];
    let mut mass: Vec<(StateId, f64)> = Vec::with_capacity(num_actions);
    for z in 0..grid.layers {
        for y in 0..grid.height {
            for x in 0..grid.width {
                if grid.cell(x, y, z) == CellKind::Goal {
                    continue; // forced absorbing by the builder
                }
                let state = grid.state_id(x, y, z);
                for (a, (dx, dy, dz)) in moves.iter().enumerate() {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    let nz = z as i64 + dz;
                    raw_targets[a] = if nx >= 0
                        && (nx as usize) < grid.width
                        && ny >= 0
                        && (ny as usize) < grid.height
                        && nz >= 0
                        && (nz as usize) < grid.layers
                    {
                        Some(grid.state_id(nx as usize, ny as usize, nz as usize))
                    } else {
                        None
                    };
                }
                for a in 0..num_actions {
                    let intended = match raw_targets[a] {
                        Some(t) => {
                            let (tx, ty, tz) = grid.coords(t);
                            if grid.cell(tx, ty, tz) == CellKind::Obstacle {
                                state
                            } else {
                                t
                            }
                        }
                        None => state,
                    };
                    mass.clear();
                    let others: Vec<StateId> = (0..num_actions)
                        .filter(|a2| *a2 != a)
                        .filter_map(|a2| raw_targets[a2])
                        .collect();
                    if eta > 0.0 && !others.is_empty() {
                        mass.push((intended, 1.0 - eta));
                        let share = eta / others.len() as f64;
                        for t in others {
                            mass.push((t, share));
                        }
                    } else {
                        mass.push((intended, 1.0));
                    }
                    mass.sort_by_key(|(t, _)| *t);
                    let mut merged: Vec<(StateId, f64)> = Vec::with_capacity(mass.len());
                    for &(t, p) in mass.iter() {
                        match merged.last_mut() {
                            Some((last, acc)) if *last == t => *acc += p,
                            _ => merged.push((t, p)),
                        }
                    }
                    for (t, p) in &merged {
                        builder.transition(state, ActionId(a), *t, *p, entry_reward(*t));
                    }
                }
            }
        }
    }
    Ok(builder.build()?)
}

/// Builds the 2D model: one state per cell, nine actions.
pub fn build_mdp_2d(
    grid: &GridMap,
    noise: NoiseModel,
    goal_reward: f64,
    obstacle_penalty: f64,
    gamma: f64,
) -> Result<Mdp, GridError> {
    if grid.is_3d() {
        return Err(GridError::DimensionMismatch { expected: "2D" });
    }
    build_mdp(grid, &MOVES_2D, noise, goal_reward, obstacle_penalty, gamma)
}

/// Builds the 3D model: one state per cell, seven actions.
pub fn build_mdp_3d(
    grid: &GridMap,
    noise: NoiseModel,
    goal_reward: f64,
    obstacle_penalty: f64,
    gamma: f64,
) -> Result<Mdp, GridError> {
    if !grid.is_3d() {
        return Err(GridError::DimensionMismatch { expected: "3D" });
    }
    build_mdp(grid, &MOVES_3D, noise, goal_reward, obstacle_penalty, gamma)
}

/// Samples a trajectory under `policy` from `start` until a goal state or
/// `max_steps` transitions; deterministic for a fixed seed.
pub fn rollout_policy(
    mdp: &Mdp,
    policy: &Policy,
    start: StateId,
    max_steps: usize,
    rng_seed: u64,
) -> Vec<StateId> {
    assert!(start.0 < mdp.num_states(), "start {start} out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut trajectory = vec![start];
    let mut state = start;
    let mut steps = 0;
    while !mdp.is_goal(state) && steps < max_steps {
        let row = mdp.transitions(state, policy.action(state));
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut next = row.last().expect("rows are non-empty").successor;
        for t in row {
            acc += t.probability;
            if u < acc {
                next = t.successor;
                break;
            }
        }
        state = next;
        trajectory.push(state);
        steps += 1;
    }
    trajectory
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{check_absorbing, validate_mdp};
    use crate::solvers::{value_iteration, SolverConfig};

    #[test]
    fn parses_micro_map() {
        let grid = parse_grid("SG").unwrap();
        assert_eq!((grid.width(), grid.height(), grid.layers()), (2, 1, 1));
        assert_eq!(grid.start(), Some(StateId(0)));
        assert_eq!(grid.goals(), vec![StateId(1)]);
        assert!(!grid.is_3d());
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(matches!(
            parse_grid("S.\n.G\n..x"),
            Err(GridError::RaggedGrid { .. }) | Err(GridError::UnknownCell { ch: 'x', .. })
        ));
        assert_eq!(
            parse_grid("S.\n.Gx"),
            Err(GridError::UnknownCell {
                ch: 'x',
                line: 2,
                col: 3
            })
        );
        assert_eq!(parse_grid("S.\n.."), Err(GridError::NoGoal));
        assert_eq!(parse_grid(""), Err(GridError::NoGoal));
        assert_eq!(parse_grid("SG\nS."), Err(GridError::MultipleStarts));
        assert!(matches!(
            parse_grid("SG\n.\n"),
            Err(GridError::RaggedGrid { line: 2 })
        ));
    }

    #[test]
    fn parses_layered_map() {
        let grid = parse_grid("S.\n..\n\n.G\n..\n").unwrap();
        assert_eq!((grid.width(), grid.height(), grid.layers()), (2, 2, 2));
        assert!(grid.is_3d());
        assert_eq!(grid.cell(1, 0, 1), CellKind::Goal);
        let id = grid.state_id(1, 0, 1);
        assert_eq!(grid.coords(id), (1, 0, 1));
    }

    #[test]
    fn micro_map_deterministic_build() {
        let grid = parse_grid("SG").unwrap();
        let mdp = build_mdp_2d(&grid, NoiseModel::none(), 100.0, -1.0, 0.95).unwrap();
        assert!(validate_mdp(&mdp).ok());
        assert!(check_absorbing(&mdp));
        // East from the start lands on the goal with mass 1 and reward 100.
        let east = mdp.transitions(StateId(0), ActionId(2));
        assert_eq!(east.len(), 1);
        assert_eq!(east[0].successor, StateId(1));
        assert_eq!(east[0].probability, 1.0);
        assert_eq!(east[0].reward, 100.0);
    }

    #[test]
    fn open_center_deterministic_moves() {
        let grid = parse_grid("...\n.S.\n..G").unwrap();
        let mdp = build_mdp_2d(&grid, NoiseModel::none(), 100.0, -1.0, 0.95).unwrap();
        let center = grid.state_id(1, 1, 0);
        // All eight compass moves reach their neighbor with mass 1; idle stays.
        let expected = [
            (1, 0),
            (2, 0),
            (2, 1),
            (2, 2),
            (1, 2),
            (0, 2),
            (0, 1),
            (0, 0),
            (1, 1),
        ];
        for (a, (x, y)) in expected.iter().enumerate() {
            let row = mdp.transitions(center, ActionId(a));
            assert_eq!(row.len(), 1, "action {a}");
            assert_eq!(row[0].successor, grid.state_id(*x, *y, 0));
            assert_eq!(row[0].probability, 1.0);
        }
    }

    #[test]
    fn noise_splits_uniformly_over_other_moves() {
        let grid = parse_grid("...\n.S.\n..G").unwrap();
        let noise = NoiseModel::new(0.2).unwrap();
        let mdp = build_mdp_2d(&grid, noise, 100.0, -1.0, 0.95).unwrap();
        let center = grid.state_id(1, 1, 0);
        let row = mdp.transitions(center, ActionId(0)); // N
        let north = grid.state_id(1, 0, 0);
        let sum: f64 = row.iter().map(|t| t.probability).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(row.len(), 9);
        for t in row {
            if t.successor == north {
                assert!((t.probability - 0.8).abs() < 1e-12);
            } else {
                assert!((t.probability - 0.2 / 8.0).abs() < 1e-12);
            }
        }
        assert!(validate_mdp(&mdp).ok());
    }

    #[test]
    fn obstacles_entered_by_noise_only() {
        let grid = parse_grid("...\n.#.\nS.G").unwrap();
        let obstacle = grid.state_id(1, 1, 0);

        let deterministic = build_mdp_2d(&grid, NoiseModel::none(), 100.0, -1.0, 0.95).unwrap();
        for s in deterministic.states() {
            if s == obstacle {
                continue; // the obstacle's own stay-in-place resolution
            }
            for a in deterministic.actions() {
                for t in deterministic.transitions(s, a) {
                    assert_ne!(t.successor, obstacle, "intended move entered an obstacle");
                }
            }
        }

        let noise = NoiseModel::new(0.2).unwrap();
        let noisy = build_mdp_2d(&grid, noise, 100.0, -1.0, 0.95).unwrap();
        assert!(validate_mdp(&noisy).ok());
        let west = grid.state_id(0, 1, 0);
        let mut obstacle_mass = 0.0;
        for t in noisy.transitions(west, ActionId(0)) {
            if t.successor == obstacle {
                obstacle_mass += t.probability;
                assert_eq!(t.reward, -1.0);
            }
        }
        // Only the noise share of the east move reaches the obstacle.
        assert!(obstacle_mass > 0.0 && obstacle_mass <= 0.2);
    }

    #[test]
    fn column_map_top_action() {
        let grid = parse_grid("S\n\nG").unwrap();
        assert!(grid.is_3d());
        let mdp = build_mdp_3d(&grid, NoiseModel::none(), 100.0, -1.0, 0.95).unwrap();
        let top = ActionId(4);
        let row = mdp.transitions(StateId(0), top);
        assert_eq!(row.len(), 1);
        assert_eq!(row[0].successor, StateId(1));
        assert_eq!(row[0].probability, 1.0);
        assert_eq!(row[0].reward, 100.0);
    }

    #[test]
    fn interior_3d_state_noise_split() {
        let layer = "...\n...\n...";
        let mut text = String::new();
        for z in 0..3 {
            if z > 0 {
                text.push('\n');
            }
            if z == 2 {
                text.push_str("..G\n...\n...");
            } else {
                text.push_str(layer);
            }
            text.push('\n');
        }
        let grid = parse_grid(&text).unwrap();
        let noise = NoiseModel::new(0.3).unwrap();
        let mdp = build_mdp_3d(&grid, noise, 100.0, -1.0, 0.95).unwrap();
        assert!(validate_mdp(&mdp).ok());
        let center = grid.state_id(1, 1, 1);
        assert_eq!(mdp.num_actions(), 7);
        let row = mdp.transitions(center, ActionId(0)); // N
        let north = grid.state_id(1, 0, 1);
        for t in row {
            if t.successor == north {
                assert!((t.probability - 0.7).abs() < 1e-12);
            } else {
                assert!((t.probability - 0.3 / 6.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_checks() {
        let grid2d = parse_grid("SG").unwrap();
        assert!(matches!(
            build_mdp_3d(&grid2d, NoiseModel::none(), 100.0, -1.0, 0.95),
            Err(GridError::DimensionMismatch { expected: "3D" })
        ));
        let grid3d = parse_grid("S\n\nG").unwrap();
        assert!(matches!(
            build_mdp_2d(&grid3d, NoiseModel::none(), 100.0, -1.0, 0.95),
            Err(GridError::DimensionMismatch { expected: "2D" })
        ));
    }

    #[test]
    fn rollout_trivial_cases() {
        let grid = parse_grid("SG").unwrap();
        let mdp = build_mdp_2d(&grid, NoiseModel::none(), 100.0, -1.0, 0.95).unwrap();
        let cfg = SolverConfig::default();
        let result = value_iteration(&mdp, &cfg).unwrap();
        let traj = rollout_policy(&mdp, &result.policy, StateId(0), 100, 7);
        assert_eq!(traj, vec![StateId(0), StateId(1)]);
        let at_goal = rollout_policy(&mdp, &result.policy, StateId(1), 100, 7);
        assert_eq!(at_goal, vec![StateId(1)]);
    }

    #[test]
    fn rollout_follows_chebyshev_shortest_path() {
        // 10x10 open grid: optimal rollouts take one move per Chebyshev step.
        let mut text = String::new();
        for y in 0..10 {
            for x in 0..10 {
                text.push(if (x, y) == (7, 2) { 'G' } else { '.' });
            }
            text.push('\n');
        }
        let grid = parse_grid(&text).unwrap();
        let mdp = build_mdp_2d(&grid, NoiseModel::none(), 100.0, -1.0, 0.95).unwrap();
        let result = value_iteration(&mdp, &SolverConfig::default()).unwrap();
        for (sx, sy) in [(0usize, 0usize), (9, 9), (7, 2), (0, 9), (3, 4)] {
            let start = grid.state_id(sx, sy, 0);
            let traj = rollout_policy(&mdp, &result.policy, start, 200, 11);
            let chebyshev = (sx as i64 - 7).abs().max((sy as i64 - 2).abs()) as usize;
            assert_eq!(traj.len(), chebyshev + 1, "start ({sx}, {sy})");
            assert_eq!(*traj.last().unwrap(), grid.state_id(7, 2, 0));
        }
    }
}
