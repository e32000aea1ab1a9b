//! File formats emitted by the CLI: trace CSV, policy CSV, plain-text PGM
//! heatmaps, and the FNV-1a policy hash used for cheap cross-run equality.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use mdp_reach::gridworld::GridMap;
use mdp_reach::{clip_landscape, ConvergenceTrace, Policy, ReachabilityLandscape};

pub fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn create_with_parents(path: &Path) -> Result<fs::File> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating directory {}", parent.display()))?;
        }
    }
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// Column header of the per-iteration trace CSV.
pub const TRACE_HEADER: &str =
    "iteration,delta,cumulative_ms,bellman_ms,pe_ms,pi_ms,mfpt_ms,sort_ms";

pub fn write_trace_csv(path: &Path, trace: &ConvergenceTrace) -> Result<()> {
    let mut out = create_with_parents(path)?;
    writeln!(out, "{TRACE_HEADER}")?;
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
            r.iteration,
            r.delta,
            ms(r.cumulative),
            ms(r.components.bellman),
            ms(r.components.policy_evaluation),
            ms(r.components.policy_improvement),
            ms(r.components.mfpt),
            ms(r.components.sort),
        )?;
    }
    Ok(())
}

pub fn write_policy_csv(path: &Path, policy: &Policy) -> Result<()> {
    let mut out = create_with_parents(path)?;
    writeln!(out, "state,action")?;
    for (s, a) in policy.actions().iter().enumerate() {
        writeln!(out, "{},{}", s, a.index())?;
    }
    Ok(())
}

pub fn write_trajectory_csv(path: &Path, grid: &GridMap, trajectory: &[mdp_reach::StateId]) -> Result<()> {
    let mut out = create_with_parents(path)?;
    writeln!(out, "step,state,x,y,z")?;
    for (i, s) in trajectory.iter().enumerate() {
        let (x, y, z) = grid.coords(*s);
        writeln!(out, "{},{},{},{},{}", i, s.index(), x, y, z)?;
    }
    Ok(())
}

/// Plain-text PGM (P2, maxval 255), one row of pixels per line.
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    assert_eq!(pixels.len(), width * height);
    let mut out = create_with_parents(path)?;
    writeln!(out, "P2")?;
    writeln!(out, "{width} {height}")?;
    writeln!(out, "255")?;
    for row in pixels.chunks(width) {
        let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// One PGM file per grid layer: `{prefix}_{seq:03}.pgm` for 2D maps,
/// `{prefix}_{seq:03}_z{z}.pgm` per layer for 3D maps. Pixel value is
/// `round(255 * clipped / clip)`, so goals render as 0 and anything at or
/// beyond the clip as 255.
pub fn write_landscape_pgms(
    prefix: &str,
    seq: usize,
    grid: &GridMap,
    landscape: &ReachabilityLandscape,
    clip: f64,
) -> Result<Vec<std::path::PathBuf>> {
    let clipped = clip_landscape(landscape, clip);
    let (w, h) = (grid.width(), grid.height());
    let mut written = Vec::new();
    for z in 0..grid.layers() {
        let mut pixels = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let v = clipped[grid.state_id(x, y, z).index()];
                pixels.push((255.0 * v / clip).round() as u8);
            }
        }
        let path = if grid.is_3d() {
            format!("{prefix}_{seq:03}_z{z}.pgm")
        } else {
            format!("{prefix}_{seq:03}.pgm")
        };
        let path = std::path::PathBuf::from(path);
        write_pgm(&path, w, h, &pixels)?;
        written.push(path);
    }
    Ok(written)
}

/// Order-sensitive 64-bit FNV-1a over the policy's action indices.
pub fn policy_hash(policy: &Policy) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for action in policy.actions() {
        for byte in (action.index() as u64).to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(PRIME);
        }
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use mdp_reach::{ActionId, Policy};

    #[test]
    fn fnv_hash_is_order_sensitive() {
        let a = Policy::from_actions(vec![ActionId(0), ActionId(1)]);
        let b = Policy::from_actions(vec![ActionId(1), ActionId(0)]);
        assert_ne!(policy_hash(&a), policy_hash(&b));
        assert_eq!(policy_hash(&a), policy_hash(&a.clone()));
    }

    #[test]
    fn fnv_matches_reference_vector() {
        // FNV-1a of eight zero bytes, then of 0x01 followed by seven zero
        // bytes, computed with the standard offset basis and prime.
        let zero = Policy::from_actions(vec![ActionId(0)]);
        let mut expected: u64 = 0xcbf2_9ce4_8422_2325;
        for _ in 0..8 {
            expected ^= 0;
            expected = expected.wrapping_mul(0x0000_0100_0000_01b3);
        }
        assert_eq!(policy_hash(&zero), expected);
    }
}
