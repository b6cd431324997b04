//! Eigenvalue trajectories `μ_j(k)` over a frequency grid and box counting.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// One sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub k: f64,
    pub mu: C64,
    pub residual: f64,
    /// `1 − d₁/d₂` for the winning distance `d₁` against the runner-up `d₂`
    /// (1 for unambiguous matches and track starts).
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: usize,
    pub points: Vec<TrackPoint>,
    /// The track continued across a grid point whose solve failed.
    pub bridged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    pub k_grid: Vec<f64>,
    pub step: f64,
    pub tracks: Vec<Track>,
    /// Grid frequencies whose solve failed.
    pub missing: Vec<f64>,
}

/// `k_min + i·step` for `i = 0..n`, `n = round((k_max − k_min)/step)`; a
/// single point when the range is empty.
pub fn k_grid(k_min: f64, k_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::NonPositiveArgument { x: step });
    }
    if !(k_min > 0.0) {
        return Err(Error::NonPositiveArgument { x: k_min });
    }
    if !(k_max >= k_min) {
        return Err(Error::InvalidArgument(alloc::format!("k range [{k_min}, {k_max}] is reversed")));
    }
    let n = ((k_max - k_min) / step).round() as usize;
    Ok((0..n.max(1)).map(|i| k_min + i as f64 * step).collect())
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Builds trajectories from per-frequency spectra by greedy nearest-neighbour
/// matching. `spectra[i]` holds `(μ, residual)` at `k_grid[i]`, or `None` when
/// that solve failed.
///
/// The gate is `10 · Δk · median|dμ/dk|`, with the median taken over all
/// accepted matches so far (or over the current candidate pairs while fewer
/// than three exist).
pub fn track_spectra(k_grid: &[f64], step: f64, spectra: &[Option<Vec<(C64, f64)>>]) -> Result<TrajectorySet> {
    if k_grid.len() != spectra.len() {
        return Err(Error::Dimension("one spectrum per grid frequency expected".into()));
    }
    let mut tracks: Vec<Track> = Vec::new();
    let mut missing = Vec::new();
    // tracks alive at the most recent solved frequency
    let mut heads: Vec<usize> = Vec::new();
    let mut last_k: Option<f64> = None;
    let mut gap = false;
    let mut rates: Vec<f64> = Vec::new();

    for (gi, spec) in spectra.iter().enumerate() {
        let k = k_grid[gi];
        let Some(spec) = spec else {
            missing.push(k);
            gap = true;
            continue;
        };
        let mut taken = alloc::vec![false; spec.len()];
        let mut next_heads = Vec::new();
        if let Some(k0) = last_k {
            let dk = (k - k0).abs().max(f64::MIN_POSITIVE);
            let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(heads.len() * spec.len());
            for (hi, &t) in heads.iter().enumerate() {
                let mu0 = tracks[t].points.last().map(|p| p.mu).unwrap_or_default();
                for (j, &(mu, _)) in spec.iter().enumerate() {
                    cand.push(((mu - mu0).norm(), hi, j));
                }
            }
            cand.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2))));
            let mut head_used = alloc::vec![false; heads.len()];
            let mut greedy = Vec::new();
            for &(d, hi, j) in &cand {
                if !head_used[hi] && !taken[j] {
                    head_used[hi] = true;
                    taken[j] = true;
                    greedy.push((d, hi, j));
                }
            }
            taken.iter_mut().for_each(|t| *t = false);
            let rate = if rates.len() >= 3 {
                median(&mut rates.clone())
            } else {
                median(&mut greedy.iter().map(|g| g.0 / dk).collect::<Vec<_>>())
            }
            .unwrap_or(0.0);
            let scale = spec.iter().map(|s| s.0.norm()).fold(0.0, f64::max);
            let gate = (10.0 * dk * rate).max(1e-12 * scale);
            for &(d, hi, j) in &greedy {
                if d > gate {
                    continue;
                }
                // runner-up distance from this head to any other eigenvalue
                let mu0 = tracks[heads[hi]].points.last().map(|p| p.mu).unwrap_or_default();
                let d2 = spec
                    .iter()
                    .enumerate()
                    .filter(|&(jj, _)| jj != j)
                    .map(|(_, s)| (s.0 - mu0).norm())
                    .fold(f64::INFINITY, f64::min);
                let confidence = if d2.is_finite() && d2 > 0.0 { (1.0 - d / d2).max(0.0) } else { 1.0 };
                taken[j] = true;
                rates.push(d / dk);
                let t = heads[hi];
                tracks[t].points.push(TrackPoint { k, mu: spec[j].0, residual: spec[j].1, confidence });
                if gap {
                    tracks[t].bridged = true;
                }
                next_heads.push((j, t));
            }
        }
        for (j, &(mu, residual)) in spec.iter().enumerate() {
            if !taken[j] {
                let id = tracks.len();
                tracks.push(Track { id, points: alloc::vec![TrackPoint { k, mu, residual, confidence: 1.0 }], bridged: false });
                next_heads.push((j, id));
            }
        }
        // keep heads in spectrum order so later tie-breaks are reproducible
        next_heads.sort();
        heads = next_heads.into_iter().map(|(_, t)| t).collect();
        last_k = Some(k);
        gap = false;
    }
    Ok(TrajectorySet { k_grid: k_grid.to_vec(), step, tracks, missing })
}

/// Solves on every grid frequency with `solve` (failures are recorded as
/// missing points) and tracks the results.
pub fn sweep<S>(k_min: f64, k_max: f64, step: f64, mut solve: S) -> Result<TrajectorySet>
where
    S: FnMut(f64) -> Result<Vec<(C64, f64)>>,
{
    let grid = k_grid(k_min, k_max, step)?;
    let spectra: Vec<_> = grid.iter().map(|&k| solve(k).ok()).collect();
    track_spectra(&grid, step, &spectra)
}

/// The counting box `(−2ε₁, 2ε₁) − i(0, 2ε₀)` over the window `[k₋, k₊]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    pub eps1: f64,
    pub eps0: f64,
    pub k_minus: f64,
    pub k_plus: f64,
}

impl BoxSpec {
    pub fn new(eps1: f64, eps0: f64, k_minus: f64, k_plus: f64) -> Result<Self> {
        if !(eps1 > 0.0 && eps0 > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("box scales must be positive, got ({eps1}, {eps0})")));
        }
        if !(k_minus <= k_plus) {
            return Err(Error::InvalidArgument(alloc::format!("window [{k_minus}, {k_plus}] is reversed")));
        }
        Ok(BoxSpec { eps1, eps0, k_minus, k_plus })
    }

    /// Open rectangle membership; the real axis is excluded.
    pub fn contains(&self, mu: C64) -> bool {
        mu.re > -2.0 * self.eps1 && mu.re < 2.0 * self.eps1 && mu.im > -2.0 * self.eps0 && mu.im < 0.0
    }

    pub fn in_window(&self, k: f64) -> bool {
        k >= self.k_minus && k <= self.k_plus
    }
}

/// Ids of the tracks that visit the box at some grid frequency in the window.
pub fn box_members(traj: &TrajectorySet, b: &BoxSpec) -> Vec<usize> {
    traj.tracks
        .iter()
        .filter(|t| t.points.iter().any(|p| b.in_window(p.k) && b.contains(p.mu)))
        .map(|t| t.id)
        .collect()
}

/// Number of distinct tracks entering the box.
pub fn box_count(traj: &TrajectorySet, b: &BoxSpec) -> usize {
    box_members(traj, b).len()
}
