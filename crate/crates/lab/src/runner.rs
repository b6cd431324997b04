//! Parallel frequency sweeps and eigenfunction sampling.

use rayon::prelude::*;
use trapmode_core::lab::{k_grid, solve_near_zero, track_spectra, Discretization, EigenRecord, SpectrumOptions, TrajectorySet, Truncation};
use trapmode_core::mesh::PointLocator;
use trapmode_core::{Error, Result, C64};

use crate::formats::FieldGrid;
use crate::solver::SparseLuFactorizer;

/// Near-origin spectrum at `k` with the sparse LU backend.
pub fn spectrum(disc: &Discretization, k: f64, truncation: Truncation, opts: &SpectrumOptions) -> Result<Vec<EigenRecord>> {
    let system = disc.coupled(k, truncation)?;
    solve_near_zero(disc, &system, opts, &SparseLuFactorizer)
}

/// Solves every grid frequency on up to `jobs` threads and tracks the
/// results. Aggregation is by grid index, so the output does not depend on
/// `jobs` or scheduling. `progress` is called once per finished solve.
#[allow(clippy::too_many_arguments)]
pub fn sweep_parallel(
    disc: &Discretization,
    k_min: f64,
    k_max: f64,
    step: f64,
    truncation: Truncation,
    opts: &SpectrumOptions,
    jobs: usize,
    progress: &(dyn Fn(f64, &Result<Vec<EigenRecord>>) + Sync),
) -> Result<TrajectorySet> {
    let grid = k_grid(k_min, k_max, step)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let spectra: Vec<Option<Vec<(C64, f64)>>> = pool.install(|| {
        grid.par_iter()
            .map(|&k| {
                let r = spectrum(disc, k, truncation, opts);
                progress(k, &r);
                r.ok().map(|recs| recs.iter().map(|e| (e.mu, e.residual)).collect())
            })
            .collect()
    });
    track_spectra(&grid, step, &spectra)
}

/// `|u|` of a P1 field on an `nx × ny` grid over `[−R, R]²`; NaN outside `Ω_tr`.
pub fn sample_field(disc: &Discretization, u: &[C64], nx: usize, ny: usize) -> Result<FieldGrid> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument("field grid needs at least 2 × 2 samples".into()));
    }
    let nodal = disc.fem.to_nodes(u);
    let r = disc.space.radius;
    let c = disc.space.center;
    let x: Vec<f64> = (0..nx).map(|i| c[0] - r + 2.0 * r * i as f64 / (nx - 1) as f64).collect();
    let y: Vec<f64> = (0..ny).map(|j| c[1] - r + 2.0 * r * j as f64 / (ny - 1) as f64).collect();
    let loc = PointLocator::new(&disc.mesh);
    let values = y
        .iter()
        .flat_map(|&yy| x.iter().map(move |&xx| [xx, yy]))
        .map(|p| loc.interpolate(&nodal, p).map_or(f64::NAN, |v| v.norm()))
        .collect();
    Ok(FieldGrid { x, y, values })
}
