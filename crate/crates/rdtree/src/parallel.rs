//! Threaded sweeps. Rows are computed independently and reassembled in grid
//! order, so the result is identical to [`Evaluator::sweep`].

use std::thread;

use rdtree_core::{Evaluator, LambdaGrid, Result, VoiCurve, VoiRow, WeightingSpec};

pub fn sweep_concurrent(
    eval: &Evaluator<'_>,
    spec: &WeightingSpec,
    grid: &LambdaGrid,
    jobs: usize,
) -> Result<VoiCurve> {
    let points = grid.points();
    let jobs = jobs.clamp(1, points.len().max(1));
    if jobs == 1 {
        return eval.sweep(spec, grid);
    }
    let chunk = points.len().div_ceil(jobs);
    let parts: Vec<Result<Vec<VoiRow>>> = thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|lambdas| s.spawn(move || lambdas.iter().map(|&l| eval.row(spec, l)).collect()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut rows = Vec::with_capacity(points.len());
    for part in parts {
        rows.extend(part?);
    }
    Ok(eval.curve(*spec, *grid, rows))
}
