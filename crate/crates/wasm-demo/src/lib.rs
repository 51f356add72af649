//! Browser bindings for the demo page in `www/`.
//!
//! Points cross the boundary as flat `[x0, y0, x1, y1, …]` arrays.

use hiclust::continuation::{solve as solve_schedule, ModelKind, Schedule, SolveOptions};
use hiclust::init::{random_start, StartSpec};
use hiclust::{CenterMatrix, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use wasm_bindgen::prelude::*;

/// Gaussian blobs with centers spread over `[0, 100]²`.
#[wasm_bindgen]
pub fn generate_clusters(clusters: usize, per_cluster: usize, spread: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spread.max(0.0)).unwrap_or(Normal::new(0.0, 0.0).unwrap());
    let mut out = Vec::with_capacity(2 * clusters * per_cluster);
    for _ in 0..clusters {
        let (cx, cy) = (rng.random_range(10.0..90.0), rng.random_range(10.0..90.0));
        for _ in 0..per_cluster {
            out.push(cx + noise.sample(&mut rng));
            out.push(cy + noise.sample(&mut rng));
        }
    }
    out
}

/// Result of [`solve`]: final centers, per-outer-iteration snapshots and the
/// snapped tree.
#[wasm_bindgen]
pub struct Solution {
    centers: Vec<f64>,
    trajectory: Vec<f64>,
    rows: usize,
    cluster_centers: Vec<u32>,
    total_center: u32,
    assignment: Vec<u32>,
    cost: f64,
    continuous_cost: f64,
}

#[wasm_bindgen]
impl Solution {
    /// Final artificial centers, flat; Model II has the total center last.
    #[wasm_bindgen(getter)]
    pub fn centers(&self) -> Vec<f64> {
        self.centers.clone()
    }

    /// Start and the centers after each outer iteration, concatenated.
    #[wasm_bindgen(getter)]
    pub fn trajectory(&self) -> Vec<f64> {
        self.trajectory.clone()
    }

    /// Center rows per snapshot.
    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[wasm_bindgen(getter)]
    pub fn cluster_centers(&self) -> Vec<u32> {
        self.cluster_centers.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn total_center(&self) -> u32 {
        self.total_center
    }

    /// Index of the hub each node attaches to.
    #[wasm_bindgen(getter)]
    pub fn assignment(&self) -> Vec<u32> {
        self.assignment.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn cost(&self) -> f64 {
        self.cost
    }

    #[wasm_bindgen(getter)]
    pub fn continuous_cost(&self) -> f64 {
        self.continuous_cost
    }
}

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Runs the continuation one outer step at a time to record the path of the
/// centers. `model` is `"I"` or `"II"`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn solve(
    points: &[f64],
    k: usize,
    model: &str,
    seed: u64,
    mu0: f64,
    sigma2: f64,
    n_outer: usize,
    n_inner: usize,
) -> Result<Solution, JsError> {
    if !points.len().is_multiple_of(2) {
        return Err(JsError::new("points must hold x, y pairs"));
    }
    let model: ModelKind = model.parse().map_err(err)?;
    let data = Matrix::from_vec(points.len() / 2, 2, points.to_vec()).map_err(err)?;
    let schedule = Schedule::direct(1e-6, 1.0, mu0, sigma2, n_outer, n_inner).map_err(err)?;
    let rows = model.rows(k);
    let mut x: CenterMatrix = random_start(&data, rows, &StartSpec::with_seed(seed));

    let mut trajectory = x.as_slice().to_vec();
    let mut last = None;
    for (lambda, mu) in schedule.parameters() {
        let step = Schedule::direct(lambda, 1.0, mu, 1.0, 1, n_inner).map_err(err)?;
        let report = solve_schedule(&data, model, k, &step, &x, &SolveOptions::default()).map_err(err)?;
        x = report.final_centers.clone();
        trajectory.extend_from_slice(x.as_slice());
        last = Some(report);
    }
    let report = last.ok_or_else(|| JsError::new("n_outer must be at least 1"))?;
    let snapped = report.snapped;
    Ok(Solution {
        centers: x.into_vec(),
        trajectory,
        rows,
        cluster_centers: snapped.cluster_centers.iter().map(|&c| c as u32).collect(),
        total_center: snapped.total_center as u32,
        assignment: snapped.assignment.iter().map(|&c| c as u32).collect(),
        cost: snapped.cost,
        continuous_cost: report.continuous_cost,
    })
}

/// Samples `(r, ‖r‖, φ_µ(r))` for `r` from `-range` to `range` along one
/// axis, flat.
#[wasm_bindgen]
pub fn smoothing_curve(mu: f64, range: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let param = hiclust::smoothing::SmoothingParam::new(mu).map_err(err)?;
    let samples = samples.max(2);
    let mut out = Vec::with_capacity(3 * samples);
    for i in 0..samples {
        let r = -range + 2.0 * range * i as f64 / (samples - 1) as f64;
        out.push(r);
        out.push(r.abs());
        out.push(hiclust::smoothing::smooth_norm(&[r], &[0.0], param).map_err(err)?);
    }
    Ok(out)
}
