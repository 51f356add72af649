//! The outer loop: grow the penalty, shrink the smoothing, warm-start the DCA.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dca::{dca_run, DcaOptions, DcProgram};
use crate::error::{Error, Result};
use crate::matrix::{CenterMatrix, DataSet};
use crate::model_one::ModelOne;
use crate::model_two::ModelTwo;
use crate::postprocess::SnappedSolution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Total center tied to the centroid of the cluster centers.
    #[serde(rename = "I", alias = "1", alias = "one")]
    One,
    /// Total center as a free variable.
    #[serde(rename = "II", alias = "2", alias = "two")]
    Two,
}

impl ModelKind {
    /// Rows of the variable matrix for `k` cluster centers.
    pub fn rows(self, k: usize) -> usize {
        match self {
            ModelKind::One => k,
            ModelKind::Two => k + 1,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::One => "I",
            ModelKind::Two => "II",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" | "one" => Ok(ModelKind::One),
            "ii" | "2" | "two" => Ok(ModelKind::Two),
            _ => Err(Error::Config(format!("unknown model {s:?}, expected I or II"))),
        }
    }
}

/// `σ₁ = (λ_max/λ₀)^{1/N}` and `σ₂ = (µ_min/µ₀)^{1/N}`.
pub fn derive_sigmas(
    lambda0: f64,
    lambda_max: f64,
    mu0: f64,
    mu_min: f64,
    n_outer: usize,
) -> Result<(f64, f64)> {
    for (name, v) in [("lambda0", lambda0), ("lambda_max", lambda_max), ("mu0", mu0), ("mu_min", mu_min)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::domain(format!("{name} must be positive, got {v}")));
        }
    }
    if n_outer == 0 {
        return Err(Error::domain("n_outer must be at least 1"));
    }
    if lambda_max < lambda0 {
        return Err(Error::domain(format!("lambda_max {lambda_max} is below lambda0 {lambda0}")));
    }
    if mu_min > mu0 {
        return Err(Error::domain(format!("mu_min {mu_min} exceeds mu0 {mu0}")));
    }
    let inv = 1.0 / n_outer as f64;
    Ok(((lambda_max / lambda0).powf(inv), (mu_min / mu0).powf(inv)))
}

/// Penalty and smoothing schedule for the outer loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub lambda0: f64,
    pub lambda_max: f64,
    pub sigma1: f64,
    pub mu0: f64,
    pub mu_min: f64,
    pub sigma2: f64,
    pub n_outer: usize,
    pub n_inner: usize,
}

impl Schedule {
    /// Schedule from the growth and decay factors; the end points follow.
    pub fn direct(
        lambda0: f64,
        sigma1: f64,
        mu0: f64,
        sigma2: f64,
        n_outer: usize,
        n_inner: usize,
    ) -> Result<Self> {
        if !(lambda0.is_finite() && lambda0 > 0.0) {
            return Err(Error::domain(format!("lambda0 must be positive, got {lambda0}")));
        }
        if !(mu0.is_finite() && mu0 > 0.0) {
            return Err(Error::domain(format!("mu0 must be positive, got {mu0}")));
        }
        if !(sigma1.is_finite() && sigma1 >= 1.0) {
            return Err(Error::domain(format!("sigma1 must be at least 1, got {sigma1}")));
        }
        if !(sigma2 > 0.0 && sigma2 <= 1.0) {
            return Err(Error::domain(format!("sigma2 must lie in (0, 1], got {sigma2}")));
        }
        if n_outer == 0 || n_inner == 0 {
            return Err(Error::domain("n_outer and n_inner must be at least 1"));
        }
        let exp = n_outer as i32;
        let lambda_max = lambda0 * sigma1.powi(exp);
        if !lambda_max.is_finite() {
            return Err(Error::domain(format!(
                "lambda0·sigma1^n_outer overflows ({lambda0}·{sigma1}^{n_outer})"
            )));
        }
        Ok(Schedule {
            lambda0,
            lambda_max,
            sigma1,
            mu0,
            mu_min: mu0 * sigma2.powi(exp),
            sigma2,
            n_outer,
            n_inner,
        })
    }

    /// Schedule from the end points, with the factors from [`derive_sigmas`].
    pub fn from_targets(
        lambda0: f64,
        lambda_max: f64,
        mu0: f64,
        mu_min: f64,
        n_outer: usize,
        n_inner: usize,
    ) -> Result<Self> {
        let (sigma1, sigma2) = derive_sigmas(lambda0, lambda_max, mu0, mu_min, n_outer)?;
        if n_inner == 0 {
            return Err(Error::domain("n_inner must be at least 1"));
        }
        Ok(Schedule {
            lambda0,
            lambda_max,
            sigma1,
            mu0,
            mu_min,
            sigma2,
            n_outer,
            n_inner,
        })
    }

    /// `(λᵢ, µᵢ)` for `i = 0..n_outer`, built by repeated multiplication.
    pub fn parameters(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.n_outer);
        let (mut lambda, mut mu) = (self.lambda0, self.mu0);
        for _ in 0..self.n_outer {
            out.push((lambda, mu));
            lambda *= self.sigma1;
            mu *= self.sigma2;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Inner stopping tolerance, see [`DcaOptions::tol`].
    pub tol: f64,
    /// Record elapsed wall time in the report. Off by default so reports
    /// are reproducible byte for byte.
    pub timing: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-6,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub model: ModelKind,
    pub k: usize,
    /// Seed of the starting point, when one was used.
    pub seed: Option<u64>,
    /// Continuous centers after the last outer iteration.
    pub final_centers: CenterMatrix,
    /// `(λᵢ, µᵢ)` used in each outer iteration.
    pub parameter_trace: Vec<(f64, f64)>,
    /// Smoothed penalised objective at the end of each outer iteration.
    pub smoothed_cost_trace: Vec<f64>,
    /// DCA steps taken in each outer iteration.
    pub inner_iterations: Vec<usize>,
    /// Objective values `f(X₀), …, f(X_K)` of each inner run.
    pub inner_objectives: Vec<Vec<f64>>,
    pub total_inner_iterations: usize,
    /// Unsmoothed clustering cost of the continuous centers.
    pub continuous_cost: f64,
    pub snapped: SnappedSolution,
    /// Seconds, only when [`SolveOptions::timing`] is set.
    pub wall_time: Option<f64>,
}

impl SolveReport {
    /// Largest relative increase across all inner traces, measured as
    /// `(f_{j+1} − f_j)/(1 + |f_0|)`.
    pub fn worst_inner_increase(&self) -> f64 {
        self.inner_objectives
            .iter()
            .map(|t| {
                let f0 = t.first().copied().unwrap_or(0.0);
                t.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max) / (1.0 + f0.abs())
            })
            .fold(0.0, f64::max)
    }
}

fn run_outer<P: DcProgram>(program: &P, x: &CenterMatrix, opts: &DcaOptions, outer: usize) -> Result<crate::dca::DcaTrace> {
    dca_run(program, x, opts).map_err(|e| e.at_outer(outer))
}

/// Runs the full continuation from `x0` and snaps the result.
///
/// `x0` has `k` rows for [`ModelKind::One`] and `k + 1` rows for
/// [`ModelKind::Two`].
pub fn solve(
    data: &DataSet,
    model: ModelKind,
    k: usize,
    schedule: &Schedule,
    x0: &CenterMatrix,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let start = opts.timing.then(Instant::now);
    x0.ensure_shape(model.rows(k), data.cols())?;
    let dca_opts = DcaOptions {
        n_inner: schedule.n_inner,
        tol: opts.tol,
        keep_iterates: false,
    };

    let parameter_trace = schedule.parameters();
    let mut x = x0.clone();
    let mut smoothed_cost_trace = Vec::with_capacity(schedule.n_outer);
    let mut inner_iterations = Vec::with_capacity(schedule.n_outer);
    let mut inner_objectives = Vec::with_capacity(schedule.n_outer);

    for (i, &(lambda, mu)) in parameter_trace.iter().enumerate() {
        let trace = match model {
            ModelKind::One => run_outer(&ModelOne::new(data, k, lambda, mu)?, &x, &dca_opts, i)?,
            ModelKind::Two => run_outer(&ModelTwo::new(data, k, lambda, mu)?, &x, &dca_opts, i)?,
        };
        smoothed_cost_trace.push(*trace.objective_values.last().expect("trace holds f(X0)"));
        inner_iterations.push(trace.iterations_run);
        inner_objectives.push(trace.objective_values);
        x = trace.last;
    }

    let (last_lambda, last_mu) = *parameter_trace.last().expect("n_outer >= 1");
    let continuous_cost = match model {
        ModelKind::One => ModelOne::new(data, k, last_lambda, last_mu)?.true_objective(&x)?.varphi,
        ModelKind::Two => ModelTwo::new(data, k, last_lambda, last_mu)?.true_objective(&x)?.varphi,
    };
    let snapped = SnappedSolution::from_centers(&x, k, data)?;

    Ok(SolveReport {
        model,
        k,
        seed: None,
        final_centers: x,
        parameter_trace,
        smoothed_cost_trace,
        total_inner_iterations: inner_iterations.iter().sum(),
        inner_iterations,
        inner_objectives,
        continuous_cost,
        snapped,
        wall_time: start.map(|s| s.elapsed().as_secs_f64()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn two_clusters() -> DataSet {
        Matrix::from_rows(&[
            [0.0, 0.0],
            [1.0, 0.0],
            [0.0, 1.0],
            [1.0, 1.0],
            [0.5, 0.5],
            [50.0, 50.0],
            [51.0, 50.0],
            [50.0, 51.0],
            [51.0, 51.0],
            [50.5, 50.5],
        ])
        .unwrap()
    }

    #[test]
    fn sigmas_round_trip() {
        let (s1, s2) = derive_sigmas(1e-6, 1e-6, 100.0, 100.0 * 0.5f64.powi(10), 10).unwrap();
        assert_eq!(s1, 1.0);
        assert!((s2 - 0.5).abs() < 1e-15);
        let s = Schedule::from_targets(1e-6, 7.5e3, 100.0, 1e-3, 27, 20).unwrap();
        let mut lambda = s.lambda0;
        let mut mu = s.mu0;
        for _ in 0..s.n_outer {
            lambda *= s.sigma1;
            mu *= s.sigma2;
        }
        assert!((lambda / s.lambda_max - 1.0).abs() < 1e-9);
        assert!((mu / s.mu_min - 1.0).abs() < 1e-9);
        assert!(derive_sigmas(0.0, 1.0, 1.0, 1.0, 3).is_err());
        assert!(derive_sigmas(2.0, 1.0, 1.0, 1.0, 3).is_err());
        assert!(derive_sigmas(1.0, 1.0, 1.0, 2.0, 3).is_err());
    }

    #[test]
    fn direct_and_target_schedules_agree() {
        let d = Schedule::direct(1e-3, 4.0, 8.0, 0.5, 5, 10).unwrap();
        let t = Schedule::from_targets(1e-3, d.lambda_max, 8.0, d.mu_min, 5, 10).unwrap();
        for (a, b) in d.parameters().iter().zip(t.parameters()) {
            assert!((a.0 / b.0 - 1.0).abs() < 1e-12);
            assert!((a.1 / b.1 - 1.0).abs() < 1e-12);
        }
        assert!(Schedule::direct(1.0, 0.5, 1.0, 0.5, 3, 3).is_err());
        assert!(Schedule::direct(1.0, 2.0, 1.0, 1.5, 3, 3).is_err());
        assert!(Schedule::direct(1.0, 1e300, 1.0, 0.5, 3, 3).is_err());
    }

    #[test]
    fn parameter_trace_is_monotone() {
        let s = Schedule::direct(1e-6, 7500.0, 100.0, 0.5, 6, 5).unwrap();
        let p = s.parameters();
        assert_eq!(p.len(), 6);
        for w in p.windows(2) {
            assert!(w[1].0 >= w[0].0 && w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn model_names() {
        assert_eq!("II".parse::<ModelKind>().unwrap(), ModelKind::Two);
        assert_eq!("one".parse::<ModelKind>().unwrap(), ModelKind::One);
        assert!("III".parse::<ModelKind>().is_err());
        assert_eq!(ModelKind::Two.to_string(), "II");
    }

    #[test]
    fn single_outer_is_one_dca_run() {
        let a = two_clusters();
        let s = Schedule::direct(1e-2, 1.0, 1.0, 1.0, 1, 7).unwrap();
        let x0 = Matrix::from_rows(&[[10.0, 10.0], [30.0, 20.0]]).unwrap();
        let opts = SolveOptions { tol: 0.0, timing: false };
        let r = solve(&a, ModelKind::One, 2, &s, &x0, &opts).unwrap();
        let direct = dca_run(
            &ModelOne::new(&a, 2, 1e-2, 1.0).unwrap(),
            &x0,
            &DcaOptions { n_inner: 7, tol: 0.0, keep_iterates: false },
        )
        .unwrap();
        assert_eq!(r.final_centers, direct.last);
        assert_eq!(r.inner_objectives, vec![direct.objective_values]);
        assert_eq!(r.total_inner_iterations, 7);
    }

    #[test]
    fn constant_schedule_matches_long_run() {
        let a = two_clusters();
        let s = Schedule::direct(0.1, 1.0, 2.0, 1.0, 4, 5).unwrap();
        let x0 = Matrix::from_rows(&[[10.0, 10.0], [30.0, 20.0], [20.0, 30.0]]).unwrap();
        let opts = SolveOptions { tol: 0.0, timing: false };
        let r = solve(&a, ModelKind::Two, 2, &s, &x0, &opts).unwrap();
        let direct = dca_run(
            &ModelTwo::new(&a, 2, 0.1, 2.0).unwrap(),
            &x0,
            &DcaOptions { n_inner: 20, tol: 0.0, keep_iterates: false },
        )
        .unwrap();
        assert_eq!(r.final_centers, direct.last);
        // each outer run starts where the previous one ended
        for w in r.inner_objectives.windows(2) {
            assert_eq!(w[0].last(), w[1].first());
        }
    }

    #[test]
    fn separated_clusters_snap_to_cluster_medians() {
        let a = two_clusters();
        let s = Schedule::direct(1e-3, 10.0, 5.0, 0.5, 8, 30).unwrap();
        let x0 = Matrix::from_rows(&[[20.0, 20.0], [30.0, 30.0]]).unwrap();
        let r = solve(&a, ModelKind::One, 2, &s, &x0, &SolveOptions::default()).unwrap();
        let mut centers = r.snapped.cluster_centers.clone();
        centers.sort();
        assert_eq!(centers, vec![4, 9]);
        assert!(r.wall_time.is_none());
        assert!(r.worst_inner_increase() <= 1e-9);
        let best = crate::postprocess::discrete_optimum(&a, 2).unwrap();
        assert!(r.snapped.cost >= best.cost - 1e-9);
    }

    #[test]
    fn wrong_start_shape_is_rejected() {
        let a = two_clusters();
        let s = Schedule::direct(1e-3, 1.0, 1.0, 0.5, 2, 2).unwrap();
        let x0 = Matrix::zeros(2, 2);
        assert!(matches!(
            solve(&a, ModelKind::Two, 2, &s, &x0, &SolveOptions::default()),
            Err(Error::Dimension { .. })
        ));
    }
}
