//! Starting points: centers placed on a sphere around the data median.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::continuation::{solve, ModelKind, Schedule, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::matrix::{dist, norm, CenterMatrix, DataSet, Matrix};

#[derive(Clone, Debug, PartialEq)]
pub struct StartSpec {
    /// Radius multiplier. `None` draws it uniformly from (0, 1).
    pub gamma: Option<f64>,
    /// Radial-search step.
    pub r0: f64,
    /// Number of radial-search probes.
    pub n_probes: usize,
    pub seed: u64,
}

impl StartSpec {
    pub fn with_seed(seed: u64) -> Self {
        StartSpec {
            gamma: None,
            r0: 0.1,
            n_probes: 10,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_probes == 0 {
            return Err(Error::domain("n_probes must be at least 1"));
        }
        if !(self.r0.is_finite() && self.r0 > 0.0) {
            return Err(Error::domain(format!("r0 must be positive, got {}", self.r0)));
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::domain(format!("gamma must be non-negative, got {g}")));
            }
        }
        Ok(())
    }
}

/// Coordinatewise median of the rows (mean of the two middle values for an
/// even count).
pub fn median_point(a: &DataSet) -> Vec<f64> {
    let m = a.rows();
    (0..a.cols())
        .map(|j| {
            let mut col: Vec<f64> = a.iter_rows().map(|r| r[j]).collect();
            col.sort_by(f64::total_cmp);
            if m % 2 == 1 {
                col[m / 2]
            } else {
                0.5 * (col[m / 2 - 1] + col[m / 2])
            }
        })
        .collect()
}

/// Largest distance from a node to [`median_point`].
pub fn rad(a: &DataSet) -> f64 {
    let med = median_point(a);
    a.iter_rows().map(|r| dist(r, &med)).fold(0.0, f64::max)
}

/// `k_rows` random unit vectors in `ℝⁿ` (normalised Gaussian samples).
pub fn unit_directions(k_rows: usize, n: usize, rng: &mut impl Rng) -> Matrix {
    let mut u = Matrix::zeros(k_rows, n);
    for l in 0..k_rows {
        loop {
            let row = u.row_mut(l);
            for v in row.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let len = norm(row);
            if len > 1e-12 {
                row.iter_mut().for_each(|v| *v /= len);
                break;
            }
        }
    }
    u
}

/// `median(A) + radius·U`, the direction matrix added row by row.
pub fn place_on_sphere(center: &[f64], radius: f64, directions: &Matrix) -> CenterMatrix {
    let mut x = Matrix::repeat_row(center, directions.rows());
    x.axpy(radius, directions);
    x
}

/// Random start `median(A) + γ·rad(A)·U`, deterministic in `spec.seed`.
pub fn random_start(a: &DataSet, k_rows: usize, spec: &StartSpec) -> CenterMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let gamma = spec.gamma.unwrap_or_else(|| loop {
        let g: f64 = rng.random();
        if g > 0.0 {
            break g;
        }
    });
    let u = unit_directions(k_rows, a.cols(), &mut rng);
    place_on_sphere(&median_point(a), gamma * rad(a), &u)
}

/// Starting points `median(A) + i·r0·rad(A)·U` for `i = 1..=n_probes`, all
/// sharing one direction matrix. Returns `(i·r0, X₀(i))` pairs.
pub fn radial_starts(a: &DataSet, k_rows: usize, spec: &StartSpec) -> Result<Vec<(f64, CenterMatrix)>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u = unit_directions(k_rows, a.cols(), &mut rng);
    let med = median_point(a);
    let r = rad(a);
    Ok((1..=spec.n_probes)
        .map(|i| {
            let mult = i as f64 * spec.r0;
            (mult, place_on_sphere(&med, mult * r, &u))
        })
        .collect())
}

#[cfg(feature = "parallel")]
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Index of the cheapest successful report, first one on ties.
pub fn best_index<'r>(reports: impl IntoIterator<Item = Option<&'r SolveReport>>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in reports.into_iter().enumerate() {
        if let Some(r) = r {
            if best.is_none_or(|(_, c)| r.snapped.cost < c) {
                best = Some((i, r.snapped.cost));
            }
        }
    }
    best.map(|(i, _)| i)
}

/// Independent solves from [`random_start`] with the given seeds.
///
/// Runs in parallel when the `parallel` feature is on; the output order
/// always follows `seeds`.
pub fn multistart(
    data: &DataSet,
    model: ModelKind,
    k: usize,
    schedule: &Schedule,
    seeds: &[u64],
    gamma: Option<f64>,
    opts: &SolveOptions,
) -> Vec<Result<SolveReport>> {
    par_map(seeds, |&seed| {
        let spec = StartSpec {
            gamma,
            ..StartSpec::with_seed(seed)
        };
        let x0 = random_start(data, model.rows(k), &spec);
        solve(data, model, k, schedule, &x0, opts).map(|mut r| {
            r.seed = Some(seed);
            r
        })
    })
}

pub struct Probe {
    /// `i·r0`, the radius in units of `rad(A)`.
    pub multiplier: f64,
    pub outcome: Result<SolveReport>,
}

pub struct RadialSearch {
    pub probes: Vec<Probe>,
    /// Position of the cheapest successful probe.
    pub best: Option<usize>,
}

impl RadialSearch {
    pub fn best_report(&self) -> Option<&SolveReport> {
        self.best.and_then(|i| self.probes[i].outcome.as_ref().ok())
    }

    /// `(multiplier, snapped cost)` per probe, `None` for failed probes.
    pub fn profile(&self) -> Vec<(f64, Option<f64>)> {
        self.probes
            .iter()
            .map(|p| (p.multiplier, p.outcome.as_ref().ok().map(|r| r.snapped.cost)))
            .collect()
    }
}

/// Solves from every start of [`radial_starts`]. A failing probe is kept in
/// the result and does not stop the others.
pub fn radial_search(
    data: &DataSet,
    model: ModelKind,
    k: usize,
    schedule: &Schedule,
    spec: &StartSpec,
    opts: &SolveOptions,
) -> Result<RadialSearch> {
    let starts = radial_starts(data, model.rows(k), spec)?;
    let probes = par_map(&starts, |(multiplier, x0)| Probe {
        multiplier: *multiplier,
        outcome: solve(data, model, k, schedule, x0, opts).map(|mut r| {
            r.seed = Some(spec.seed);
            r
        }),
    });
    let best = best_index(probes.iter().map(|p| p.outcome.as_ref().ok()));
    Ok(RadialSearch { probes, best })
}
