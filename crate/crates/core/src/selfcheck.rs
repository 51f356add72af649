//! Randomised property suites for the model oracles.
//!
//! Each suite draws its own instances from a seeded generator and reports the
//! number of cases, the failures and the worst observed error against a fixed
//! tolerance. [`Fault`] deliberately corrupts one oracle so that a caller can
//! confirm the suites actually detect mistakes.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::continuation::{solve, ModelKind, Schedule, SolveOptions};
use crate::dataio::emit_report;
use crate::dca::{dca_run, DcaOptions};
use crate::init::{random_start, StartSpec};
use crate::matrix::{dist, frobenius_inner, DataSet, Matrix};
use crate::model_one::ModelOne;
use crate::model_two::ModelTwo;
use crate::smoothing::{smooth_norm, SmoothingParam};

/// A deliberate bug for mutation testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Scales every analytic gradient by `1 + 1e-3`.
    Gradient,
    /// Perturbs the conjugate gradient output.
    Conjugate,
    /// Negates the concave-part subgradients.
    Subgradient,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub seed: u64,
    /// Random cases per suite and component.
    pub samples: usize,
    pub fault: Option<Fault>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            seed: 0,
            samples: 100,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Worst error in the suite's own measure.
    pub worst: f64,
    pub tolerance: f64,
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        SuiteReport {
            name,
            cases: 0,
            failures: 0,
            worst: 0.0,
            tolerance,
            first_failure: None,
        }
    }

    fn record(&mut self, err: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if err.is_nan() || err > self.worst {
            self.worst = err;
        }
        if err.is_nan() || err > self.tolerance {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<12} {} {}/{} cases, worst {:.3e} (tol {:.0e})",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases - self.failures,
            self.cases,
            self.worst,
            self.tolerance
        )?;
        if let Some(msg) = &self.first_failure {
            write!(f, "; first failure: {msg}")?;
        }
        Ok(())
    }
}

/// A random instance with parameters in `λ ∈ [1e−6, 10]`, `µ ∈ [0.01, 100]`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub data: DataSet,
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, half_width: f64) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.random_range(-half_width..half_width))
        .collect();
    Matrix::from_vec(rows, cols, data).expect("non-empty and finite")
}

pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let m = rng.random_range(5..30);
    let n = rng.random_range(1..4);
    let k = rng.random_range(2..6.min(m - 1));
    Instance {
        data: random_matrix(rng, m, n, 10.0),
        k,
        lambda: log_uniform(rng, 1e-6, 10.0),
        mu: log_uniform(rng, 0.01, 100.0),
    }
}

type ValueFn<'a> = Box<dyn Fn(&Matrix) -> f64 + 'a>;
type GradFn<'a> = Box<dyn Fn(&Matrix) -> Matrix + 'a>;

/// Value and gradient of each differentiable component, by name.
fn smooth_components<'a>(model: ModelKind, inst: &'a Instance) -> Vec<(&'static str, ValueFn<'a>, GradFn<'a>)> {
    let (k, l, u, a) = (inst.k, inst.lambda, inst.mu, &inst.data);
    match model {
        ModelKind::One => {
            let p = move || ModelOne::new(a, k, l, u).expect("valid instance");
            vec![
                ("I.g1", Box::new(move |x: &Matrix| p().parts(x).unwrap().g1) as ValueFn, Box::new(move |x: &Matrix| p().grad_g1(x).unwrap()) as GradFn),
                ("I.g2", Box::new(move |x: &Matrix| p().parts(x).unwrap().g2), Box::new(move |x: &Matrix| p().grad_g2(x).unwrap())),
                ("I.g", Box::new(move |x: &Matrix| p().parts(x).unwrap().g()), Box::new(move |x: &Matrix| p().grad_g(x).unwrap())),
                ("I.h1", Box::new(move |x: &Matrix| p().parts(x).unwrap().h1), Box::new(move |x: &Matrix| p().grad_h1(x).unwrap())),
                ("I.h2", Box::new(move |x: &Matrix| p().parts(x).unwrap().h2), Box::new(move |x: &Matrix| p().grad_h2(x).unwrap())),
            ]
        }
        ModelKind::Two => {
            let p = move || ModelTwo::new(a, k, l, u).expect("valid instance");
            vec![
                ("II.g1", Box::new(move |x: &Matrix| p().parts(x).unwrap().g1) as ValueFn, Box::new(move |x: &Matrix| p().grad_g1(x).unwrap()) as GradFn),
                ("II.g2", Box::new(move |x: &Matrix| p().parts(x).unwrap().g2), Box::new(move |x: &Matrix| p().grad_g2(x).unwrap())),
                ("II.g", Box::new(move |x: &Matrix| p().parts(x).unwrap().g()), Box::new(move |x: &Matrix| p().grad_g(x).unwrap())),
                ("II.h1", Box::new(move |x: &Matrix| p().parts(x).unwrap().h1), Box::new(move |x: &Matrix| p().grad_h1(x).unwrap())),
                ("II.h2", Box::new(move |x: &Matrix| p().parts(x).unwrap().h2), Box::new(move |x: &Matrix| p().grad_h2(x).unwrap())),
                ("II.h3", Box::new(move |x: &Matrix| p().parts(x).unwrap().h3), Box::new(move |x: &Matrix| p().grad_h3(x).unwrap())),
                ("II.h4", Box::new(move |x: &Matrix| p().parts(x).unwrap().h4), Box::new(move |x: &Matrix| p().grad_h4(x).unwrap())),
            ]
        }
    }
}

/// Central-difference directional derivative against `⟨∇f(X), D⟩`, as
/// `|fd − an| / (1 + |an|)`.
pub fn directional_fd_error(f: &dyn Fn(&Matrix) -> f64, grad: &Matrix, x: &Matrix, d: &Matrix) -> f64 {
    let h = 1e-6 * (1.0 + x.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut xp = x.clone();
    xp.axpy(h, d);
    let mut xm = x.clone();
    xm.axpy(-h, d);
    let fd = (f(&xp) - f(&xm)) / (2.0 * h);
    let an = frobenius_inner(grad, d).expect("same shape");
    (fd - an).abs() / (1.0 + an.abs())
}

fn unit_direction(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    let mut d = random_matrix(rng, rows, cols, 1.0);
    let n = d.frobenius_norm();
    d.scale(1.0 / n);
    d
}

/// Finite-difference check of every differentiable component, 1e−6 relative.
pub fn gradient_suite(opts: &CheckOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("gradients", 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6772_6164);
    for model in [ModelKind::One, ModelKind::Two] {
        for _ in 0..opts.samples {
            let inst = random_instance(&mut rng);
            let rows = model.rows(inst.k);
            let x = random_matrix(&mut rng, rows, inst.data.cols(), 12.0);
            for (name, f, g) in smooth_components(model, &inst) {
                let d = unit_direction(&mut rng, rows, inst.data.cols());
                let mut grad = g(&x);
                if opts.fault == Some(Fault::Gradient) {
                    grad.scale(1.0 + 1e-3);
                }
                let err = directional_fd_error(&*f, &grad, &x, &d);
                rep.record(err, || format!("{name} λ={} µ={} err={err:.3e}", inst.lambda, inst.mu));
            }
        }
    }
    rep
}

/// `∇g*(∇g(X)) = X` to relative Frobenius error 1e−8.
pub fn conjugate_suite(opts: &CheckOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("conjugate", 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x636f_6e6a);
    for model in [ModelKind::One, ModelKind::Two] {
        for _ in 0..opts.samples {
            let inst = random_instance(&mut rng);
            let rows = model.rows(inst.k);
            let x = random_matrix(&mut rng, rows, inst.data.cols(), 12.0);
            let (a, k, l, u) = (&inst.data, inst.k, inst.lambda, inst.mu);
            let mut back = match model {
                ModelKind::One => {
                    let p = ModelOne::new(a, k, l, u).expect("valid instance");
                    p.grad_g_conj(&p.grad_g(&x).unwrap()).unwrap()
                }
                ModelKind::Two => {
                    let p = ModelTwo::new(a, k, l, u).expect("valid instance");
                    p.grad_g_conj(&p.grad_g(&x).unwrap()).unwrap()
                }
            };
            if opts.fault == Some(Fault::Conjugate) {
                back[(0, 0)] += 1e-4 * (1.0 + x[(0, 0)].abs());
            }
            let e1 = back.distance(&x) / x.frobenius_norm().max(f64::MIN_POSITIVE);
            rep.record(e1, || format!("model {model} ∇g*∘∇g error {e1:.3e}"));
        }
    }
    rep
}

/// `h(Z) ≥ h(X) + ⟨W, Z − X⟩ − 1e−9` for the nonsmooth concave-part pieces.
pub fn subgradient_suite(opts: &CheckOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("subgradient", 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x7375_6267);
    for model in [ModelKind::One, ModelKind::Two] {
        for s in 0..opts.samples {
            let inst = random_instance(&mut rng);
            let rows = model.rows(inst.k);
            let n = inst.data.cols();
            let mut x = random_matrix(&mut rng, rows, n, 12.0);
            if s % 4 == 0 {
                // put a center exactly on a node to exercise the u = 0 branch
                let i = rng.random_range(0..inst.data.rows());
                x.row_mut(0).copy_from_slice(inst.data.row(i));
            }
            let (a, k, l, u) = (&inst.data, inst.k, inst.lambda, inst.mu);
            let pieces: Vec<(&str, ValueFn, Matrix)> = match model {
                ModelKind::One => {
                    let p = ModelOne::new(a, k, l, u).expect("valid instance");
                    vec![
                        ("I.h3", Box::new(move |z: &Matrix| ModelOne::new(a, k, l, u).unwrap().parts(z).unwrap().h3), p.subgrad_h3(&x).unwrap()),
                        ("I.h4", Box::new(move |z: &Matrix| ModelOne::new(a, k, l, u).unwrap().parts(z).unwrap().h4), p.subgrad_h4(&x).unwrap()),
                    ]
                }
                ModelKind::Two => {
                    let p = ModelTwo::new(a, k, l, u).expect("valid instance");
                    vec![
                        ("II.h5", Box::new(move |z: &Matrix| ModelTwo::new(a, k, l, u).unwrap().parts(z).unwrap().h5), p.subgrad_h5(&x).unwrap()),
                        ("II.h6", Box::new(move |z: &Matrix| ModelTwo::new(a, k, l, u).unwrap().parts(z).unwrap().h6), p.subgrad_h6(&x).unwrap()),
                    ]
                }
            };
            for (name, h, mut w) in pieces {
                if opts.fault == Some(Fault::Subgradient) {
                    w.scale(-1.0);
                }
                // one far point, one nearby point, one step against W
                let far = random_matrix(&mut rng, rows, n, 12.0);
                let mut near = x.clone();
                near.axpy(1e-3, &unit_direction(&mut rng, rows, n));
                let mut against = x.clone();
                let wn = w.frobenius_norm();
                if wn > 0.0 {
                    against.axpy(-1e-3 / wn, &w);
                }
                let hx = h(&x);
                for z in [far, near, against] {
                    let lin = frobenius_inner(&w, &z.sub(&x)).expect("same shape");
                    let err = (hx + lin - h(&z)).max(0.0);
                    rep.record(err, || format!("{name} λ={l} violation {err:.3e}"));
                }
            }
        }
    }
    rep
}

/// `φ_µ ≤ ‖x − a‖ ≤ φ_µ + µ/2` with slack 1e−12, on `10·samples` points.
pub fn sandwich_suite(opts: &CheckOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("sandwich", 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x7361_6e64);
    for _ in 0..opts.samples * 10 {
        let n = rng.random_range(1..5);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let mu = log_uniform(&mut rng, 0.01, 100.0);
        let s = smooth_norm(&x, &a, SmoothingParam::new(mu).expect("positive")).expect("same length");
        let r = dist(&x, &a);
        let err = (s - r).max(r - s - mu / 2.0).max(0.0);
        rep.record(err, || format!("µ={mu} ‖x−a‖={r} φ_µ={s}"));
    }
    rep
}

/// `0 ≤ f_λ − f_λµ ≤ bound`, checked with slack `1e−9·(1 + |f_λ|)`.
pub fn gap_suite(opts: &CheckOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("gap", 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6761_7073);
    for model in [ModelKind::One, ModelKind::Two] {
        for _ in 0..opts.samples {
            let inst = random_instance(&mut rng);
            let x = random_matrix(&mut rng, model.rows(inst.k), inst.data.cols(), 12.0);
            let (a, k, l, u) = (&inst.data, inst.k, inst.lambda, inst.mu);
            let (m, kf) = (a.rows() as f64, k as f64);
            let (f, fs, bound) = match model {
                ModelKind::One => {
                    let p = ModelOne::new(a, k, l, u).expect("valid instance");
                    (p.true_objective(&x).unwrap().f_lambda, p.smoothed_objective(&x).unwrap(), u / 2.0 * ((1.0 + l) * m * kf + kf))
                }
                ModelKind::Two => {
                    let p = ModelTwo::new(a, k, l, u).expect("valid instance");
                    (p.true_objective(&x).unwrap().f_lambda, p.smoothed_objective(&x).unwrap(), u / 2.0 * ((1.0 + l) * m * kf + kf + l * m))
                }
            };
            let gap = f - fs;
            let err = (-gap).max(gap - bound).max(0.0) / (1.0 + f.abs());
            rep.record(err, || format!("model {model} gap {gap} bound {bound}"));
        }
    }
    rep
}

/// Every DCA trace is non-increasing up to `1e−9·(1 + |f₀|)`.
pub fn descent_suite(opts: &CheckOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("descent", 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6465_7363);
    let dca = DcaOptions {
        n_inner: 30,
        tol: 0.0,
        keep_iterates: false,
    };
    for model in [ModelKind::One, ModelKind::Two] {
        for _ in 0..opts.samples.div_ceil(4) {
            let inst = random_instance(&mut rng);
            let x0 = random_matrix(&mut rng, model.rows(inst.k), inst.data.cols(), 12.0);
            let (a, k, l, u) = (&inst.data, inst.k, inst.lambda, inst.mu);
            let trace = match model {
                ModelKind::One => dca_run(&ModelOne::new(a, k, l, u).unwrap(), &x0, &dca),
                ModelKind::Two => dca_run(&ModelTwo::new(a, k, l, u).unwrap(), &x0, &dca),
            };
            match trace {
                Ok(t) => {
                    let f0 = t.objective_values[0];
                    let err = t.max_increase() / (1.0 + f0.abs());
                    rep.record(err, || format!("model {model} λ={l} µ={u} increase {err:.3e}"));
                }
                Err(e) => rep.record(f64::INFINITY, || e.to_string()),
            }
        }
    }
    rep
}

/// Solving the same instance twice yields byte-identical reports.
pub fn determinism_suite(opts: &CheckOptions) -> SuiteReport {
    let mut rep = SuiteReport::new("determinism", 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6465_7465);
    let schedule = Schedule::direct(1e-3, 4.0, 5.0, 0.5, 6, 15).expect("valid schedule");
    for model in [ModelKind::One, ModelKind::Two] {
        let inst = random_instance(&mut rng);
        let x0 = random_start(&inst.data, model.rows(inst.k), &StartSpec::with_seed(opts.seed));
        let run = || -> Option<String> {
            let r = solve(&inst.data, model, inst.k, &schedule, &x0, &SolveOptions::default()).ok()?;
            Some(emit_report(&r, None))
        };
        let (a, b) = (run(), run());
        let err = if a.is_some() && a == b { 0.0 } else { 1.0 };
        rep.record(err, || format!("model {model} reports differ"));
    }
    rep
}

/// All suites in a fixed order.
pub fn run_all(opts: &CheckOptions) -> Vec<SuiteReport> {
    vec![
        gradient_suite(opts),
        conjugate_suite(opts),
        subgradient_suite(opts),
        sandwich_suite(opts),
        gap_suite(opts),
        descent_suite(opts),
        determinism_suite(opts),
    ]
}
