//! Generic DCA iteration for objectives written as `f = g − h` with `g`, `h`
//! convex.
//!
//! Each step picks `Y_k ∈ ∂h(X_{k−1})` and then `X_k ∈ ∂g*(Y_k)`. For the
//! models in this crate `g` is a strongly convex quadratic, so `∂g*` is the
//! single-valued inverse of `∇g` and the objective sequence is non-increasing.

use crate::error::{Error, Result};
use crate::matrix::{frobenius_inner, CenterMatrix, Matrix};

/// The oracles that define one DC program at fixed parameters.
///
/// Implementations must be pure: the same input always yields the same output.
pub trait DcProgram {
    /// Shape of the variable matrix.
    fn shape(&self) -> (usize, usize);

    /// The DC objective `g − h`.
    fn objective(&self, x: &CenterMatrix) -> f64;

    /// `∇g(X)`.
    fn grad_g(&self, x: &CenterMatrix) -> CenterMatrix;

    /// A selection `Y ∈ ∂h(X)`.
    fn h_subgrad(&self, x: &CenterMatrix) -> CenterMatrix;

    /// A selection `X ∈ ∂g*(Y)`.
    fn g_conj_grad(&self, y: &CenterMatrix) -> CenterMatrix;
}

impl<P: DcProgram + ?Sized> DcProgram for &P {
    fn shape(&self) -> (usize, usize) {
        (**self).shape()
    }
    fn objective(&self, x: &CenterMatrix) -> f64 {
        (**self).objective(x)
    }
    fn grad_g(&self, x: &CenterMatrix) -> CenterMatrix {
        (**self).grad_g(x)
    }
    fn h_subgrad(&self, x: &CenterMatrix) -> CenterMatrix {
        (**self).h_subgrad(x)
    }
    fn g_conj_grad(&self, y: &CenterMatrix) -> CenterMatrix {
        (**self).g_conj_grad(y)
    }
}

/// A DC program assembled from closures, handy for toy problems.
pub struct FnProgram<O, G, H, C> {
    pub shape: (usize, usize),
    pub objective: O,
    pub grad_g: G,
    pub h_subgrad: H,
    pub g_conj_grad: C,
}

impl<O, G, H, C> DcProgram for FnProgram<O, G, H, C>
where
    O: Fn(&Matrix) -> f64,
    G: Fn(&Matrix) -> Matrix,
    H: Fn(&Matrix) -> Matrix,
    C: Fn(&Matrix) -> Matrix,
{
    fn shape(&self) -> (usize, usize) {
        self.shape
    }
    fn objective(&self, x: &Matrix) -> f64 {
        (self.objective)(x)
    }
    fn grad_g(&self, x: &Matrix) -> Matrix {
        (self.grad_g)(x)
    }
    fn h_subgrad(&self, x: &Matrix) -> Matrix {
        (self.h_subgrad)(x)
    }
    fn g_conj_grad(&self, y: &Matrix) -> Matrix {
        (self.g_conj_grad)(y)
    }
}

#[derive(Clone, Debug)]
pub struct DcaOptions {
    /// Maximum number of DCA steps `N`.
    pub n_inner: usize,
    /// Relative step tolerance; `0` runs exactly `n_inner` steps.
    pub tol: f64,
    /// Keep every iterate, not only the last one.
    pub keep_iterates: bool,
}

impl Default for DcaOptions {
    fn default() -> Self {
        DcaOptions {
            n_inner: 20,
            tol: 1e-6,
            keep_iterates: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DcaTrace {
    /// All iterates `X_0, …, X_K` when requested, empty otherwise.
    pub iterates: Vec<CenterMatrix>,
    /// The final iterate `X_K`.
    pub last: CenterMatrix,
    /// `f(X_0), f(X_1), …, f(X_K)`.
    pub objective_values: Vec<f64>,
    /// `‖X_k − X_{k−1}‖_F` for `k = 1..=K`.
    pub step_norms: Vec<f64>,
    pub iterations_run: usize,
}

impl DcaTrace {
    /// Largest increase between consecutive objective values (0 when the
    /// sequence is non-increasing).
    pub fn max_increase(&self) -> f64 {
        self.objective_values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Checks `f(X_{k+1}) ≤ f(X_k) + slack·(1 + |f(X_0)|)` for every step.
    pub fn is_monotone(&self, slack: f64) -> bool {
        let f0 = self.objective_values.first().copied().unwrap_or(0.0);
        self.max_increase() <= slack * (1.0 + f0.abs())
    }
}

/// Runs at most `opts.n_inner` DCA steps from `x0`.
///
/// Stops early once `‖X_k − X_{k−1}‖_F ≤ tol·(1 + ‖X_{k−1}‖_F)`; with
/// `tol = 0` exactly `n_inner` steps are taken.
pub fn dca_run<P: DcProgram + ?Sized>(
    program: &P,
    x0: &CenterMatrix,
    opts: &DcaOptions,
) -> Result<DcaTrace> {
    let (rows, cols) = program.shape();
    x0.ensure_shape(rows, cols)?;
    if opts.n_inner == 0 {
        return Err(Error::domain("n_inner must be at least 1"));
    }
    if opts.tol.is_nan() || opts.tol < 0.0 {
        return Err(Error::domain("tol must be non-negative"));
    }

    let mut x = x0.clone();
    let mut iterates = Vec::new();
    if opts.keep_iterates {
        iterates.push(x.clone());
    }
    let mut objective_values = Vec::with_capacity(opts.n_inner + 1);
    objective_values.push(program.objective(&x));
    let mut step_norms = Vec::with_capacity(opts.n_inner);

    let mut iterations_run = 0;
    for k in 1..=opts.n_inner {
        let y = program.h_subgrad(&x);
        let next = program.g_conj_grad(&y);
        if !next.is_finite() {
            return Err(Error::Numerical {
                iteration: k,
                outer: None,
            });
        }
        let step = next.distance(&x);
        let scale = 1.0 + x.frobenius_norm();
        let value = program.objective(&next);
        if !value.is_finite() {
            return Err(Error::Numerical {
                iteration: k,
                outer: None,
            });
        }
        x = next;
        iterations_run = k;
        objective_values.push(value);
        step_norms.push(step);
        if opts.keep_iterates {
            iterates.push(x.clone());
        }
        if opts.tol > 0.0 && step <= opts.tol * scale {
            break;
        }
    }

    Ok(DcaTrace {
        iterates,
        last: x,
        objective_values,
        step_norms,
        iterations_run,
    })
}

/// Sufficient criticality test `‖∇g(X) − Y‖_F ≤ eps·(1 + ‖∇g(X)‖_F)` for the
/// available selection `Y ∈ ∂h(X)`.
pub fn is_critical<P: DcProgram + ?Sized>(program: &P, x: &CenterMatrix, eps: f64) -> bool {
    let g = program.grad_g(x);
    let h = program.h_subgrad(x);
    g.distance(&h) <= eps * (1.0 + g.frobenius_norm())
}

/// Relative Frobenius error `‖∇g*(∇g(X)) − X‖_F / (1 + ‖X‖_F)`.
pub fn conjugate_roundtrip_error<P: DcProgram + ?Sized>(program: &P, x: &CenterMatrix) -> f64 {
    let back = program.g_conj_grad(&program.grad_g(x));
    back.distance(x) / (1.0 + x.frobenius_norm())
}

/// Linearisation gap `h(Z) − h(X) − ⟨W, Z − X⟩`, non-negative whenever `W` is
/// a subgradient of the convex function `h` at `X`.
pub fn subgradient_gap(
    h: impl Fn(&Matrix) -> f64,
    x: &Matrix,
    w: &Matrix,
    z: &Matrix,
) -> Result<f64> {
    Ok(h(z) - h(x) - frobenius_inner(w, &z.sub(x))?)
}
