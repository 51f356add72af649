//! First formulation: `k` free centers whose centroid acts as the total center.
//!
//! The penalised objective is
//!
//! ```text
//! f_λ(X) = Σ_i min_ℓ ‖xˡ − aⁱ‖ + Σ_ℓ ‖xˡ − x*‖ + λ Σ_ℓ min_i ‖xˡ − aⁱ‖,   x* = mean(xˡ)
//! ```
//!
//! Smoothing the convex part gives `f_λµ = g − h` with
//!
//! * `g¹ = (1+λ)/(2µ) Σ_i Σ_ℓ ‖xˡ − aⁱ‖²`, `g² = 1/(2µ) Σ_ℓ ‖xˡ − x*‖²`
//! * `h¹ = (1+λ)µ/2 Σ_i Σ_ℓ d((xˡ − aⁱ)/µ; 𝔹)²`, `h² = µ/2 Σ_ℓ d((xˡ − x*)/µ; 𝔹)²`
//! * `h³ = Σ_i max_r Σ_{ℓ≠r} ‖xˡ − aⁱ‖`, `h⁴ = λ Σ_ℓ max_s Σ_{i≠s} ‖xˡ − aⁱ‖`
//!
//! `∇g(X) = (1/µ)[((1+λ)m + 1)X − JX − (1+λ)S]` where `JX` replicates the row
//! mean of `X` and `S` replicates the column sums of `A`. Its inverse is
//! `X = [I/c + J/(c(1+λ)m)]((1+λ)S + µY)` with `c = 1 + (1+λ)m`.

use crate::dca::DcProgram;
use crate::error::{Error, Result};
use crate::matrix::{dist, CenterMatrix, DataSet, Matrix};
use crate::smoothing::{add_ball_gap_grad, ball_gap_sq, smooth_norm_of};
use crate::terms::{
    add_center_side_max_subgrad, add_node_ball_gap_grad, add_node_side_max_subgrad,
    center_side_max_value, diff, nearest_center_sum, nearest_node_sum, node_ball_gap_sum,
    node_side_max_value, node_smooth_sum,
};

/// Unsmoothed objective values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrueObjective {
    /// Tree cost with free centers.
    pub varphi: f64,
    /// Penalty: total distance from each center to its nearest node.
    pub phi: f64,
    /// `varphi + λ·phi`.
    pub f_lambda: f64,
}

/// Individual DC components, `f_λµ = g1 + g2 − (h1 + … )`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelOneParts {
    pub g1: f64,
    pub g2: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
}

impl ModelOneParts {
    pub fn g(&self) -> f64 {
        self.g1 + self.g2
    }

    pub fn h(&self) -> f64 {
        self.h1 + self.h2 + self.h3 + self.h4
    }

    pub fn objective(&self) -> f64 {
        self.g() - self.h()
    }
}

/// Model I at fixed penalty `λ` and smoothing `µ`.
#[derive(Clone, Debug)]
pub struct ModelOne<'a> {
    data: &'a DataSet,
    k: usize,
    lambda: f64,
    mu: f64,
    col_sums: Vec<f64>,
}

impl<'a> ModelOne<'a> {
    pub fn new(data: &'a DataSet, k: usize, lambda: f64, mu: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain("Model I needs at least two cluster centers"));
        }
        if k > data.rows() {
            return Err(Error::domain(format!(
                "k = {k} exceeds the number of nodes {}",
                data.rows()
            )));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::domain(format!("penalty must be non-negative, got {lambda}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::domain(format!("smoothing parameter must be positive, got {mu}")));
        }
        Ok(ModelOne {
            data,
            k,
            lambda,
            mu,
            col_sums: data.column_sums(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn data(&self) -> &DataSet {
        self.data
    }

    fn check(&self, x: &Matrix) -> Result<()> {
        x.ensure_shape(self.k, self.data.cols())
    }

    fn m(&self) -> f64 {
        self.data.rows() as f64
    }

    pub fn true_objective(&self, x: &CenterMatrix) -> Result<TrueObjective> {
        self.check(x)?;
        let centroid = x.row_mean();
        let varphi = nearest_center_sum(x, self.k, self.data)
            + x.iter_rows().map(|xl| dist(xl, &centroid)).sum::<f64>();
        let phi = nearest_node_sum(x, self.k, self.data);
        Ok(TrueObjective {
            varphi,
            phi,
            f_lambda: varphi + self.lambda * phi,
        })
    }

    pub fn parts(&self, x: &CenterMatrix) -> Result<ModelOneParts> {
        self.check(x)?;
        let (lambda, mu) = (self.lambda, self.mu);
        let centroid = x.row_mean();

        let mut sq_nodes = 0.0;
        for xl in x.iter_rows() {
            for ai in self.data.iter_rows() {
                let d = dist(xl, ai);
                sq_nodes += d * d;
            }
        }
        let mut sq_centroid = 0.0;
        let mut gap_centroid = 0.0;
        let mut buf = Vec::with_capacity(x.cols());
        for xl in x.iter_rows() {
            diff(xl, &centroid, &mut buf);
            sq_centroid += buf.iter().map(|v| v * v).sum::<f64>();
            gap_centroid += ball_gap_sq(&buf, mu);
        }

        Ok(ModelOneParts {
            g1: (1.0 + lambda) / (2.0 * mu) * sq_nodes,
            g2: sq_centroid / (2.0 * mu),
            h1: (1.0 + lambda) * mu / 2.0 * node_ball_gap_sum(x, self.k, self.data, mu),
            h2: mu / 2.0 * gap_centroid,
            h3: node_side_max_value(x, self.k, self.data),
            h4: lambda * center_side_max_value(x, self.k, self.data),
        })
    }

    /// The smoothed DC objective `f_λµ = g − h`.
    ///
    /// Summed as smoothed norms minus the max terms rather than as `g − h`:
    /// both `g` and `h` grow like `1/µ` while `f` does not.
    pub fn smoothed_objective(&self, x: &CenterMatrix) -> Result<f64> {
        self.check(x)?;
        let (lambda, mu) = (self.lambda, self.mu);
        let centroid = x.row_mean();
        let mut buf = Vec::with_capacity(x.cols());
        let mut links = 0.0;
        for xl in x.iter_rows() {
            diff(xl, &centroid, &mut buf);
            links += smooth_norm_of(&buf, mu);
        }
        Ok((1.0 + lambda) * node_smooth_sum(x, self.k, self.data, mu) + links
            - node_side_max_value(x, self.k, self.data)
            - lambda * center_side_max_value(x, self.k, self.data))
    }

    pub fn grad_g(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        Ok(self.grad_g_unchecked(x))
    }

    fn grad_g_unchecked(&self, x: &CenterMatrix) -> CenterMatrix {
        let w = 1.0 + self.lambda;
        let coef = w * self.m() + 1.0;
        let mean = x.row_mean();
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for l in 0..x.rows() {
            let row = out.row_mut(l);
            for (j, o) in row.iter_mut().enumerate() {
                *o = (coef * x[(l, j)] - mean[j] - w * self.col_sums[j]) / self.mu;
            }
        }
        out
    }

    /// `∇g¹ = ((1+λ)/µ)(mX − S)`.
    pub fn grad_g1(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let w = 1.0 + self.lambda;
        let mut out = x.clone();
        for l in 0..out.rows() {
            for (v, s) in out.row_mut(l).iter_mut().zip(&self.col_sums) {
                *v = w * (self.m() * *v - s) / self.mu;
            }
        }
        Ok(out)
    }

    /// `∇g² = (X − JX)/µ`.
    pub fn grad_g2(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let mean = x.row_mean();
        let mut out = x.clone();
        for l in 0..out.rows() {
            for (v, c) in out.row_mut(l).iter_mut().zip(&mean) {
                *v = (*v - c) / self.mu;
            }
        }
        Ok(out)
    }

    /// `∇g*(Y)`, the unique `X` with `∇g(X) = Y`.
    pub fn grad_g_conj(&self, y: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(y)?;
        Ok(self.grad_g_conj_unchecked(y))
    }

    fn grad_g_conj_unchecked(&self, y: &CenterMatrix) -> CenterMatrix {
        let w = 1.0 + self.lambda;
        let wm = w * self.m();
        let c = 1.0 + wm;
        // R = (1+λ)S + µY
        let mut r = y.clone();
        r.scale(self.mu);
        for l in 0..r.rows() {
            for (v, s) in r.row_mut(l).iter_mut().zip(&self.col_sums) {
                *v += w * s;
            }
        }
        let r_mean = r.row_mean();
        let beta = 1.0 / (c * wm);
        for l in 0..r.rows() {
            for (v, mean) in r.row_mut(l).iter_mut().zip(&r_mean) {
                *v = *v / c + beta * mean;
            }
        }
        r
    }

    /// `∇h¹`: row ℓ is `(1+λ) Σ_i [(xˡ − aⁱ)/µ − P((xˡ − aⁱ)/µ; 𝔹)]`.
    pub fn grad_h1(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let mut out = Matrix::zeros(x.rows(), x.cols());
        add_node_ball_gap_grad(&mut out, x, self.k, self.data, self.mu, 1.0 + self.lambda);
        Ok(out)
    }

    /// `∇h²`, including the coupling through the centroid.
    pub fn grad_h2(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let centroid = x.row_mean();
        let mut q = Matrix::zeros(x.rows(), x.cols());
        let mut buf = Vec::with_capacity(x.cols());
        for l in 0..x.rows() {
            diff(x.row(l), &centroid, &mut buf);
            add_ball_gap_grad(q.row_mut(l), &buf, self.mu, 1.0);
        }
        let q_mean = q.row_mean();
        for l in 0..q.rows() {
            for (v, mean) in q.row_mut(l).iter_mut().zip(&q_mean) {
                *v -= mean;
            }
        }
        Ok(q)
    }

    /// Subgradient of `h³` from the nearest-center selection.
    pub fn subgrad_h3(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let mut out = Matrix::zeros(x.rows(), x.cols());
        add_node_side_max_subgrad(&mut out, x, self.k, self.data);
        Ok(out)
    }

    /// Subgradient of `h⁴` from the nearest-node selection.
    pub fn subgrad_h4(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let mut out = Matrix::zeros(x.rows(), x.cols());
        if self.lambda > 0.0 {
            add_center_side_max_subgrad(&mut out, x, self.k, self.data, self.lambda);
        }
        Ok(out)
    }

    /// `Y = ∇h¹ + ∇h² + W³ + W⁴`.
    pub fn h_subgrad(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        let mut y = self.grad_h1(x)?;
        y.axpy(1.0, &self.grad_h2(x)?);
        y.axpy(1.0, &self.subgrad_h3(x)?);
        y.axpy(1.0, &self.subgrad_h4(x)?);
        Ok(y)
    }
}

impl DcProgram for ModelOne<'_> {
    fn shape(&self) -> (usize, usize) {
        (self.k, self.data.cols())
    }

    fn objective(&self, x: &CenterMatrix) -> f64 {
        self.smoothed_objective(x).unwrap_or(f64::NAN)
    }

    fn grad_g(&self, x: &CenterMatrix) -> CenterMatrix {
        self.grad_g_unchecked(x)
    }

    fn h_subgrad(&self, x: &CenterMatrix) -> CenterMatrix {
        ModelOne::h_subgrad(self, x).expect("shape checked by the DCA driver")
    }

    fn g_conj_grad(&self, y: &CenterMatrix) -> CenterMatrix {
        self.grad_g_conj_unchecked(y)
    }
}
