//! Second formulation: `k` cluster centers plus an explicit total center
//! stored in the last row of a `(k+1)×n` matrix.
//!
//! ```text
//! f_λ(X) = Σ_i min_{ℓ≤k} ‖xˡ − aⁱ‖ + Σ_{ℓ≤k} ‖xˡ − x^{k+1}‖ + λ Σ_{ℓ≤k+1} min_i ‖xˡ − aⁱ‖
//! ```
//!
//! The smoothed objective splits as `g = g¹ + g²` and `h = h¹ + … + h⁶`:
//!
//! * `g¹ = (1+λ)/(2µ) Σ_i Σ_{ℓ≤k+1} ‖xˡ − aⁱ‖²`, `g² = 1/(2µ) Σ_{ℓ≤k} ‖xˡ − x^{k+1}‖²`
//! * `h¹ = 1/(2µ) Σ_i ‖x^{k+1} − aⁱ‖²`, `h² = λµ/2 Σ_i d((x^{k+1} − aⁱ)/µ; 𝔹)²`
//! * `h³ = (1+λ)µ/2 Σ_i Σ_{ℓ≤k} d((xˡ − aⁱ)/µ; 𝔹)²`, `h⁴ = µ/2 Σ_{ℓ≤k} d((xˡ − x^{k+1})/µ; 𝔹)²`
//! * `h⁵ = Σ_i max_{r≤k} Σ_{ℓ≠r, ℓ≤k} ‖xˡ − aⁱ‖`, `h⁶ = λ Σ_{ℓ≤k+1} max_s Σ_{i≠s} ‖xˡ − aⁱ‖`
//!
//! `∇g(X) = (1/µ)(c₁I + T)X − ((1+λ)/µ)EA` with `c₁ = 1 + (1+λ)m`, where `T` is
//! zero except for its last row and column, both `(−1, …, −1, k−1)`.

use crate::dca::DcProgram;
use crate::error::{Error, Result};
use crate::matrix::{dist, CenterMatrix, DataSet, Matrix};
use crate::smoothing::{add_ball_gap_grad, ball_gap_sq, smooth_norm_of};
use crate::terms::{
    add_center_side_max_subgrad, add_node_ball_gap_grad, add_node_side_max_subgrad,
    center_side_max_value, diff, nearest_center_sum, nearest_node_sum, node_ball_gap_sum,
    node_side_max_value, node_smooth_sum,
};

pub use crate::model_one::TrueObjective;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelTwoParts {
    pub g1: f64,
    pub g2: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    pub h5: f64,
    pub h6: f64,
}

impl ModelTwoParts {
    pub fn g(&self) -> f64 {
        self.g1 + self.g2
    }

    pub fn h(&self) -> f64 {
        self.h1 + self.h2 + self.h3 + self.h4 + self.h5 + self.h6
    }

    pub fn objective(&self) -> f64 {
        self.g() - self.h()
    }
}

/// Model II at fixed penalty `λ` and smoothing `µ`.
#[derive(Clone, Debug)]
pub struct ModelTwo<'a> {
    data: &'a DataSet,
    k: usize,
    lambda: f64,
    mu: f64,
    col_sums: Vec<f64>,
}

impl<'a> ModelTwo<'a> {
    pub fn new(data: &'a DataSet, k: usize, lambda: f64, mu: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain("Model II needs at least two cluster centers"));
        }
        if k + 1 > data.rows() {
            return Err(Error::domain(format!(
                "k + 1 = {} exceeds the number of nodes {}",
                k + 1,
                data.rows()
            )));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::domain(format!("penalty must be non-negative, got {lambda}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::domain(format!("smoothing parameter must be positive, got {mu}")));
        }
        Ok(ModelTwo {
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

    /// `c₁ = 1 + (1+λ)m`.
    pub fn c1(&self) -> f64 {
        1.0 + (1.0 + self.lambda) * self.data.rows() as f64
    }

    fn check(&self, x: &Matrix) -> Result<()> {
        x.ensure_shape(self.k + 1, self.data.cols())
    }

    pub fn true_objective(&self, x: &CenterMatrix) -> Result<TrueObjective> {
        self.check(x)?;
        let total = x.row(self.k);
        let varphi = nearest_center_sum(x, self.k, self.data)
            + (0..self.k).map(|l| dist(x.row(l), total)).sum::<f64>();
        let phi = nearest_node_sum(x, self.k + 1, self.data);
        Ok(TrueObjective {
            varphi,
            phi,
            f_lambda: varphi + self.lambda * phi,
        })
    }

    pub fn parts(&self, x: &CenterMatrix) -> Result<ModelTwoParts> {
        self.check(x)?;
        let (k, lambda, mu) = (self.k, self.lambda, self.mu);
        let total = x.row(k);

        let mut sq_nodes = 0.0;
        for xl in x.iter_rows() {
            for ai in self.data.iter_rows() {
                let d = dist(xl, ai);
                sq_nodes += d * d;
            }
        }
        let mut buf = Vec::with_capacity(x.cols());
        let mut sq_total_nodes = 0.0;
        let mut gap_total_nodes = 0.0;
        for ai in self.data.iter_rows() {
            diff(total, ai, &mut buf);
            sq_total_nodes += buf.iter().map(|v| v * v).sum::<f64>();
            gap_total_nodes += ball_gap_sq(&buf, mu);
        }
        let mut sq_links = 0.0;
        let mut gap_links = 0.0;
        for l in 0..k {
            diff(x.row(l), total, &mut buf);
            sq_links += buf.iter().map(|v| v * v).sum::<f64>();
            gap_links += ball_gap_sq(&buf, mu);
        }

        Ok(ModelTwoParts {
            g1: (1.0 + lambda) / (2.0 * mu) * sq_nodes,
            g2: sq_links / (2.0 * mu),
            h1: sq_total_nodes / (2.0 * mu),
            h2: lambda * mu / 2.0 * gap_total_nodes,
            h3: (1.0 + lambda) * mu / 2.0 * node_ball_gap_sum(x, k, self.data, mu),
            h4: mu / 2.0 * gap_links,
            h5: node_side_max_value(x, k, self.data),
            h6: lambda * center_side_max_value(x, k + 1, self.data),
        })
    }

    /// The smoothed DC objective, summed term by term as in Model I.
    pub fn smoothed_objective(&self, x: &CenterMatrix) -> Result<f64> {
        self.check(x)?;
        let (k, lambda, mu) = (self.k, self.lambda, self.mu);
        let total = x.row(k);
        let mut buf = Vec::with_capacity(x.cols());
        let mut total_nodes = 0.0;
        for ai in self.data.iter_rows() {
            diff(total, ai, &mut buf);
            total_nodes += smooth_norm_of(&buf, mu);
        }
        let mut links = 0.0;
        for l in 0..k {
            diff(x.row(l), total, &mut buf);
            links += smooth_norm_of(&buf, mu);
        }
        Ok((1.0 + lambda) * node_smooth_sum(x, k, self.data, mu) + lambda * total_nodes + links
            - node_side_max_value(x, k, self.data)
            - lambda * center_side_max_value(x, k + 1, self.data))
    }

    pub fn grad_g(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        Ok(self.grad_g_unchecked(x))
    }

    fn grad_g_unchecked(&self, x: &CenterMatrix) -> CenterMatrix {
        let k = self.k;
        let w = 1.0 + self.lambda;
        let c1 = self.c1();
        let total = x.row(k);
        let center_sum = {
            let mut s = vec![0.0; x.cols()];
            for l in 0..k {
                crate::matrix::add_assign(&mut s, x.row(l));
            }
            s
        };
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for l in 0..k {
            for j in 0..x.cols() {
                out[(l, j)] = (c1 * x[(l, j)] - total[j] - w * self.col_sums[j]) / self.mu;
            }
        }
        for j in 0..x.cols() {
            out[(k, j)] = ((c1 + k as f64 - 1.0) * total[j] - center_sum[j]
                - w * self.col_sums[j])
                / self.mu;
        }
        out
    }

    /// `∇g¹ = ((1+λ)/µ)(mX − EA)`, all `k+1` rows.
    pub fn grad_g1(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let w = 1.0 + self.lambda;
        let m = self.data.rows() as f64;
        let mut out = x.clone();
        for l in 0..out.rows() {
            for (v, s) in out.row_mut(l).iter_mut().zip(&self.col_sums) {
                *v = w * (m * *v - s) / self.mu;
            }
        }
        Ok(out)
    }

    /// `∇g²`: rows `(xˡ − x^{k+1})/µ`, last row minus their sum.
    pub fn grad_g2(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let k = self.k;
        let total = x.row(k).to_vec();
        let mut out = Matrix::zeros(x.rows(), x.cols());
        let mut sum = vec![0.0; x.cols()];
        for l in 0..k {
            let row = out.row_mut(l);
            for ((o, p), t) in row.iter_mut().zip(x.row(l)).zip(&total) {
                *o = (p - t) / self.mu;
            }
            crate::matrix::add_assign(&mut sum, row);
        }
        for (o, s) in out.row_mut(k).iter_mut().zip(&sum) {
            *o = -s;
        }
        Ok(out)
    }

    /// `∇g*(Y)` through the closed-form row solution of `(c₁I + T)X = R`,
    /// `R = (1+λ)EA + µY`.
    pub fn grad_g_conj(&self, y: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(y)?;
        Ok(self.grad_g_conj_unchecked(y))
    }

    fn grad_g_conj_unchecked(&self, y: &CenterMatrix) -> CenterMatrix {
        let k = self.k;
        let w = 1.0 + self.lambda;
        let c1 = self.c1();
        debug_assert!(c1 - 1.0 > 0.0);

        let mut r = y.clone();
        r.scale(self.mu);
        for l in 0..r.rows() {
            for (v, s) in r.row_mut(l).iter_mut().zip(&self.col_sums) {
                *v += w * s;
            }
        }
        let denom = (c1 + k as f64) * (c1 - 1.0);
        let mut total = vec![0.0; r.cols()];
        for (j, t) in total.iter_mut().enumerate() {
            let center_sum: f64 = (0..k).map(|l| r[(l, j)]).sum();
            *t = (c1 * r[(k, j)] + center_sum) / denom;
        }
        for l in 0..k {
            for (v, t) in r.row_mut(l).iter_mut().zip(&total) {
                *v = (*v + t) / c1;
            }
        }
        r.row_mut(k).copy_from_slice(&total);
        r
    }

    /// `∇h¹`: only the last row is nonzero, `(1/µ)(m x^{k+1} − Σ_i aⁱ)`.
    pub fn grad_h1(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let m = self.data.rows() as f64;
        let mut out = Matrix::zeros(x.rows(), x.cols());
        let total = x.row(self.k).to_vec();
        for (j, o) in out.row_mut(self.k).iter_mut().enumerate() {
            *o = (m * total[j] - self.col_sums[j]) / self.mu;
        }
        Ok(out)
    }

    /// `∇h²`: last row `λ Σ_i [(x^{k+1} − aⁱ)/µ − P(·; 𝔹)]`.
    pub fn grad_h2(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let mut out = Matrix::zeros(x.rows(), x.cols());
        if self.lambda > 0.0 {
            let total = x.row(self.k);
            let mut acc = vec![0.0; x.cols()];
            let mut buf = Vec::with_capacity(x.cols());
            for ai in self.data.iter_rows() {
                diff(total, ai, &mut buf);
                add_ball_gap_grad(&mut acc, &buf, self.mu, 1.0);
            }
            for (o, v) in out.row_mut(self.k).iter_mut().zip(&acc) {
                *o = self.lambda * v;
            }
        }
        Ok(out)
    }

    /// `∇h³`: rows `ℓ ≤ k` carry `(1+λ) Σ_i [(xˡ − aⁱ)/µ − P(·; 𝔹)]`.
    pub fn grad_h3(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let mut out = Matrix::zeros(x.rows(), x.cols());
        add_node_ball_gap_grad(&mut out, x, self.k, self.data, self.mu, 1.0 + self.lambda);
        Ok(out)
    }

    /// `∇h⁴`: the link terms, with the negated sum in the last row.
    pub fn grad_h4(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let k = self.k;
        let total = x.row(k).to_vec();
        let mut out = Matrix::zeros(x.rows(), x.cols());
        let mut buf = Vec::with_capacity(x.cols());
        let mut sum = vec![0.0; x.cols()];
        for l in 0..k {
            diff(x.row(l), &total, &mut buf);
            let row = out.row_mut(l);
            add_ball_gap_grad(row, &buf, self.mu, 1.0);
            crate::matrix::add_assign(&mut sum, row);
        }
        for (o, s) in out.row_mut(k).iter_mut().zip(&sum) {
            *o = -s;
        }
        Ok(out)
    }

    /// Subgradient of `h⁵`; the last row stays zero.
    pub fn subgrad_h5(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let mut out = Matrix::zeros(x.rows(), x.cols());
        add_node_side_max_subgrad(&mut out, x, self.k, self.data);
        Ok(out)
    }

    /// Subgradient of `h⁶`, covering all `k+1` rows.
    pub fn subgrad_h6(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        self.check(x)?;
        let mut out = Matrix::zeros(x.rows(), x.cols());
        if self.lambda > 0.0 {
            add_center_side_max_subgrad(&mut out, x, self.k + 1, self.data, self.lambda);
        }
        Ok(out)
    }

    /// Sum of all six component selections.
    pub fn h_subgrad(&self, x: &CenterMatrix) -> Result<CenterMatrix> {
        let mut y = self.grad_h1(x)?;
        y.axpy(1.0, &self.grad_h2(x)?);
        y.axpy(1.0, &self.grad_h3(x)?);
        y.axpy(1.0, &self.grad_h4(x)?);
        y.axpy(1.0, &self.subgrad_h5(x)?);
        y.axpy(1.0, &self.subgrad_h6(x)?);
        Ok(y)
    }
}

impl DcProgram for ModelTwo<'_> {
    fn shape(&self) -> (usize, usize) {
        (self.k + 1, self.data.cols())
    }

    fn objective(&self, x: &CenterMatrix) -> f64 {
        self.smoothed_objective(x).unwrap_or(f64::NAN)
    }

    fn grad_g(&self, x: &CenterMatrix) -> CenterMatrix {
        self.grad_g_unchecked(x)
    }

    fn h_subgrad(&self, x: &CenterMatrix) -> CenterMatrix {
        ModelTwo::h_subgrad(self, x).expect("shape checked by the DCA driver")
    }

    fn g_conj_grad(&self, y: &CenterMatrix) -> CenterMatrix {
        self.grad_g_conj_unchecked(y)
    }
}
