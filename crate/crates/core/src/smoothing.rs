//! Smooth approximation of the Euclidean distance `x ↦ ‖x − a‖`.
//!
//! For `µ > 0` the approximation is
//!
//! ```text
//! φ_µ(x) = ‖x − a‖² / (2µ) − (µ/2) · d((x − a)/µ; 𝔹)²
//! ```
//!
//! with gradient `P((x − a)/µ; 𝔹)`. It underestimates the norm by at most
//! `µ/2`: `φ_µ(x) ≤ ‖x − a‖ ≤ φ_µ(x) + µ/2`.

use crate::error::{Error, Result};
use crate::matrix::{dot, project_ball};

/// Smoothing parameter `µ`, always strictly positive.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct SmoothingParam(f64);

impl SmoothingParam {
    pub fn new(mu: f64) -> Result<Self> {
        if mu.is_finite() && mu > 0.0 {
            Ok(SmoothingParam(mu))
        } else {
            Err(Error::domain(format!("smoothing parameter must be positive, got {mu}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

fn check_dims(x: &[f64], a: &[f64]) -> Result<()> {
    if x.len() != a.len() {
        return Err(Error::Dimension {
            expected: (1, a.len()),
            found: (1, x.len()),
        });
    }
    Ok(())
}

/// `φ_µ(x)` for the anchor point `a`.
pub fn smooth_norm(x: &[f64], a: &[f64], mu: SmoothingParam) -> Result<f64> {
    check_dims(x, a)?;
    let diff: Vec<f64> = x.iter().zip(a).map(|(p, q)| p - q).collect();
    Ok(smooth_norm_of(&diff, mu.get()))
}

/// `∇φ_µ(x) = P((x − a)/µ; 𝔹)`.
pub fn smooth_norm_grad(x: &[f64], a: &[f64], mu: SmoothingParam) -> Result<Vec<f64>> {
    check_dims(x, a)?;
    let mu = mu.get();
    let z: Vec<f64> = x.iter().zip(a).map(|(p, q)| (p - q) / mu).collect();
    Ok(project_ball(&z))
}

/// `φ_µ` evaluated on a precomputed difference `x − a`.
///
/// Outside the ball the two terms collapse to `‖x − a‖ − µ/2`, which is
/// evaluated directly to avoid cancelling two large numbers.
pub(crate) fn smooth_norm_of(diff: &[f64], mu: f64) -> f64 {
    let sq = dot(diff, diff);
    let r = sq.sqrt();
    if r > mu {
        r - 0.5 * mu
    } else {
        sq / (2.0 * mu)
    }
}

/// Squared ball distance `d(diff/µ; 𝔹)²`, the building block of the concave
/// parts of both models.
#[inline]
pub(crate) fn ball_gap_sq(diff: &[f64], mu: f64) -> f64 {
    let r = dot(diff, diff).sqrt() / mu;
    let d = (r - 1.0).max(0.0);
    d * d
}

/// Adds `s · (z − P(z; 𝔹))` with `z = diff/µ` to `out`. This is the gradient
/// of `(µ/2)·d(z; 𝔹)²` with respect to the first point of `diff`.
#[inline]
pub(crate) fn add_ball_gap_grad(out: &mut [f64], diff: &[f64], mu: f64, s: f64) {
    let r = dot(diff, diff).sqrt() / mu;
    if r <= 1.0 {
        return;
    }
    // z − z/‖z‖ = z (1 − 1/‖z‖)
    let c = s * (1.0 - 1.0 / r) / mu;
    for (o, d) in out.iter_mut().zip(diff) {
        *o += c * d;
    }
}
