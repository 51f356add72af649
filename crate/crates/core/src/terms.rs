//! Building blocks shared by both model formulations.
//!
//! Every concave piece of the objectives has the shape
//! `max_r Σ_{j≠r} ‖·‖`, which is the full sum minus the smallest term. The
//! maximising index is therefore the nearest point, ties going to the smallest
//! index, and a subgradient is the sum of unit directions over the other terms.

use crate::matrix::{dist, CenterMatrix, DataSet};
use crate::smoothing::{add_ball_gap_grad, ball_gap_sq, smooth_norm_of};

/// Index of the smallest value, first one on ties.
#[inline]
pub(crate) fn argmin(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Adds `s·(x − a)/‖x − a‖` to `out`; at `x = a` the zero element of the unit
/// ball is used.
#[inline]
pub(crate) fn add_unit(out: &mut [f64], x: &[f64], a: &[f64], s: f64) {
    let d = dist(x, a);
    if d > 0.0 {
        let c = s / d;
        for ((o, p), q) in out.iter_mut().zip(x).zip(a) {
            *o += c * (p - q);
        }
    }
}

#[inline]
pub(crate) fn diff(x: &[f64], a: &[f64], buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend(x.iter().zip(a).map(|(p, q)| p - q));
}

/// `Σ_i Σ_{ℓ∈rows} d((xˡ − aⁱ)/µ; 𝔹)²`.
pub(crate) fn node_ball_gap_sum(x: &CenterMatrix, rows: usize, a: &DataSet, mu: f64) -> f64 {
    let mut buf = Vec::with_capacity(x.cols());
    let mut total = 0.0;
    for l in 0..rows {
        let xl = x.row(l);
        for ai in a.iter_rows() {
            diff(xl, ai, &mut buf);
            total += ball_gap_sq(&buf, mu);
        }
    }
    total
}

/// `Σ_i Σ_{ℓ∈rows} φ_µ(xˡ − aⁱ)`.
pub(crate) fn node_smooth_sum(x: &CenterMatrix, rows: usize, a: &DataSet, mu: f64) -> f64 {
    let mut buf = Vec::with_capacity(x.cols());
    let mut total = 0.0;
    for l in 0..rows {
        let xl = x.row(l);
        for ai in a.iter_rows() {
            diff(xl, ai, &mut buf);
            total += smooth_norm_of(&buf, mu);
        }
    }
    total
}

/// Row ℓ (for ℓ < rows) gets `s·Σ_i [(xˡ − aⁱ)/µ − P((xˡ − aⁱ)/µ; 𝔹)]`.
pub(crate) fn add_node_ball_gap_grad(
    out: &mut CenterMatrix,
    x: &CenterMatrix,
    rows: usize,
    a: &DataSet,
    mu: f64,
    s: f64,
) {
    let mut buf = Vec::with_capacity(x.cols());
    for l in 0..rows {
        let xl = x.row(l);
        let mut acc = vec![0.0; x.cols()];
        for ai in a.iter_rows() {
            diff(xl, ai, &mut buf);
            add_ball_gap_grad(&mut acc, &buf, mu, 1.0);
        }
        for (o, v) in out.row_mut(l).iter_mut().zip(&acc) {
            *o += s * v;
        }
    }
}

/// `Σ_i max_r Σ_{ℓ≠r, ℓ<rows} ‖xˡ − aⁱ‖`.
pub(crate) fn node_side_max_value(x: &CenterMatrix, rows: usize, a: &DataSet) -> f64 {
    let mut total = 0.0;
    let mut d = vec![0.0; rows];
    for ai in a.iter_rows() {
        for (l, dl) in d.iter_mut().enumerate() {
            *dl = dist(x.row(l), ai);
        }
        let (r, _) = argmin(d.iter().copied());
        total += d
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != r)
            .map(|(_, v)| v)
            .sum::<f64>();
    }
    total
}

/// Subgradient of [`node_side_max_value`], added into rows `0..rows` of `out`.
pub(crate) fn add_node_side_max_subgrad(
    out: &mut CenterMatrix,
    x: &CenterMatrix,
    rows: usize,
    a: &DataSet,
) {
    for ai in a.iter_rows() {
        let (r, _) = argmin((0..rows).map(|l| dist(x.row(l), ai)));
        for l in (0..rows).filter(|&l| l != r) {
            let xl = x.row(l).to_vec();
            add_unit(out.row_mut(l), &xl, ai, 1.0);
        }
    }
}

/// `Σ_{ℓ<rows} max_s Σ_{i≠s} ‖xˡ − aⁱ‖`.
pub(crate) fn center_side_max_value(x: &CenterMatrix, rows: usize, a: &DataSet) -> f64 {
    let mut d = vec![0.0; a.rows()];
    let mut total = 0.0;
    for l in 0..rows {
        let xl = x.row(l);
        for (di, ai) in d.iter_mut().zip(a.iter_rows()) {
            *di = dist(xl, ai);
        }
        let (s, _) = argmin(d.iter().copied());
        total += d
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != s)
            .map(|(_, v)| v)
            .sum::<f64>();
    }
    total
}

/// Subgradient of [`center_side_max_value`] scaled by `scale`.
pub(crate) fn add_center_side_max_subgrad(
    out: &mut CenterMatrix,
    x: &CenterMatrix,
    rows: usize,
    a: &DataSet,
    scale: f64,
) {
    for l in 0..rows {
        let xl = x.row(l).to_vec();
        let (s, _) = argmin(a.iter_rows().map(|ai| dist(&xl, ai)));
        let row = out.row_mut(l);
        for (i, ai) in a.iter_rows().enumerate() {
            if i != s {
                add_unit(row, &xl, ai, scale);
            }
        }
    }
}

/// `Σ_i min_{ℓ<rows} ‖xˡ − aⁱ‖`.
pub(crate) fn nearest_center_sum(x: &CenterMatrix, rows: usize, a: &DataSet) -> f64 {
    a.iter_rows()
        .map(|ai| argmin((0..rows).map(|l| dist(x.row(l), ai))).1)
        .sum()
}

/// `Σ_{ℓ<rows} min_i ‖xˡ − aⁱ‖`.
pub(crate) fn nearest_node_sum(x: &CenterMatrix, rows: usize, a: &DataSet) -> f64 {
    (0..rows)
        .map(|l| argmin(a.iter_rows().map(|ai| dist(x.row(l), ai))).1)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn argmin_prefers_first_on_ties() {
        assert_eq!(argmin([2.0, 1.0, 1.0, 3.0].into_iter()), (1, 1.0));
    }

    #[test]
    fn single_node_selection_has_one_unit_row() {
        let a = Matrix::from_rows(&[[0.0, 0.0]]).unwrap();
        let x = Matrix::from_rows(&[[1.0, 0.0], [0.0, -2.0]]).unwrap();
        let mut w = Matrix::zeros(2, 2);
        add_node_side_max_subgrad(&mut w, &x, 2, &a);
        // r* = 0 (nearest), so only row 1 contributes its unit direction
        assert_eq!(w.row(0), &[0.0, 0.0]);
        assert_eq!(w.row(1), &[0.0, -1.0]);
    }

    #[test]
    fn coincident_rows_contribute_zero() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [5.0, 5.0]]).unwrap();
        let x = Matrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let mut w = Matrix::zeros(1, 2);
        // s* = 0 is the coincident node, the other node gives a unit vector
        add_center_side_max_subgrad(&mut w, &x, 1, &a, 2.0);
        let u = 2.0 / 32f64.sqrt();
        assert!((w[(0, 0)] + 4.0 * u).abs() < 1e-15);
        let a3 = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0], [5.0, 5.0]]).unwrap();
        let mut w3 = Matrix::zeros(1, 2);
        add_center_side_max_subgrad(&mut w3, &x, 1, &a3, 1.0);
        // duplicate coincident node uses u = 0
        assert!((w3[(0, 0)] + 4.0 / 32f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn max_value_is_sum_minus_min() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        let a = Matrix::from_rows(&[[0.0, 0.0]]).unwrap();
        // node side: distances 0 and 5, drop the nearest
        assert_eq!(node_side_max_value(&x, 2, &a), 5.0);
        let a2 = Matrix::from_rows(&[[0.0, 0.0], [6.0, 8.0]]).unwrap();
        // center side for row 1: distances 5 and 5, drop the first
        assert_eq!(center_side_max_value(&x, 2, &a2), 10.0 + 5.0);
    }
}
