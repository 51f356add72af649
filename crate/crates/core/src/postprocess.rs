//! Turning continuous centers into a discrete tree and pricing it.
//!
//! Centers are snapped to their nearest nodes, the total center is the
//! remaining node with the smallest summed distance to the snapped centers,
//! and the tree cost is
//!
//! ```text
//! Σ_i min_{ℓ ≤ k+1} ‖x̄ˡ − aⁱ‖ + Σ_{ℓ ≤ k} ‖x̄ˡ − x^{k+1}‖
//! ```
//!
//! where the inner minimum also ranges over the total center.

use crate::error::{Error, Result};
use crate::matrix::{dist, CenterMatrix, DataSet};
use crate::terms::argmin;

/// A discrete bilevel tree over node indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SnappedSolution {
    pub cluster_centers: Vec<usize>,
    pub total_center: usize,
    /// For each node, the position of its nearest center among
    /// `cluster_centers` followed by the total center (so `k` means the
    /// total center itself).
    pub assignment: Vec<usize>,
    pub cost: f64,
}

impl SnappedSolution {
    /// Snaps the first `k` rows of `x` and completes the tree.
    pub fn from_centers(x: &CenterMatrix, k: usize, a: &DataSet) -> Result<Self> {
        let centers = snap_centers(x, k, a)?;
        let total = pick_total_center(&centers, a)?;
        Ok(Self::from_indices(centers, total, a))
    }

    /// Builds the tree for given node indices.
    pub fn from_indices(cluster_centers: Vec<usize>, total_center: usize, a: &DataSet) -> Self {
        let (assignment, cost) = assign_and_cost(&cluster_centers, total_center, a);
        SnappedSolution {
            cluster_centers,
            total_center,
            assignment,
            cost,
        }
    }
}

/// Nearest node for each of the first `k` rows of `x`.
///
/// Ties go to the smallest node index. When a row's nearest node is already
/// taken by an earlier row, the next-nearest unused node is used instead.
pub fn snap_centers(x: &CenterMatrix, k: usize, a: &DataSet) -> Result<Vec<usize>> {
    if a.rows() == 0 {
        return Err(Error::domain("cannot snap onto an empty data set"));
    }
    if k > x.rows() {
        return Err(Error::domain(format!("{k} centers requested from {} rows", x.rows())));
    }
    if k > a.rows() {
        return Err(Error::domain(format!("{k} distinct centers need at least {k} nodes")));
    }
    x.ensure_shape(x.rows(), a.cols())?;

    let mut taken = vec![false; a.rows()];
    let mut out = Vec::with_capacity(k);
    for l in 0..k {
        let xl = x.row(l);
        let (best, _) = argmin(
            a.iter_rows()
                .enumerate()
                .map(|(i, ai)| if taken[i] { f64::INFINITY } else { dist(xl, ai) }),
        );
        taken[best] = true;
        out.push(best);
    }
    Ok(out)
}

/// Node outside `centers` minimising the summed distance to the centers.
pub fn pick_total_center(centers: &[usize], a: &DataSet) -> Result<usize> {
    if centers.len() >= a.rows() {
        return Err(Error::domain(
            "no node is left for the total center once the cluster centers are placed",
        ));
    }
    let (best, _) = argmin((0..a.rows()).map(|i| {
        if centers.contains(&i) {
            f64::INFINITY
        } else {
            centers.iter().map(|&c| dist(a.row(c), a.row(i))).sum()
        }
    }));
    Ok(best)
}

fn assign_and_cost(centers: &[usize], total: usize, a: &DataSet) -> (Vec<usize>, f64) {
    let hubs: Vec<&[f64]> = centers
        .iter()
        .chain(std::iter::once(&total))
        .map(|&c| a.row(c))
        .collect();
    let mut cost = 0.0;
    let mut assignment = Vec::with_capacity(a.rows());
    for ai in a.iter_rows() {
        let (l, d) = argmin(hubs.iter().map(|h| dist(h, ai)));
        assignment.push(l);
        cost += d;
    }
    let t = a.row(total);
    cost += centers.iter().map(|&c| dist(a.row(c), t)).sum::<f64>();
    (assignment, cost)
}

/// Discrete tree cost of a snapped solution, recomputed from scratch.
pub fn tree_cost(s: &SnappedSolution, a: &DataSet) -> f64 {
    assign_and_cost(&s.cluster_centers, s.total_center, a).1
}

/// Enumeration limit for [`discrete_optimum`].
pub const ENUMERATION_LIMIT: u128 = 20_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Global optimum over every choice of `k` cluster centers and a distinct
/// total center among the nodes. Brute force; only for small instances.
pub fn discrete_optimum(a: &DataSet, k: usize) -> Result<SnappedSolution> {
    let m = a.rows();
    if k == 0 || k + 1 > m {
        return Err(Error::domain(format!("need 1 ≤ k < m, got k = {k}, m = {m}")));
    }
    let combinations = binomial(m, k) * (m - k) as u128;
    if combinations > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            combinations,
            limit: ENUMERATION_LIMIT,
        });
    }

    // pairwise distances, reused by every candidate
    let d: Vec<f64> = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| dist(a.row(i), a.row(j)))
        .collect();

    let mut best: Option<(f64, Vec<usize>, usize)> = None;
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        for t in 0..m {
            if subset.contains(&t) {
                continue;
            }
            let mut cost: f64 = subset.iter().map(|&c| d[c * m + t]).sum();
            for i in 0..m {
                let mut near = d[t * m + i];
                for &c in &subset {
                    near = near.min(d[c * m + i]);
                }
                cost += near;
            }
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, subset.clone(), t));
            }
        }
        // next k-subset in lexicographic order
        let mut i = k;
        while i > 0 && subset[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        subset[i - 1] += 1;
        for j in i..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    let (_, centers, total) = best.expect("at least one candidate");
    Ok(SnappedSolution::from_indices(centers, total, a))
}
