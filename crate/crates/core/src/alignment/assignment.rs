//! Linear assignment: exact shortest-augmenting-path solver and an
//! entropic-transport relaxation with rounding.

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Minimum-cost perfect matching of a square cost matrix. Returns `perm`
/// with row `i` assigned to column `perm[i]`.
///
/// Shortest augmenting paths with row/column potentials, `O(m³)`.
pub fn hungarian(cost: ArrayView2<'_, f64>) -> Vec<usize> {
    let m = cost.nrows();
    assert_eq!(m, cost.ncols(), "cost matrix must be square");
    if m == 0 {
        return Vec::new();
    }
    // 1-based arrays; column 0 is a virtual source.
    let mut u = vec![0.0f64; m + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut row_of = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![0.0f64; m + 1];
    let mut used = vec![false; m + 1];
    for i in 1..=m {
        row_of[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            let crow = cost.row(i0 - 1);
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = crow[j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; m];
    for j in 1..=m {
        perm[row_of[j] - 1] = j - 1;
    }
    perm
}

pub fn assignment_cost(cost: ArrayView2<'_, f64>, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| cost[[i, j]]).sum()
}

/// Log-domain Sinkhorn plan for uniform marginals, followed by greedy
/// rounding to a permutation. `reg` is relative to the largest cost.
/// Falls back to the identity assignment if rounding is worse.
pub fn sinkhorn_assignment(cost: ArrayView2<'_, f64>, reg: f64, iters: usize) -> Vec<usize> {
    let m = cost.nrows();
    assert_eq!(m, cost.ncols(), "cost matrix must be square");
    if m == 0 {
        return Vec::new();
    }
    let scale = cost.iter().cloned().fold(0.0f64, |a, c| a.max(c.abs())).max(f64::MIN_POSITIVE);
    let eps = reg * scale;
    let kernel = cost.mapv(|c| -c / eps);
    let mut f = vec![0.0f64; m];
    let mut g = vec![0.0f64; m];
    let lse = |vals: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = vals.collect();
        let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
    };
    for _ in 0..iters {
        for i in 0..m {
            f[i] = -lse(&mut (0..m).map(|j| kernel[[i, j]] + g[j]));
        }
        for j in 0..m {
            g[j] = -lse(&mut (0..m).map(|i| kernel[[i, j]] + f[i]));
        }
    }
    let plan = Array2::from_shape_fn((m, m), |(i, j)| kernel[[i, j]] + f[i] + g[j]);
    let perm = round_plan(plan.view());
    let identity: Vec<usize> = (0..m).collect();
    if assignment_cost(cost, &perm) <= assignment_cost(cost, &identity) {
        perm
    } else {
        identity
    }
}

/// Greedy rounding: take pairs by decreasing plan value while both ends are free.
fn round_plan(log_plan: ArrayView2<'_, f64>) -> Vec<usize> {
    let m = log_plan.nrows();
    let mut pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    pairs.sort_by(|a, b| log_plan[[b.0, b.1]].total_cmp(&log_plan[[a.0, a.1]]).then(a.cmp(b)));
    let mut perm = vec![usize::MAX; m];
    let mut col_used = vec![false; m];
    let mut left = m;
    for (i, j) in pairs {
        if perm[i] == usize::MAX && !col_used[j] {
            perm[i] = j;
            col_used[j] = true;
            left -= 1;
            if left == 0 {
                break;
            }
        }
    }
    perm
}

/// Squared Euclidean costs `‖x_i − y_j‖²`.
pub fn squared_distances(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Array2<f64> {
    let xx: Vec<f64> = x.rows().into_iter().map(|r| r.dot(&r)).collect();
    let yy: Vec<f64> = y.rows().into_iter().map(|r| r.dot(&r)).collect();
    let mut c = x.dot(&y.t());
    for ((i, j), v) in c.indexed_iter_mut() {
        *v = (xx[i] + yy[j] - 2.0 * *v).max(0.0);
    }
    c
}

/// Batch size above which the entropic relaxation replaces the exact solver.
pub const EXACT_LIMIT: usize = 512;
const SINKHORN_ITERS: usize = 200;

/// Permutation minimizing `Σ ‖x_i − y_π(i)‖²`: exact for `m ≤ 512`,
/// entropic transport with rounding above that.
pub fn solve_assignment(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, reg: f64) -> Result<Vec<usize>> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", x.dim(), y.dim())));
    }
    if x.nrows() < 2 {
        return Err(Error::InvalidArgument("assignment needs at least 2 rows".into()));
    }
    let cost = squared_distances(x, y);
    Ok(if x.nrows() <= EXACT_LIMIT {
        hungarian(cost.view())
    } else {
        sinkhorn_assignment(cost.view(), reg, SINKHORN_ITERS)
    })
}
