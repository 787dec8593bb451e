//! Truncated SVD of symmetric operators by randomized subspace iteration,
//! and the `U Σ^{1/2}` embedding construction.

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array2, ShapeBuilder};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// A real symmetric `n × n` linear map that can act on blocks of vectors.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `A X` for a row-major `n × m` block.
    fn apply_block(&self, x: &Array2<f64>) -> Array2<f64>;

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let x = Array2::from_shape_vec((v.len(), 1), v.to_vec()).expect("column vector");
        self.apply_block(&x).into_raw_vec_and_offset().0
    }
}

impl SymmetricOperator for Array2<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_block(&self, x: &Array2<f64>) -> Array2<f64> {
        self.dot(x)
    }
}

/// Square sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// From `(i, j, v)` triples sorted by `(i, j)` without duplicates.
    pub fn from_sorted_triples(n: usize, triples: impl IntoIterator<Item = (u32, u32, f64)>) -> Result<Self> {
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for (i, j, v) in triples {
            if i as usize >= n || j as usize >= n {
                return Err(Error::InvalidArgument(format!("entry ({i}, {j}) outside n={n}")));
            }
            if last.is_some_and(|l| l >= (i, j)) {
                return Err(Error::InvalidArgument("triples must be strictly sorted by (i, j)".into()));
            }
            last = Some((i, j));
            row_ptr[i as usize + 1] += 1;
            cols.push(j);
            vals.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { n, row_ptr, cols, vals })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.vals
    }

    /// `(j, v)` entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn triples(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i as u32, j, v)))
    }

    pub fn get(&self, i: u32, j: u32) -> Option<f64> {
        let r = self.row_ptr[i as usize]..self.row_ptr[i as usize + 1];
        self.cols[r.clone()].binary_search(&j).ok().map(|k| self.vals[r.start + k])
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for (i, j, v) in self.triples() {
            a[[i as usize, j as usize]] = v;
        }
        a
    }

    pub fn is_symmetric(&self) -> bool {
        self.triples().all(|(i, j, v)| self.get(j, i) == Some(v))
    }
}

impl SymmetricOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_block(&self, x: &Array2<f64>) -> Array2<f64> {
        let m = x.ncols();
        let x = x.as_standard_layout();
        let xs = x.as_slice().expect("standard layout");
        let mut out = vec![0.0; self.n * m];
        out.par_chunks_mut(m.max(1)).enumerate().for_each(|(i, y)| {
            for (j, v) in self.row(i) {
                let xr = &xs[j as usize * m..(j as usize + 1) * m];
                for (yk, xk) in y.iter_mut().zip(xr) {
                    *yk += v * xk;
                }
            }
        });
        Array2::from_shape_vec((self.n, m), out).expect("shape")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvdOptions {
    /// Number of singular triplets to return.
    pub dim: usize,
    /// Subspace iteration budget.
    pub max_iters: usize,
    /// Extra subspace columns beyond `dim`.
    pub oversample: usize,
    /// Relative residual target `‖A u − λ u‖ ≤ tol · σ₁`.
    pub tol: f64,
    pub seed: u64,
}

impl SvdOptions {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            max_iters: 100,
            oversample: 10,
            tol: 1e-6,
            seed,
        }
    }
}

/// Leading singular triplets of a symmetric operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// `n × d`, orthonormal columns.
    pub u: Array2<f64>,
    /// Singular values `|λ_k|`, non-increasing.
    pub sigma: Vec<f64>,
    /// Signed eigenvalues matching `sigma`.
    pub eigenvalues: Vec<f64>,
    /// Final `‖A u_k − λ_k u_k‖`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    let (n, m) = a.dim();
    let a = a.as_standard_layout();
    DMatrix::from_row_slice(n, m, a.as_slice().expect("standard layout"))
}

fn from_nalgebra(a: &DMatrix<f64>) -> Array2<f64> {
    let (n, m) = a.shape();
    Array2::from_shape_vec((n, m).f(), a.as_slice().to_vec())
        .expect("shape")
        .as_standard_layout()
        .into_owned()
}

/// Orthonormal basis of the column span (thin Householder QR).
pub fn orthonormalize(y: &Array2<f64>) -> Array2<f64> {
    from_nalgebra(&to_nalgebra(y).qr().q())
}

/// Flips each column so its largest-magnitude entry is positive.
pub fn fix_signs(u: &mut Array2<f64>) {
    for mut col in u.columns_mut() {
        let mut best = 0.0f64;
        for &v in col.iter() {
            if v.abs() > best.abs() {
                best = v;
            }
        }
        if best < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}

/// Leading-`dim` singular triplets of a symmetric operator. Eigenpairs are
/// ranked by `|λ|`; singular values are `|λ|`. Fails with
/// [`Error::Convergence`] if the residual target is not met in budget.
pub fn truncated_svd<A: SymmetricOperator + ?Sized>(op: &A, opts: &SvdOptions) -> Result<SvdResult> {
    let n = op.dim();
    let d = opts.dim;
    if d == 0 || d > n {
        return Err(Error::InvalidArgument(format!("need 1 <= d <= n, got d={d}, n={n}")));
    }
    let k = (d + opts.oversample).min(n);
    let mut rng = rng_from_seed(opts.seed);
    let omega = Array2::from_shape_simple_fn((n, k), || StandardNormal.sample(&mut rng));
    let mut q = orthonormalize(&op.apply_block(&omega));

    let mut last = None;
    for it in 1..=opts.max_iters.max(1) {
        let z = op.apply_block(&q);
        let mut t = to_nalgebra(&q.t().dot(&z));
        t = (&t + t.transpose()) * 0.5;
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .abs()
                .total_cmp(&eig.eigenvalues[a].abs())
                .then(a.cmp(&b))
        });
        let lambda: Vec<f64> = order[..d].iter().map(|&i| eig.eigenvalues[i]).collect();
        let s = Array2::from_shape_fn((k, d), |(r, c)| eig.eigenvectors[(r, order[c])]);
        let u = q.dot(&s);
        let au = z.dot(&s);
        let residuals: Vec<f64> = (0..d)
            .map(|c| {
                au.column(c)
                    .iter()
                    .zip(u.column(c))
                    .map(|(a, b)| (a - lambda[c] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let sigma1 = lambda[0].abs();
        let converged = residuals.iter().all(|&r| r <= opts.tol * sigma1.max(f64::MIN_POSITIVE));
        last = Some((u, lambda, residuals, it));
        if converged {
            break;
        }
        q = orthonormalize(&z);
    }
    let (mut u, lambda, residuals, iterations) = last.expect("at least one iteration");
    let sigma1 = lambda[0].abs();
    if residuals.iter().any(|&r| r > opts.tol * sigma1.max(f64::MIN_POSITIVE)) {
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        return Err(Error::Convergence(format!(
            "truncated SVD residual {worst:.3e} > {:.1e} * sigma_1 ({sigma1:.3e}) after {iterations} iterations",
            opts.tol
        )));
    }
    fix_signs(&mut u);
    Ok(SvdResult {
        u,
        sigma: lambda.iter().map(|l| l.abs()).collect(),
        eigenvalues: lambda,
        residuals,
        iterations,
    })
}

/// Row `i` is `U_{i,1:d}` scaled columnwise by `sqrt(σ_k)`.
pub fn embeddings_from_svd(svd: &SvdResult) -> Result<EmbeddingMatrix> {
    let scale: Vec<f64> = svd.sigma.iter().map(|s| s.max(0.0).sqrt()).collect();
    let mut w = svd.u.clone();
    for (mut col, s) in w.columns_mut().into_iter().zip(&scale) {
        col *= *s;
    }
    EmbeddingMatrix::with_index_labels(w)
}
