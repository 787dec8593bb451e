//! Unsupervised alignment of two embedding sets under an unknown orthogonal
//! map `Q` and permutation `P`, minimizing `‖W_A Q − P W_B‖²`.

mod assignment;

pub use assignment::{
    assignment_cost, hungarian, sinkhorn_assignment, solve_assignment, squared_distances, EXACT_LIMIT,
};

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, substream_seed};

const REFINE_ROUNDS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentConfig {
    pub batch_size: usize,
    pub epochs: usize,
    /// Weight of the matched cross-covariance in each `Q` update; large
    /// values approach a plain Procrustes step on the matched batch.
    pub step_size: f64,
    /// Relative entropic regularization for batches above [`EXACT_LIMIT`].
    pub entropic_reg: f64,
    /// Largest `n` matched in one exact pass at the end; bigger inputs are
    /// matched in blocks of this size.
    pub final_block: usize,
    pub seed: u64,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        Self {
            batch_size: 256,
            epochs: 5,
            step_size: 10.0,
            entropic_reg: 0.05,
            final_block: 2000,
            seed: 0,
        }
    }
}

impl AlignmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(Error::InvalidArgument("alignment batch_size must be >= 2".into()));
        }
        if self.epochs < 1 {
            return Err(Error::InvalidArgument("alignment epochs must be >= 1".into()));
        }
        if !(self.step_size > 0.0) || !(self.entropic_reg > 0.0) {
            return Err(Error::InvalidArgument("alignment step_size and entropic_reg must be > 0".into()));
        }
        if self.final_block < 2 {
            return Err(Error::InvalidArgument("alignment final_block must be >= 2".into()));
        }
        Ok(())
    }
}

/// Centering and scaling applied before alignment: `(x − mean) / scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub mean: Array1<f64>,
    pub scale: f64,
}

impl Normalization {
    /// Centers rows and scales so the mean squared row norm is 1.
    pub fn fit(x: ArrayView2<'_, f64>) -> Self {
        let mean = x.mean_axis(Axis(0)).expect("non-empty");
        let centered = &x - &mean;
        let ms = centered.iter().map(|v| v * v).sum::<f64>() / x.nrows() as f64;
        Self {
            mean,
            scale: if ms > 0.0 { ms.sqrt() } else { 1.0 },
        }
    }

    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        (&x - &self.mean) / self.scale
    }

    pub fn invert(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        &(&x * self.scale) + &self.mean
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    /// `d × d` orthogonal map acting on normalized `W_A` rows.
    pub q: Array2<f64>,
    /// `perm[i]` is the `W_B` row matched to word `i`.
    pub perm: Vec<usize>,
    /// `‖Â Q − P B̂‖²` on the normalized matrices.
    pub loss: f64,
    /// Mean per-row batch loss of each epoch.
    pub history: Vec<f64>,
    pub norm_a: Normalization,
    pub norm_b: Normalization,
}

impl AlignmentResult {
    /// Recomputes `‖Â Q − P B̂‖²` from the raw inputs.
    pub fn objective(&self, wa: &EmbeddingMatrix, wb: &EmbeddingMatrix) -> f64 {
        let a = self.norm_a.apply(wa.data().view()).dot(&self.q);
        let b = self.norm_b.apply(wb.data().view());
        objective(a.view(), b.view(), &self.perm)
    }

    /// Largest entry of `|QᵀQ − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        orthogonality_error(self.q.view())
    }

    /// `Q` row-major, one row per line.
    pub fn write_q<W: Write>(&self, mut w: W) -> Result<()> {
        for row in self.q.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// `i<TAB>perm[i]` rows.
    pub fn write_perm<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, p) in self.perm.iter().enumerate() {
            writeln!(w, "{i}\t{p}")?;
        }
        Ok(())
    }

    /// CSV `epoch,loss`.
    pub fn write_history<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "epoch,loss")?;
        for (e, l) in self.history.iter().enumerate() {
            writeln!(w, "{},{l}", e + 1)?;
        }
        Ok(())
    }
}

pub fn orthogonality_error(q: ArrayView2<'_, f64>) -> f64 {
    let g = q.t().dot(&q);
    g.indexed_iter()
        .map(|((i, j), v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max)
}

/// `Σ_i ‖a_i − b_perm[i]‖²`.
pub fn objective(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>, perm: &[usize]) -> f64 {
    perm.iter()
        .enumerate()
        .map(|(i, &j)| {
            a.row(i)
                .iter()
                .zip(b.row(j))
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum()
}

fn to_na(a: ArrayView2<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn from_na(a: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn(a.shape(), |(i, j)| a[(i, j)])
}

/// Orthogonal polar factor `U Vᵀ` of `m = U S Vᵀ`; never fails.
fn polar(m: ArrayView2<'_, f64>) -> Array2<f64> {
    let svd = to_na(m).svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    from_na(&(u * vt))
}

/// `argmin_{Q orthogonal} ‖X Q − Y‖²`, i.e. the polar factor of `XᵀY`.
pub fn procrustes(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", x.dim(), y.dim())));
    }
    let m = x.t().dot(&y);
    let sv = to_na(m.view()).singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if !(smax > 0.0) || smin <= 1e-12 * smax {
        return Err(Error::Degenerate(format!(
            "cross-covariance is rank deficient (sigma_min={smin:.3e}, sigma_max={smax:.3e})"
        )));
    }
    Ok(polar(m.view()))
}

/// Principal axes (eigenvectors of `XᵀX`, descending eigenvalue) and the
/// sign of the third moment of the data along each axis.
fn principal_axes(x: ArrayView2<'_, f64>) -> (Array2<f64>, Vec<f64>) {
    let d = x.ncols();
    let eig = SymmetricEigen::new(to_na(x.t().dot(&x).view()));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let v = Array2::from_shape_fn((d, d), |(r, c)| eig.eigenvectors[(r, order[c])]);
    let proj = x.dot(&v);
    let skew = proj
        .columns()
        .into_iter()
        .map(|c| c.iter().map(|t| t * t * t).sum::<f64>())
        .collect();
    (v, skew)
}

/// Initial `Q` mapping the principal axes of `B̂` onto those of `Â`, with
/// each axis oriented so the third moments agree. Both quantities are
/// invariant under row permutations.
fn moment_matching_init(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    let (va, ska) = principal_axes(a);
    let (vb, skb) = principal_axes(b);
    let d = a.ncols();
    let mut q = Array2::zeros((d, d));
    for k in 0..d {
        let s = if ska[k] * skb[k] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..d {
            for c in 0..d {
                q[[r, c]] += s * va[[r, k]] * vb[[c, k]];
            }
        }
    }
    q
}

/// Cosine costs `1 − cos(x_i, y_j)`.
fn cosine_costs(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> Array2<f64> {
    let norm = |m: ArrayView2<'_, f64>| -> Array2<f64> {
        let mut out = m.to_owned();
        for mut r in out.rows_mut() {
            let n = r.dot(&r).sqrt();
            if n > 0.0 {
                r /= n;
            }
        }
        out
    };
    norm(x).dot(&norm(y).t()).mapv(|c| 1.0 - c)
}

/// Exact matching of all rows, in blocks of at most `block` rows when the
/// input is large. Blocks pair rows ranked by their first coordinate.
fn final_matching(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>, block: usize) -> Vec<usize> {
    let n = x.nrows();
    if n <= block {
        return hungarian(cosine_costs(x, y).view());
    }
    let rank = |m: ArrayView2<'_, f64>| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| m[[a, 0]].total_cmp(&m[[b, 0]]).then(a.cmp(&b)));
        idx
    };
    let (rx, ry) = (rank(x), rank(y));
    let mut perm = vec![0usize; n];
    let blocks = n.div_ceil(block);
    for b in 0..blocks {
        let lo = b * n / blocks;
        let hi = (b + 1) * n / blocks;
        let xs = x.select(Axis(0), &rx[lo..hi]);
        let ys = y.select(Axis(0), &ry[lo..hi]);
        let p = hungarian(cosine_costs(xs.view(), ys.view()).view());
        for (i, &j) in p.iter().enumerate() {
            perm[rx[lo + i]] = ry[lo + j];
        }
    }
    perm
}

/// Stochastic alternating minimization over `Q` and `P`:
///
/// 1. center and scale both sets;
/// 2. initialize `Q` by matching principal axes;
/// 3. each step draws a batch from each side, matches them, and moves `Q`
///    towards the Procrustes solution of the matched pairs;
/// 4. exact matching on all rows alternates with full Procrustes until the
///    matching is stable; the last matching defines `P`.
pub fn align(wa: &EmbeddingMatrix, wb: &EmbeddingMatrix, cfg: &AlignmentConfig) -> Result<AlignmentResult> {
    cfg.validate()?;
    if wa.n() != wb.n() || wa.dim() != wb.dim() {
        return Err(Error::DimensionMismatch(format!(
            "W_A is {}x{}, W_B is {}x{}",
            wa.n(),
            wa.dim(),
            wb.n(),
            wb.dim()
        )));
    }
    let n = wa.n();
    if n < 2 {
        return Err(Error::InvalidArgument("alignment needs at least 2 rows".into()));
    }
    let norm_a = Normalization::fit(wa.data().view());
    let norm_b = Normalization::fit(wb.data().view());
    let a = norm_a.apply(wa.data().view());
    let b = norm_b.apply(wb.data().view());

    let mut q = moment_matching_init(a.view(), b.view());
    let m = cfg.batch_size.min(n);
    let steps = n.div_ceil(m).max(1);
    let mut rng = rng_from_seed(substream_seed(cfg.seed, "align.batches"));
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        for _ in 0..steps {
            let ia = sample(&mut rng, n, m).into_vec();
            let ib = sample(&mut rng, n, m).into_vec();
            let xa = a.select(Axis(0), &ia).dot(&q);
            let yb = b.select(Axis(0), &ib);
            let pi = solve_assignment(xa.view(), yb.view(), cfg.entropic_reg)?;
            epoch_loss += objective(xa.view(), yb.view(), &pi) / m as f64;
            let matched = yb.select(Axis(0), &pi);
            let g = a.select(Axis(0), &ia).t().dot(&matched) / m as f64;
            q = polar((&q + &(g * cfg.step_size)).view());
        }
        history.push(epoch_loss / steps as f64);
    }
    let mut prev: Option<Vec<usize>> = None;
    let mut perm = Vec::new();
    for _ in 0..REFINE_ROUNDS {
        perm = final_matching(a.dot(&q).view(), b.view(), cfg.final_block);
        if prev.as_ref() == Some(&perm) {
            break;
        }
        q = polar(a.t().dot(&b.select(Axis(0), &perm)).view());
        prev = Some(perm.clone());
    }
    if prev.as_ref() != Some(&perm) {
        perm = final_matching(a.dot(&q).view(), b.view(), cfg.final_block);
    }
    let aq = a.dot(&q);
    let loss = objective(aq.view(), b.view(), &perm);
    Ok(AlignmentResult {
        q,
        perm,
        loss,
        history,
        norm_a,
        norm_b,
    })
}

/// `P W_B`: row `i` is `W_B` row `perm[i]`, labelled with `labels[i]`.
pub fn apply_alignment(wb: &EmbeddingMatrix, result: &AlignmentResult, labels: Vec<String>) -> Result<EmbeddingMatrix> {
    if result.perm.len() != wb.n() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of size {} for {} rows",
            result.perm.len(),
            wb.n()
        )));
    }
    let data = wb.data().select(Axis(0), &result.perm);
    EmbeddingMatrix::new(labels, data)
}

/// i.i.d. standard normal `n × d` matrix.
pub fn random_baseline(n: usize, d: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("random baseline needs n, d >= 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let data = Array2::from_shape_simple_fn((n, d), || StandardNormal.sample(&mut rng));
    EmbeddingMatrix::with_index_labels(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::f64::consts::PI;

    #[test]
    fn procrustes_identity() {
        let x = array![[1.0, 2.0], [3.0, -1.0], [0.5, 0.5]];
        let q = procrustes(x.view(), x.view()).unwrap();
        assert!((q - Array2::<f64>::eye(2)).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn procrustes_negation_matches_enumeration() {
        let x = array![[1.0, 0.0], [0.0, 1.0]];
        let y = -&x;
        let q = procrustes(x.view(), y.view()).unwrap();
        // Brute force over rotations and reflections of the plane.
        let mut best = (f64::INFINITY, Array2::zeros((2, 2)));
        for k in 0..3600 {
            let t = 2.0 * PI * k as f64 / 3600.0;
            let (c, s) = (t.cos(), t.sin());
            for cand in [array![[c, -s], [s, c]], array![[c, s], [s, -c]]] {
                let loss: f64 = (x.dot(&cand) - &y).iter().map(|v| v * v).sum();
                if loss < best.0 {
                    best = (loss, cand);
                }
            }
        }
        assert!((&q - &best.1).iter().all(|v| v.abs() < 1e-3));
        assert!((q + Array2::<f64>::eye(2)).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn procrustes_degenerate() {
        let x = array![[1.0, 0.0], [2.0, 0.0]];
        assert!(matches!(procrustes(x.view(), x.view()), Err(Error::Degenerate(_))));
        assert!(procrustes(x.view(), Array2::zeros((3, 2)).view()).is_err());
    }

    #[test]
    fn apply_alignment_permutes_rows() {
        let wb = EmbeddingMatrix::with_index_labels(array![[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let mut res = AlignmentResult {
            q: Array2::eye(2),
            perm: vec![0, 1],
            loss: 0.0,
            history: vec![],
            norm_a: Normalization::fit(wb.data().view()),
            norm_b: Normalization::fit(wb.data().view()),
        };
        let labels = vec!["x".to_string(), "y".to_string()];
        assert_eq!(apply_alignment(&wb, &res, labels.clone()).unwrap().data(), wb.data());
        res.perm = vec![1, 0];
        let out = apply_alignment(&wb, &res, labels).unwrap();
        assert_eq!(out.data(), &array![[3.0, 4.0], [1.0, 2.0]]);
        assert_eq!(out.labels()[0], "x");
    }

    #[test]
    fn random_baseline_moments_and_reproducibility() {
        let e = random_baseline(10_000, 100, 42).unwrap();
        let n = 1e6;
        let mean = e.data().sum() / n;
        let var = e.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
        assert_eq!(random_baseline(50, 3, 42).unwrap(), random_baseline(50, 3, 42).unwrap());
        assert!(random_baseline(0, 3, 1).is_err());
    }

    #[test]
    fn identical_inputs_align_trivially() {
        let w = random_baseline(300, 8, 7).unwrap();
        let scaled = EmbeddingMatrix::with_index_labels(w.data() * Array1::from_iter((1..=8).map(|k| 1.0 / k as f64))).unwrap();
        let res = align(&scaled, &scaled, &AlignmentConfig::default()).unwrap();
        assert!(res.perm.iter().enumerate().all(|(i, &p)| i == p));
        assert!((&res.q - &Array2::<f64>::eye(8)).iter().all(|v| v.abs() < 1e-6));
        assert!(res.loss < 1e-12);
        assert!((res.objective(&scaled, &scaled) - res.loss).abs() < 1e-9);
    }

    fn random_rotation(d: usize, seed: u64) -> Array2<f64> {
        let g = random_baseline(d, d, seed).unwrap().into_data();
        let skew = (&g - &g.t()) * 0.5;
        from_na(&to_na(skew.view()).exp())
    }

    #[test]
    fn procrustes_recovers_rotation() {
        let x = random_baseline(40, 6, 3).unwrap().into_data();
        let q_star = random_rotation(6, 4);
        assert!(orthogonality_error(q_star.view()) < 1e-10);
        let q = procrustes(x.view(), x.dot(&q_star).view()).unwrap();
        assert!((&q - &q_star).iter().all(|v| v.abs() < 1e-8));
    }

    /// `W_B = P*ᵀ (W_A Q*) + noise`, with anisotropic `W_A` as produced by
    /// a truncated spectral embedding.
    fn planted(n: usize, d: usize, noise: f64, seed: u64) -> (EmbeddingMatrix, EmbeddingMatrix, Vec<usize>) {
        let scales = Array1::from_iter((0..d).map(|k| 1.0 / (1.0 + k as f64).sqrt()));
        let wa = random_baseline(n, d, seed).unwrap().into_data() * &scales;
        let q_star = random_rotation(d, seed + 1);
        let mut rng = rng_from_seed(seed + 2);
        let truth = sample(&mut rng, n, n).into_vec();
        let rotated = wa.dot(&q_star);
        let mut wb = Array2::zeros((n, d));
        for (i, &j) in truth.iter().enumerate() {
            wb.row_mut(j).assign(&rotated.row(i));
        }
        if noise > 0.0 {
            let e = random_baseline(n, d, seed + 3).unwrap().into_data();
            let fa = wa.iter().map(|v| v * v).sum::<f64>().sqrt();
            let fe = e.iter().map(|v| v * v).sum::<f64>().sqrt();
            wb = wb + e * (noise * fa / fe);
        }
        (
            EmbeddingMatrix::with_index_labels(wa).unwrap(),
            EmbeddingMatrix::with_index_labels(wb).unwrap(),
            truth,
        )
    }

    fn recovery(perm: &[usize], truth: &[usize]) -> f64 {
        perm.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / perm.len() as f64
    }

    #[test]
    fn planted_recovery_noiseless() {
        let (wa, wb, truth) = planted(1000, 32, 0.0, 11);
        let res = align(&wa, &wb, &AlignmentConfig::default()).unwrap();
        let rec = recovery(&res.perm, &truth);
        assert!(rec >= 0.95, "recovery {rec}");
        assert!(res.orthogonality_error() < 1e-6);
        // Normalized rows have unit mean square, so ‖Â‖² = n.
        assert!(res.loss < 1e-3 * wa.n() as f64, "loss {}", res.loss);
        assert!((res.objective(&wa, &wb) - res.loss).abs() < 1e-9);
    }

    #[test]
    fn planted_recovery_with_noise() {
        let (wa, wb, truth) = planted(1000, 32, 0.01, 21);
        let res = align(&wa, &wb, &AlignmentConfig::default()).unwrap();
        let rec = recovery(&res.perm, &truth);
        assert!(rec >= 0.80, "recovery {rec}");
        assert!(res.orthogonality_error() < 1e-6);
    }

    #[test]
    fn align_rejects_mismatch() {
        let a = random_baseline(10, 3, 1).unwrap();
        let b = random_baseline(11, 3, 1).unwrap();
        assert!(matches!(align(&a, &b, &AlignmentConfig::default()), Err(Error::DimensionMismatch(_))));
    }
}
