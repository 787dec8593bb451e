//! Random hyperbolic graphs and their connection-probability operator.

use std::io::Write;

use ndarray::{s, Array2};
use rayon::prelude::*;

use super::{calibrate, edge_probability, hyperbolic_distance, sample_points, DiskConfig, PolarPoint};
use crate::error::{Error, Result};
use crate::rng::{pair_uniform, substream_seed};
use crate::spectral::SymmetricOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhgParams {
    pub n: usize,
    /// Target mean degree.
    pub kbar: f64,
    /// Target power-law exponent of the degree distribution.
    pub gamma: f64,
    pub seed: u64,
}

impl RhgParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("RHG needs n >= 2, got {}", self.n)));
        }
        if !(self.gamma > 2.0) {
            return Err(Error::InvalidArgument(format!("RHG needs gamma > 2, got {}", self.gamma)));
        }
        if !(self.kbar > 0.0 && self.kbar < (self.n - 1) as f64) {
            return Err(Error::InvalidArgument(format!(
                "RHG needs 0 < kbar < n - 1, got {} for n={}",
                self.kbar, self.n
            )));
        }
        Ok(())
    }
}

/// Sampled points plus one Bernoulli realization of the edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhg {
    pub config: DiskConfig,
    pub points: Vec<PolarPoint>,
    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(u32, u32)>,
}

impl Rhg {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n()];
        for &(i, j) in &self.edges {
            adj[i as usize].push(j);
            adj[j as usize].push(i);
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        adj
    }

    /// Edge list, one `i j` per line.
    pub fn write_edges<W: Write>(&self, mut w: W) -> Result<()> {
        for &(i, j) in &self.edges {
            writeln!(w, "{i} {j}")?;
        }
        Ok(())
    }
}

/// Realizes each unordered pair as an edge with probability `σ(R − x_ij)`.
/// The draw for `(i, j)` depends only on `(seed, i, j)`.
pub fn realize_edges(radius: f64, points: &[PolarPoint], seed: u64) -> Vec<(u32, u32)> {
    let n = points.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let p = points[i];
            ((i + 1)..n)
                .filter(|&j| pair_uniform(seed, i as u64, j as u64) < edge_probability(hyperbolic_distance(p, points[j]), radius))
                .map(|j| (i as u32, j as u32))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Calibrates the disk, samples points and realizes edges.
pub fn generate_rhg(params: &RhgParams) -> Result<Rhg> {
    let config = calibrate(params)?;
    Ok(generate_with_config(config, params.n, params.seed))
}

/// Points and edges for an already calibrated disk.
pub fn generate_with_config(config: DiskConfig, n: usize, seed: u64) -> Rhg {
    let points = sample_points(&config, n, substream_seed(seed, "rhg.points"));
    let edges = realize_edges(config.radius, &points, substream_seed(seed, "rhg.edges"));
    Rhg { config, points, edges }
}

/// The connection-probability matrix `B_ij = σ(R − x_ij)` as a matrix-free
/// operator. The diagonal is `σ(R)`.
#[derive(Debug, Clone)]
pub struct ConnectionOperator {
    radius: f64,
    exp_neg_r: f64,
    cosh_r: Vec<f64>,
    sinh_r: Vec<f64>,
    cos_t: Vec<f64>,
    sin_t: Vec<f64>,
}

const TILE: usize = 256;

impl ConnectionOperator {
    pub fn new(points: &[PolarPoint], radius: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("connection operator needs at least one point".into()));
        }
        Ok(Self {
            radius,
            exp_neg_r: (-radius).exp(),
            cosh_r: points.iter().map(|p| p.r.cosh()).collect(),
            sinh_r: points.iter().map(|p| p.r.sinh()).collect(),
            cos_t: points.iter().map(|p| p.theta.cos()).collect(),
            sin_t: points.iter().map(|p| p.theta.sin()).collect(),
        })
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return crate::math::sigmoid(self.radius);
        }
        let cos_dt = self.cos_t[i] * self.cos_t[j] + self.sin_t[i] * self.sin_t[j];
        let z = (self.cosh_r[i] * self.cosh_r[j] - self.sinh_r[i] * self.sinh_r[j] * cos_dt).max(1.0);
        // e^{x} = z + sqrt(z² − 1), σ(R − x) = 1 / (1 + e^{x − R})
        1.0 / (1.0 + (z + (z * z - 1.0).sqrt()) * self.exp_neg_r)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.cosh_r.len();
        Array2::from_shape_fn((n, n), |(i, j)| self.entry(i, j))
    }
}

impl SymmetricOperator for ConnectionOperator {
    fn dim(&self) -> usize {
        self.cosh_r.len()
    }

    fn apply_block(&self, x: &Array2<f64>) -> Array2<f64> {
        let n = self.dim();
        let m = x.ncols();
        let row_tiles: Vec<usize> = (0..n).step_by(TILE).collect();
        let parts: Vec<Array2<f64>> = row_tiles
            .par_iter()
            .map(|&i0| {
                let i1 = (i0 + TILE).min(n);
                let mut y = Array2::<f64>::zeros((i1 - i0, m));
                let mut tile = Array2::<f64>::zeros((i1 - i0, TILE));
                for j0 in (0..n).step_by(TILE) {
                    let j1 = (j0 + TILE).min(n);
                    let mut t = tile.slice_mut(s![.., ..j1 - j0]);
                    for (a, mut row) in t.rows_mut().into_iter().enumerate() {
                        for (b, v) in row.iter_mut().enumerate() {
                            *v = self.entry(i0 + a, j0 + b);
                        }
                    }
                    y += &t.dot(&x.slice(s![j0..j1, ..]));
                }
                y
            })
            .collect();
        let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
        ndarray::concatenate(ndarray::Axis(0), &views).expect("row tiles")
    }
}
