//! The native model of the hyperbolic plane (curvature −1): a disk of radius
//! `R` in polar coordinates whose radial coordinate is the hyperbolic
//! distance to the origin.

mod calibrate;
mod pdf;
mod rhg;
mod stats;

pub use calibrate::{calibrate, expected_degree};
pub use pdf::{DensityForm, DistancePdf};
pub use rhg::{generate_rhg, realize_edges, ConnectionOperator, Rhg, RhgParams};
pub use stats::{fit_power_law, graph_stats, GraphStats, PowerLawFit};

use std::f64::consts::TAU;
use std::io::{BufRead, BufReader, Read, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::math::sigmoid;
use crate::rng::rng_from_seed;

/// Disk radius `R` and radial density exponent `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskConfig {
    pub radius: f64,
    pub alpha: f64,
}

impl DiskConfig {
    pub fn new(radius: f64, alpha: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "disk needs R > 0 and alpha > 0, got R={radius}, alpha={alpha}"
            )));
        }
        Ok(Self { radius, alpha })
    }

    /// `ρ(r) = α sinh(αr) / (cosh(αR) − 1)` on `[0, R]`.
    pub fn radial_density(&self, r: f64) -> f64 {
        if !(0.0..=self.radius).contains(&r) {
            return 0.0;
        }
        self.alpha * (self.alpha * r).sinh() / self.norm()
    }

    /// `(cosh(αr) − 1) / (cosh(αR) − 1)`.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, self.radius);
        cosh_m1(self.alpha * r) / self.norm()
    }

    fn norm(&self) -> f64 {
        cosh_m1(self.alpha * self.radius)
    }
}

/// `cosh(x) − 1` without cancellation for small `x`.
#[inline]
fn cosh_m1(x: f64) -> f64 {
    let s = (0.5 * x).sinh();
    2.0 * s * s
}

/// A point `(r, θ)` of the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        Self { r, theta }
    }
}

/// Hyperbolic law of cosines,
/// `cosh x = cosh r cosh r' − sinh r sinh r' cos(θ − θ')`, evaluated in the
/// equivalent form `cosh(r − r') + 2 sinh r sinh r' sin²((θ − θ')/2)`,
/// which has no cancellation. The argument of `arcosh` is clamped at 1.
pub fn hyperbolic_distance(p: PolarPoint, q: PolarPoint) -> f64 {
    let half = 0.5 * (p.theta - q.theta);
    let s = half.sin();
    let z = (p.r - q.r).cosh() + 2.0 * p.r.sinh() * q.r.sinh() * s * s;
    z.max(1.0).acosh()
}

/// Inverse CDF of `ρ`: `r = arcosh(1 + u (cosh(αR) − 1)) / α`.
pub fn sample_radius(config: &DiskConfig, u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let arg = 1.0 + u * config.norm();
    (arg.acosh() / config.alpha).clamp(0.0, config.radius)
}

/// `n` i.i.d. points: `θ ~ U[0, 2π)`, `r ~ ρ`.
pub fn sample_points(config: &DiskConfig, n: usize, seed: u64) -> Vec<PolarPoint> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| {
            let mut theta = TAU * rng.random::<f64>();
            if theta >= TAU {
                theta = 0.0;
            }
            let r = sample_radius(config, rng.random::<f64>());
            PolarPoint { r, theta }
        })
        .collect()
}

/// `σ(R − x)`.
#[inline]
pub fn edge_probability(x: f64, radius: f64) -> f64 {
    sigmoid(radius - x)
}

/// Draws `samples` independent point pairs and returns their `R − x` values.
pub fn r_minus_x_samples(config: &DiskConfig, samples: usize, seed: u64) -> Vec<f64> {
    let pts = sample_points(config, 2 * samples, seed);
    pts.chunks_exact(2)
        .map(|pq| config.radius - hyperbolic_distance(pq[0], pq[1]))
        .collect()
}

/// Histogram of `R − x` over sampled pairs.
pub fn r_minus_x_histogram(config: &DiskConfig, samples: usize, bins: usize, seed: u64) -> Result<Histogram> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    Histogram::from_values(&r_minus_x_samples(config, samples, seed), bins)
}

/// Writes points with a header `n R alpha seed` and rows `id r theta`.
pub fn write_points<W: Write>(mut w: W, config: &DiskConfig, points: &[PolarPoint], seed: u64) -> Result<()> {
    writeln!(w, "{} {} {} {}", points.len(), config.radius, config.alpha, seed)?;
    for (i, p) in points.iter().enumerate() {
        writeln!(w, "{i} {} {}", p.r, p.theta)?;
    }
    Ok(())
}

pub fn read_points<R: Read>(r: R, path: &str) -> Result<(DiskConfig, Vec<PolarPoint>, u64)> {
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().ok_or_else(|| Error::parse(path, 1, "missing header"))??;
    let h: Vec<&str> = header.split_whitespace().collect();
    let [n, radius, alpha, seed] = h.as_slice() else {
        return Err(Error::parse(path, 1, "expected 'n R alpha seed'"));
    };
    let bad = |what: &str| Error::parse(path, 1, format!("bad {what}"));
    let n: usize = n.parse().map_err(|_| bad("n"))?;
    let config = DiskConfig::new(radius.parse().map_err(|_| bad("R"))?, alpha.parse().map_err(|_| bad("alpha"))?)?;
    let seed: u64 = seed.parse().map_err(|_| bad("seed"))?;
    let mut points = Vec::with_capacity(n);
    for (k, line) in lines.enumerate() {
        let line = line?;
        let lineno = k + 2;
        let f: Vec<&str> = line.split_whitespace().collect();
        let [id, r, t] = f.as_slice() else {
            return Err(Error::parse(path, lineno, "expected 'id r theta'"));
        };
        if id.parse::<usize>().ok() != Some(points.len()) {
            return Err(Error::parse(path, lineno, "ids must be consecutive from 0"));
        }
        let r: f64 = r.parse().map_err(|_| Error::parse(path, lineno, "bad r"))?;
        let t: f64 = t.parse().map_err(|_| Error::parse(path, lineno, "bad theta"))?;
        points.push(PolarPoint::new(r, t));
    }
    if points.len() != n {
        return Err(Error::parse(path, 0, format!("header says {n} points, found {}", points.len())));
    }
    Ok((config, points, seed))
}
