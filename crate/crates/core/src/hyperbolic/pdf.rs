//! Density of the distance `X` between two independent random points of the
//! disk, by two-dimensional quadrature over the radii.

use std::f64::consts::PI;

use super::DiskConfig;
use crate::error::{Error, Result};
use crate::math::{gauss_legendre, SineMappedRule};

/// Form of the angular factor in the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityForm {
    /// `1 / sqrt(1 − A²)`: the derivative of `arcsin A`. Validated against
    /// sampled distances.
    ArcsinDerivative,
    /// `1 / sqrt(1 − A)`. Kept only to demonstrate that it does not describe
    /// sampled distances.
    SqrtOneMinusA,
}

/// `f_X(x) = ∫∫ sinh(x) ρ(r₁) ρ(r₂) / (π sqrt(1 − A²) sinh r₁ sinh r₂) dr₁ dr₂`
/// with `A = (cosh r₁ cosh r₂ − cosh x) / (sinh r₁ sinh r₂)`, restricted to
/// `|r₁ − r₂| < x < r₁ + r₂`.
#[derive(Debug, Clone)]
pub struct DistancePdf {
    config: DiskConfig,
    form: DensityForm,
    outer: SineMappedRule,
    inner: SineMappedRule,
}

/// Default per-axis resolution: Gauss–Legendre nodes and panels.
pub const DEFAULT_NODES: usize = 24;
pub const DEFAULT_PANELS: usize = 2;

impl DistancePdf {
    pub fn new(config: DiskConfig) -> Self {
        Self::with_resolution(config, DEFAULT_NODES, DEFAULT_PANELS, DensityForm::ArcsinDerivative)
    }

    pub fn with_resolution(config: DiskConfig, nodes: usize, panels: usize, form: DensityForm) -> Self {
        Self {
            config,
            form,
            outer: SineMappedRule::new(nodes, panels),
            inner: SineMappedRule::new(nodes, panels),
        }
    }

    pub fn config(&self) -> &DiskConfig {
        &self.config
    }

    /// Density at `x > 0`; zero beyond `2R`.
    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("distance density needs x > 0, got {x}")));
        }
        Ok(self.density_unchecked(x))
    }

    fn density_unchecked(&self, x: f64) -> f64 {
        let big_r = self.config.radius;
        if x >= 2.0 * big_r {
            return 0.0;
        }
        let lo = (x - big_r).max(0.0);
        let mut cuts = vec![lo, big_r];
        for b in [x, big_r - x] {
            if b > lo && b < big_r {
                cuts.push(b);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let alpha = self.config.alpha;
        let norm = super::cosh_m1(alpha * big_r);
        let weight = |r: f64| alpha * (alpha * r).sinh() / norm;

        let mut total = 0.0;
        for seg in cuts.windows(2) {
            total += self.outer.integrate(seg[0], seg[1], |r1| {
                let a = (x - r1).abs();
                let b = (x + r1).min(big_r);
                let inner = self.inner.integrate(a, b, |r2| weight(r2) * self.angular(r1, r2, x));
                weight(r1) * inner
            });
        }
        total * x.sinh() / PI
    }

    /// The `1 / (sqrt(1 − A²) sinh r₁ sinh r₂)` factor, written so the
    /// endpoint zeros of `1 − A²` are exact.
    #[inline]
    fn angular(&self, r1: f64, r2: f64, x: f64) -> f64 {
        let d = (r1 - r2).abs();
        let s = r1 + r2;
        match self.form {
            DensityForm::ArcsinDerivative => {
                // (sinh r₁ sinh r₂)² (1 − A²) = (cosh x − cosh d)(cosh s − cosh x)
                let f1 = 2.0 * (0.5 * (x + d)).sinh() * (0.5 * (x - d)).sinh();
                let f2 = 2.0 * (0.5 * (s + x)).sinh() * (0.5 * (s - x)).sinh();
                let prod = f1 * f2;
                if prod > 0.0 {
                    1.0 / prod.sqrt()
                } else {
                    0.0
                }
            }
            DensityForm::SqrtOneMinusA => {
                // sinh r₁ sinh r₂ (1 − A) = cosh x − cosh d
                let f1 = 2.0 * (0.5 * (x + d)).sinh() * (0.5 * (x - d)).sinh();
                let prod = f1 * r1.sinh() * r2.sinh();
                if prod > 0.0 && x < s {
                    1.0 / prod.sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫₀^{2R} g(x) f_X(x) dx` by composite Gauss–Legendre with `panels`
    /// equal panels of `nodes` points each.
    pub fn expectation(&self, panels: usize, nodes: usize, g: impl Fn(f64) -> f64) -> f64 {
        let top = 2.0 * self.config.radius;
        let (gx, gw) = gauss_legendre(nodes);
        let h = top / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in gx.iter().zip(&gw) {
                let x = a + 0.5 * h * (xi + 1.0);
                acc += 0.5 * h * wi * g(x) * self.density_unchecked(x);
            }
        }
        acc
    }

    /// Cumulative distribution tabulated at the panel edges `k · 2R / panels`.
    pub fn cdf_table(&self, panels: usize, nodes: usize) -> CdfTable {
        let top = 2.0 * self.config.radius;
        let (gx, gw) = gauss_legendre(nodes);
        let h = top / panels as f64;
        let mut values = Vec::with_capacity(panels + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in gx.iter().zip(&gw) {
                let x = a + 0.5 * h * (xi + 1.0);
                acc += 0.5 * h * wi * self.density_unchecked(x);
            }
            values.push(acc);
        }
        CdfTable { step: h, values }
    }

    /// Tabulated `(x, f_X(x))` curve on `points` equally spaced interior points.
    pub fn curve(&self, points: usize) -> Vec<(f64, f64)> {
        let top = 2.0 * self.config.radius;
        (1..=points)
            .map(|k| {
                let x = top * k as f64 / (points + 1) as f64;
                (x, self.density_unchecked(x))
            })
            .collect()
    }
}

/// Piecewise-linear CDF on an equally spaced grid starting at 0.
#[derive(Debug, Clone)]
pub struct CdfTable {
    step: f64,
    values: Vec<f64>,
}

impl CdfTable {
    pub fn total(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let pos = x / self.step;
        let k = pos.floor() as usize;
        if k + 1 >= self.values.len() {
            return self.total();
        }
        let t = pos - k as f64;
        self.values[k] * (1.0 - t) + self.values[k + 1] * t
    }

    /// Kolmogorov–Smirnov distance to the empirical CDF of `samples`.
    pub fn ks_statistic(&self, samples: &mut [f64]) -> f64 {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = self.eval(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }
}
