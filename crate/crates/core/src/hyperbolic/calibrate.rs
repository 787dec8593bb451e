//! Choosing `(R, α)` for a target size, mean degree and power-law exponent.

use super::pdf::DistancePdf;
use super::rhg::RhgParams;
use super::DiskConfig;
use crate::error::{Error, Result};
use crate::math::{brent_root, sigmoid};

const MAX_RADIUS: f64 = 40.0;
const MIN_RADIUS: f64 = 1e-3;
const PANELS: usize = 160;
const NODES: usize = 8;

/// `(n − 1) · E[σ(R − X)]` under the distance density of `config`.
pub fn expected_degree(config: &DiskConfig, n: usize) -> f64 {
    let pdf = DistancePdf::new(*config);
    let radius = config.radius;
    (n as f64 - 1.0) * pdf.expectation(PANELS, NODES, |x| sigmoid(radius - x))
}

/// `α = (γ − 1) / 2`; `R` solves `expected_degree(R) = k̄` to within `0.01 k̄`.
pub fn calibrate(params: &RhgParams) -> Result<DiskConfig> {
    params.validate()?;
    let alpha = (params.gamma - 1.0) / 2.0;
    let target = params.kbar;
    let g = |r: f64| expected_degree(&DiskConfig { radius: r, alpha }, params.n) - target;
    let (g_lo, g_hi) = (g(MIN_RADIUS), g(MAX_RADIUS));
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::Calibration(format!(
            "no radius in (0, {MAX_RADIUS}] gives mean degree {target} for n={}, gamma={} \
             (range {:.4}..{:.4})",
            params.n,
            params.gamma,
            g_hi + target,
            g_lo + target
        )));
    }
    let radius = brent_root(g, MIN_RADIUS, MAX_RADIUS, 1e-3 * target, 1e-10, 200)
        .ok_or_else(|| Error::Calibration("root finding did not converge".into()))?;
    DiskConfig::new(radius, alpha)
}
