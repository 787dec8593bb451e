//! Small numeric helpers shared across modules.

use std::f64::consts::PI;

/// Logistic sigmoid `1 / (1 + e^{-x})`, stable for large `|x|`.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log σ(x)` without overflow.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite quadrature rule over `[a, b]` using the substitution
/// `r = c + h sin φ`. The Jacobian `h cos φ` vanishes at both ends, which
/// absorbs inverse-square-root endpoint singularities.
#[derive(Debug, Clone)]
pub struct SineMappedRule {
    /// Points `(sin φ, cos φ * w)` on the reference interval.
    points: Vec<(f64, f64)>,
}

impl SineMappedRule {
    pub fn new(nodes: usize, panels: usize) -> Self {
        let (x, w) = gauss_legendre(nodes);
        let panels = panels.max(1);
        let width = PI / panels as f64;
        let mut points = Vec::with_capacity(nodes * panels);
        for p in 0..panels {
            let lo = -PI / 2.0 + p as f64 * width;
            for (xi, wi) in x.iter().zip(&w) {
                let phi = lo + (xi + 1.0) * width / 2.0;
                points.push((phi.sin(), phi.cos() * wi * width / 2.0));
            }
        }
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫_a^b f`.
    #[inline]
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for &(s, w) in &self.points {
            acc += w * f(c + h * s);
        }
        acc * h
    }
}

/// Root of a continuous function on `[lo, hi]` with a sign change, by
/// Brent's method. Stops when `|f| <= ftol` or the bracket is below `xtol`.
pub fn brent_root(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    ftol: f64,
    xtol: f64,
    max_iter: usize,
) -> Option<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.abs() <= ftol {
        return Some(a);
    }
    if fb.abs() <= ftol {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if fb.abs() <= ftol || m.abs() <= tol {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    (fb.abs() <= ftol).then_some(b)
}

/// Sample skewness (biased, moment form).
pub fn skewness(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (m2, m3) = values.iter().fold((0.0, 0.0), |(m2, m3), &v| {
        let d = v - mean;
        (m2 + d * d, m3 + d * d * d)
    });
    let (m2, m3) = (m2 / n, m3 / n);
    m3 / m2.powf(1.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(10.0) - 0.999_954_602_131_297_6).abs() < 1e-15);
        assert!((sigmoid(-3f64.ln()) - 0.25).abs() < 1e-15);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        assert!((log_sigmoid(0.3) - sigmoid(0.3).ln()).abs() < 1e-15);
        assert!((log_sigmoid(-50.0) + 50.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg} {got} {want}");
            }
        }
    }

    #[test]
    fn sine_rule_handles_inverse_sqrt_ends() {
        // ∫_0^1 dx / sqrt(x (1 - x)) = π
        let rule = SineMappedRule::new(16, 2);
        let v = rule.integrate(0.0, 1.0, |x| 1.0 / (x * (1.0 - x)).sqrt());
        assert!((v - PI).abs() < 1e-10, "{v}");
        assert!((rule.integrate(1.0, 3.0, |x| x * x) - 26.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn brent_finds_roots() {
        let r = brent_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 1e-15, 100).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        assert!(brent_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 1e-12, 100).is_none());
        let r = brent_root(|x| (-x).exp() - 0.1, 0.0, 40.0, 1e-12, 1e-14, 200).unwrap();
        assert!((r - 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn skewness_sign() {
        assert!(skewness(&[0.0, 0.0, 0.0, 1.0, 5.0]) > 0.0);
        assert!(skewness(&[0.0, 5.0, 5.0, 5.0, 4.0]) < 0.0);
    }
}
