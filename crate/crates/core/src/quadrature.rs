//! Gauss–Legendre rules, sphere product grids and radial grids.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on Pₙ.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A point on the unit sphere with its quadrature weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Product rule: Gauss–Legendre in cosθ times uniform φ.
///
/// `upper_half` restricts to θ ∈ (0, π/2) by mapping the Legendre nodes onto
/// cosθ ∈ (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub points: Vec<SpherePoint>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        Self::build(n_theta, n_phi, false)
    }

    pub fn upper_half(n_theta: usize, n_phi: usize) -> Self {
        Self::build(n_theta, n_phi, true)
    }

    fn build(n_theta: usize, n_phi: usize, half: bool) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(n_theta * n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            let (ct, wt) = if half { (0.5 * (xi + 1.0), 0.5 * wi) } else { (*xi, *wi) };
            let theta = ct.acos();
            for k in 0..n_phi {
                points.push(SpherePoint { theta, phi: dphi * k as f64, weight: wt * dphi });
            }
        }
        SphereGrid { points }
    }
}

/// Radial nodes with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialGrid {
    /// Geometric spacing on `[r0, r1]`.
    pub fn geometric(r0: f64, r1: f64, n: usize) -> Self {
        let q = (r1 / r0).powf(1.0 / (n - 1) as f64);
        let r: Vec<f64> = (0..n).map(|k| r0 * q.powi(k as i32)).collect();
        Self::trapezoid(r)
    }

    /// Gauss–Legendre nodes mapped onto `[r0, r1]`.
    pub fn gauss(r0: f64, r1: f64, n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let h = 0.5 * (r1 - r0);
        RadialGrid {
            r: x.iter().map(|xi| r0 + h * (xi + 1.0)).collect(),
            weights: w.iter().map(|wi| h * wi).collect(),
        }
    }

    pub fn trapezoid(r: Vec<f64>) -> Self {
        let n = r.len();
        let mut weights = vec![0.0; n];
        for k in 0..n.saturating_sub(1) {
            let h = r[k + 1] - r[k];
            weights[k] += 0.5 * h;
            weights[k + 1] += 0.5 * h;
        }
        RadialGrid { r, weights }
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self::geometric(1e-3, 20.0, 400)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_area() {
        let g = SphereGrid::new(12, 16);
        let a: f64 = g.points.iter().map(|p| p.weight).sum();
        assert!((a - 4.0 * PI).abs() < 1e-12);
        let h = SphereGrid::upper_half(12, 16);
        let a: f64 = h.points.iter().map(|p| p.weight).sum();
        assert!((a - 2.0 * PI).abs() < 1e-12);
    }
}
