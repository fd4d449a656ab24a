//! Dormand–Prince 5(4) for complex linear and nonlinear systems.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::C64;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// Scale errors by the norm of the whole state rather than per component.
    pub vector_relative: bool,
}

impl Tolerance {
    pub fn new(tol: f64) -> Self {
        Tolerance { rtol: tol, atol: tol, h_min: 1e-14, max_steps: 2_000_000, vector_relative: false }
    }

    /// Error control relative to `‖y‖`, suited to linear homogeneous systems.
    pub fn relative(tol: f64) -> Self {
        Tolerance { atol: tol * 1e-30, vector_relative: true, ..Tolerance::new(tol) }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-10)
    }
}

/// One Dormand–Prince step: returns the fifth-order value and the embedded error estimate.
pub fn dopri_step<F>(f: &F, x: f64, y: &DVector<C64>, h: f64) -> (DVector<C64>, DVector<C64>)
where
    F: Fn(f64, &DVector<C64>) -> DVector<C64>,
{
    let mut k: Vec<DVector<C64>> = Vec::with_capacity(7);
    for s in 0..7 {
        let mut ys = y.clone();
        for (l, kl) in k.iter().enumerate() {
            if A[s][l] != 0.0 {
                ys.axpy(C64::new(h * A[s][l], 0.0), kl, C64::new(1.0, 0.0));
            }
        }
        k.push(f(x + C[s] * h, &ys));
    }
    let mut y5 = y.clone();
    let mut err = DVector::zeros(y.len());
    for s in 0..7 {
        if B5[s] != 0.0 {
            y5.axpy(C64::new(h * B5[s], 0.0), &k[s], C64::new(1.0, 0.0));
        }
        err.axpy(C64::new(h * (B5[s] - B4[s]), 0.0), &k[s], C64::new(1.0, 0.0));
    }
    (y5, err)
}

fn error_norm(err: &DVector<C64>, y0: &DVector<C64>, y1: &DVector<C64>, tol: &Tolerance) -> f64 {
    let n = err.len().max(1) as f64;
    let whole = if tol.vector_relative { (y0.norm().max(y1.norm())) / n.sqrt() } else { 0.0 };
    let s: f64 = (0..err.len())
        .map(|i| {
            let sc = tol.atol + tol.rtol * y0[i].norm().max(y1[i].norm()).max(whole);
            (err[i].norm() / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integration statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Adaptive integration from `x0` to `x1` (either direction).
pub fn integrate_adaptive<F>(f: &F, x0: f64, x1: f64, y0: &DVector<C64>, tol: &Tolerance, stats: &mut Stats) -> Result<DVector<C64>>
where
    F: Fn(f64, &DVector<C64>) -> DVector<C64>,
{
    if x0 == x1 {
        return Ok(y0.clone());
    }
    if y0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("initial data".into()));
    }
    if y0.iter().all(|z| z.norm() == 0.0) {
        return Ok(y0.clone());
    }
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut y = y0.clone();
    let mut h = (span * 1e-3).max(tol.h_min * 10.0);
    let mut steps = 0;
    while (x1 - x) * dir > 0.0 {
        if steps > tol.max_steps {
            return Err(Error::StepUnderflow { r: x });
        }
        steps += 1;
        let remaining = (x1 - x).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h };
        let (yn, err) = dopri_step(f, x, &y, dir * hs);
        let e = error_norm(&err, &y, &yn, tol);
        if !e.is_finite() {
            h = hs * 0.1;
            stats.rejected += 1;
            if h < tol.h_min {
                return Err(Error::StepUnderflow { r: x });
            }
            continue;
        }
        if e <= 1.0 {
            x = if last { x1 } else { x + dir * hs };
            y = yn;
            stats.accepted += 1;
            let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            h = hs * fac;
        } else {
            stats.rejected += 1;
            h = hs * (0.9 * e.powf(-0.2)).clamp(0.1, 1.0);
            if h < tol.h_min {
                return Err(Error::StepUnderflow { r: x });
            }
        }
    }
    Ok(y)
}

/// Adaptive integration reporting the state at every node of `grid` (monotone).
pub fn integrate_on_grid<F>(f: &F, grid: &[f64], y0: &DVector<C64>, tol: &Tolerance) -> Result<(Vec<DVector<C64>>, Stats)>
where
    F: Fn(f64, &DVector<C64>) -> DVector<C64>,
{
    let mut stats = Stats::default();
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0.clone();
    for (k, &x) in grid.iter().enumerate() {
        if k > 0 {
            y = integrate_adaptive(f, grid[k - 1], x, &y, tol, &mut stats)?;
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

/// Fixed-step Dormand–Prince with `n` equal steps.
pub fn integrate_fixed<F>(f: &F, x0: f64, x1: f64, y0: &DVector<C64>, n: usize) -> DVector<C64>
where
    F: Fn(f64, &DVector<C64>) -> DVector<C64>,
{
    let h = (x1 - x0) / n as f64;
    let mut y = y0.clone();
    for k in 0..n {
        y = dopri_step(f, x0 + k as f64 * h, &y, h).0;
    }
    y
}

/// Classical fourth-order Runge–Kutta with `n` equal steps.
pub fn integrate_rk4<F>(f: &F, x0: f64, x1: f64, y0: &DVector<C64>, n: usize) -> DVector<C64>
where
    F: Fn(f64, &DVector<C64>) -> DVector<C64>,
{
    let h = (x1 - x0) / n as f64;
    let hc = C64::new(h, 0.0);
    let mut y = y0.clone();
    for k in 0..n {
        let x = x0 + k as f64 * h;
        let k1 = f(x, &y);
        let k2 = f(x + 0.5 * h, &(&y + &k1 * (hc * 0.5)));
        let k3 = f(x + 0.5 * h, &(&y + &k2 * (hc * 0.5)));
        let k4 = f(x + h, &(&y + &k3 * hc));
        y += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (hc / 6.0);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(_x: f64, y: &DVector<C64>) -> DVector<C64> {
        DVector::from_vec(vec![y[1], -y[0]])
    }

    #[test]
    fn harmonic_oscillator() {
        let y0 = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let mut st = Stats::default();
        let y = integrate_adaptive(&rot, 0.0, 10.0, &y0, &Tolerance::new(1e-12), &mut st).unwrap();
        assert!((y[0].re - 10f64.cos()).abs() < 1e-9);
        assert!((y[1].re + 10f64.sin()).abs() < 1e-9);
        let back = integrate_adaptive(&rot, 10.0, 0.0, &y, &Tolerance::new(1e-12), &mut st).unwrap();
        assert!((back[0].re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn complex_exponential_fixed() {
        let f = |_x: f64, y: &DVector<C64>| y * C64::new(0.0, 1.0);
        let y0 = DVector::from_element(1, C64::new(1.0, 0.0));
        let y = integrate_fixed(&f, 0.0, 1.0, &y0, 50);
        assert!((y[0] - C64::new(1f64.cos(), 1f64.sin())).norm() < 1e-11);
    }
}
