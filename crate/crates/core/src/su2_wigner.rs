//! Wigner d/D functions, the eight first-order recurrences they obey, the
//! parity relation, and the Pauli generalized spherical functions.
//!
//! Convention: the standard one,
//!
//! ```text
//! d^j_{m'm}(β) = Σ_s (−1)^{m'−m+s} √((j+m')!(j−m')!(j+m)!(j−m)!)
//!                / [(j+m−s)! s! (m'−m+s)! (j−m'−s)!]
//!                · cos^{2j+m−m'−2s}(β/2) · sin^{m'−m+2s}(β/2),
//! D^j_{m'm}(φ,θ,ψ) = e^{−im'φ} d^j_{m'm}(θ) e^{−imψ}.
//! ```
//!
//! The wave-function building blocks are `D_σ = D^j_{−m,σ}(φ,θ,0)`.
//! With this convention the recurrences checked by [`verify_recurrences`]
//! hold with the signs as they are used by the angular operator.

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::linalg::{C64, I, ZERO};

/// Default finite-difference step in θ and φ.
pub const FD_STEP: f64 = 1e-5;

/// Distance from θ = 0, π below which operators containing 1/sinθ refuse to evaluate.
pub const POLE_GUARD: f64 = 1e-6;

fn factorial(n: i32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn check_indices(j: HalfInt, mp: HalfInt, m: HalfInt) -> Result<()> {
    if j.twice() < 0 {
        return Err(Error::Domain(format!("negative weight j = {j}")));
    }
    for x in [mp, m] {
        if x.abs() > j || !(j - x).is_integer() {
            return Err(Error::Domain(format!("projection {x} invalid for j = {j}")));
        }
    }
    Ok(())
}

pub(crate) fn check_pole(theta: f64) -> Result<()> {
    let distance = theta.sin().abs();
    if distance < POLE_GUARD {
        return Err(Error::Pole { theta, distance });
    }
    Ok(())
}

/// Small Wigner function `d^j_{m'm}(θ)` by the finite factorial sum.
///
/// Stable for `2j ≤ 40`.
pub fn wigner_small_d(j: HalfInt, mp: HalfInt, m: HalfInt, theta: f64) -> Result<f64> {
    check_indices(j, mp, m)?;
    let jp = (j + mp).twice() / 2;
    let jm = (j - mp).twice() / 2;
    let kp = (j + m).twice() / 2;
    let km = (j - m).twice() / 2;
    let dm = (mp - m).twice() / 2;
    let (ch, sh) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let pref = (factorial(jp) * factorial(jm) * factorial(kp) * factorial(km)).sqrt();
    let s_lo = 0.max(-dm);
    let s_hi = kp.min(jm);
    let mut sum = 0.0;
    for s in s_lo..=s_hi {
        let sign = if (dm + s).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let den = factorial(kp - s) * factorial(s) * factorial(dm + s) * factorial(jm - s);
        let pc = j.twice() - dm - 2 * s;
        let ps = dm + 2 * s;
        sum += sign / den * ch.powi(pc) * sh.powi(ps);
    }
    Ok(pref * sum)
}

/// `D^j_{m'm}(φ,θ,ψ) = e^{−im'φ} d^j_{m'm}(θ) e^{−imψ}`.
pub fn wigner_big_d(j: HalfInt, mp: HalfInt, m: HalfInt, phi: f64, theta: f64, psi: f64) -> Result<C64> {
    let d = wigner_small_d(j, mp, m, theta)?;
    Ok(Complex64::from_polar(d, -(mp.value() * phi + m.value() * psi)))
}

/// `D_σ = D^j_{−m,σ}(φ,θ,0)`, zero when `|σ| > j`.
pub fn d_sigma(j: HalfInt, m: HalfInt, sigma: HalfInt, theta: f64, phi: f64) -> Result<C64> {
    if sigma.abs() > j {
        if !(j - sigma).is_integer() {
            return Err(Error::Domain(format!("σ = {sigma} incompatible with j = {j}")));
        }
        return Ok(ZERO);
    }
    wigner_big_d(j, -m, sigma, phi, theta, 0.0)
}

/// The full rotation matrix `[D^j_{m'm}]`, rows and columns ordered from −j to j.
pub fn wigner_matrix(j: HalfInt, phi: f64, theta: f64, psi: f64) -> Result<nalgebra::DMatrix<C64>> {
    let n = (j.twice() + 1) as usize;
    let ms: Vec<HalfInt> = j.projections().collect();
    let mut out = nalgebra::DMatrix::zeros(n, n);
    for (a, mp) in ms.iter().enumerate() {
        for (b, m) in ms.iter().enumerate() {
            out[(a, b)] = wigner_big_d(j, *mp, *m, phi, theta, psi)?;
        }
    }
    Ok(out)
}

/// Coefficients appearing in the D-function recurrences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCoeffs {
    pub a: f64,
    pub b: f64,
    /// Present only for `j ≥ 3/2`.
    pub c: Option<f64>,
}

impl LadderCoeffs {
    pub fn c_or_zero(&self) -> f64 {
        self.c.unwrap_or(0.0)
    }
}

/// `a = j + 1/2`, `b = √((j−1/2)(j+3/2))`, `c = √((j−3/2)(j+5/2))`.
pub fn ladder_coefficients(j: HalfInt) -> Result<LadderCoeffs> {
    if j.twice() < 1 {
        return Err(Error::Domain(format!("ladder coefficients need j ≥ 1/2, got {j}")));
    }
    let jv = j.value();
    let a = jv + 0.5;
    let b = ((jv - 0.5) * (jv + 1.5)).max(0.0).sqrt();
    let c = (j.twice() >= 3).then(|| ((jv - 1.5) * (jv + 2.5)).max(0.0).sqrt());
    Ok(LadderCoeffs { a, b, c })
}

/// Five-point central derivative.
pub fn central_diff<F: Fn(f64) -> C64>(f: F, x: f64, h: f64) -> C64 {
    (f(x - 2.0 * h) - f(x - h) * 8.0 + f(x + h) * 8.0 - f(x + 2.0 * h)) / (12.0 * h)
}

/// Residuals of the eight recurrences, in the order
/// `∂θ D_{1/2}, 𝒮 D_{1/2}, ∂θ D_{−1/2}, 𝒮 D_{−1/2}, ∂θ D_{3/2}, 𝒮 D_{3/2}, ∂θ D_{−3/2}, 𝒮 D_{−3/2}`
/// where `𝒮 D_σ = sin⁻¹θ (i∂φ − σ cosθ) D_σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport {
    pub residuals: [f64; 8],
}

impl RecurrenceReport {
    pub fn max(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Checks the recurrences by finite differences with the given step.
///
/// Relations involving `D_σ` with `|σ| > j` are trivial because those
/// functions are zero.
pub fn verify_recurrences(j: HalfInt, m: HalfInt, theta: f64, phi: f64, step: f64) -> Result<RecurrenceReport> {
    check_pole(theta)?;
    check_indices(j, m, m)?;
    let k = ladder_coefficients(j)?;
    let (a, b, c) = (k.a, k.b, k.c_or_zero());
    let ds = |s2: i32, th: f64, ph: f64| d_sigma(j, m, HalfInt::from_twice(s2), th, ph).unwrap_or(ZERO);
    let has = |s2: i32| j.twice() >= s2.abs() && (j.twice() - s2) % 2 == 0;
    let d = |s2: i32| ds(s2, theta, phi);
    let d_theta = |s2: i32| central_diff(|t| ds(s2, t, phi), theta, step);
    let d_phi = |s2: i32| central_diff(|p| ds(s2, theta, p), phi, step);
    let sop = |s2: i32| (I * d_phi(s2) - d(s2) * (0.5 * s2 as f64 * theta.cos())) / theta.sin();

    let mut residuals = [0.0; 8];
    if !has(1) {
        return Ok(RecurrenceReport { residuals });
    }
    residuals[0] = (d_theta(1) - (d(-1) * a - d(3) * b) * 0.5).norm();
    residuals[1] = (sop(1) - (-d(-1) * a - d(3) * b) * 0.5).norm();
    residuals[2] = (d_theta(-1) - (d(-3) * b - d(1) * a) * 0.5).norm();
    residuals[3] = (sop(-1) - (-d(-3) * b - d(1) * a) * 0.5).norm();
    if has(3) {
        residuals[4] = (d_theta(3) - (d(1) * b - d(5) * c) * 0.5).norm();
        residuals[5] = (sop(3) - (-d(1) * b - d(5) * c) * 0.5).norm();
        residuals[6] = (d_theta(-3) - (d(-5) * c - d(-1) * b) * 0.5).norm();
        residuals[7] = (sop(-3) - (-d(-5) * c - d(-1) * b) * 0.5).norm();
    }
    Ok(RecurrenceReport { residuals })
}

/// Both sides of `D^j_{−m,σ}(φ+π, π−θ, 0) = (−1)^j D^j_{−m,−σ}(φ, θ, 0)`,
/// with `(−1)^j = e^{iπj}`.
pub fn parity_flip(j: HalfInt, m: HalfInt, sigma: HalfInt, theta: f64, phi: f64) -> Result<(C64, C64)> {
    check_indices(j, m, sigma)?;
    let lhs = wigner_big_d(j, -m, sigma, phi + std::f64::consts::PI, std::f64::consts::PI - theta, 0.0)?;
    let rhs = j.minus_one_pow() * wigner_big_d(j, -m, -sigma, phi, theta, 0.0)?;
    Ok((lhs, rhs))
}

/// Weight label and rank of a Pauli function family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliWeight {
    pub lambda: HalfInt,
    pub j: HalfInt,
}

impl PauliWeight {
    pub fn is_admissible(&self) -> bool {
        integer_rule(Ratio::new(self.lambda.twice() as i64, 2), Ratio::new(self.j.twice() as i64, 2))
    }
}

/// Verdict of the two admissibility tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliVerdict {
    pub integer_rule: bool,
    pub derivative_rule: bool,
}

impl PauliVerdict {
    pub fn admissible(&self) -> bool {
        self.integer_rule && self.derivative_rule
    }

    pub fn agree(&self) -> bool {
        self.integer_rule == self.derivative_rule
    }
}

/// Admissibility of `(λ, j)` by the integer rule and by differentiating
/// `(1+x)^{j+λ}(1−x)^{j−λ}` exactly `2j+1` times.
pub fn pauli_criterion(lambda: Ratio<i64>, j: Ratio<i64>) -> PauliVerdict {
    PauliVerdict { integer_rule: integer_rule(lambda, j), derivative_rule: derivative_rule(lambda, j) }
}

pub fn pauli_criterion_half(lambda: HalfInt, j: HalfInt) -> PauliVerdict {
    pauli_criterion(Ratio::new(lambda.twice() as i64, 2), Ratio::new(j.twice() as i64, 2))
}

fn integer_rule(lambda: Ratio<i64>, j: Ratio<i64>) -> bool {
    let two_l = lambda * 2;
    let abs_l = if lambda < Ratio::from_integer(0) { -lambda } else { lambda };
    two_l.is_integer() && j >= abs_l && (j - abs_l).is_integer()
}

type Q = Ratio<i128>;

fn derivative_rule(lambda: Ratio<i64>, j: Ratio<i64>) -> bool {
    let lam = Q::new(*lambda.numer() as i128, *lambda.denom() as i128);
    let jj = Q::new(*j.numer() as i128, *j.denom() as i128);
    let order = jj * 2 + 1;
    if !order.is_integer() || order < Q::from_integer(0) {
        return false;
    }
    let n = order.to_integer() as usize;
    let p = jj + lam;
    let q = jj - lam;
    // Terms c · (1+x)^{p−da} (1−x)^{q−db}, indexed by da with db = k − da.
    let mut coeffs: Vec<Q> = vec![Q::from_integer(1)];
    for k in 0..n {
        let mut next = vec![Q::from_integer(0); k + 2];
        for (da, ck) in coeffs.iter().enumerate() {
            let db = k - da;
            let ea = p - Q::from_integer(da as i128);
            let eb = q - Q::from_integer(db as i128);
            next[da + 1] += *ck * ea;
            next[da] -= *ck * eb;
        }
        coeffs = next;
    }
    // Multiply through by (1+x)^{n−p}(1−x)^{n−q}: term da becomes (1+x)^{n−da}(1−x)^{da}.
    let mut poly = vec![Q::from_integer(0); 2 * n + 1];
    for (da, ck) in coeffs.iter().enumerate() {
        if *ck == Q::from_integer(0) {
            continue;
        }
        let u = binomial_poly(n - da, 1);
        let v = binomial_poly(da, -1);
        for (i, ui) in u.iter().enumerate() {
            for (k, vk) in v.iter().enumerate() {
                poly[i + k] += *ck * Q::from_integer(ui * vk);
            }
        }
    }
    poly.iter().all(|z| *z == Q::from_integer(0))
}

/// Coefficients of `(1 + s·x)^n`.
fn binomial_poly(n: usize, s: i128) -> Vec<i128> {
    let mut out = vec![0i128; n + 1];
    let mut b: i128 = 1;
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = b * s.pow(k as u32);
        b = b * (n - k) as i128 / (k as i128 + 1);
    }
    out
}

/// Coefficients (ascending) of `(1+x)^p (1−x)^q` for non-negative integers.
fn factor_poly(p: usize, q: usize) -> Vec<f64> {
    let u = binomial_poly(p, 1);
    let v = binomial_poly(q, -1);
    let mut out = vec![0.0; p + q + 1];
    for (i, ui) in u.iter().enumerate() {
        for (k, vk) in v.iter().enumerate() {
            out[i + k] += (ui * vk) as f64;
        }
    }
    out
}

/// Pauli function `Φ^λ_{jm}(θ,φ)` from the Rodrigues-type formula
///
/// ```text
/// Φ = N e^{imφ} sin^{−m}θ ((1−cosθ)/(1+cosθ))^{λ/2} (d/dcosθ)^{j−m}[(1+cosθ)^{j+λ}(1−cosθ)^{j−λ}],
/// N = √((2j+1)(j+m)! / (2(j−m)! Γ(j+λ+1) Γ(j−λ+1))) / (√(2π) 2^j).
/// ```
///
/// These functions are unit-normalized on the sphere and equal
/// `√((2j+1)/4π) (−1)^{j−m} D^j_{−m,−λ}(φ,θ,0)`: the label λ of the
/// operator `J_± = e^{±iφ}(±∂θ + i cotθ ∂φ + λ/sinθ)` enters the D index with
/// the opposite sign in our D convention (see [`pauli_as_wigner`]).
pub fn pauli_phi(lambda: HalfInt, j: HalfInt, m: HalfInt, theta: f64, phi: f64) -> Result<C64> {
    if !pauli_criterion_half(lambda, j).admissible() {
        return Err(Error::Criterion { lambda: lambda.to_string(), j: j.to_string() });
    }
    check_indices(j, m, m)?;
    check_pole(theta)?;
    let p = ((j + lambda).twice() / 2) as usize;
    let q = ((j - lambda).twice() / 2) as usize;
    let order = ((j - m).twice() / 2) as usize;
    let mut poly = factor_poly(p, q);
    for _ in 0..order {
        poly = poly.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
    }
    let x = theta.cos();
    let val: f64 = poly.iter().rev().fold(0.0, |acc, a| acc * x + a);
    let n = ((2.0 * j.value() + 1.0) * factorial((j + m).twice() / 2)
        / (2.0 * factorial(order as i32) * factorial(p as i32) * factorial(q as i32)))
    .sqrt()
        / ((2.0 * std::f64::consts::PI).sqrt() * 2f64.powf(j.value()));
    let amp = n * theta.sin().powf(-m.value()) * (0.5 * theta).tan().powf(lambda.value()) * val;
    Ok(Complex64::from_polar(1.0, m.value() * phi) * amp)
}

/// `√((2j+1)/4π) (−1)^{j−m} D^j_{−m,−λ}(φ,θ,0)`, the D-function form of [`pauli_phi`].
pub fn pauli_as_wigner(lambda: HalfInt, j: HalfInt, m: HalfInt, theta: f64, phi: f64) -> Result<C64> {
    let norm = ((2.0 * j.value() + 1.0) / (4.0 * std::f64::consts::PI)).sqrt();
    Ok((j - m).minus_one_pow() * wigner_big_d(j, -m, -lambda, phi, theta, 0.0)? * norm)
}

/// `J_∓` of weight λ applied by finite differences to a function of (θ, φ).
pub fn apply_j_ladder<F: Fn(f64, f64) -> C64>(raise: bool, lambda: f64, f: F, theta: f64, phi: f64, step: f64) -> Result<C64> {
    check_pole(theta)?;
    let s = if raise { 1.0 } else { -1.0 };
    let dt = central_diff(|t| f(t, phi), theta, step);
    let dp = central_diff(|p| f(theta, p), phi, step);
    let body = dt * s + I * dp / theta.tan() + f(theta, phi) * (lambda / theta.sin());
    Ok(Complex64::from_polar(1.0, s * phi) * body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    #[test]
    fn spin_half_values() {
        assert!((wigner_small_d(h(1), h(1), h(1), 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((wigner_small_d(h(1), h(1), h(-1), std::f64::consts::PI).unwrap() + 1.0).abs() < 1e-15);
        let t = 0.8;
        assert!((wigner_small_d(h(1), h(-1), h(1), t).unwrap() - (0.5 * t).sin()).abs() < 1e-15);
    }

    #[test]
    fn spin_one_closed_forms() {
        let t = 1.3f64;
        let d = |a, b| wigner_small_d(h(2), h(a), h(b), t).unwrap();
        assert!((d(0, 0) - t.cos()).abs() < 1e-14);
        assert!((d(2, 0) + t.sin() / 2f64.sqrt()).abs() < 1e-14);
        assert!((d(2, 2) - 0.5 * (1.0 + t.cos())).abs() < 1e-14);
        assert!((d(2, -2) - 0.5 * (1.0 - t.cos())).abs() < 1e-14);
    }

    #[test]
    fn index_checks() {
        assert!(wigner_small_d(h(1), h(3), h(1), 0.1).is_err());
        assert!(wigner_small_d(h(3), h(0), h(1), 0.1).is_err());
    }

    #[test]
    fn ladder_values() {
        let k = ladder_coefficients(h(3)).unwrap();
        assert_eq!(k.a, 2.0);
        assert!((k.b - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(k.c, Some(0.0));
        let k = ladder_coefficients(h(1)).unwrap();
        assert_eq!((k.a, k.b, k.c), (1.0, 0.0, None));
        assert!(ladder_coefficients(h(0)).is_err());
    }

    #[test]
    fn criterion_small_cases() {
        assert!(pauli_criterion_half(h(1), h(1)).admissible());
        assert!(!pauli_criterion_half(h(1), h(2)).derivative_rule);
        let v = pauli_criterion(Ratio::new(1, 4), Ratio::new(1, 4));
        assert!(!v.integer_rule && !v.derivative_rule);
    }
}
