//! Separated triplet fields and the angular operators acting on them.
//!
//! A state with quantum numbers `(ε, j, m)` is
//! `Ψ = e^{−iεt}/r · Σ_{s,row} u_{4s+row}(r) · T_s ⊗ e_row · D_{σ(s,row)}`,
//! where `D_σ = D^j_{−m,σ}(φ,θ,0)` and the index table is
//!
//! ```text
//! T₊₁ (f): σ = −3/2, −1/2, −3/2, −1/2
//! T₀  (h): σ = −1/2, +1/2, −1/2, +1/2
//! T₋₁ (g): σ = +1/2, +3/2, +1/2, +3/2
//! ```
//!
//! Components with `|σ| > j` vanish identically, which for `j = 1/2` leaves
//! `f₂, f₄, h₁..h₄, g₁, g₃`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::iso_algebra::{cyclic_generators, gamma, i_sigma12};
use crate::linalg::{kron, r, BispMat4, CompMat12, IsoMat3, Vec12, C64, I, ZERO};
use crate::su2_wigner::{central_diff, check_pole, d_sigma, ladder_coefficients, FD_STEP};

/// Twice the D index of each component.
pub const SIGMA_TWICE: [[i32; 4]; 3] = [[-3, -1, -3, -1], [-1, 1, -1, 1], [1, 3, 1, 3]];

/// Step for operators applied twice by finite differences.
pub const NESTED_FD_STEP: f64 = 1e-3;

/// D index of component `k = 4s + row`.
pub fn sigma_of(k: usize) -> HalfInt {
    HalfInt::from_twice(SIGMA_TWICE[k / 4][k % 4])
}

/// Components carried by weight `j`.
pub fn allowed_components(j: HalfInt) -> [bool; 12] {
    let mut out = [false; 12];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = sigma_of(k).abs() <= j;
    }
    out
}

/// Component names in layout order.
pub const COMPONENT_NAMES: [&str; 12] = ["f1", "f2", "f3", "f4", "h1", "h2", "h3", "h4", "g1", "g2", "g3", "g4"];

/// ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: i32) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Domain(format!("sign must be ±1, got {v}"))),
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Radial amplitudes of a state.
#[derive(Clone)]
pub enum RadialAmplitudes {
    /// The same twelve values at every r (angular work at a fixed radius).
    Fixed(Vec12),
    Analytic(Arc<dyn Fn(f64) -> Vec12 + Send + Sync>),
    /// Linear interpolation between nodes.
    Tabulated { r: Vec<f64>, values: Vec<Vec12> },
}

impl fmt::Debug for RadialAmplitudes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialAmplitudes::Fixed(v) => write!(f, "Fixed({:?})", v.as_slice()),
            RadialAmplitudes::Analytic(_) => write!(f, "Analytic"),
            RadialAmplitudes::Tabulated { r, .. } => write!(f, "Tabulated({} nodes)", r.len()),
        }
    }
}

impl RadialAmplitudes {
    pub fn at(&self, x: f64) -> Vec12 {
        match self {
            RadialAmplitudes::Fixed(v) => *v,
            RadialAmplitudes::Analytic(f) => f(x),
            RadialAmplitudes::Tabulated { r, values } => {
                let n = r.len();
                if n == 0 {
                    return Vec12::zeros();
                }
                if x <= r[0] {
                    return values[0];
                }
                if x >= r[n - 1] {
                    return values[n - 1];
                }
                let k = r.partition_point(|v| *v <= x).saturating_sub(1).min(n - 2);
                let t = (x - r[k]) / (r[k + 1] - r[k]);
                values[k] * r_c(1.0 - t) + values[k + 1] * r_c(t)
            }
        }
    }

    /// Applies a fixed amplitude-space map at every radius.
    pub fn mapped(&self, m: CompMat12) -> RadialAmplitudes {
        match self {
            RadialAmplitudes::Fixed(v) => RadialAmplitudes::Fixed(m * v),
            RadialAmplitudes::Analytic(f) => {
                let f = f.clone();
                RadialAmplitudes::Analytic(Arc::new(move |x| m * f(x)))
            }
            RadialAmplitudes::Tabulated { r, values } => {
                RadialAmplitudes::Tabulated { r: r.clone(), values: values.iter().map(|v| m * v).collect() }
            }
        }
    }
}

fn r_c(x: f64) -> C64 {
    r(x)
}

/// A separated triplet state.
#[derive(Debug, Clone)]
pub struct TripletState {
    pub epsilon: f64,
    pub j: HalfInt,
    pub m: HalfInt,
    pub radial: RadialAmplitudes,
    pub delta: Sign,
    /// `α = e^{iA}` ties the T₋₁ block to T₊₁.
    pub a: C64,
    /// Phase-scale parameter of the T₀ block.
    pub b: C64,
    pub mu: Option<Sign>,
}

impl TripletState {
    /// State with fixed amplitudes and default structure `δ = +1, A = B = 0`.
    pub fn fixed(epsilon: f64, j: HalfInt, m: HalfInt, amps: Vec12) -> Self {
        TripletState { epsilon, j, m, radial: RadialAmplitudes::Fixed(amps), delta: Sign::Plus, a: ZERO, b: ZERO, mu: None }
    }

    pub fn alpha(&self) -> C64 {
        (I * self.a).exp()
    }

    pub fn amplitudes_at(&self, x: f64) -> Vec12 {
        self.radial.at(x)
    }

    pub fn with_radial(&self, radial: RadialAmplitudes) -> Self {
        let mut s = self.clone();
        s.radial = radial;
        s
    }

    /// Rejects weights and projections outside range.
    pub fn validate(&self) -> Result<()> {
        if self.j.twice() < 1 || self.j.is_integer() {
            return Err(Error::Domain(format!("triplet states need half-integer j ≥ 1/2, got {}", self.j)));
        }
        if self.m.abs() > self.j || !(self.j - self.m).is_integer() {
            return Err(Error::Domain(format!("m = {} invalid for j = {}", self.m, self.j)));
        }
        Ok(())
    }
}

/// Field value at a point, 12 components in layout order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub value: Vec12,
}

/// Checks that components absent for this `j` carry zero amplitude.
pub fn check_structure(j: HalfInt, amps: &Vec12) -> Result<()> {
    let allowed = allowed_components(j);
    for k in 0..12 {
        if !allowed[k] && amps[k] != ZERO {
            return Err(Error::Structural(format!("component {} is absent for j = {j}", COMPONENT_NAMES[k])));
        }
    }
    Ok(())
}

/// The angular factors `D_{σ(k)}` at a point.
pub fn angular_factors(j: HalfInt, m: HalfInt, theta: f64, phi: f64) -> Result<Vec12> {
    let mut out = Vec12::zeros();
    for k in 0..12 {
        out[k] = d_sigma(j, m, sigma_of(k), theta, phi)?;
    }
    Ok(out)
}

/// Field of given amplitudes at `(r, θ, φ)` and time t.
pub fn assemble_amplitudes(j: HalfInt, m: HalfInt, epsilon: f64, amps: &Vec12, x: f64, theta: f64, phi: f64, t: f64) -> Result<Vec12> {
    check_structure(j, amps)?;
    let d = angular_factors(j, m, theta, phi)?;
    let pref = C64::from_polar(1.0 / x, -epsilon * t);
    Ok(amps.component_mul(&d) * pref)
}

/// Evaluates the separated field at `t = 0`.
pub fn assemble_state(state: &TripletState, x: f64, theta: f64, phi: f64) -> Result<FieldSample> {
    state.validate()?;
    let amps = state.amplitudes_at(x);
    Ok(FieldSample { value: assemble_amplitudes(state.j, state.m, state.epsilon, &amps, x, theta, phi, 0.0)? })
}

/// `Λ = I ⊗ iσ¹² + t³ ⊗ I`, the coefficient of cosθ/sinθ in Σ.
pub fn lambda_matrix() -> CompMat12 {
    let t3 = cyclic_generators()[2];
    kron(&IsoMat3::identity(), &i_sigma12()) + kron(&t3, &BispMat4::identity())
}

fn iso_identity(g: &BispMat4) -> CompMat12 {
    kron(&IsoMat3::identity(), g)
}

/// `Σ_{θφ} = iγ¹∂θ + γ²(i∂φ + Λ cosθ)/sinθ` applied by five-point differences.
pub fn apply_sigma_fd<F: Fn(f64, f64) -> Vec12>(field: F, theta: f64, phi: f64, step: f64) -> Result<Vec12> {
    check_pole(theta)?;
    let mut dt = Vec12::zeros();
    let mut dp = Vec12::zeros();
    let fm2 = field(theta - 2.0 * step, phi);
    let fm1 = field(theta - step, phi);
    let fp1 = field(theta + step, phi);
    let fp2 = field(theta + 2.0 * step, phi);
    let gm2 = field(theta, phi - 2.0 * step);
    let gm1 = field(theta, phi - step);
    let gp1 = field(theta, phi + step);
    let gp2 = field(theta, phi + 2.0 * step);
    for k in 0..12 {
        dt[k] = (fm2[k] - fm1[k] * 8.0 + fp1[k] * 8.0 - fp2[k]) / (12.0 * step);
        dp[k] = (gm2[k] - gm1[k] * 8.0 + gp1[k] * 8.0 - gp2[k]) / (12.0 * step);
    }
    let f0 = field(theta, phi);
    let g1 = iso_identity(&gamma(1));
    let g2 = iso_identity(&gamma(2));
    Ok(g1 * dt * I + g2 * (dp * I + lambda_matrix() * f0 * r(theta.cos())) / r(theta.sin()))
}

/// Amplitude-space form of Σ: `Σ Ψ[u] = Ψ[S u]`.
///
/// T₊₁ and T₋₁ blocks carry `b`, T₀ carries `a`; within a block
/// `(u₁,u₂,u₃,u₄) ↦ i·coef·(−u₄, u₃, u₂, −u₁)`.
pub fn sigma_amplitude_matrix(j: HalfInt) -> Result<CompMat12> {
    let k = ladder_coefficients(j)?;
    let mut s = CompMat12::zeros();
    for (blk, coef) in [(0usize, k.b), (1, k.a), (2, k.b)] {
        let base = 4 * blk;
        let z = I * coef;
        s[(base, base + 3)] = -z;
        s[(base + 1, base + 2)] = z;
        s[(base + 2, base + 1)] = z;
        s[(base + 3, base)] = -z;
    }
    Ok(s)
}

/// Σ applied to the assembled state by finite differences.
pub fn apply_sigma(state: &TripletState, x: f64, theta: f64, phi: f64) -> Result<FieldSample> {
    state.validate()?;
    let amps = state.amplitudes_at(x);
    check_structure(state.j, &amps)?;
    let (j, m, eps) = (state.j, state.m, state.epsilon);
    let field = |t: f64, p: f64| assemble_amplitudes(j, m, eps, &amps, x, t, p, 0.0).unwrap_or_else(|_| Vec12::zeros());
    Ok(FieldSample { value: apply_sigma_fd(field, theta, phi, FD_STEP)? })
}

/// Closed form of Σ on the state.
pub fn sigma_closed_form(state: &TripletState, x: f64, theta: f64, phi: f64) -> Result<FieldSample> {
    state.validate()?;
    let amps = sigma_amplitude_matrix(state.j)? * state.amplitudes_at(x);
    Ok(FieldSample { value: assemble_amplitudes(state.j, state.m, state.epsilon, &amps, x, theta, phi, 0.0)? })
}

/// `γ¹ ⊗ t² − γ² ⊗ t¹` in the field layout.
pub fn mixing_matrix() -> CompMat12 {
    let t = cyclic_generators();
    kron(&t[1], &gamma(1)) - kron(&t[0], &gamma(2))
}

/// Amplitude-space form of the mixing term: every entry is `±i√2`.
pub fn mixing_amplitude_matrix() -> CompMat12 {
    let mut x = CompMat12::zeros();
    let v = I * std::f64::consts::SQRT_2;
    for &(row, col, s) in &[(1, 6, 1.0), (3, 4, -1.0), (4, 3, -1.0), (5, 10, 1.0), (6, 1, 1.0), (7, 8, -1.0), (8, 7, -1.0), (10, 5, 1.0)] {
        x[(row, col)] = v * s;
    }
    x
}

/// `(W/r)(γ¹⊗t² − γ²⊗t¹)Ψ` by the explicit 12×12 matrix.
pub fn apply_mixing(state: &TripletState, x: f64, theta: f64, phi: f64, w: f64) -> Result<FieldSample> {
    let psi = assemble_state(state, x, theta, phi)?;
    Ok(FieldSample { value: mixing_matrix() * psi.value * r(w / x) })
}

pub fn mixing_closed_form(state: &TripletState, x: f64, theta: f64, phi: f64, w: f64) -> Result<FieldSample> {
    state.validate()?;
    let amps = mixing_amplitude_matrix() * state.amplitudes_at(x) * r(w / x);
    Ok(FieldSample { value: assemble_amplitudes(state.j, state.m, state.epsilon, &amps, x, theta, phi, 0.0)? })
}

/// Field of arbitrary dimension as a function of (θ, φ).
pub type AngularField<'a> = dyn Fn(f64, f64) -> DVector<C64> + 'a;

/// Components of the total angular momentum `J = l + Λ-terms`:
/// `J₁ = l₁ + Λ cosφ/sinθ`, `J₂ = l₂ + Λ sinφ/sinθ`, `J₃ = l₃` with
/// `l₁ = i(sinφ∂θ + cotθ cosφ∂φ)`, `l₂ = i(−cosφ∂θ + cotθ sinφ∂φ)`, `l₃ = −i∂φ`.
pub fn apply_j(component: usize, lambda: &DMatrix<C64>, field: &AngularField<'_>, theta: f64, phi: f64, step: f64) -> DVector<C64> {
    let n = lambda.nrows();
    let d = |k: usize| -> DVector<C64> {
        DVector::from_iterator(
            n,
            (0..n).map(|c| {
                if k == 0 {
                    central_diff(|t| field(t, phi)[c], theta, step)
                } else {
                    central_diff(|p| field(theta, p)[c], phi, step)
                }
            }),
        )
    };
    let (st, ct, sp, cp) = (theta.sin(), theta.cos(), phi.sin(), phi.cos());
    match component {
        0 => (d(0) * r(sp) + d(1) * r(ct / st * cp)) * I + lambda * field(theta, phi) * r(cp / st),
        1 => (d(0) * r(-cp) + d(1) * r(ct / st * sp)) * I + lambda * field(theta, phi) * r(sp / st),
        _ => d(1) * (-I),
    }
}

/// `J²` by nested differences.
pub fn apply_j_squared(lambda: &DMatrix<C64>, field: &AngularField<'_>, theta: f64, phi: f64, step: f64) -> DVector<C64> {
    let mut out = DVector::zeros(lambda.nrows());
    for i in 0..3 {
        let inner = |t: f64, p: f64| apply_j(i, lambda, field, t, p, step);
        out += apply_j(i, lambda, &inner, theta, phi, step);
    }
    out
}

/// Residuals of `J²Ψ = j(j+1)Ψ` and `J₃Ψ = mΨ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JReport {
    pub j2_residual: f64,
    pub j3_residual: f64,
}

fn j_report(lambda: &DMatrix<C64>, field: &AngularField<'_>, j: HalfInt, m: HalfInt, points: &[(f64, f64)]) -> Result<JReport> {
    let mut rep = JReport { j2_residual: 0.0, j3_residual: 0.0 };
    let jj = j.value() * (j.value() + 1.0);
    for &(theta, phi) in points {
        check_pole(theta)?;
        let f0 = field(theta, phi);
        let j2 = apply_j_squared(lambda, field, theta, phi, NESTED_FD_STEP);
        let j3 = apply_j(2, lambda, field, theta, phi, FD_STEP);
        rep.j2_residual = rep.j2_residual.max((j2 - &f0 * r(jj)).amax_c());
        rep.j3_residual = rep.j3_residual.max((j3 - &f0 * r(m.value())).amax_c());
    }
    Ok(rep)
}

trait AmaxC {
    fn amax_c(&self) -> f64;
}

impl AmaxC for DVector<C64> {
    fn amax_c(&self) -> f64 {
        self.iter().fold(0.0, |a, z| a.max(z.norm()))
    }
}

/// Total angular momentum check on the assembled triplet at sample points.
pub fn total_j_check(state: &TripletState, x: f64, points: &[(f64, f64)]) -> Result<JReport> {
    state.validate()?;
    let amps = state.amplitudes_at(x);
    check_structure(state.j, &amps)?;
    let lam = DMatrix::from_iterator(12, 12, lambda_matrix().iter().cloned());
    let (j, m, eps) = (state.j, state.m, state.epsilon);
    let field = move |t: f64, p: f64| {
        let v = assemble_amplitudes(j, m, eps, &amps, x, t, p, 0.0).unwrap_or_else(|_| Vec12::zeros());
        DVector::from_iterator(12, v.iter().cloned())
    };
    j_report(&lam, &field, state.j, state.m, points)
}

/// Max residual of `[J₁, J₂]Ψ − iJ₃Ψ` over the sample points.
pub fn j_commutator_residual(state: &TripletState, x: f64, points: &[(f64, f64)], step: f64) -> Result<f64> {
    state.validate()?;
    let amps = state.amplitudes_at(x);
    check_structure(state.j, &amps)?;
    let lam = DMatrix::from_iterator(12, 12, lambda_matrix().iter().cloned());
    let (j, m, eps) = (state.j, state.m, state.epsilon);
    let field = move |t: f64, p: f64| {
        let v = assemble_amplitudes(j, m, eps, &amps, x, t, p, 0.0).unwrap_or_else(|_| Vec12::zeros());
        DVector::from_iterator(12, v.iter().cloned())
    };
    let mut worst = 0.0f64;
    for &(theta, phi) in points {
        check_pole(theta)?;
        let j2f = |t: f64, p: f64| apply_j(1, &lam, &field, t, p, step);
        let j1f = |t: f64, p: f64| apply_j(0, &lam, &field, t, p, step);
        let c = apply_j(0, &lam, &j2f, theta, phi, step) - apply_j(1, &lam, &j1f, theta, phi, step);
        let j3 = apply_j(2, &lam, &field, theta, phi, step);
        worst = worst.max((c - j3 * I).amax_c());
    }
    Ok(worst)
}

/// Projection `∫ conj(D_σ) F dΩ` of a scalar angular function onto one D function.
pub fn project_onto_d<F: Fn(f64, f64) -> C64>(f: F, j: HalfInt, m: HalfInt, sigma: HalfInt, grid: &crate::quadrature::SphereGrid) -> Result<C64> {
    let mut acc = ZERO;
    for p in &grid.points {
        acc += d_sigma(j, m, sigma, p.theta, p.phi)?.conj() * f(p.theta, p.phi) * p.weight;
    }
    Ok(acc)
}

/// Four-component field of a Dirac particle with charge `e` in an Abelian
/// monopole `g`: `(f₁ D_{eg−1/2}, f₂ D_{eg+1/2}, f₃ D_{eg−1/2}, f₄ D_{eg+1/2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelianState {
    pub j: HalfInt,
    pub m: HalfInt,
    /// Twice the product `eg`.
    pub eg: HalfInt,
    pub amps: [C64; 4],
}

impl AbelianState {
    pub fn sigma(&self, row: usize) -> HalfInt {
        if row % 2 == 0 {
            self.eg - HalfInt::HALF
        } else {
            self.eg + HalfInt::HALF
        }
    }

    pub fn field(&self, theta: f64, phi: f64) -> Result<DVector<C64>> {
        let mut out = DVector::zeros(4);
        for row in 0..4 {
            out[row] = self.amps[row] * d_sigma(self.j, self.m, self.sigma(row), theta, phi)?;
        }
        Ok(out)
    }

    /// `λ = iσ¹² − eg`.
    pub fn lambda(&self) -> DMatrix<C64> {
        let s = i_sigma12();
        DMatrix::from_fn(4, 4, |a, b| s[(a, b)] - if a == b { r(self.eg.value()) } else { ZERO })
    }
}

/// Total angular momentum check for the Abelian structure.
pub fn abelian_total_j_check(state: &AbelianState, points: &[(f64, f64)]) -> Result<JReport> {
    state.field(1.0, 0.0)?;
    let lam = state.lambda();
    let s = *state;
    let field = move |t: f64, p: f64| s.field(t, p).unwrap_or_else(|_| DVector::zeros(4));
    j_report(&lam, &field, state.j, state.m, points)
}
