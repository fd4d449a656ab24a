//! The composite reflection `N̂_A = π̂_α ⊗ Π ⊗ P̂` with `α = e^{iA}`, its
//! sectors, the operator `K̂ = iγ⁰γ³Σ` and the A/B basis-change maps.
//!
//! `P̂ : (θ, φ) ↦ (π − θ, φ + π)` and `Π = −γ⁵γ¹`. In the Schwinger frame
//! `π̂_α` is anti-diagonal `(α⁻¹, 1, α)`. On amplitudes `N̂` acts as
//! `e^{iπ(j+1)}` times `f ↦ α⁻¹(g₄,g₃,g₂,g₁)`, `h ↦ (h₄,h₃,h₂,h₁)`,
//! `g ↦ α(f₄,f₃,f₂,f₁)`; its eigenvalues are `δ e^{iπ(j+1)}`.

use nalgebra::{DMatrix, Matrix3};

use crate::angular_separation::{allowed_components, apply_sigma_fd, assemble_amplitudes, check_structure, Sign, TripletState};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::iso_algebra::{d_factor, delta_matrix, exp_iso_rotation, gamma, parity_kernel, t_tilde0, u_cartesian, u_dirac, unit_radial};
use crate::linalg::{cis, kron, max_abs, max_abs_dyn, r, BispMat4, CompMat12, IsoMat3, Vec12, C64, I, ONE, ZERO};
use crate::monopole_gauges::{Frame, MonopoleProfile, RadialFn};
use crate::radial_dynamics::{full_generator, RadialParams, MIN_INDICES};
use crate::su2_wigner::{check_pole, ladder_coefficients, FD_STEP};

/// `A = −i ln α` on the principal branch.
pub fn a_of_alpha(alpha: C64) -> C64 {
    -I * alpha.ln()
}

/// `e^{iπ(j+1)}`.
pub fn n_phase(j: HalfInt) -> C64 {
    (j + HalfInt::integer(1)).minus_one_pow()
}

/// Composite reflection in a given isotopic frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NOperator {
    pub alpha: C64,
    pub frame: Frame,
}

/// Builds `N̂_A`; `α` must be finite and nonzero.
pub fn build_n(alpha: C64, frame: Frame) -> Result<NOperator> {
    if alpha == ZERO || !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::Domain(format!("α = e^{{iA}} must be finite and nonzero, got {alpha}")));
    }
    Ok(NOperator { alpha, frame })
}

/// Schwinger-frame `π̂_α` (β = 1, γ = α⁻¹).
pub fn pi_schwinger(alpha: C64) -> IsoMat3 {
    Matrix3::new(ZERO, ZERO, ONE / alpha, ZERO, ONE, ZERO, alpha, ZERO, ZERO)
}

/// Dirac-frame `π̂_α` at azimuth φ of the image point's preimage.
pub fn pi_dirac(alpha: C64, phi: f64) -> IsoMat3 {
    let e2 = cis(r(2.0 * phi));
    Matrix3::new(ZERO, ZERO, -(ONE / alpha) / e2, ZERO, ONE, ZERO, -alpha * e2, ZERO, ZERO)
}

/// Cartesian-frame `π̂_α = −exp(−iA t·n)`.
pub fn pi_cartesian(alpha: C64, theta: f64, phi: f64) -> IsoMat3 {
    -exp_iso_rotation(a_of_alpha(alpha), &unit_radial(theta, phi))
}

impl NOperator {
    /// Isotopic factor at the evaluation point `(θ, φ)`.
    pub fn iso_factor(&self, theta: f64, phi: f64) -> IsoMat3 {
        match self.frame {
            Frame::Schwinger => pi_schwinger(self.alpha),
            Frame::Dirac => pi_dirac(self.alpha, phi),
            Frame::Cartesian => pi_cartesian(self.alpha, theta, phi),
        }
    }

    /// `(N̂Ψ)(θ, φ) = (π̂ ⊗ Π) Ψ(π − θ, φ + π)`.
    pub fn apply<F: Fn(f64, f64) -> Vec12>(&self, field: F, theta: f64, phi: f64) -> Vec12 {
        let m = kron(&self.iso_factor(theta, phi), &parity_kernel());
        m * field(std::f64::consts::PI - theta, phi + std::f64::consts::PI)
    }

    /// Action on Schwinger-frame amplitudes of weight `j`.
    pub fn amplitude_matrix(&self, j: HalfInt) -> CompMat12 {
        n_amplitude_matrix(j, self.alpha)
    }
}

/// Amplitude-space form of `N̂`.
pub fn n_amplitude_matrix(j: HalfInt, alpha: C64) -> CompMat12 {
    let ph = n_phase(j);
    let mut n = CompMat12::zeros();
    for k in 0..4 {
        n[(k, 11 - k)] = ph / alpha;
        n[(4 + k, 7 - k)] = ph;
        n[(8 + k, 3 - k)] = ph * alpha;
    }
    n
}

/// One eigen-sector of `N̂` at fixed `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorConstraint {
    pub delta: Sign,
    pub j: HalfInt,
    pub alpha: C64,
    /// `N = δ e^{iπ(j+1)}`.
    pub eigenvalue: C64,
}

impl SectorConstraint {
    pub fn new(delta: Sign, j: HalfInt, alpha: C64) -> Self {
        SectorConstraint { delta, j, alpha, eigenvalue: n_phase(j) * delta.value() }
    }

    /// Relations `u[target] = coef · u[source]`:
    /// `h₃ = δh₂, h₄ = δh₁, g₄ = δαf₁, g₃ = δαf₂, g₂ = δαf₃, g₁ = δαf₄`
    /// (for `j = 1/2` only those among f₂, f₄, h, g₁, g₃).
    pub fn relations(&self) -> Vec<(usize, usize, C64)> {
        let d = r(self.delta.value());
        let allowed = allowed_components(self.j);
        let mut out = vec![(6, 5, d), (7, 4, d)];
        for k in 0..4 {
            if allowed[k] {
                out.push((11 - k, k, d * self.alpha));
            }
        }
        out
    }

    /// Fills the dependent amplitudes from f₁..f₄, h₁, h₂.
    pub fn apply(&self, u: &Vec12) -> Vec12 {
        let mut v = *u;
        let allowed = allowed_components(self.j);
        for k in 0..12 {
            if !allowed[k] {
                v[k] = ZERO;
            }
        }
        for (t, s, c) in self.relations() {
            v[t] = c * v[s];
        }
        v
    }

    /// `(1 + δ e^{−iπ(j+1)} N̂)/2` restricted to the components present at this `j`.
    pub fn projector(&self) -> CompMat12 {
        let n = n_amplitude_matrix(self.j, self.alpha);
        let mask = component_mask(self.j);
        (mask + n * (ONE / self.eigenvalue) * mask) * r(0.5)
    }

    /// `‖N̂u − N u‖`.
    pub fn residual(&self, u: &Vec12) -> f64 {
        let n = n_amplitude_matrix(self.j, self.alpha);
        (n * u - u * self.eigenvalue).iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Diagonal 0/1 mask of the components present at weight `j`.
pub fn component_mask(j: HalfInt) -> CompMat12 {
    let a = allowed_components(j);
    CompMat12::from_fn(|i, k| if i == k && a[i] { ONE } else { ZERO })
}

/// Both sectors `δ = +1` and `δ = −1`.
pub fn n_eigensectors(j: HalfInt, alpha: C64) -> Result<[SectorConstraint; 2]> {
    if j.twice() < 1 || j.is_integer() {
        return Err(Error::Domain(format!("j must be a positive half-integer, got {j}")));
    }
    Ok([SectorConstraint::new(Sign::Plus, j, alpha), SectorConstraint::new(Sign::Minus, j, alpha)])
}

/// Commutator of the radial generator with `N̂` on amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutationVerdict {
    pub norm: f64,
    pub commutes: bool,
}

/// `‖[M(r), N̂]‖` in the reduced setting `F = 0, κ = 0`.
pub fn commutation_dichotomy(profile: &MonopoleProfile, j: HalfInt, alpha: C64, epsilon: f64, mass: f64, x: f64) -> Result<CommutationVerdict> {
    let alpha = build_n(alpha, Frame::Schwinger)?.alpha;
    let mut prof = profile.clone();
    prof.f = RadialFn::Zero;
    prof.kappa = 0.0;
    let p = RadialParams::new(epsilon, j, mass, Sign::Plus, alpha, prof);
    let m = full_generator(&p, x)?;
    let n = n_amplitude_matrix(j, alpha);
    let c = m * n - n * m;
    let norm = if j == HalfInt::HALF {
        let cd = DMatrix::from_fn(8, 8, |a, b| c[(MIN_INDICES[a], MIN_INDICES[b])]);
        max_abs_dyn(&cd)
    } else {
        max_abs(&c)
    };
    Ok(CommutationVerdict { norm, commutes: norm < 1e-12 })
}

/// `iγ⁰γ³ = i·diag(1, −1, −1, 1)`.
pub fn k_prefactor() -> BispMat4 {
    gamma(0) * gamma(3) * I
}

/// Amplitude-space `K̂`.
pub fn k_amplitude_matrix(j: HalfInt) -> Result<CompMat12> {
    Ok(kron(&IsoMat3::identity(), &k_prefactor()) * crate::angular_separation::sigma_amplitude_matrix(j)?)
}

/// `K̂ = iγ⁰γ³Σ` applied by finite differences.
pub fn apply_k_fd<F: Fn(f64, f64) -> Vec12>(field: F, theta: f64, phi: f64, step: f64) -> Result<Vec12> {
    let s = apply_sigma_fd(field, theta, phi, step)?;
    Ok(kron(&IsoMat3::identity(), &k_prefactor()) * s)
}

/// Which `K̂` sector a state lies in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSector {
    /// `f = g = 0`, eigenvalue `δa`.
    H,
    /// `h = 0`, `f₄ = μf₁`, `f₃ = μf₂`, eigenvalue `μb` (0 for `j = 1/2`).
    F { mu: Option<Sign> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDecomposition {
    pub sector: KSector,
    pub lambda: f64,
    /// `max |K̂Ψ − λΨ|` over the sample points.
    pub residual: f64,
}

const SECTOR_TOL: f64 = 1e-12;

/// Classifies a sector state into a `K̂` eigen-sector and measures the eigen residual.
pub fn k_decompose(state: &TripletState, x: f64, points: &[(f64, f64)]) -> Result<KDecomposition> {
    state.validate()?;
    let u = state.amplitudes_at(x);
    check_structure(state.j, &u)?;
    let k = ladder_coefficients(state.j)?;
    let fg: f64 = (0..4).chain(8..12).map(|i| u[i].norm_sqr()).sum::<f64>().sqrt();
    let hn: f64 = (4..8).map(|i| u[i].norm_sqr()).sum::<f64>().sqrt();
    let scale = fg.max(hn).max(f64::MIN_POSITIVE);
    let (sector, lambda) = if fg <= SECTOR_TOL * scale {
        (KSector::H, state.delta.value() * k.a)
    } else if hn <= SECTOR_TOL * scale {
        if state.j == HalfInt::HALF {
            (KSector::F { mu: None }, 0.0)
        } else {
            let mu = [Sign::Plus, Sign::Minus].into_iter().find(|m| {
                let s = r(m.value());
                (u[3] - s * u[0]).norm() <= SECTOR_TOL * scale && (u[2] - s * u[1]).norm() <= SECTOR_TOL * scale
            });
            match mu {
                Some(m) => (KSector::F { mu: Some(m) }, m.value() * k.b),
                None => {
                    let plus = ((u[3] - u[0]).norm_sqr() + (u[2] - u[1]).norm_sqr()).sqrt();
                    let minus = ((u[3] + u[0]).norm_sqr() + (u[2] + u[1]).norm_sqr()).sqrt();
                    return Err(Error::Classification(format!("f-block has no definite μ: |f₄−f₁|,|f₃−f₂| = {plus:e}, |f₄+f₁|,|f₃+f₂| = {minus:e}")));
                }
            }
        }
    } else {
        return Err(Error::Classification(format!("mixed state: f/g projection {fg:e}, h projection {hn:e}")));
    };
    let (j, m, eps) = (state.j, state.m, state.epsilon);
    let field = |t: f64, p: f64| assemble_amplitudes(j, m, eps, &u, x, t, p, 0.0).unwrap_or_else(|_| Vec12::zeros());
    let mut residual = 0.0f64;
    for &(theta, phi) in points {
        check_pole(theta)?;
        let kf = apply_k_fd(field, theta, phi, FD_STEP)?;
        let f0 = field(theta, phi);
        residual = residual.max((kf - f0 * r(lambda)).iter().fold(0.0, |a, z| a.max(z.norm())));
    }
    Ok(KDecomposition { sector, lambda, residual })
}

/// Largest `‖K̂(N̂v) − λN̂v‖` over a basis of the `K̂` eigenspace `λ`.
pub fn k_sector_n_stability(j: HalfInt, alpha: C64, lambda: f64) -> Result<f64> {
    let k = k_amplitude_matrix(j)?;
    let mask = component_mask(j);
    let km = DMatrix::from_iterator(12, 12, (mask * k * mask - mask * r(lambda)).iter().cloned());
    let n = n_amplitude_matrix(j, alpha);
    let mut worst = 0.0f64;
    let allowed = allowed_components(j);
    for v in crate::linalg::null_space(&km, 1e-10) {
        if (0..12).any(|i| !allowed[i] && v[i].norm() > 1e-12) {
            continue;
        }
        let v12 = Vec12::from_iterator(v.iter().cloned());
        let w = n * v12;
        let res = k * w - w * r(lambda);
        worst = worst.max(res.iter().fold(0.0, |a, z| a.max(z.norm())));
    }
    Ok(worst)
}

/// Factorization `V(A′, A) = e^{iΓ} D(Γ) Δ(Γ)` with `Γ = (A′ − A)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisChange {
    pub gamma: C64,
    pub d: IsoMat3,
    pub delta: IsoMat3,
    pub v: IsoMat3,
}

pub fn basis_change_v(a_from: C64, a_to: C64) -> BasisChange {
    let gamma = (a_to - a_from) * 0.5;
    let d = d_factor(gamma);
    let delta = delta_matrix(gamma);
    BasisChange { gamma, d, delta, v: d * delta * cis(gamma) }
}

impl BasisChange {
    /// Cartesian-frame factors `exp(−iΓ t·n)` and `I + (e^{−iΓ} − 1)t̃⁰`.
    pub fn cartesian_factors(&self, theta: f64, phi: f64) -> (IsoMat3, IsoMat3) {
        let delta = exp_iso_rotation(self.gamma, &unit_radial(theta, phi));
        let d = IsoMat3::identity() + t_tilde0(theta, phi) * (cis(-self.gamma) - ONE);
        (delta, d)
    }
}

fn scale_blocks(state: &TripletState, factors: [C64; 3]) -> TripletState {
    let mut m = CompMat12::zeros();
    for k in 0..12 {
        m[(k, k)] = factors[k / 4];
    }
    state.with_radial(state.radial.mapped(m))
}

/// `D(Γ)`: multiplies the T₀ block by `e^{−iΓ}`.
pub fn apply_d(state: &TripletState, gamma: C64) -> TripletState {
    let mut s = scale_blocks(state, [ONE, cis(-gamma), ONE]);
    s.b = state.b - gamma;
    s
}

/// `Δ(Γ)`: T₊₁ block by `e^{−iΓ}`, T₋₁ block by `e^{iΓ}`; moves `A` to `A + 2Γ`.
pub fn apply_delta(state: &TripletState, gamma: C64) -> TripletState {
    let mut s = scale_blocks(state, [cis(-gamma), ONE, cis(gamma)]);
    s.a = state.a + gamma * 2.0;
    s
}

/// Rescales the T₀ block by `e^{i(B′ − B)}`.
pub fn apply_b_freedom(state: &TripletState, b_from: C64, b_to: C64) -> TripletState {
    let mut s = scale_blocks(state, [ONE, cis(b_to - b_from), ONE]);
    s.b = state.b + (b_to - b_from);
    s
}

/// `U π̂ U⁻¹(P x)` for a wave-function frame map `U`.
pub fn conjugated_pi(alpha: C64, frame: Frame, theta: f64, phi: f64) -> IsoMat3 {
    let (pt, pp) = (std::f64::consts::PI - theta, phi + std::f64::consts::PI);
    let (u, u_img) = match frame {
        Frame::Schwinger => (IsoMat3::identity(), IsoMat3::identity()),
        Frame::Dirac => (u_dirac(phi), u_dirac(pp)),
        Frame::Cartesian => (u_cartesian(theta, phi), u_cartesian(pt, pp)),
    };
    u * pi_schwinger(alpha) * u_img.try_inverse().expect("frame maps are unitary")
}
