//! Matrix elements `∫ Ψ̄ Ĝ Ψ′ dV` over the sphere and a radial grid, N_A-parity
//! classification of observables and the selection-rule factor.
//!
//! Fields carry a `1/r` prefactor, so `r² dr` cancels and the radial sum runs
//! over the bare amplitudes. Kernels are sums of separable terms
//! `ρ(r) · a(θ, φ) · K`, which lets the quadrature factor into a 12×12
//! angular tensor and a 12×12 radial tensor.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angular_separation::{angular_factors, Sign, TripletState};
use crate::discrete_symmetry::{n_amplitude_matrix, n_phase, pi_schwinger};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::iso_algebra::{gamma, parity_kernel};
use crate::linalg::{cis, kron, max_abs, BispMat4, CompMat12, IsoMat3, KahanSum, Vec12, C64, ONE, ZERO};
use crate::quadrature::{RadialGrid, SphereGrid};

pub type RadialMultiplier = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
pub type AngularMultiplier = Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>;

/// Named radial multipliers for text-defined observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialTag {
    One,
    R,
    /// `e^{−r}`
    Exp,
}

/// Named angular multipliers for text-defined observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularTag {
    One,
    CosTheta,
    SinThetaCosPhi,
    SinThetaSinPhi,
    Cos2Theta,
}

impl RadialTag {
    pub fn multiplier(self) -> Option<RadialMultiplier> {
        match self {
            RadialTag::One => None,
            RadialTag::R => Some(Arc::new(|x: f64| C64::new(x, 0.0))),
            RadialTag::Exp => Some(Arc::new(|x: f64| C64::new((-x).exp(), 0.0))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RadialTag::One => "one",
            RadialTag::R => "r",
            RadialTag::Exp => "exp",
        }
    }
}

impl AngularTag {
    pub fn multiplier(self) -> Option<AngularMultiplier> {
        let f: fn(f64, f64) -> f64 = match self {
            AngularTag::One => return None,
            AngularTag::CosTheta => |t, _| t.cos(),
            AngularTag::SinThetaCosPhi => |t, p| t.sin() * p.cos(),
            AngularTag::SinThetaSinPhi => |t, p| t.sin() * p.sin(),
            AngularTag::Cos2Theta => |t, _| t.cos() * t.cos(),
        };
        Some(Arc::new(move |t, p| C64::new(f(t, p), 0.0)))
    }

    pub fn name(self) -> &'static str {
        match self {
            AngularTag::One => "one",
            AngularTag::CosTheta => "cos_theta",
            AngularTag::SinThetaCosPhi => "sin_theta_cos_phi",
            AngularTag::SinThetaSinPhi => "sin_theta_sin_phi",
            AngularTag::Cos2Theta => "cos2_theta",
        }
    }
}

impl FromStr for RadialTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [RadialTag::One, RadialTag::R, RadialTag::Exp]
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown radial multiplier '{s}' (one, r, exp)")))
    }
}

impl FromStr for AngularTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [AngularTag::One, AngularTag::CosTheta, AngularTag::SinThetaCosPhi, AngularTag::SinThetaSinPhi, AngularTag::Cos2Theta]
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown angular multiplier '{s}' (one, cos_theta, sin_theta_cos_phi, sin_theta_sin_phi, cos2_theta)")))
    }
}

/// Named bispinor kernels.
pub fn bispinor_kernel(name: &str) -> Result<BispMat4> {
    let g5 = crate::iso_algebra::gamma5();
    Ok(match name {
        "identity" => BispMat4::identity(),
        "gamma0" => gamma(0),
        "gamma1" => gamma(1),
        "gamma2" => gamma(2),
        "gamma3" => gamma(3),
        "gamma5" => g5,
        "i_gamma5" => g5 * crate::linalg::I,
        "gamma0_gamma5" => gamma(0) * g5,
        _ => return Err(Error::Parse(format!("unknown bispinor kernel '{name}'"))),
    })
}

/// One separable piece `ρ(r) a(θ, φ) K` of a kernel.
#[derive(Clone)]
pub struct KernelTerm {
    pub matrix: CompMat12,
    pub radial: Option<RadialMultiplier>,
    pub angular: Option<AngularMultiplier>,
}

impl KernelTerm {
    pub fn constant(iso: &IsoMat3, bisp: &BispMat4) -> Self {
        KernelTerm { matrix: kron(iso, bisp), radial: None, angular: None }
    }

    pub fn with_radial(mut self, f: RadialMultiplier) -> Self {
        self.radial = Some(f);
        self
    }

    pub fn with_angular(mut self, f: AngularMultiplier) -> Self {
        self.angular = Some(f);
        self
    }

    fn radial_at(&self, x: f64) -> C64 {
        self.radial.as_ref().map_or(ONE, |f| f(x))
    }

    fn angular_at(&self, theta: f64, phi: f64) -> C64 {
        self.angular.as_ref().map_or(ONE, |f| f(theta, phi))
    }
}

/// An observable `Ĝ(x) = Σ ρᵢ(r) aᵢ(θ, φ) Kᵢ` acting on 12-component fields.
///
/// "Hermitian" means `(I ⊗ γ⁰) Ĝ` is Hermitian, so that `∫Ψ̄ĜΨ` is real.
#[derive(Clone)]
pub struct Observable {
    pub name: String,
    pub terms: Vec<KernelTerm>,
    pub hermitian: bool,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Observable({}, {} terms, hermitian = {})", self.name, self.terms.len(), self.hermitian)
    }
}

fn gamma0_lift() -> CompMat12 {
    kron(&IsoMat3::identity(), &gamma(0))
}

impl Observable {
    pub fn new(name: &str, terms: Vec<KernelTerm>, hermitian: bool) -> Self {
        Observable { name: name.to_string(), terms, hermitian }
    }

    /// `iso ⊗ bisp`, constant over space.
    pub fn constant(name: &str, iso: IsoMat3, bisp: BispMat4, hermitian: bool) -> Self {
        Self::new(name, vec![KernelTerm::constant(&iso, &bisp)], hermitian)
    }

    pub fn identity() -> Self {
        Self::constant("identity", IsoMat3::identity(), BispMat4::identity(), true)
    }

    /// `I ⊗ γ⁰`; `∫Ψ̄γ⁰Ψ = ∫Ψ†Ψ` is the norm.
    pub fn density() -> Self {
        Self::constant("density", IsoMat3::identity(), gamma(0), true)
    }

    pub fn kernel(&self, x: f64, theta: f64, phi: f64) -> CompMat12 {
        self.terms.iter().fold(CompMat12::zeros(), |acc, t| acc + t.matrix * (t.radial_at(x) * t.angular_at(theta, phi)))
    }

    /// Largest `‖γ⁰Ĝ − (γ⁰Ĝ)†‖` over the given points `(r, θ, φ)`.
    pub fn hermiticity_defect(&self, points: &[(f64, f64, f64)]) -> f64 {
        let g0 = gamma0_lift();
        points.iter().fold(0.0, |m, &(x, t, p)| {
            let k = g0 * self.kernel(x, t, p);
            m.max(max_abs(&(k - k.adjoint())))
        })
    }

    /// Fails if declared Hermitian but the defect exceeds `tol`.
    pub fn check_hermiticity(&self, points: &[(f64, f64, f64)], tol: f64) -> Result<f64> {
        let d = self.hermiticity_defect(points);
        if self.hermitian && d > tol {
            return Err(Error::Consistency(format!("observable '{}' is declared Hermitian but γ⁰Ĝ deviates by {d:e}", self.name)));
        }
        Ok(d)
    }
}

/// Quadrature settings: product sphere rule and radial grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    pub r0: f64,
    pub r1: f64,
    pub n_r: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { n_theta: 96, n_phi: 96, r0: 1e-3, r1: 20.0, n_r: 400 }
    }
}

/// Prepared grids.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub spec: QuadratureSpec,
    pub sphere: SphereGrid,
    pub half: SphereGrid,
    pub radial: RadialGrid,
}

impl Quadrature {
    pub fn new(spec: QuadratureSpec) -> Self {
        Quadrature {
            spec,
            sphere: SphereGrid::new(spec.n_theta, spec.n_phi),
            half: SphereGrid::upper_half(spec.n_theta, spec.n_phi),
            radial: RadialGrid::geometric(spec.r0, spec.r1, spec.n_r),
        }
    }

    pub fn with_radial(mut self, radial: RadialGrid) -> Self {
        self.radial = radial;
        self
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(QuadratureSpec::default())
    }
}

type Tensor = [[C64; 12]; 12];

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `Σ w ρ(r) conj(u_k) u′_l` over the radial grid.
fn radial_tensor(bra: &TripletState, ket: &TripletState, term: &KernelTerm, grid: &RadialGrid) -> Result<Tensor> {
    let mut acc = [[KahanSum::default(); 12]; 12];
    for (&x, &w) in grid.r.iter().zip(&grid.weights) {
        let rho = term.radial_at(x);
        if !finite(rho) {
            return Err(Error::NonFinite(format!("radial multiplier at r = {x}")));
        }
        let (u, v) = (bra.amplitudes_at(x), ket.amplitudes_at(x));
        let s = rho * w;
        for k in 0..12 {
            if u[k] == ZERO {
                continue;
            }
            let cu = u[k].conj() * s;
            for l in 0..12 {
                acc[k][l].add(cu * v[l]);
            }
        }
    }
    Ok(acc.map(|row| row.map(|s| s.value())))
}

/// `Σ w a(θ, φ) conj(D_k) D′_l` over the sphere grid.
fn angular_tensor(bra: &TripletState, ket: &TripletState, term: &KernelTerm, grid: &SphereGrid) -> Result<Tensor> {
    let mut acc = [[KahanSum::default(); 12]; 12];
    for p in &grid.points {
        let a = term.angular_at(p.theta, p.phi);
        if !finite(a) {
            return Err(Error::NonFinite(format!("angular multiplier at θ = {}, φ = {}", p.theta, p.phi)));
        }
        let db = angular_factors(bra.j, bra.m, p.theta, p.phi)?;
        let dk = angular_factors(ket.j, ket.m, p.theta, p.phi)?;
        let s = a * p.weight;
        for k in 0..12 {
            let cd = db[k].conj() * s;
            for l in 0..12 {
                acc[k][l].add(cd * dk[l]);
            }
        }
    }
    Ok(acc.map(|row| row.map(|s| s.value())))
}

fn element_on(bra: &TripletState, g: &Observable, ket: &TripletState, sphere: &SphereGrid, radial: &RadialGrid) -> Result<C64> {
    bra.validate()?;
    ket.validate()?;
    let g0 = gamma0_lift();
    let mut total = KahanSum::default();
    for term in &g.terms {
        let m = g0 * term.matrix;
        if m.iter().any(|z| !finite(*z)) {
            return Err(Error::NonFinite(format!("kernel matrix of '{}'", g.name)));
        }
        let ang = angular_tensor(bra, ket, term, sphere)?;
        let rad = radial_tensor(bra, ket, term, radial)?;
        for k in 0..12 {
            for l in 0..12 {
                if m[(k, l)] != ZERO {
                    total.add(m[(k, l)] * ang[k][l] * rad[k][l]);
                }
            }
        }
    }
    Ok(total.value())
}

/// `∫ Ψ̄ Ĝ Ψ′ dV` over the full sphere, `Ψ̄ = Ψ†(I ⊗ γ⁰)`, at `t = 0`.
pub fn matrix_element(bra: &TripletState, g: &Observable, ket: &TripletState, quad: &Quadrature) -> Result<C64> {
    element_on(bra, g, ket, &quad.sphere, &quad.radial)
}

/// The same integral restricted to θ ∈ (0, π/2).
pub fn half_space_element(bra: &TripletState, g: &Observable, ket: &TripletState, quad: &Quadrature) -> Result<C64> {
    element_on(bra, g, ket, &quad.half, &quad.radial)
}

/// `π̂_α ⊗ Π`, the pointwise part of `N̂`.
pub fn n_pointwise(alpha: C64) -> CompMat12 {
    kron(&pi_schwinger(alpha), &parity_kernel())
}

/// `(π̂ ⊗ Π)† (I ⊗ γ⁰) Ĝ(Px) (π̂ ⊗ Π)`, to be compared with `Ω (I ⊗ γ⁰) Ĝ(x)`.
pub fn transformed_kernel(g: &Observable, a: C64, x: f64, theta: f64, phi: f64) -> CompMat12 {
    let n = n_pointwise(cis(a));
    n.adjoint() * gamma0_lift() * g.kernel(x, PI - theta, phi + PI) * n
}

/// N_A-parity of an observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityClass {
    pub omega: Option<Sign>,
    pub a: C64,
    /// Largest relative deviation from `+Ĝ` and from `−Ĝ`.
    pub defect_plus: f64,
    pub defect_minus: f64,
}

pub const PARITY_POINTS: usize = 50;
const PARITY_TOL: f64 = 1e-10;

/// Tests the parity condition at 50 seeded random points.
pub fn classify_parity(g: &Observable, a: C64) -> ParityClass {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let g0 = gamma0_lift();
    let (mut dp, mut dm) = (0.0f64, 0.0f64);
    for _ in 0..PARITY_POINTS {
        let x = rng.gen_range(0.1..5.0);
        let theta = rng.gen_range(0.05..PI - 0.05);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let lhs = transformed_kernel(g, a, x, theta, phi);
        let rhs = g0 * g.kernel(x, theta, phi);
        let scale = max_abs(&lhs).max(max_abs(&rhs)).max(f64::MIN_POSITIVE);
        dp = dp.max(max_abs(&(lhs - rhs)) / scale);
        dm = dm.max(max_abs(&(lhs + rhs)) / scale);
    }
    let omega = if dp < PARITY_TOL {
        Some(Sign::Plus)
    } else if dm < PARITY_TOL {
        Some(Sign::Minus)
    } else {
        None
    };
    ParityClass { omega, a, defect_plus: dp, defect_minus: dm }
}

/// `1 + Ω δδ′ conj(e^{iπ(J+1)}) e^{iπ(J′+1)}`.
///
/// The integrand satisfies `f(Px) = Ω conj(N) N′ f(x)`, so the bra phase
/// enters conjugated and the factor is 0 or 2 for every pair of
/// half-integer weights.
pub fn selection_factor(omega: Sign, delta: Sign, j: HalfInt, delta_p: Sign, jp: HalfInt) -> C64 {
    ONE + n_phase(j).conj() * n_phase(jp) * (omega.value() * delta.value() * delta_p.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Forbidden,
    Doubled,
    /// Factor neither 0 nor 2; reported without assertion.
    Descriptive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Forbidden => "forbidden",
            Verdict::Doubled => "doubled",
            Verdict::Descriptive => "descriptive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRow {
    pub j: HalfInt,
    pub jp: HalfInt,
    pub m: HalfInt,
    pub mp: HalfInt,
    pub delta: Sign,
    pub delta_p: Sign,
    pub omega: Sign,
    pub factor: C64,
    pub value: C64,
    pub half: C64,
    pub verdict: Verdict,
    /// `|value| / |half|` when forbidden, `|value − 2·half| / |value|` when doubled;
    /// both denominators are floored at `1e−6 √(‖Ψ‖²‖Ψ′‖²)`.
    pub defect: f64,
    /// The half-space integral is below that floor: the pair is decoupled anyway.
    pub structural_zero: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub parity: ParityClass,
    pub rows: Vec<SelectionRow>,
}

impl SelectionReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

pub const FORBIDDEN_TOL: f64 = 1e-9;
pub const DOUBLED_TOL: f64 = 1e-8;
const STRUCTURAL_FLOOR: f64 = 1e-6;

/// Largest `N̂`-eigen residual of a state at a few radii, relative to its size.
pub fn sector_defect(state: &TripletState) -> f64 {
    let n = n_amplitude_matrix(state.j, state.alpha());
    let lam = n_phase(state.j) * state.delta.value();
    [0.3, 1.0, 2.5, 6.0].iter().fold(0.0, |m, &x| {
        let u: Vec12 = state.amplitudes_at(x);
        let size = u.norm().max(f64::MIN_POSITIVE);
        m.max((n * u - u * lam).norm() / size)
    })
}

/// Checks the selection rule for each bra/ket pair; all states must share `A`
/// and lie in their declared `δ`-sectors.
pub fn selection_rule_check(g: &Observable, a: C64, pairs: &[(TripletState, TripletState)], quad: &Quadrature) -> Result<SelectionReport> {
    let parity = classify_parity(g, a);
    let omega = parity.omega.ok_or_else(|| {
        Error::Classification(format!("observable '{}' has no definite parity at A = {a}: defects {:e} (+), {:e} (−)", g.name, parity.defect_plus, parity.defect_minus))
    })?;
    let mut rows = Vec::with_capacity(pairs.len());
    for (bra, ket) in pairs {
        for s in [bra, ket] {
            if (s.a - a).norm() > 1e-14 {
                return Err(Error::Consistency(format!("state has A = {}, observable classified at A = {a}", s.a)));
            }
            let d = sector_defect(s);
            if d > 1e-10 {
                return Err(Error::Consistency(format!("state (j = {}, δ = {}) is not an N̂ eigenstate: defect {d:e}", s.j, s.delta.value())));
            }
        }
        let factor = selection_factor(omega, bra.delta, bra.j, ket.delta, ket.j);
        let value = matrix_element(bra, g, ket, quad)?;
        let half = half_space_element(bra, g, ket, quad)?;
        let density = Observable::density();
        let norms = (matrix_element(bra, &density, bra, quad)?.re * matrix_element(ket, &density, ket, quad)?.re).sqrt();
        let floor = (STRUCTURAL_FLOOR * norms).max(f64::MIN_POSITIVE);
        let structural_zero = half.norm() < floor;
        let (verdict, defect, pass) = if factor.norm() < 1e-12 {
            let d = value.norm() / half.norm().max(floor);
            (Verdict::Forbidden, d, d < FORBIDDEN_TOL)
        } else if (factor - 2.0).norm() < 1e-12 {
            let d = (value - half * 2.0).norm() / value.norm().max(floor);
            (Verdict::Doubled, d, d < DOUBLED_TOL)
        } else {
            (Verdict::Descriptive, 0.0, true)
        };
        rows.push(SelectionRow {
            j: bra.j,
            jp: ket.j,
            m: bra.m,
            mp: ket.m,
            delta: bra.delta,
            delta_p: ket.delta,
            omega,
            factor,
            value,
            half,
            verdict,
            defect,
            structural_zero,
            pass,
        });
    }
    Ok(SelectionReport { parity, rows })
}

/// The six-term breakdown of `⟨Ψ|Ĝ|Ψ⟩` with `Ψ = T₊Φ₊ + T₀Φ₀ + δμe^{iA}T₋Φ₋`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    /// `(+,+)`, `(0,0)`, `2Re(+,0)`, `e^{i(A−A*)}(−,−)`, `2δμRe(e^{iA}(+,−))`, `2δμRe(e^{iA}(0,−))`.
    pub terms: [C64; 6],
    /// `e^{i(A−A*)}`.
    pub minus_scale: C64,
    pub sum: C64,
    pub direct: C64,
    pub defect: f64,
}

pub const EXPANSION_LABELS: [&str; 6] = ["(+,+)", "(0,0)", "2Re(+,0)", "e^{i(A-A*)}(-,-)", "2dmRe(e^{iA}(+,-))", "2dmRe(e^{iA}(0,-))"];

impl Expansion {
    pub fn consistent(&self, tol: f64) -> bool {
        self.defect < tol
    }
}

fn block_state(state: &TripletState, block: usize, scale: C64) -> TripletState {
    let mut m = CompMat12::zeros();
    for k in 4 * block..4 * block + 4 {
        m[(k, k)] = scale;
    }
    state.with_radial(state.radial.mapped(m))
}

/// Splits `⟨Ψ|Ĝ|Ψ⟩` into iso-block terms; `μ` defaults to +1. The "2Re" forms
/// assume `Ĝ` is Hermitian.
pub fn expectation_expansion(state: &TripletState, g: &Observable, quad: &Quadrature) -> Result<Expansion> {
    let mu = state.mu.map_or(1.0, |m| m.value());
    let c = cis(state.a) * (state.delta.value() * mu);
    let plus = block_state(state, 0, ONE);
    let zero = block_state(state, 1, ONE);
    let minus = block_state(state, 2, ONE / c);
    let me = |a: &TripletState, b: &TripletState| matrix_element(a, g, b, quad);
    let dm = state.delta.value() * mu;
    let e_ia = cis(state.a);
    let minus_scale = cis(state.a - state.a.conj());
    let terms = [
        me(&plus, &plus)?,
        me(&zero, &zero)?,
        C64::new(2.0 * me(&plus, &zero)?.re, 0.0),
        minus_scale * me(&minus, &minus)?,
        C64::new(2.0 * dm * (e_ia * me(&plus, &minus)?).re, 0.0),
        C64::new(2.0 * dm * (e_ia * me(&zero, &minus)?).re, 0.0),
    ];
    let sum = terms.iter().fold(ZERO, |a, t| a + t);
    let direct = me(state, state)?;
    let defect = (sum - direct).norm() / direct.norm().max(f64::MIN_POSITIVE);
    Ok(Expansion { terms, minus_scale, sum, direct, defect })
}
