//! Radial systems `dY/dr = M(r) Y` of the separated triplet, their
//! sector reductions, integration and a shooting search for bound modes.
//!
//! The full generator in amplitude space is
//! `M(r) = −iΓ³[Γ⁰(ε + F̃T³) + S/r + (W/r)X − (m + Φ̃T³)]` with `F̃ = e r F`,
//! `Φ̃ = κ r Φ`, `S` the Σ amplitude matrix and `X` the mixing matrix.
//! Reduced systems are `R M P`, where `P` embeds the independent amplitudes
//! through the sector constraints and `R` selects their rows.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::angular_separation::{mixing_amplitude_matrix, sigma_amplitude_matrix, Sign, COMPONENT_NAMES};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::iso_algebra::{cyclic_generators, gamma};
use crate::linalg::{eigen, kron, max_abs_dyn, r, BispMat4, CompMat12, IsoMat3, C64, I, ONE, ZERO};
use crate::monopole_gauges::MonopoleProfile;
use crate::ode::{integrate_adaptive, integrate_on_grid, integrate_rk4, Stats, Tolerance};
use crate::quadrature::RadialGrid;
use crate::su2_wigner::ladder_coefficients;

/// Components kept for `j = 1/2`: f₂, f₄, h₁..h₄, g₁, g₃.
pub const MIN_INDICES: [usize; 8] = [1, 3, 4, 5, 6, 7, 8, 10];
/// Independent amplitudes of a `j ≥ 3/2` sector: f₁..f₄, h₁, h₂.
pub const REDUCED_INDICES: [usize; 6] = [0, 1, 2, 3, 4, 5];
/// Independent amplitudes of a `j = 1/2` sector: f₂, f₄, h₁, h₂.
pub const REDUCED_MIN_INDICES: [usize; 4] = [1, 3, 4, 5];

/// Which radial system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadialCase {
    FullJ,
    FullMin,
    ReducedW0,
    ReducedW,
    ReducedMinW0,
    ReducedMinW,
}

impl RadialCase {
    pub const ALL: [RadialCase; 6] =
        [RadialCase::FullJ, RadialCase::FullMin, RadialCase::ReducedW0, RadialCase::ReducedW, RadialCase::ReducedMinW0, RadialCase::ReducedMinW];

    pub fn dim(self) -> usize {
        self.indices().len()
    }

    pub fn is_reduced(self) -> bool {
        !matches!(self, RadialCase::FullJ | RadialCase::FullMin)
    }

    pub fn is_minimal(self) -> bool {
        matches!(self, RadialCase::FullMin | RadialCase::ReducedMinW0 | RadialCase::ReducedMinW)
    }

    pub fn requires_zero_w(self) -> bool {
        matches!(self, RadialCase::ReducedW0 | RadialCase::ReducedMinW0)
    }

    /// Positions of the system variables in the 12-component layout.
    pub fn indices(self) -> &'static [usize] {
        match self {
            RadialCase::FullJ => &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
            RadialCase::FullMin => &MIN_INDICES,
            RadialCase::ReducedW0 | RadialCase::ReducedW => &REDUCED_INDICES,
            RadialCase::ReducedMinW0 | RadialCase::ReducedMinW => &REDUCED_MIN_INDICES,
        }
    }

    pub fn variable_names(self) -> Vec<&'static str> {
        self.indices().iter().map(|&k| COMPONENT_NAMES[k]).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            RadialCase::FullJ => "full_j",
            RadialCase::FullMin => "full_min",
            RadialCase::ReducedW0 => "reduced_W0",
            RadialCase::ReducedW => "reduced_W",
            RadialCase::ReducedMinW0 => "reduced_min_W0",
            RadialCase::ReducedMinW => "reduced_min_W",
        }
    }
}

impl fmt::Display for RadialCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RadialCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RadialCase::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown radial case '{s}'")))
    }
}

/// Physical parameters of a radial system.
#[derive(Debug, Clone)]
pub struct RadialParams {
    pub epsilon: f64,
    pub j: HalfInt,
    pub mass: f64,
    pub delta: Sign,
    pub alpha: C64,
    pub profile: MonopoleProfile,
}

impl RadialParams {
    pub fn new(epsilon: f64, j: HalfInt, mass: f64, delta: Sign, alpha: C64, profile: MonopoleProfile) -> Self {
        RadialParams { epsilon, j, mass, delta, alpha, profile }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        let mut p = self.clone();
        p.epsilon = epsilon;
        p
    }
}

fn block_gamma(mu: usize) -> CompMat12 {
    kron(&IsoMat3::identity(), &gamma(mu))
}

fn t3_full() -> CompMat12 {
    kron(&cyclic_generators()[2], &BispMat4::identity())
}

/// The 12×12 generator of the full system at radius `x`.
pub fn full_generator(p: &RadialParams, x: f64) -> Result<CompMat12> {
    let s = sigma_amplitude_matrix(p.j)?;
    let xm = mixing_amplitude_matrix();
    let t3 = t3_full();
    let pr = &p.profile;
    let ft = pr.e * x * pr.f(x);
    let pt = if pr.kappa == 0.0 { 0.0 } else { pr.kappa * x * pr.higgs(x) };
    let w = pr.w(x);
    let id = CompMat12::identity();
    let h = block_gamma(0) * (id * r(p.epsilon) + t3 * r(ft)) + s * r(1.0 / x) + xm * r(w / x) - (id * r(p.mass) + t3 * r(pt));
    Ok(block_gamma(3) * h * (-I))
}

/// The constant-coefficient limit `−iΓ³(Γ⁰ε − m)` of the full generator.
pub fn asymptotic_full_generator(epsilon: f64, mass: f64) -> CompMat12 {
    let id = CompMat12::identity();
    block_gamma(3) * (block_gamma(0) * r(epsilon) - id * r(mass)) * (-I)
}

/// Embedding `P` of the independent amplitudes into the 12-component layout.
pub fn sector_embedding(case: RadialCase, delta: Sign, alpha: C64) -> DMatrix<C64> {
    let idx = case.indices();
    let d = r(delta.value());
    let mut p = DMatrix::zeros(12, idx.len());
    for (col, &k) in idx.iter().enumerate() {
        p[(k, col)] = ONE;
        if case.is_reduced() {
            match k {
                0..=3 => p[(11 - k, col)] = d * alpha,
                4 => p[(7, col)] = d,
                5 => p[(6, col)] = d,
                _ => {}
            }
        }
    }
    p
}

/// Row selection `R` with `R P = I`.
pub fn row_selection(case: RadialCase) -> DMatrix<C64> {
    let idx = case.indices();
    let mut s = DMatrix::zeros(idx.len(), 12);
    for (row, &k) in idx.iter().enumerate() {
        s[(row, k)] = ONE;
    }
    s
}

fn approx_eq(a: C64, b: C64) -> bool {
    (a - b).norm() < 1e-12
}

/// A radial system ready for evaluation.
#[derive(Debug, Clone)]
pub struct RadialSystem {
    pub case: RadialCase,
    pub params: RadialParams,
    embedding: DMatrix<C64>,
    selection: DMatrix<C64>,
    parts: GeneratorParts,
}

/// `M(r) = ε·eps + m·mass + inv_r/r + (W/r)·w + F̃·ftil + Φ̃·phitil`.
#[derive(Debug, Clone)]
struct GeneratorParts {
    eps: DMatrix<C64>,
    mass: DMatrix<C64>,
    inv_r: DMatrix<C64>,
    w: DMatrix<C64>,
    ftil: DMatrix<C64>,
    phitil: DMatrix<C64>,
}

impl GeneratorParts {
    fn new(j: HalfInt, embedding: &DMatrix<C64>, selection: &DMatrix<C64>) -> Result<Self> {
        let g3 = block_gamma(3) * (-I);
        let t3 = t3_full();
        let red = |m: CompMat12| selection * DMatrix::from_iterator(12, 12, m.iter().cloned()) * embedding;
        Ok(GeneratorParts {
            eps: red(g3 * block_gamma(0)),
            mass: red(-g3),
            inv_r: red(g3 * sigma_amplitude_matrix(j)?),
            w: red(g3 * mixing_amplitude_matrix()),
            ftil: red(g3 * block_gamma(0) * t3),
            phitil: red(-g3 * t3),
        })
    }
}

/// Builds and validates a radial system.
pub fn assemble(case: RadialCase, params: RadialParams) -> Result<RadialSystem> {
    if params.j.twice() < 1 || params.j.is_integer() {
        return Err(Error::Domain(format!("j must be a positive half-integer, got {}", params.j)));
    }
    let min = params.j == HalfInt::HALF;
    if case.is_minimal() != min {
        return Err(Error::Domain(format!("case {case} does not apply to j = {}", params.j)));
    }
    if params.alpha == ZERO || !params.alpha.re.is_finite() || !params.alpha.im.is_finite() {
        return Err(Error::Domain("α must be a finite nonzero number".into()));
    }
    if case.is_reduced() {
        if !params.profile.f_vanishes() || params.profile.kappa != 0.0 {
            return Err(Error::Consistency(format!("{case} requires F = 0 and κ = 0")));
        }
        if case.requires_zero_w() && !params.profile.w_vanishes() {
            return Err(Error::Consistency(format!("{case} requires W ≡ 0; profile '{}' has W ≠ 0", params.profile.name)));
        }
        if !case.requires_zero_w() && !(approx_eq(params.alpha, ONE) || approx_eq(params.alpha, -ONE)) {
            return Err(Error::Consistency(format!("{case} requires α = ±1, got {}", params.alpha)));
        }
    }
    Ok(assemble_unchecked(case, params))
}

/// Assembles without the sector consistency requirements; used to probe
/// inconsistent reductions.
pub fn assemble_unchecked(case: RadialCase, params: RadialParams) -> RadialSystem {
    let embedding = sector_embedding(case, params.delta, params.alpha);
    let selection = row_selection(case);
    let j = if params.j.twice() >= 1 && !params.j.is_integer() { params.j } else { HalfInt::HALF };
    let parts = GeneratorParts::new(j, &embedding, &selection).expect("half-integer weight");
    RadialSystem { case, params, embedding, selection, parts }
}

impl RadialSystem {
    pub fn dim(&self) -> usize {
        self.case.dim()
    }

    pub fn embedding(&self) -> &DMatrix<C64> {
        &self.embedding
    }

    pub fn with_epsilon(&self, epsilon: f64) -> RadialSystem {
        let mut s = self.clone();
        s.params.epsilon = epsilon;
        s
    }

    /// `M(r)` in the system variables.
    pub fn generator(&self, x: f64) -> DMatrix<C64> {
        let p = &self.params;
        let pr = &p.profile;
        let mut m = &self.parts.eps * r(p.epsilon) + &self.parts.mass * r(p.mass) + &self.parts.inv_r * r(1.0 / x);
        if !pr.w.is_zero() {
            m += &self.parts.w * r(pr.w(x) / x);
        }
        if !pr.f.is_zero() {
            m += &self.parts.ftil * r(pr.e * x * pr.f(x));
        }
        if pr.kappa != 0.0 {
            m += &self.parts.phitil * r(pr.kappa * x * pr.higgs(x));
        }
        m
    }

    /// `‖(I − P R) M P‖`: how far the sector constraints are from being preserved.
    pub fn leakage(&self, x: f64) -> f64 {
        let full = full_generator(&self.params, x).expect("validated at assembly");
        let f = DMatrix::from_iterator(12, 12, full.iter().cloned());
        let mp = f * &self.embedding;
        let proj = &self.embedding * &self.selection;
        max_abs_dyn(&(&mp - proj * &mp))
    }

    /// `lim_{r→0} r M(r)` and the next coefficient, by Richardson extrapolation.
    pub fn residue(&self) -> (DMatrix<C64>, DMatrix<C64>) {
        let h = 1e-6;
        let g1 = self.generator(h) * r(h);
        let g2 = self.generator(2.0 * h) * r(2.0 * h);
        let m_minus1 = &g1 * r(2.0) - &g2;
        let m0 = (&g2 - &g1) * r(1.0 / h);
        (clean(m_minus1, 1e-7), m0)
    }

    /// Constant-coefficient limit at large r (assumes a decaying profile).
    pub fn asymptotic_generator(&self) -> DMatrix<C64> {
        &self.parts.eps * r(self.params.epsilon) + &self.parts.mass * r(self.params.mass)
    }

    /// The pairing `J = P†(iΓ⁰Γ³)P` whose `Im(Y†JY)` is conserved.
    pub fn current_matrix(&self) -> DMatrix<C64> {
        let q = block_gamma(0) * block_gamma(3) * I;
        let qd = DMatrix::from_iterator(12, 12, q.iter().cloned());
        self.embedding.adjoint() * qd * &self.embedding
    }

    pub fn current(&self, y: &DVector<C64>) -> f64 {
        (y.adjoint() * self.current_matrix() * y)[(0, 0)].im
    }

    pub fn rhs(&self) -> impl Fn(f64, &DVector<C64>) -> DVector<C64> + '_ {
        move |x, y| self.generator(x) * y
    }

    /// Adaptive integration reporting on `grid`.
    pub fn integrate_on(&self, grid: &[f64], y0: &DVector<C64>, tol: f64) -> Result<RadialSolution> {
        if grid.len() < 2 || grid[0] <= 0.0 {
            return Err(Error::Domain("grid must start at r0 > 0 and have two nodes".into()));
        }
        if y0.len() != self.dim() {
            return Err(Error::Domain(format!("initial vector has {} entries, system has {}", y0.len(), self.dim())));
        }
        let f = self.rhs();
        let (y, stats) = integrate_on_grid(&f, grid, y0, &Tolerance::relative(tol))?;
        Ok(RadialSolution { case: self.case, r: grid.to_vec(), y, tol, stats })
    }

    /// Adaptive integration from `r0` to `r1` reported on a 400-node geometric grid.
    pub fn integrate(&self, r0: f64, r1: f64, y0: &DVector<C64>, tol: f64) -> Result<RadialSolution> {
        if !(r0 > 0.0 && r1 > r0) {
            return Err(Error::Domain(format!("need 0 < r0 < r1, got {r0}, {r1}")));
        }
        self.integrate_on(&RadialGrid::geometric(r0, r1, 400).r, y0, tol)
    }

    /// Connected blocks of the coupling pattern.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut i = i;
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        let samples = [0.37, 1.0, 3.1, 7.3];
        for &x in &samples {
            let m = self.generator(x);
            for a in 0..n {
                for b in 0..n {
                    if a != b && m[(a, b)].norm() > 0.0 {
                        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                        if ra != rb {
                            parent[ra.max(rb)] = ra.min(rb);
                        }
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..n {
            let ri = find(&mut parent, i);
            match roots.iter().position(|&x| x == ri) {
                Some(k) => groups[k].push(i),
                None => {
                    roots.push(ri);
                    groups.push(vec![i]);
                }
            }
        }
        groups
    }
}

fn clean(mut m: DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    for z in m.iter_mut() {
        if z.re.abs() < tol {
            z.re = 0.0;
        }
        if z.im.abs() < tol {
            z.im = 0.0;
        }
    }
    m
}

fn sub_matrix(m: &DMatrix<C64>, idx: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// Linear combination of the tabulated equation coefficients.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Coef {
    pub eps: C64,
    pub ftil: C64,
    pub mass: C64,
    pub phitil: C64,
    /// Multiplies `b/r`.
    pub b: C64,
    /// Multiplies `a/r`.
    pub a: C64,
    /// Multiplies `√2 W/r`.
    pub w: C64,
}

impl Coef {
    fn eval(&self, v: &CoefValues) -> C64 {
        self.eps * v.eps + self.ftil * v.ftil + self.mass * v.mass + self.phitil * v.phitil + self.b * v.b + self.a * v.a + self.w * v.w
    }
}

struct CoefValues {
    eps: f64,
    ftil: f64,
    mass: f64,
    phitil: f64,
    b: f64,
    a: f64,
    w: f64,
}

/// One tabulated equation `s·i·y_k′ + Σ coef·y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedEquation {
    pub derivative: usize,
    pub sign: f64,
    pub terms: Vec<(usize, Coef)>,
}

fn eq(derivative: usize, sign: f64, terms: Vec<(usize, Coef)>) -> TabulatedEquation {
    TabulatedEquation { derivative, sign, terms }
}

fn ce(s: f64) -> Coef {
    Coef { eps: r(1.0), ftil: r(s), ..Default::default() }
}

fn cm(s: f64) -> Coef {
    Coef { mass: r(-1.0), phitil: r(-s), ..Default::default() }
}

fn cb(s: f64) -> Coef {
    Coef { b: I * s, ..Default::default() }
}

fn ca(s: f64) -> Coef {
    Coef { a: I * s, ..Default::default() }
}

fn cw(s: C64) -> Coef {
    Coef { w: I * s, ..Default::default() }
}

/// The tabulated twelve-equation system, variables in layout order.
pub fn tabulated_full() -> Vec<TabulatedEquation> {
    let (f1, f2, f3, f4, h1, h2, h3, h4, g1, g2, g3, g4) = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11);
    vec![
        eq(f3, -1.0, vec![(f3, ce(1.0)), (f4, cb(-1.0)), (f1, cm(1.0))]),
        eq(f4, 1.0, vec![(f4, ce(1.0)), (f3, cb(1.0)), (h3, cw(r(1.0))), (f2, cm(1.0))]),
        eq(f1, 1.0, vec![(f1, ce(1.0)), (f2, cb(1.0)), (f3, cm(1.0))]),
        eq(f2, -1.0, vec![(f2, ce(1.0)), (f1, cb(-1.0)), (h1, cw(r(-1.0))), (f4, cm(1.0))]),
        eq(g3, -1.0, vec![(g3, ce(-1.0)), (g4, cb(-1.0)), (h4, cw(r(-1.0))), (g1, cm(-1.0))]),
        eq(g4, 1.0, vec![(g4, ce(-1.0)), (g3, cb(1.0)), (g2, cm(-1.0))]),
        eq(g1, 1.0, vec![(g1, ce(-1.0)), (g2, cb(1.0)), (h2, cw(r(1.0))), (g3, cm(-1.0))]),
        eq(g2, -1.0, vec![(g2, ce(-1.0)), (g1, cb(-1.0)), (g4, cm(-1.0))]),
        eq(h3, -1.0, vec![(h3, ce(0.0)), (h4, ca(-1.0)), (f4, cw(r(-1.0))), (h1, cm(0.0))]),
        eq(h4, 1.0, vec![(h4, ce(0.0)), (h3, ca(1.0)), (g3, cw(r(1.0))), (h2, cm(0.0))]),
        eq(h1, 1.0, vec![(h1, ce(0.0)), (h2, ca(1.0)), (f2, cw(r(1.0))), (h3, cm(0.0))]),
        eq(h2, -1.0, vec![(h2, ce(0.0)), (h1, ca(-1.0)), (g1, cw(r(-1.0))), (h4, cm(0.0))]),
    ]
}

/// The tabulated eight-equation system for `j = 1/2` (the twelve-equation
/// system without f₁, f₃, g₂, g₄, where `b = 0` and `a = 1`).
pub fn tabulated_full_min() -> Vec<TabulatedEquation> {
    tabulated_full()
        .into_iter()
        .filter(|e| MIN_INDICES.contains(&e.derivative))
        .map(|mut e| {
            e.terms.retain(|(k, c)| MIN_INDICES.contains(k) && c.b == ZERO);
            e
        })
        .collect()
}

/// Tabulated six-equation sector system; `with_w` selects the coupled form.
pub fn tabulated_reduced(delta: Sign, with_w: bool) -> Vec<TabulatedEquation> {
    let (f1, f2, f3, f4, h1, h2) = (0, 1, 2, 3, 4, 5);
    let d = delta.value();
    let dm = Coef { mass: r(-d), ..Default::default() };
    let e = ce(0.0);
    let w = |s: f64| if with_w { vec![cw(r(s))] } else { vec![] };
    let mut out = vec![
        eq(f3, -1.0, vec![(f3, e), (f4, cb(-1.0)), (f1, cm(0.0))]),
        eq(f4, 1.0, vec![(f4, e), (f3, cb(1.0)), (f2, cm(0.0))]),
        eq(f1, 1.0, vec![(f1, e), (f2, cb(1.0)), (f3, cm(0.0))]),
        eq(f2, -1.0, vec![(f2, e), (f1, cb(-1.0)), (f4, cm(0.0))]),
        eq(h2, -1.0, vec![(h2, e), (h1, Coef { a: -I, ..dm })]),
        eq(h1, 1.0, vec![(h1, e), (h2, Coef { a: I, ..dm })]),
    ];
    let couplings = [(1usize, h2, d), (3, h1, -1.0), (4, f4, -d), (5, f2, 1.0)];
    for &(row, var, s) in &couplings {
        for c in w(s) {
            out[row].terms.push((var, c));
        }
    }
    out
}

/// Tabulated four-equation sector system for `j = 1/2`.
pub fn tabulated_reduced_min(delta: Sign, with_w: bool) -> Vec<TabulatedEquation> {
    let (f2, f4, h1, h2) = (1, 3, 4, 5);
    let d = delta.value();
    let dm = Coef { mass: r(-d), ..Default::default() };
    let e = ce(0.0);
    let mut out = vec![
        eq(f4, 1.0, vec![(f4, e), (f2, cm(0.0))]),
        eq(f2, -1.0, vec![(f2, e), (f4, cm(0.0))]),
        eq(h2, -1.0, vec![(h2, e), (h1, Coef { a: -I, ..dm })]),
        eq(h1, 1.0, vec![(h1, e), (h2, Coef { a: I, ..dm })]),
    ];
    if with_w {
        out[0].terms.push((h2, cw(r(d))));
        out[1].terms.push((h1, cw(r(-1.0))));
        out[2].terms.push((f4, cw(r(-d))));
        out[3].terms.push((f2, cw(r(1.0))));
    }
    out
}

/// The tabulated equations of a case.
pub fn tabulated_equations(case: RadialCase, delta: Sign) -> Vec<TabulatedEquation> {
    match case {
        RadialCase::FullJ => tabulated_full(),
        RadialCase::FullMin => tabulated_full_min(),
        RadialCase::ReducedW0 => tabulated_reduced(delta, false),
        RadialCase::ReducedW => tabulated_reduced(delta, true),
        RadialCase::ReducedMinW0 => tabulated_reduced_min(delta, false),
        RadialCase::ReducedMinW => tabulated_reduced_min(delta, true),
    }
}

/// Generator obtained by isolating the derivative of each tabulated equation:
/// `y_k′ = s·i·Σ coef·y`.
pub fn tabulated_generator(case: RadialCase, p: &RadialParams, x: f64) -> Result<DMatrix<C64>> {
    let k = ladder_coefficients(p.j)?;
    let pr = &p.profile;
    let v = CoefValues {
        eps: p.epsilon,
        ftil: pr.e * x * pr.f(x),
        mass: p.mass,
        phitil: if pr.kappa == 0.0 { 0.0 } else { pr.kappa * x * pr.higgs(x) },
        b: k.b / x,
        a: k.a / x,
        w: std::f64::consts::SQRT_2 * pr.w(x) / x,
    };
    let idx = case.indices();
    let pos = |k: usize| idx.iter().position(|&i| i == k).expect("tabulated variable belongs to the case");
    let n = idx.len();
    let mut m = DMatrix::zeros(n, n);
    for e in tabulated_equations(case, p.delta) {
        let row = pos(e.derivative);
        for (var, c) in &e.terms {
            m[(row, pos(*var))] += I * e.sign * c.eval(&v);
        }
    }
    Ok(m)
}

/// Result of substituting the sector constraints into the full system.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    /// Disagreement of the duplicated equation pairs.
    pub inconsistency: f64,
    /// `‖R M P − M_tabulated‖` for the matching tabulated reduced system.
    pub tabulated_mismatch: f64,
    pub case: RadialCase,
}

impl ReductionReport {
    pub fn consistent(&self, tol: f64) -> bool {
        self.inconsistency < tol
    }
}

/// Substitutes the sector constraints into the full system (F = κ = 0) at radius `x`.
pub fn constraint_reduction_check(j: HalfInt, delta: Sign, alpha: C64, profile: &MonopoleProfile, epsilon: f64, mass: f64, x: f64) -> Result<ReductionReport> {
    let min = j == HalfInt::HALF;
    let with_w = !profile.w_vanishes();
    let case = match (min, with_w) {
        (false, false) => RadialCase::ReducedW0,
        (false, true) => RadialCase::ReducedW,
        (true, false) => RadialCase::ReducedMinW0,
        (true, true) => RadialCase::ReducedMinW,
    };
    let mut prof = profile.clone();
    prof.f = crate::monopole_gauges::RadialFn::Zero;
    prof.kappa = 0.0;
    let params = RadialParams::new(epsilon, j, mass, delta, alpha, prof);
    let sys = assemble_unchecked(case, params.clone());
    let red = sys.generator(x);
    let tabulated = tabulated_generator(case, &params, x)?;
    Ok(ReductionReport { inconsistency: sys.leakage(x), tabulated_mismatch: max_abs_dyn(&(red - tabulated)), case })
}

/// Regular-at-origin data from the indicial problem.
#[derive(Debug, Clone)]
pub struct FrobeniusStart {
    pub exponents: Vec<C64>,
    pub residue: DMatrix<C64>,
    /// Leading vectors `v₀` of the regular solutions.
    pub leading: Vec<DVector<C64>>,
    /// First-order corrections `v₁` (`Y ≈ r^s (v₀ + r v₁)`).
    pub first_order: Vec<DVector<C64>>,
    pub regular_exponents: Vec<C64>,
    pub warning: Option<String>,
}

impl FrobeniusStart {
    pub fn regular_dim(&self) -> usize {
        self.leading.len()
    }

    /// Series values at `r0`, rescaled by `r0^{−s}`.
    pub fn start_vectors(&self, r0: f64) -> Vec<DVector<C64>> {
        self.leading.iter().zip(&self.first_order).map(|(v0, v1)| v0 + v1 * r(r0)).collect()
    }
}

fn solve_least_squares(a: &DMatrix<C64>, b: &DVector<C64>) -> DVector<C64> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-10).unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Indicial exponents of `r M(r)` at 0 and the regular subspace (`Re s > 0`).
pub fn frobenius_start(sys: &RadialSystem) -> FrobeniusStart {
    let (m1, m0) = sys.residue();
    frobenius_from_residue(m1, m0)
}

fn frobenius_from_residue(m1: DMatrix<C64>, m0: DMatrix<C64>) -> FrobeniusStart {
    let n = m1.nrows();
    let es = eigen(&m1);
    let warning = es.defective.then(|| "degenerate indicial equation: residue is defective, generalized eigenvectors used".to_string());
    let mut leading = Vec::new();
    let mut first = Vec::new();
    let mut reg = Vec::new();
    for (k, &s) in es.values.iter().enumerate() {
        if s.re > 1e-9 {
            let v0 = es.vectors.column(k).into_owned();
            let a = &m1 - DMatrix::identity(n, n) * (s + 1.0);
            let v1 = solve_least_squares(&a, &(-(&m0 * &v0)));
            leading.push(v0);
            first.push(v1);
            reg.push(s);
        }
    }
    FrobeniusStart { exponents: es.values.clone(), residue: m1, leading, first_order: first, regular_exponents: reg, warning }
}

/// An integrated radial solution.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub case: RadialCase,
    pub r: Vec<f64>,
    pub y: Vec<DVector<C64>>,
    pub tol: f64,
    pub stats: Stats,
}

impl RadialSolution {
    /// `∫|Y|² dr` by the trapezoid rule on the grid.
    pub fn norm(&self) -> f64 {
        let g = RadialGrid::trapezoid(self.r.clone());
        g.weights.iter().zip(&self.y).map(|(w, y)| w * y.norm_squared()).sum()
    }

    /// Largest one-step defect against a fine fixed-step RK4 reference on each
    /// interval, relative to the largest `‖Y‖` on the grid.
    pub fn ode_residual(&self, sys: &RadialSystem) -> f64 {
        let f = sys.rhs();
        let scale = self.y.iter().map(|y| y.norm()).fold(0.0, f64::max).max(1e-300);
        let mut worst = 0.0f64;
        for k in 1..self.r.len() {
            let (a, b) = (self.r[k - 1], self.r[k]);
            let reference = integrate_rk4(&f, a, b, &self.y[k - 1], 64);
            worst = worst.max((&reference - &self.y[k]).norm() / scale);
        }
        worst
    }

    pub fn column_names(&self) -> Vec<String> {
        let mut out = vec!["r".to_string()];
        for name in self.case.variable_names() {
            out.push(format!("re_{name}"));
            out.push(format!("im_{name}"));
        }
        out
    }

    /// Rows `r, Re y₁, Im y₁, …`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.r
            .iter()
            .zip(&self.y)
            .map(|(x, y)| {
                let mut row = vec![*x];
                for z in y.iter() {
                    row.push(z.re);
                    row.push(z.im);
                }
                row
            })
            .collect()
    }
}

/// Settings for the shooting search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub r0: f64,
    pub r_mid: f64,
    pub rmax: f64,
    pub scan_points: usize,
    pub tol: f64,
    pub grid_points: usize,
}

impl ShootingOptions {
    pub fn for_params(p: &RadialParams, mu: f64) -> Self {
        let scale = p.mass.abs().max(mu.abs()).max(1e-12);
        ShootingOptions { r0: 1e-3, r_mid: 1.0, rmax: 20.0 / scale, scan_points: 120, tol: 1e-10, grid_points: 400 }
    }
}

/// One sample of the matching determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminantSample {
    pub epsilon: f64,
    pub block: usize,
    pub value: C64,
}

/// A located mode.
#[derive(Debug, Clone)]
pub struct Mode {
    pub epsilon: f64,
    pub block: Vec<usize>,
    pub determinant: f64,
    pub ode_residual: f64,
    pub norm: f64,
    pub solution: RadialSolution,
}

/// Result of a mode search.
#[derive(Debug, Clone)]
pub struct ModeSearch {
    pub modes: Vec<Mode>,
    pub trace: Vec<DeterminantSample>,
    /// Blocks skipped because regular and decaying dimensions do not add up.
    pub skipped_blocks: Vec<Vec<usize>>,
}

struct BlockShooter<'a> {
    sys: &'a RadialSystem,
    idx: Vec<usize>,
    opts: ShootingOptions,
    probe: Vec<usize>,
}

impl<'a> BlockShooter<'a> {
    fn gen(&self, s: &RadialSystem, x: f64) -> DMatrix<C64> {
        sub_matrix(&s.generator(x), &self.idx)
    }

    fn frob(&self, s: &RadialSystem) -> FrobeniusStart {
        let (m1, m0) = s.residue();
        frobenius_from_residue(sub_matrix(&m1, &self.idx), sub_matrix(&m0, &self.idx))
    }

    fn decaying_projector(&self, s: &RadialSystem) -> DMatrix<C64> {
        let m = sub_matrix(&s.asymptotic_generator(), &self.idx);
        let n = m.nrows();
        let es = eigen(&m);
        let v = es.vectors.clone();
        let vinv = v.clone().try_inverse().unwrap_or_else(|| DMatrix::zeros(n, n));
        let mut d = DMatrix::zeros(n, n);
        for (k, z) in es.values.iter().enumerate() {
            if z.re < -1e-12 {
                d[(k, k)] = ONE;
            }
        }
        v * d * vinv
    }

    fn columns(&self, eps: f64) -> Result<Option<(Vec<DVector<C64>>, Vec<DVector<C64>>)>> {
        let s = self.sys.with_epsilon(eps);
        let fr = self.frob(&s);
        let pd = self.decaying_projector(&s);
        let n = self.idx.len();
        if fr.regular_dim() + self.probe.len() != n {
            return Ok(None);
        }
        let f = |x: f64, y: &DVector<C64>| self.gen(&s, x) * y;
        let tol = Tolerance::relative(self.opts.tol);
        let mut st = Stats::default();
        let mut left = Vec::new();
        for v in fr.start_vectors(self.opts.r0) {
            left.push(integrate_adaptive(&f, self.opts.r0, self.opts.r_mid, &v, &tol, &mut st)?);
        }
        let mut right = Vec::new();
        for &k in &self.probe {
            let v = pd.column(k).into_owned();
            right.push(integrate_adaptive(&f, self.opts.rmax, self.opts.r_mid, &v, &tol, &mut st)?);
        }
        Ok(Some((left, right)))
    }

    fn determinant(&self, eps: f64) -> Result<Option<C64>> {
        Ok(self.columns(eps)?.map(|(l, rt)| {
            let mut cols = gram_schmidt(&l);
            cols.extend(gram_schmidt(&rt));
            DMatrix::from_columns(&cols).determinant()
        }))
    }

    fn solution(&self, eps: f64, full_dim: usize) -> Result<RadialSolution> {
        let s = self.sys.with_epsilon(eps);
        let fr = self.frob(&s);
        let pd = self.decaying_projector(&s);
        let (left, right) = self.columns(eps)?.ok_or_else(|| Error::Consistency("block dimensions changed".into()))?;
        let scales: Vec<f64> = left.iter().chain(right.iter()).map(|c| c.norm().max(1e-300)).collect();
        let cols: Vec<DVector<C64>> =
            left.iter().cloned().chain(right.iter().map(|c| -c)).zip(&scales).map(|(c, s)| c / r(*s)).collect();
        let a = DMatrix::from_columns(&cols);
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("right singular vectors");
        let kmin = (0..svd.singular_values.len())
            .min_by(|x, y| svd.singular_values[*x].partial_cmp(&svd.singular_values[*y]).unwrap())
            .unwrap_or(0);
        let coeff: Vec<C64> = vt.row(kmin).iter().zip(&scales).map(|(z, s)| z.conj() / *s).collect();
        let nr = left.len();
        let starts = fr.start_vectors(self.opts.r0);
        let mut y0 = DVector::zeros(self.idx.len());
        for (c, v) in coeff.iter().take(nr).zip(&starts) {
            y0 += v * *c;
        }
        let mut yinf = DVector::zeros(self.idx.len());
        for (c, &k) in coeff.iter().skip(nr).zip(&self.probe) {
            yinf += pd.column(k) * *c;
        }
        let tol = Tolerance::relative(self.opts.tol * 1e-2);
        let f = |x: f64, y: &DVector<C64>| self.gen(&s, x) * y;
        let half = self.opts.grid_points / 2;
        let g_left = RadialGrid::geometric(self.opts.r0, self.opts.r_mid, half).r;
        let mut g_right = RadialGrid::geometric(self.opts.r_mid, self.opts.rmax, self.opts.grid_points - half + 1).r;
        g_right.reverse();
        let (yl, st1) = integrate_on_grid(&f, &g_left, &y0, &tol)?;
        let (mut yr, st2) = integrate_on_grid(&f, &g_right, &yinf, &tol)?;
        yr.reverse();
        g_right.reverse();
        let embed = |v: &DVector<C64>| {
            let mut out = DVector::zeros(full_dim);
            for (a, &k) in self.idx.iter().enumerate() {
                out[k] = v[a];
            }
            out
        };
        let mut rr = g_left.clone();
        let mut ys: Vec<DVector<C64>> = yl.iter().map(embed).collect();
        rr.extend_from_slice(&g_right[1..]);
        ys.extend(yr[1..].iter().map(embed));
        let stats = Stats { accepted: st1.accepted + st2.accepted, rejected: st1.rejected + st2.rejected };
        let mut sol = RadialSolution { case: s.case, r: rr, y: ys, tol: self.opts.tol, stats };
        let n = sol.norm().sqrt();
        if n > 0.0 && n.is_finite() {
            for y in sol.y.iter_mut() {
                *y /= r(n);
            }
        }
        Ok(sol)
    }
}

/// Modified Gram–Schmidt; the implied triangular factor has a positive diagonal,
/// so determinants keep their phase.
fn gram_schmidt(cols: &[DVector<C64>]) -> Vec<DVector<C64>> {
    let mut out: Vec<DVector<C64>> = Vec::with_capacity(cols.len());
    for c in cols {
        let mut v = c.clone();
        for q in &out {
            let proj = q.dotc(&v);
            v -= q * proj;
        }
        let n = v.norm();
        out.push(if n > 0.0 { v / r(n) } else { v });
    }
    out
}

fn probe_columns(pd: &DMatrix<C64>) -> Vec<usize> {
    let n = pd.ncols();
    let rank = pd.clone().svd(false, false).singular_values.iter().filter(|s| **s > 1e-8).count();
    let mut chosen: Vec<usize> = Vec::new();
    for k in 0..n {
        if chosen.len() == rank {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(k);
        let cols: Vec<DVector<C64>> = trial.iter().map(|&c| pd.column(c).into_owned()).collect();
        let m = DMatrix::from_columns(&cols);
        let sv = m.svd(false, false).singular_values;
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if smin > 1e-6 {
            chosen = trial;
        }
    }
    chosen
}

/// Scans `ε ∈ range` for zeros of the matching determinant and refines them by bisection.
pub fn find_modes(sys: &RadialSystem, range: (f64, f64), opts: &ShootingOptions) -> Result<ModeSearch> {
    if !(range.0 < range.1) {
        return Err(Error::Domain(format!("empty ε range ({}, {})", range.0, range.1)));
    }
    let mid = 0.5 * (range.0 + range.1);
    let mut trace = Vec::new();
    let mut modes = Vec::new();
    let mut skipped = Vec::new();
    for (bi, idx) in sys.blocks().into_iter().enumerate() {
        let proto = BlockShooter { sys, idx: idx.clone(), opts: *opts, probe: Vec::new() };
        let pd = proto.decaying_projector(&sys.with_epsilon(mid));
        let probe = probe_columns(&pd);
        let shooter = BlockShooter { probe, ..proto };
        let fr = shooter.frob(&sys.with_epsilon(mid));
        if fr.regular_dim() + shooter.probe.len() != idx.len() {
            skipped.push(idx);
            continue;
        }
        let n = opts.scan_points.max(2);
        let eps: Vec<f64> = (0..n).map(|k| range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64).collect();
        let values: Vec<Result<Option<C64>>> = eps.par_iter().map(|&e| shooter.determinant(e)).collect();
        let mut dets = Vec::with_capacity(n);
        for (e, v) in eps.iter().zip(values) {
            if let Some(d) = v? {
                trace.push(DeterminantSample { epsilon: *e, block: bi, value: d });
                dets.push((*e, d));
            }
        }
        let brackets: Vec<(f64, f64, C64)> = dets
            .windows(2)
            .filter_map(|w| {
                let (e0, d0) = w[0];
                let (e1, d1) = w[1];
                let phase = if d0.norm() > 0.0 { d0.conj() / d0.norm() } else { ONE };
                let h0 = (d0 * phase).re;
                let h1 = (d1 * phase).re;
                (h0 * h1 <= 0.0).then_some((e0, e1, phase))
            })
            .collect();
        let found: Vec<Result<Option<Mode>>> = brackets
            .par_iter()
            .map(|&(a, b, phase)| refine_root(&shooter, a, b, phase, opts, sys.dim()))
            .collect();
        for m in found {
            if let Some(m) = m? {
                modes.push(m);
            }
        }
    }
    modes.sort_by(|a, b| a.epsilon.partial_cmp(&b.epsilon).unwrap());
    trace.sort_by(|a, b| (a.block, a.epsilon).partial_cmp(&(b.block, b.epsilon)).unwrap());
    Ok(ModeSearch { modes, trace, skipped_blocks: skipped })
}

fn refine_root(sh: &BlockShooter<'_>, a: f64, b: f64, phase: C64, opts: &ShootingOptions, full_dim: usize) -> Result<Option<Mode>> {
    let h = |e: f64| -> Result<(f64, f64)> {
        let d = sh.determinant(e)?.unwrap_or(ZERO);
        Ok(((d * phase).re, d.norm()))
    };
    let (mut lo, mut hi) = (a, b);
    let (mut hlo, nlo) = h(lo)?;
    let (_, nhi) = h(hi)?;
    let scale = nlo.max(nhi);
    // Bisect well below tol so the pieces meet continuously at the match point.
    let eps_tol = (opts.tol * 1e-3).max(4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0));
    while hi - lo > eps_tol {
        let m = 0.5 * (lo + hi);
        let (hm, _) = h(m)?;
        if hm == 0.0 {
            lo = m;
            hi = m;
            break;
        }
        if (hm > 0.0) == (hlo > 0.0) {
            lo = m;
            hlo = hm;
        } else {
            hi = m;
        }
    }
    let root = 0.5 * (lo + hi);
    let (_, droot) = h(root)?;
    if scale == 0.0 || droot / scale > 1e-4 {
        return Ok(None);
    }
    let solution = sh.solution(root, full_dim)?;
    let sys_root = sh.sys.with_epsilon(root);
    let ode_residual = solution.ode_residual(&sys_root);
    let norm = solution.norm();
    if !(norm.is_finite() && ode_residual < 10.0 * opts.tol.max(1e-12)) {
        return Ok(None);
    }
    Ok(Some(Mode { epsilon: root, block: sh.idx.clone(), determinant: droot / scale, ode_residual, norm, solution }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(j: i32, eps: f64, mass: f64, prof: MonopoleProfile) -> RadialParams {
        RadialParams::new(eps, HalfInt::from_twice(j), mass, Sign::Plus, ONE, prof)
    }

    #[test]
    fn case_dims() {
        let dims: Vec<usize> = RadialCase::ALL.iter().map(|c| c.dim()).collect();
        assert_eq!(dims, vec![12, 8, 6, 6, 4, 4]);
        assert_eq!("reduced_W0".parse::<RadialCase>().unwrap(), RadialCase::ReducedW0);
    }

    #[test]
    fn reduced_rejects_dyon_terms() {
        let mut p = MonopoleProfile::trivial();
        p.kappa = 0.5;
        let e = assemble(RadialCase::ReducedW0, params(3, 1.0, 0.5, p));
        assert!(matches!(e, Err(Error::Consistency(_))));
        let e = assemble(RadialCase::ReducedW0, params(3, 1.0, 0.5, MonopoleProfile::bps(1.0)));
        assert!(matches!(e, Err(Error::Consistency(_))));
    }

    #[test]
    fn residue_keeps_centrifugal_entry() {
        let s = assemble(RadialCase::ReducedW0, params(3, 1.0, 0.5, MonopoleProfile::trivial())).unwrap();
        let (m1, _) = s.residue();
        let reference = s.generator(1.0);
        assert!((m1[(2, 3)] - reference[(2, 3)]).norm() < 1e-9);
    }
}
