//! Monopole backgrounds, their potentials in the Cartesian (hedgehog),
//! Dirac and Schwinger isotopic frames, and the gauge transformation law
//! `W′ = O(c)W + (1/e) f(c) ∂c` with `f(c) = −2(I + c^×)/(1 + c·c)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::iso_algebra::{cross_matrix, gibbs_rotation, levi_civita, u_cartesian, u_dirac, GibbsVector};
use crate::linalg::{r, IsoMat3, C64, ONE, ZERO};

/// Minimum distance (in sinθ or angle) from a string singularity.
pub const STRING_GUARD: f64 = 1e-6;

/// A real function of r, analytic or cubic-interpolated from a table.
#[derive(Clone)]
pub enum RadialFn {
    Zero,
    Analytic(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Tabulated(CubicSpline),
}

impl RadialFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RadialFn::Zero => 0.0,
            RadialFn::Analytic(f) => f(x),
            RadialFn::Tabulated(s) => s.eval(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RadialFn::Zero)
    }
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialFn::Zero => write!(f, "Zero"),
            RadialFn::Analytic(_) => write!(f, "Analytic"),
            RadialFn::Tabulated(s) => write!(f, "Tabulated({} nodes)", s.x.len()),
        }
    }
}

/// Natural cubic spline; constant extrapolation outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Domain("spline needs at least two (r, value) pairs".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("spline abscissae must increase strictly".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            let mut upper = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                if i > 1 {
                    let w = h0 / diag[i - 1];
                    diag[i] -= w * upper[i - 1];
                    rhs[i] -= w * rhs[i - 1];
                }
            }
            for i in (1..n - 1).rev() {
                m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            }
        }
        Ok(CubicSpline { x, y, m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = self.x.partition_point(|v| *v <= t).saturating_sub(1).min(n - 2);
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - t) / h;
        let b = (t - self.x[k]) / h;
        a * self.y[k] + b * self.y[k + 1] + ((a * a * a - a) * self.m[k] + (b * b * b - b) * self.m[k + 1]) * h * h / 6.0
    }

    /// Reads a two-column whitespace-separated table; `#` starts a comment.
    pub fn from_table(text: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad number {s:?}", lineno + 1)));
            if cols.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected two columns", lineno + 1)));
            }
            xs.push(parse(cols[0])?);
            ys.push(parse(cols[1])?);
        }
        CubicSpline::new(xs, ys)
    }
}

/// Background radial data. `W(r) = e r² K(r) + 1`.
#[derive(Debug, Clone)]
pub struct MonopoleProfile {
    pub name: String,
    pub w: RadialFn,
    pub f: RadialFn,
    pub phi: RadialFn,
    pub e: f64,
    pub kappa: f64,
}

impl MonopoleProfile {
    /// Embedded Abelian monopole: `K = −1/(e r²)`, so `W ≡ 0`.
    pub fn trivial() -> Self {
        MonopoleProfile { name: "trivial".into(), w: RadialFn::Zero, f: RadialFn::Zero, phi: RadialFn::Zero, e: 1.0, kappa: 0.0 }
    }

    /// `W = μr/sinh(μr)`, `F = 0`, `Φ = (μ coth(μr) − 1/r)/(e r)`.
    pub fn bps(mu: f64) -> Self {
        let e = 1.0;
        let w = move |x: f64| {
            let z = mu * x;
            if z.abs() < 1e-3 {
                let z2 = z * z;
                1.0 - z2 / 6.0 + 7.0 * z2 * z2 / 360.0
            } else {
                z / z.sinh()
            }
        };
        let phi = move |x: f64| {
            let z = mu * x;
            if z.abs() < 1e-3 {
                let z2 = z * z;
                mu * mu * (1.0 / 3.0 - z2 / 45.0) / e
            } else {
                (mu / z.tanh() - 1.0 / x) / (e * x)
            }
        };
        MonopoleProfile {
            name: format!("bps:{mu}"),
            w: RadialFn::Analytic(Arc::new(w)),
            f: RadialFn::Zero,
            phi: RadialFn::Analytic(Arc::new(phi)),
            e,
            kappa: 0.0,
        }
    }

    /// User-supplied structure function and dyon/Higgs functions.
    pub fn custom(name: &str, w: RadialFn, f: RadialFn, phi: RadialFn, e: f64, kappa: f64) -> Self {
        MonopoleProfile { name: name.into(), w, f, phi, e, kappa }
    }

    pub fn w(&self, x: f64) -> f64 {
        self.w.eval(x)
    }

    pub fn f(&self, x: f64) -> f64 {
        self.f.eval(x)
    }

    pub fn higgs(&self, x: f64) -> f64 {
        self.phi.eval(x)
    }

    /// `K = (W − 1)/(e r²)`.
    pub fn k(&self, x: f64) -> f64 {
        (self.w(x) - 1.0) / (self.e * x * x)
    }

    /// `r² K + 1/e = W/e`, the amplitude appearing in the unitary-frame potentials.
    pub fn q(&self, x: f64) -> f64 {
        self.w(x) / self.e
    }

    /// True when `W` vanishes on a fixed probe grid.
    pub fn w_vanishes(&self) -> bool {
        self.w.is_zero() || probe_grid().all(|x| self.w(x).abs() < 1e-14)
    }

    pub fn f_vanishes(&self) -> bool {
        self.f.is_zero() || probe_grid().all(|x| self.f(x).abs() < 1e-14)
    }
}

fn probe_grid() -> impl Iterator<Item = f64> {
    (0..64).map(|k| 1e-3 * (5e4f64).powf(k as f64 / 63.0))
}

/// Built-in profiles: `trivial`, `bps`, `bps:μ` or `bps(μ)`.
pub fn builtin_profile(name: &str) -> Result<MonopoleProfile> {
    let name = name.trim();
    if name == "trivial" {
        return Ok(MonopoleProfile::trivial());
    }
    if name == "bps" {
        return Ok(MonopoleProfile::bps(1.0));
    }
    let arg = name
        .strip_prefix("bps:")
        .or_else(|| name.strip_prefix("bps(").and_then(|s| s.strip_suffix(')')));
    if let Some(a) = arg {
        let mu: f64 = a.trim().parse().map_err(|_| Error::UnknownProfile(name.into()))?;
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::UnknownProfile(name.into()));
        }
        return Ok(MonopoleProfile::bps(mu));
    }
    Err(Error::UnknownProfile(name.into()))
}

/// Isotopic frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    Cartesian,
    Dirac,
    Schwinger,
}

impl std::str::FromStr for Frame {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cartesian" | "cart" | "hedgehog" => Ok(Frame::Cartesian),
            "dirac" => Ok(Frame::Dirac),
            "schwinger" => Ok(Frame::Schwinger),
            _ => Err(Error::Parse(format!("unknown frame {s:?}"))),
        }
    }
}

/// Spherical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Point {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        Point { r, theta, phi }
    }

    fn shifted(&self, alpha: usize, h: f64) -> Point {
        let mut p = *self;
        match alpha {
            1 => p.r += h,
            2 => p.theta += h,
            3 => p.phi += h,
            _ => {}
        }
        p
    }
}

/// `W^{(a)}_α` at one point; `w[α]` is the isotopic 3-vector, α = t, r, θ, φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSample {
    pub w: [Vector3<C64>; 4],
}

impl PotentialSample {
    pub fn max_deviation(&self, other: &PotentialSample) -> f64 {
        (0..4).flat_map(|a| (self.w[a] - other.w[a]).iter().map(|z| z.norm()).collect::<Vec<_>>()).fold(0.0, f64::max)
    }
}

/// A gauge potential as a function of position.
pub trait PotentialField: Send + Sync {
    fn frame(&self) -> Frame;
    fn coupling(&self) -> f64;
    fn eval(&self, p: Point) -> Result<PotentialSample>;
}

/// Hedgehog potential `W^{(a)}_k = K ε_{ajk} x_j`, `W^{(a)}_t = x_a F`, in spherical components.
#[derive(Debug, Clone)]
pub struct HedgehogPotential {
    pub profile: MonopoleProfile,
}

impl PotentialField for HedgehogPotential {
    fn frame(&self) -> Frame {
        Frame::Cartesian
    }

    fn coupling(&self) -> f64 {
        self.profile.e
    }

    fn eval(&self, p: Point) -> Result<PotentialSample> {
        let (st, ct, sp, cp) = (p.theta.sin(), p.theta.cos(), p.phi.sin(), p.phi.cos());
        let kr2 = self.profile.k(p.r) * p.r * p.r;
        let e_theta = Vector3::new(ct * cp, ct * sp, -st);
        let e_phi = Vector3::new(-sp, cp, 0.0);
        let n = Vector3::new(st * cp, st * sp, ct);
        let wt = n * (p.r * self.profile.f(p.r));
        let wth = e_phi * kr2;
        let wph = e_theta * (-kr2 * st);
        let cv = |v: Vector3<f64>| v.map(r);
        Ok(PotentialSample { w: [cv(wt), Vector3::zeros(), cv(wth), cv(wph)] })
    }
}

/// Closed-form potential in the Dirac or Schwinger frame.
#[derive(Debug, Clone)]
pub struct UnitaryFramePotential {
    pub profile: MonopoleProfile,
    pub frame: Frame,
}

impl UnitaryFramePotential {
    pub fn dirac(profile: MonopoleProfile) -> Self {
        UnitaryFramePotential { profile, frame: Frame::Dirac }
    }

    pub fn schwinger(profile: MonopoleProfile) -> Self {
        UnitaryFramePotential { profile, frame: Frame::Schwinger }
    }
}

impl PotentialField for UnitaryFramePotential {
    fn frame(&self) -> Frame {
        self.frame
    }

    fn coupling(&self) -> f64 {
        self.profile.e
    }

    fn eval(&self, p: Point) -> Result<PotentialSample> {
        let e = self.profile.e;
        let q = self.profile.q(p.r);
        let (st, ct, sp, cp) = (p.theta.sin(), p.theta.cos(), p.phi.sin(), p.phi.cos());
        let wt = Vector3::new(ZERO, ZERO, r(p.r * self.profile.f(p.r)));
        match self.frame {
            Frame::Dirac => {
                if (p.theta - std::f64::consts::PI).abs() < STRING_GUARD {
                    return Err(Error::StringSingularity(format!("Dirac frame at θ = {}", p.theta)));
                }
                let wth = Vector3::new(r(-q * sp), r(q * cp), ZERO);
                let wph = Vector3::new(r(-q * st * cp), r(-q * st * sp), r((ct - 1.0) / e));
                Ok(PotentialSample { w: [wt, Vector3::zeros(), wth, wph] })
            }
            Frame::Schwinger => {
                if st.abs() < STRING_GUARD {
                    return Err(Error::StringSingularity(format!("Schwinger frame at θ = {}", p.theta)));
                }
                let wth = Vector3::new(ZERO, r(q), ZERO);
                let wph = Vector3::new(r(-q * st), ZERO, r(ct / e));
                Ok(PotentialSample { w: [wt, Vector3::zeros(), wth, wph] })
            }
            Frame::Cartesian => Err(Error::Domain("closed unitary-frame form requested for the Cartesian frame".into())),
        }
    }
}

/// Position-dependent Gibbs parameter with its coordinate derivatives.
pub trait GibbsField: Send + Sync {
    fn value(&self, p: Point) -> Result<GibbsVector>;

    /// `∂_α c` for α = t, r, θ, φ; default is a central difference with step 1e−6.
    fn gradient(&self, p: Point) -> Result<[Vector3<C64>; 4]> {
        let h = 1e-6;
        let mut out = [Vector3::zeros(); 4];
        for (alpha, slot) in out.iter_mut().enumerate().skip(1) {
            let plus = self.value(p.shifted(alpha, h))?.c;
            let minus = self.value(p.shifted(alpha, -h))?.c;
            *slot = (plus - minus) / r(2.0 * h);
        }
        Ok(out)
    }
}

/// `c = tan(θ/2)(sinφ, −cosφ, 0)`: hedgehog → Dirac frame.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToDiracField;

impl GibbsField for ToDiracField {
    fn value(&self, p: Point) -> Result<GibbsVector> {
        if (1.0 + p.theta.cos()).abs() < STRING_GUARD {
            return Err(Error::StringSingularity(format!("Gibbs field at θ = {}", p.theta)));
        }
        Ok(GibbsVector::to_dirac(p.theta, p.phi))
    }

    fn gradient(&self, p: Point) -> Result<[Vector3<C64>; 4]> {
        self.value(p)?;
        let t = (0.5 * p.theta).tan();
        let sec2 = 1.0 + t * t;
        let (sp, cp) = (p.phi.sin(), p.phi.cos());
        Ok([
            Vector3::zeros(),
            Vector3::zeros(),
            Vector3::new(r(0.5 * sec2 * sp), r(-0.5 * sec2 * cp), ZERO),
            Vector3::new(r(t * cp), r(t * sp), ZERO),
        ])
    }
}

/// `c′ = (0, 0, −tan φ/2)`: Dirac → Schwinger frame.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToSchwingerField;

impl GibbsField for ToSchwingerField {
    fn value(&self, p: Point) -> Result<GibbsVector> {
        if (0.5 * p.phi).cos().abs() < STRING_GUARD {
            return Err(Error::SingularParameter(format!("tan(φ/2) at φ = {}", p.phi)));
        }
        Ok(GibbsVector::to_schwinger(p.phi))
    }

    fn gradient(&self, p: Point) -> Result<[Vector3<C64>; 4]> {
        self.value(p)?;
        let t = (0.5 * p.phi).tan();
        Ok([Vector3::zeros(), Vector3::zeros(), Vector3::zeros(), Vector3::new(ZERO, ZERO, r(-0.5 * (1.0 + t * t)))])
    }
}

/// `−c` of another field; its rotation is the inverse one.
pub struct Negated<G: GibbsField>(pub G);

impl<G: GibbsField> GibbsField for Negated<G> {
    fn value(&self, p: Point) -> Result<GibbsVector> {
        Ok(self.0.value(p)?.neg())
    }

    fn gradient(&self, p: Point) -> Result<[Vector3<C64>; 4]> {
        let g = self.0.gradient(p)?;
        Ok([-g[0], -g[1], -g[2], -g[3]])
    }
}

/// Arbitrary Gibbs field from a closure, differentiated numerically.
pub struct ClosureField<F: Fn(Point) -> GibbsVector + Send + Sync>(pub F);

impl<F: Fn(Point) -> GibbsVector + Send + Sync> GibbsField for ClosureField<F> {
    fn value(&self, p: Point) -> Result<GibbsVector> {
        Ok((self.0)(p))
    }
}

/// `W′ = O(c)W + (1/e) f(c) ∂c`, evaluated lazily.
pub struct GaugeTransformed {
    pub base: Arc<dyn PotentialField>,
    pub gibbs: Arc<dyn GibbsField>,
    pub target: Frame,
}

impl GaugeTransformed {
    pub fn new(base: Arc<dyn PotentialField>, gibbs: Arc<dyn GibbsField>, target: Frame) -> Self {
        GaugeTransformed { base, gibbs, target }
    }
}

impl PotentialField for GaugeTransformed {
    fn frame(&self) -> Frame {
        self.target
    }

    fn coupling(&self) -> f64 {
        self.base.coupling()
    }

    fn eval(&self, p: Point) -> Result<PotentialSample> {
        let w = self.base.eval(p)?;
        let g = self.gibbs.value(p)?;
        let grad = self.gibbs.gradient(p)?;
        let o = gibbs_rotation(&g)?;
        let f = gauge_kernel(&g)?;
        let inv_e = r(1.0 / self.base.coupling());
        let mut out = [Vector3::zeros(); 4];
        for a in 0..4 {
            out[a] = o * w.w[a] + f * grad[a] * inv_e;
        }
        Ok(PotentialSample { w: out })
    }
}

/// Applies the gauge law to a base potential.
pub fn gauge_transform(base: Arc<dyn PotentialField>, gibbs: Arc<dyn GibbsField>, target: Frame) -> GaugeTransformed {
    GaugeTransformed::new(base, gibbs, target)
}

/// `f(c) = −2(I + c^×)/(1 + c·c)`.
pub fn gauge_kernel(g: &GibbsVector) -> Result<IsoMat3> {
    let den = ONE + g.square();
    if den.norm() < 1e-14 {
        return Err(Error::SingularParameter(format!("{den}")));
    }
    Ok((IsoMat3::identity() + cross_matrix(&g.c)) * (r(-2.0) / den))
}

/// Hedgehog → Dirac → Schwinger chain for a profile.
pub fn gauge_pipeline(profile: &MonopoleProfile) -> (Arc<dyn PotentialField>, Arc<dyn PotentialField>, Arc<dyn PotentialField>) {
    let cart: Arc<dyn PotentialField> = Arc::new(HedgehogPotential { profile: profile.clone() });
    let dirac: Arc<dyn PotentialField> = Arc::new(gauge_transform(cart.clone(), Arc::new(ToDiracField), Frame::Dirac));
    let schw: Arc<dyn PotentialField> = Arc::new(gauge_transform(dirac.clone(), Arc::new(ToSchwingerField), Frame::Schwinger));
    (cart, dirac, schw)
}

/// Maximum deviation of the gauge-transformed Dirac-frame potential from the
/// embedded Abelian one, `(0, 0, A^D)` with `A^D_φ = g(cosθ − 1)`, `g = 1/e`.
pub fn abelian_embedding_check(profile: &MonopoleProfile, p: Point) -> Result<f64> {
    let (_, dirac, _) = gauge_pipeline(profile);
    let w = dirac.eval(p)?;
    let g = 1.0 / profile.e;
    let mut a = PotentialSample { w: [Vector3::zeros(); 4] };
    a.w[3][2] = r(g * (p.theta.cos() - 1.0));
    Ok(w.max_deviation(&a))
}

/// `F^{(a)}_{αβ} = ∂_α W_β − ∂_β W_α + e ε_{abc} W^{(b)}_α W^{(c)}_β` by central differences.
pub fn field_strength(field: &dyn PotentialField, p: Point, step: f64) -> Result<[[Vector3<C64>; 4]; 4]> {
    let w = field.eval(p)?;
    let mut dw = [[Vector3::<C64>::zeros(); 4]; 4];
    for alpha in 1..4 {
        let f = |h: f64| field.eval(p.shifted(alpha, h));
        let (m2, m1, p1, p2) = (f(-2.0 * step)?, f(-step)?, f(step)?, f(2.0 * step)?);
        for beta in 0..4 {
            dw[alpha][beta] = (m2.w[beta] - m1.w[beta] * r(8.0) + p1.w[beta] * r(8.0) - p2.w[beta]) / r(12.0 * step);
        }
    }
    let e = field.coupling();
    let mut out = [[Vector3::<C64>::zeros(); 4]; 4];
    for alpha in 0..4 {
        for beta in 0..4 {
            let mut v = dw[alpha][beta] - dw[beta][alpha];
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        v[a] += w.w[alpha][b] * w.w[beta][c] * (e * levi_civita(a, b, c));
                    }
                }
            }
            out[alpha][beta] = v;
        }
    }
    Ok(out)
}

/// Magnitude of the radial magnetic field `|F_{θφ}|/(r² sinθ)`.
pub fn radial_field_magnitude(field: &dyn PotentialField, p: Point) -> Result<f64> {
    let f = field_strength(field, p, 1e-4)?;
    Ok(f[2][3].norm() / (p.r * p.r * p.theta.sin()))
}

/// Isotopic map between wave-function frames; `ψ_to = M ψ_from`.
pub fn wavefunction_gauge_map(from: Frame, to: Frame, theta: f64, phi: f64) -> Result<IsoMat3> {
    let to_schwinger = |f: Frame| -> IsoMat3 {
        match f {
            Frame::Schwinger => IsoMat3::identity(),
            Frame::Dirac => u_dirac(phi).adjoint(),
            Frame::Cartesian => u_cartesian(theta, phi).adjoint(),
        }
    };
    let from_schwinger = |f: Frame| -> IsoMat3 {
        match f {
            Frame::Schwinger => IsoMat3::identity(),
            Frame::Dirac => u_dirac(phi),
            Frame::Cartesian => u_cartesian(theta, phi),
        }
    };
    if from == to {
        return Err(Error::Domain(format!("wave-function map needs distinct frames, got {from:?} twice")));
    }
    Ok(from_schwinger(to) * to_schwinger(from))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic_interior() {
        let xs: Vec<f64> = (0..41).map(|k| k as f64 * 0.25).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::new(xs, ys).unwrap();
        assert!((s.eval(3.1) - 3.1f64.sin()).abs() < 1e-4);
    }

    #[test]
    fn spline_table_parse() {
        let s = CubicSpline::from_table("# r W\n0 1\n1 2\n2 3\n").unwrap();
        assert!((s.eval(1.5) - 2.5).abs() < 1e-12);
        assert!(CubicSpline::from_table("0 1 2\n").is_err());
    }

    #[test]
    fn profile_names() {
        assert!(builtin_profile("trivial").unwrap().w_vanishes());
        assert!(!builtin_profile("bps:2").unwrap().w_vanishes());
        assert!(builtin_profile("bps(0.5)").is_ok());
        assert!(matches!(builtin_profile("kink"), Err(Error::UnknownProfile(_))));
    }

    #[test]
    fn same_frame_map_is_rejected() {
        assert!(wavefunction_gauge_map(Frame::Dirac, Frame::Dirac, 1.0, 1.0).is_err());
    }
}
