//! Isotopic generators, Gibbs-vector rotations, Weyl-basis Dirac matrices
//! and the SL(2,C) → SO(3) vector map.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};

use crate::error::{Error, Result};
use crate::linalg::{c, cis, expm, r, BispMat4, IsoMat3, Mat2, C64, I, ONE, ZERO};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Pauli matrices `σ¹, σ², σ³`.
pub fn pauli() -> [Mat2; 3] {
    [
        Matrix2::new(ZERO, ONE, ONE, ZERO),
        Matrix2::new(ZERO, -I, I, ZERO),
        Matrix2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// Spin-1 generators in the cyclic basis `(T₊₁, T₀, T₋₁)`.
pub fn cyclic_generators() -> [IsoMat3; 3] {
    let h = r(1.0 / SQRT2);
    let ih = I * h;
    [
        Matrix3::new(ZERO, h, ZERO, h, ZERO, h, ZERO, h, ZERO),
        Matrix3::new(ZERO, -ih, ZERO, ih, ZERO, -ih, ZERO, ih, ZERO),
        Matrix3::from_diagonal(&Vector3::new(ONE, ZERO, -ONE)),
    ]
}

/// Cartesian generators `(j_k)_{ab} = −i ε_{kab}`.
pub fn cartesian_generators() -> [IsoMat3; 3] {
    let mut out = [IsoMat3::zeros(); 3];
    for (k, m) in out.iter_mut().enumerate() {
        for a in 0..3 {
            for b in 0..3 {
                m[(a, b)] = -I * levi_civita(k, a, b);
            }
        }
    }
    out
}

pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Map from Cartesian to cyclic components: `S j_k S⁻¹ = t_k`.
pub fn s_matrix() -> IsoMat3 {
    let h = 1.0 / SQRT2;
    Matrix3::new(r(-h), c(0.0, h), ZERO, ZERO, ZERO, ONE, r(h), c(0.0, h), ZERO)
}

/// `S⁻¹ = S†`.
pub fn s_inverse() -> IsoMat3 {
    s_matrix().adjoint()
}

/// Gibbs parameter of a rotation; complex entries give SO(3,C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsVector {
    pub c: Vector3<C64>,
}

impl GibbsVector {
    pub fn new(c: [C64; 3]) -> Self {
        GibbsVector { c: Vector3::new(c[0], c[1], c[2]) }
    }

    pub fn real(x: f64, y: f64, z: f64) -> Self {
        GibbsVector::new([r(x), r(y), r(z)])
    }

    pub fn zero() -> Self {
        GibbsVector::real(0.0, 0.0, 0.0)
    }

    /// Rotation taking the radial direction `n_{θφ}` to the third axis.
    pub fn to_dirac(theta: f64, phi: f64) -> Self {
        let t = (0.5 * theta).tan();
        GibbsVector::real(t * phi.sin(), -t * phi.cos(), 0.0)
    }

    /// `c′ = (0, 0, −tan φ/2)`, from the Dirac to the Schwinger frame.
    pub fn to_schwinger(phi: f64) -> Self {
        GibbsVector::real(0.0, 0.0, -(0.5 * phi).tan())
    }

    /// `c″` with `O(c′)·O(c) = O(c″)`.
    pub fn composite(theta: f64, phi: f64) -> Self {
        let (t, p) = ((0.5 * theta).tan(), (0.5 * phi).tan());
        GibbsVector::real(t * p, -t, -p)
    }

    pub fn neg(&self) -> Self {
        GibbsVector { c: -self.c }
    }

    /// `c·c` (bilinear, no conjugation).
    pub fn square(&self) -> C64 {
        self.c.iter().map(|z| z * z).sum()
    }
}

/// `(c^×)_{ac} = −ε_{acb} c_b`.
pub fn cross_matrix(v: &Vector3<C64>) -> IsoMat3 {
    let mut m = IsoMat3::zeros();
    for a in 0..3 {
        for cc in 0..3 {
            for b in 0..3 {
                m[(a, cc)] -= v[b] * levi_civita(a, cc, b);
            }
        }
    }
    m
}

/// `O(c) = I + 2(c^× + (c^×)²)/(1 + c·c)`.
pub fn gibbs_rotation(g: &GibbsVector) -> Result<IsoMat3> {
    let den = ONE + g.square();
    if den.norm() < 1e-14 {
        return Err(Error::SingularParameter(format!("{den}")));
    }
    let x = cross_matrix(&g.c);
    Ok(IsoMat3::identity() + (x + x * x) * (r(2.0) / den))
}

/// `t·n` in the cyclic basis.
pub fn t_dot(n: &[f64; 3]) -> IsoMat3 {
    let t = cyclic_generators();
    t[0] * r(n[0]) + t[1] * r(n[1]) + t[2] * r(n[2])
}

/// `exp(−iA t·n)`; at `n = ẑ` this is [`delta_matrix`]`(A)`.
pub fn exp_iso_rotation(a: C64, n: &[f64; 3]) -> IsoMat3 {
    expm(&(t_dot(n) * (-I * a)))
}

/// `Δ(A) = diag(e^{−iA}, 1, e^{iA})`.
pub fn delta_matrix(a: C64) -> IsoMat3 {
    Matrix3::from_diagonal(&Vector3::new(cis(-a), ONE, cis(a)))
}

/// Radial unit vector.
pub fn unit_radial(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Wave-function map from the Schwinger to the Dirac frame, `U(φ) = S O(−c′) S⁻¹`.
pub fn u_dirac(phi: f64) -> IsoMat3 {
    Matrix3::from_diagonal(&Vector3::new(cis(r(-phi)), ONE, cis(r(phi))))
}

/// Wave-function map from the Schwinger to the Cartesian frame, `U(θ,φ) = S O(−c″) S⁻¹`.
pub fn u_cartesian(theta: f64, phi: f64) -> IsoMat3 {
    let (s, ct) = (theta.sin(), theta.cos());
    let em = cis(r(-phi));
    let ep = cis(r(phi));
    let h = 1.0 / SQRT2;
    Matrix3::new(
        em * (0.5 * (1.0 + ct)),
        em * (-h * s),
        em * (0.5 * (1.0 - ct)),
        r(h * s),
        r(ct),
        r(-h * s),
        ep * (0.5 * (1.0 - ct)),
        ep * (h * s),
        ep * (0.5 * (1.0 + ct)),
    )
}

/// `t⁰ = diag(0, 1, 0)`.
pub fn t0_projector() -> IsoMat3 {
    Matrix3::from_diagonal(&Vector3::new(ZERO, ONE, ZERO))
}

/// `t⁰ = ½(t₁² + t₂² − t₃²)`.
pub fn t0_from_squares() -> IsoMat3 {
    let t = cyclic_generators();
    (t[0] * t[0] + t[1] * t[1] - t[2] * t[2]) * r(0.5)
}

/// `D(Γ) = e^{−iΓ t⁰}`.
pub fn d_factor(gamma: C64) -> IsoMat3 {
    Matrix3::from_diagonal(&Vector3::new(ONE, cis(-gamma), ONE))
}

/// Cartesian-frame projector `t̃⁰ = U(θ,φ) t⁰ U⁻¹(θ,φ)` in closed form.
pub fn t_tilde0(theta: f64, phi: f64) -> IsoMat3 {
    let (s, ct) = (theta.sin(), theta.cos());
    let e = cis(r(phi));
    let ei = ONE / e;
    let h = 1.0 / SQRT2;
    Matrix3::new(
        r(0.5 * s * s),
        ei * (-h * s * ct),
        ei * ei * (-0.5 * s * s),
        e * (-h * s * ct),
        r(ct * ct),
        ei * (h * s * ct),
        e * e * (-0.5 * s * s),
        e * (h * s * ct),
        r(0.5 * s * s),
    )
}

/// Weyl-basis Dirac matrices `γ⁰ = [[0,I],[I,0]]`, `γᵏ = [[0,−σᵏ],[σᵏ,0]]`.
pub fn gamma(mu: usize) -> BispMat4 {
    let mut g = Matrix4::zeros();
    let blk = match mu {
        0 => {
            let id = Mat2::identity();
            g.fixed_view_mut::<2, 2>(0, 2).copy_from(&id);
            g.fixed_view_mut::<2, 2>(2, 0).copy_from(&id);
            return g;
        }
        k @ 1..=3 => pauli()[k - 1],
        _ => panic!("γ index {mu} out of range"),
    };
    g.fixed_view_mut::<2, 2>(0, 2).copy_from(&(-blk));
    g.fixed_view_mut::<2, 2>(2, 0).copy_from(&blk);
    g
}

/// `γ⁵ = −iγ⁰γ¹γ²γ³ = diag(−1, −1, 1, 1)`.
pub fn gamma5() -> BispMat4 {
    gamma(0) * gamma(1) * gamma(2) * gamma(3) * (-I)
}

/// Bispinor parity kernel `Π = −γ⁵γ¹`.
pub fn parity_kernel() -> BispMat4 {
    -(gamma5() * gamma(1))
}

/// `iσ¹² = (i/4)[γ¹, γ²] = diag(½, −½, ½, −½)`.
pub fn i_sigma12() -> BispMat4 {
    (gamma(1) * gamma(2) - gamma(2) * gamma(1)) * (I * 0.25)
}

pub fn metric(mu: usize) -> f64 {
    if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `B(c) = (I − iσ·c)/√(1 + c·c)`, the + branch.
pub fn sl2c_from_gibbs(g: &GibbsVector) -> Result<Mat2> {
    let den = ONE + g.square();
    if den.norm() < 1e-14 {
        return Err(Error::SingularParameter(format!("{den}")));
    }
    let s = pauli();
    let sc = s[0] * g.c[0] + s[1] * g.c[1] + s[2] * g.c[2];
    Ok((Mat2::identity() - sc * I) / den.sqrt())
}

/// Parameters `k_a` of `B = σ^a k_a` with `σ⁰ = I`.
pub fn k_parameters(b: &Mat2) -> [C64; 4] {
    [
        (b[(0, 0)] + b[(1, 1)]) * 0.5,
        (b[(0, 1)] + b[(1, 0)]) * 0.5,
        I * (b[(0, 1)] - b[(1, 0)]) * 0.5,
        (b[(0, 0)] - b[(1, 1)]) * 0.5,
    ]
}

/// Totally antisymmetric symbol with upper indices, `ε^{0123} = −1`.
fn eps_upper(idx: [usize; 4]) -> f64 {
    let mut v = idx;
    let mut sign = -1.0;
    for i in 0..4 {
        for k in (i + 1)..4 {
            if v[i] == v[k] {
                return 0.0;
            }
        }
    }
    for i in 0..4 {
        while v[i] != i {
            let t = v[i];
            v.swap(i, t);
            sign = -sign;
        }
    }
    sign
}

/// Lorentz matrix `L^a_b(k, k*)` of an SL(2,C) element.
pub fn vector_map_of(b: &Mat2) -> Matrix4<C64> {
    let k = k_parameters(b);
    let ks: Vec<C64> = k.iter().map(|z| z.conj()).collect();
    let up = |v: &[C64], a: usize| v[a] * metric(a);
    let kk: C64 = (0..4).map(|n| up(&k, n) * ks[n]).sum();
    let mut out = Matrix4::zeros();
    for a in 0..4 {
        for bb in 0..4 {
            let cc = bb;
            let mut val = k[cc] * up(&ks, a) + ks[cc] * up(&k, a);
            if a == cc {
                val -= kk;
            }
            let mut e = ZERO;
            for n in 0..4 {
                for m in 0..4 {
                    e += k[n] * ks[m] * (metric(cc) * eps_upper([cc, a, n, m]));
                }
            }
            val += I * e;
            out[(a, bb)] = val * metric(bb);
        }
    }
    out
}

/// Spatial 3×3 block of a Lorentz matrix.
pub fn spatial_block(l: &Matrix4<C64>) -> IsoMat3 {
    l.fixed_view::<3, 3>(1, 1).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn generator_algebra() {
        let t = cyclic_generators();
        let comm = t[0] * t[1] - t[1] * t[0];
        assert!(max_abs(&(comm - t[2] * I)) < 1e-15);
        let cas = t[0] * t[0] + t[1] * t[1] + t[2] * t[2];
        assert!(max_abs(&(cas - IsoMat3::identity() * r(2.0))) < 1e-15);
    }

    #[test]
    fn s_intertwines_generators() {
        let (s, si) = (s_matrix(), s_inverse());
        assert!(max_abs(&(s * si - IsoMat3::identity())) < 1e-15);
        for (jk, tk) in cartesian_generators().iter().zip(cyclic_generators().iter()) {
            assert!(max_abs(&(s * jk * si - tk)) < 1e-15);
        }
    }

    #[test]
    fn dirac_matrices() {
        assert!(max_abs(&(gamma5() - Matrix4::from_diagonal(&nalgebra::Vector4::new(-ONE, -ONE, ONE, ONE)))) < 1e-15);
        let p = parity_kernel();
        assert!(max_abs(&(p * p - BispMat4::identity())) < 1e-15);
        for i in 0..4 {
            for k in 0..4 {
                let expected = if i + k == 3 { -ONE } else { ZERO };
                assert_eq!(p[(i, k)], expected);
            }
        }
        let s12 = i_sigma12();
        assert!(max_abs(&(s12 - Matrix4::from_diagonal(&nalgebra::Vector4::new(r(0.5), r(-0.5), r(0.5), r(-0.5))))) < 1e-15);
    }

    #[test]
    fn u_maps_are_conjugated_gibbs_rotations() {
        let (s, si) = (s_matrix(), s_inverse());
        let (th, ph) = (0.7, 1.9);
        let od = gibbs_rotation(&GibbsVector::to_schwinger(ph).neg()).unwrap();
        assert!(max_abs(&(s * od * si - u_dirac(ph))) < 1e-12);
        let oc = gibbs_rotation(&GibbsVector::composite(th, ph).neg()).unwrap();
        assert!(max_abs(&(s * oc * si - u_cartesian(th, ph))) < 1e-12);
    }

    #[test]
    fn singular_parameter() {
        let g = GibbsVector::new([I, ZERO, ZERO]);
        assert!(matches!(gibbs_rotation(&g), Err(Error::SingularParameter(_))));
    }

    #[test]
    fn eps_sign() {
        assert_eq!(eps_upper([0, 1, 2, 3]), -1.0);
        assert_eq!(eps_upper([1, 0, 2, 3]), 1.0);
        assert_eq!(eps_upper([3, 2, 1, 0]), -1.0);
        assert_eq!(eps_upper([0, 0, 2, 3]), 0.0);
    }
}
