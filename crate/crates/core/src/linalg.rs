//! Matrix aliases and small dense helpers shared by every module.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Matrix4, SMatrix, SVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
/// Isotopic 3×3 matrix in the cyclic basis `(T₊₁, T₀, T₋₁)`.
pub type IsoMat3 = Matrix3<C64>;
/// Bispinor 4×4 matrix.
pub type BispMat4 = Matrix4<C64>;
/// Composite `iso ⊗ bispinor` matrix, isotopic index slow.
pub type CompMat12 = SMatrix<C64, 12, 12>;
pub type Vec12 = SVector<C64, 12>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{iθ}` with complex θ.
pub fn cis(theta: C64) -> C64 {
    (I * theta).exp()
}

pub fn kron(iso: &IsoMat3, bisp: &BispMat4) -> CompMat12 {
    iso.kronecker(bisp)
}

pub fn commutator<const N: usize>(a: &SMatrix<C64, N, N>, b: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    a * b - b * a
}

pub fn anticommutator<const N: usize>(a: &SMatrix<C64, N, N>, b: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    a * b + b * a
}

/// Largest entry modulus.
pub fn max_abs<const R: usize, const K: usize>(m: &SMatrix<C64, R, K>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_dyn(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Matrix exponential by scaling and squaring with a 13-term Taylor series.
pub fn expm<const N: usize>(m: &SMatrix<C64, N, N>) -> SMatrix<C64, N, N> {
    let norm: f64 = (0..N).map(|i| (0..N).map(|j| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m * r(scale);
    let mut term = SMatrix::<C64, N, N>::identity();
    let mut sum = term;
    for k in 1..=13 {
        term = term * a * r(1.0 / k as f64);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Eigen-decomposition of a small complex matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<C64>,
    /// Columns are (generalized, when defective) eigenvectors matching `values`.
    pub vectors: DMatrix<C64>,
    pub defective: bool,
}

/// Eigenvalues from the complex Schur form; eigenvectors from null spaces of
/// `(M − λ)^k`, grouping eigenvalues closer than `1e-8·(1 + |M|)`.
pub fn eigen(m: &DMatrix<C64>) -> EigenSystem {
    let n = m.nrows();
    let scale = 1.0 + max_abs_dyn(m);
    let schur = m.clone().schur();
    let tri = schur.unpack().1;
    let raw: Vec<C64> = (0..n).map(|i| tri[(i, i)]).collect();

    let tol = 1e-8 * scale;
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for z in raw {
        if let Some(cl) = clusters.iter_mut().find(|(c0, _)| (*c0 - z).norm() < tol) {
            let k = cl.1 as f64;
            cl.0 = (cl.0 * k + z) / (k + 1.0);
            cl.1 += 1;
        } else {
            clusters.push((z, 1));
        }
    }
    clusters.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });

    let mut values = Vec::with_capacity(n);
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(n);
    let mut defective = false;
    for (lambda, mult) in clusters {
        let shifted = m - DMatrix::<C64>::identity(n, n) * lambda;
        let mut basis = null_space(&shifted, tol);
        if basis.len() < mult {
            defective = true;
            let mut power = shifted.clone();
            for _ in 1..mult {
                power = &power * &shifted;
                basis = null_space(&power, tol * scale.powi(2));
                if basis.len() >= mult {
                    break;
                }
            }
        }
        for v in basis.into_iter().take(mult) {
            values.push(lambda);
            cols.push(v);
        }
    }
    let vectors = DMatrix::from_columns(&cols);
    EigenSystem { values, vectors, defective }
}

/// Orthonormal basis of the numerical null space.
pub fn null_space(a: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    let n = a.ncols();
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut out = Vec::new();
    for k in 0..n {
        let s = if k < svd.singular_values.len() { svd.singular_values[k] } else { 0.0 };
        if s < tol {
            let row = v_t.row(k);
            out.push(DVector::from_iterator(n, row.iter().map(|z| z.conj())));
        }
    }
    out
}

/// Compensated complex summation with a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: C64,
    comp: C64,
}

impl KahanSum {
    pub fn add(&mut self, x: C64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> C64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_rotation_generator() {
        let theta = 0.9;
        let g = Matrix2::new(ZERO, r(-theta), r(theta), ZERO);
        let e = expm(&g);
        assert!((e[(0, 0)] - r(theta.cos())).norm() < 1e-14);
        assert!((e[(1, 0)] - r(theta.sin())).norm() < 1e-14);
    }

    #[test]
    fn eigen_handles_repeated_values() {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 1)] = r(-2.0);
        m[(1, 0)] = r(-2.0);
        m[(2, 3)] = r(-2.0);
        m[(3, 2)] = r(-2.0);
        let es = eigen(&m);
        assert!(!es.defective);
        assert_eq!(es.values.len(), 4);
        for (k, lam) in es.values.iter().enumerate() {
            let v = es.vectors.column(k);
            assert!((&m * v - v * *lam).norm() < 1e-12);
        }
    }

    #[test]
    fn eigen_flags_jordan_block() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = ONE;
        let es = eigen(&m);
        assert!(es.defective);
        assert_eq!(es.values.len(), 2);
    }
}
