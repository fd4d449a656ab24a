use std::f64::consts::PI;

use isotriplet::angular_separation::Sign;
use isotriplet::discrete_symmetry::SectorConstraint;
use isotriplet::iso_algebra::{exp_iso_rotation, gibbs_rotation, unit_radial, GibbsVector};
use isotriplet::linalg::{max_abs, r, IsoMat3, C64};
use isotriplet::su2_wigner::{wigner_matrix, wigner_small_d};
use isotriplet::HalfInt;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wigner_rows_are_normalized(tj in 0i32..10, phi in 0.0..2.0 * PI, theta in 0.0..PI, psi in 0.0..2.0 * PI) {
        let d = wigner_matrix(HalfInt::from_twice(tj), phi, theta, psi).unwrap();
        for row in d.row_iter() {
            let s: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_d_symmetry(tj in 0i32..10, a in 0usize..10, b in 0usize..10, theta in 0.0..PI) {
        let j = HalfInt::from_twice(tj);
        let ms: Vec<_> = j.projections().collect();
        let (mp, m) = (ms[a % ms.len()], ms[b % ms.len()]);
        let lhs = wigner_small_d(j, mp, m, theta).unwrap();
        let rhs = wigner_small_d(j, -m, -mp, theta).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn real_rotations_compose_along_one_axis(a in -3.0..3.0f64, b in -3.0..3.0f64, theta in 0.0..PI, phi in 0.0..2.0 * PI) {
        let n = unit_radial(theta, phi);
        let lhs = exp_iso_rotation(r(a), &n) * exp_iso_rotation(r(b), &n);
        prop_assert!(max_abs(&(lhs - exp_iso_rotation(r(a + b), &n))) < 1e-12);
    }

    #[test]
    fn gibbs_rotations_are_orthogonal(x in -2.0..2.0f64, y in -2.0..2.0f64, z in -2.0..2.0f64) {
        let o = gibbs_rotation(&GibbsVector::real(x, y, z)).unwrap();
        prop_assert!(max_abs(&(o * o.transpose() - IsoMat3::identity())) < 1e-12);
        prop_assert!((o.determinant() - r(1.0)).norm() < 1e-12);
    }

    #[test]
    fn sector_projection_is_idempotent(tj in prop::sample::select(vec![1, 3, 5, 7]), plus in any::<bool>(), re in 0.2..2.0f64, im in -1.0..1.0f64, seed in any::<u64>()) {
        let sec = SectorConstraint::new(if plus { Sign::Plus } else { Sign::Minus }, HalfInt::from_twice(tj), C64::new(re, im));
        let u = isotriplet::linalg::Vec12::from_fn(|k, _| C64::new(((seed >> (k % 60)) & 7) as f64 - 3.5, k as f64 * 0.1));
        let p = sec.apply(&u);
        prop_assert!((sec.apply(&p) - p).norm() < 1e-12 * (1.0 + p.norm()));
        prop_assert!(sec.residual(&p) < 1e-12);
    }
}
