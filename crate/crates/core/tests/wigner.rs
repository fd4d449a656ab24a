use std::f64::consts::PI;

use isotriplet::linalg::{C64, I};
use isotriplet::su2_wigner::*;
use isotriplet::{Error, HalfInt};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

/// `⟨j m′| e^{−iθJ_y} |j m⟩` from the matrix exponential of the spin-j generator,
/// basis index `m + j`.
fn d_oracle(j: HalfInt, theta: f64) -> DMatrix<C64> {
    let n = (j.twice() + 1) as usize;
    let jv = j.value();
    let mut jp = DMatrix::<C64>::zeros(n, n);
    for k in 0..n - 1 {
        let m = k as f64 - jv;
        jp[(k + 1, k)] = C64::new(((jv - m) * (jv + m + 1.0)).sqrt(), 0.0);
    }
    let jy = (&jp - jp.adjoint()) * C64::new(0.0, -0.5);
    (jy * (-I * theta)).exp()
}

#[test]
fn small_d_matches_exponential_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for tj in 1..=9 {
        let j = h(tj);
        for _ in 0..5 {
            let theta = rng.gen_range(0.0..PI);
            let oracle = d_oracle(j, theta);
            for (a, mp) in j.projections().enumerate() {
                for (b, m) in j.projections().enumerate() {
                    let d = wigner_small_d(j, mp, m, theta).unwrap();
                    assert!((d - oracle[(a, b)].re).abs() < 1e-12 && oracle[(a, b)].im.abs() < 1e-12, "j={j} {mp} {m}");
                }
            }
        }
    }
}

#[test]
fn small_d_examples() {
    assert!((wigner_small_d(h(1), h(1), h(1), 0.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((wigner_small_d(h(1), h(1), h(-1), PI).unwrap() + 1.0).abs() < 1e-15);
    let t: f64 = 0.7;
    let closed = 0.5 * (0.5 * t).cos() * (3.0 * t.cos() - 1.0);
    assert!((wigner_small_d(h(3), h(1), h(1), t).unwrap() - closed).abs() < 1e-12);
    assert!(matches!(wigner_small_d(h(1), h(3), h(1), 0.2), Err(Error::Domain(_))));
}

#[test]
fn big_d_examples() {
    assert_eq!(wigner_big_d(h(1), h(-1), h(1), 0.0, 0.0, 0.0).unwrap(), C64::new(0.0, 0.0));
    let v = wigner_big_d(h(1), h(1), h(1), PI / 3.0, 0.0, 0.0).unwrap();
    assert!((v - C64::from_polar(1.0, -PI / 6.0)).norm() < 1e-15);
    let s: f64 = h(3).projections().map(|m| wigner_big_d(h(3), h(1), m, 1.1, 0.6, 0.0).unwrap().norm_sqr()).sum();
    assert!((s - 1.0).abs() < 1e-13);
}

#[test]
fn rotation_matrices_are_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let j = h(rng.gen_range(1..=9));
        let d = wigner_matrix(j, rng.gen_range(0.0..6.0), rng.gen_range(0.0..PI), rng.gen_range(0.0..6.0)).unwrap();
        let n = d.nrows();
        let err = (d.adjoint() * &d - DMatrix::<C64>::identity(n, n)).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        assert!(err < 1e-12);
    }
}

#[test]
fn ladder_examples() {
    let k = ladder_coefficients(h(3)).unwrap();
    assert_eq!((k.a, k.c), (2.0, Some(0.0)));
    assert!((k.b - 3f64.sqrt()).abs() < 1e-15);
    assert_eq!(ladder_coefficients(h(1)).unwrap().c, None);
    let k = ladder_coefficients(h(5)).unwrap();
    assert!((k.b - 8f64.sqrt()).abs() < 1e-15 && (k.c.unwrap() - 5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn recurrences_hold() {
    for (tj, tm, th, ph) in [(3, 1, 1.0, 0.4), (5, -3, 2.0, 1.7), (3, 3, PI / 2.0, 0.0)] {
        let rep = verify_recurrences(h(tj), h(tm), th, ph, 1e-5).unwrap();
        assert!(rep.max() < 1e-8, "{rep:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let j = h(2 * rng.gen_range(0..5) + 1);
        let ms: Vec<_> = j.projections().collect();
        let m = ms[rng.gen_range(0..ms.len())];
        let rep = verify_recurrences(j, m, rng.gen_range(0.2..PI - 0.2), rng.gen_range(0.0..6.0), 1e-5).unwrap();
        assert!(rep.max() < 1e-8);
    }
    assert!(matches!(verify_recurrences(h(3), h(1), 1e-7, 0.0, 1e-5), Err(Error::Pole { .. })));
}

#[test]
fn parity_relation() {
    for (tj, tm, ts, th, ph) in [(1, 1, 1, 0.9, 0.3), (3, -1, -3, 1.4, 2.0), (1, 1, 1, PI / 2.0, 0.0)] {
        let (a, b) = parity_flip(h(tj), h(tm), h(ts), th, ph).unwrap();
        assert!((a - b).norm() < 1e-12);
    }
    for tj in [1, 3, 5, 7, 9] {
        let j = h(tj);
        for m in j.projections() {
            for ts in [-3i32, -1, 1, 3] {
                if ts.abs() > tj {
                    continue;
                }
                let (a, b) = parity_flip(j, m, h(ts), 1.2, 0.8).unwrap();
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn pauli_functions() {
    let r0 = pauli_phi(h(0), h(2), h(0), 0.1, 0.0).unwrap() / 0.1f64.cos();
    for k in 1..30 {
        let t = 0.1 + k as f64 * 0.1;
        if (t - PI / 2.0).abs() < 0.05 {
            continue;
        }
        assert!((pauli_phi(h(0), h(2), h(0), t, 0.3).unwrap() / t.cos() / C64::from_polar(1.0, 0.0) - r0).norm() < 1e-10);
    }
    let a = pauli_phi(h(1), h(1), h(1), 0.8, 0.5).unwrap();
    let b = pauli_as_wigner(h(1), h(1), h(1), 0.8, 0.5).unwrap();
    assert!((a - b).norm() < 1e-10);
    let f = |t: f64, p: f64| pauli_phi(h(1), h(1), h(-1), t, p).unwrap();
    assert!(apply_j_ladder(false, 0.5, f, 1.1, 0.4, 1e-5).unwrap().norm() < 1e-7);
    assert!(matches!(pauli_phi(h(1), h(2), h(0), 1.0, 0.0), Err(Error::Criterion { .. })));
}

#[test]
fn pauli_criterion_examples_and_grid() {
    assert!(pauli_criterion_half(h(1), h(1)).admissible());
    assert!(!pauli_criterion_half(h(1), h(2)).admissible());
    let q = pauli_criterion(num_rational::Ratio::new(1, 4), num_rational::Ratio::new(1, 4));
    assert!(!q.admissible() && q.agree());
    for tl in -8..=8 {
        for tj in -8..=8 {
            assert!(pauli_criterion_half(h(tl), h(tj)).agree());
        }
    }
}
