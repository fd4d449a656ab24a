use std::f64::consts::PI;

use isotriplet::angular_separation::*;
use isotriplet::discrete_symmetry::*;
use isotriplet::iso_algebra::{delta_matrix, d_factor, u_cartesian, u_dirac};
use isotriplet::linalg::{cis, max_abs, r, CompMat12, IsoMat3, Vec12, C64, ONE};
use isotriplet::monopole_gauges::{Frame, MonopoleProfile};
use isotriplet::{Error, HalfInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn rc(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_amps(rng: &mut ChaCha8Rng, j: HalfInt) -> Vec12 {
    let allowed = allowed_components(j);
    Vec12::from_fn(|k, _| if allowed[k] { rc(rng) } else { C64::new(0.0, 0.0) })
}

fn random_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(0.05..PI - 0.05), rng.gen_range(0.0..2.0 * PI))
}

fn vmax(v: &Vec12) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

#[test]
fn cartesian_alpha_one_is_minus_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = build_n(ONE, Frame::Cartesian).unwrap();
    for _ in 0..20 {
        let (t, p) = random_point(&mut rng);
        assert!(max_abs(&(n.iso_factor(t, p) + IsoMat3::identity())) < 1e-12);
    }
}

#[test]
fn tabulated_frame_forms_match_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for alpha in [cis(r(0.3)), ONE, C64::new(0.4, -1.3)] {
        for frame in [Frame::Schwinger, Frame::Dirac, Frame::Cartesian] {
            let n = build_n(alpha, frame).unwrap();
            for _ in 0..10 {
                let (t, p) = random_point(&mut rng);
                let d = max_abs(&(n.iso_factor(t, p) - conjugated_pi(alpha, frame, t, p)));
                assert!(d < 1e-11, "{frame:?} {alpha}: {d:e}");
            }
        }
    }
}

#[test]
fn n_conjugates_between_frames_as_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (j, m) = (h(3), h(-1));
    let u = random_amps(&mut rng, j);
    let s = TripletState::fixed(0.7, j, m, u);
    let schwinger = |t: f64, p: f64| assemble_state(&s, 1.3, t, p).unwrap().value;
    let alpha = cis(r(0.9));
    let ns = build_n(alpha, Frame::Schwinger).unwrap();
    for (frame, u_of) in [(Frame::Dirac, (|t: f64, p: f64| { let _ = t; u_dirac(p) }) as fn(f64, f64) -> IsoMat3), (Frame::Cartesian, u_cartesian as fn(f64, f64) -> IsoMat3)] {
        let nf = build_n(alpha, frame).unwrap();
        let lift = |m3: IsoMat3| isotriplet::linalg::kron(&m3, &isotriplet::linalg::BispMat4::identity());
        let other = |t: f64, p: f64| lift(u_of(t, p)) * schwinger(t, p);
        for _ in 0..10 {
            let (t, p) = random_point(&mut rng);
            let lhs = nf.apply(other, t, p);
            let rhs = lift(u_of(t, p)) * ns.apply(schwinger, t, p);
            assert!(vmax(&(lhs - rhs)) < 1e-11);
        }
    }
}

#[test]
fn cartesian_identity_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let (t, p) = random_point(&mut rng);
        let m = u_cartesian(t, p) * pi_schwinger(ONE) * u_cartesian(PI - t, p + PI).try_inverse().unwrap();
        assert!(max_abs(&(m + IsoMat3::identity())) < 1e-11);
    }
}

#[test]
fn pi_squares_to_identity() {
    let p = pi_schwinger(cis(r(0.3)));
    assert!(max_abs(&(p * p - IsoMat3::identity())) < 1e-15);
    assert!(matches!(build_n(C64::new(0.0, 0.0), Frame::Dirac), Err(Error::Domain(_))));
}

#[test]
fn field_action_matches_amplitude_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for j in [h(1), h(3), h(5)] {
        for m in j.projections() {
            let alpha = C64::new(0.7, 0.4);
            let u = random_amps(&mut rng, j);
            let s = TripletState::fixed(0.5, j, m, u);
            let un = n_amplitude_matrix(j, alpha) * u;
            let sn = TripletState::fixed(0.5, j, m, un);
            let n = build_n(alpha, Frame::Schwinger).unwrap();
            for _ in 0..4 {
                let (t, p) = random_point(&mut rng);
                let lhs = n.apply(|a, b| assemble_state(&s, 0.8, a, b).unwrap().value, t, p);
                let rhs = assemble_state(&sn, 0.8, t, p).unwrap().value;
                assert!(vmax(&(lhs - rhs)) < 1e-12, "j={j} m={m}");
            }
        }
    }
}

#[test]
fn n_squared_is_phase_squared() {
    for t in [1, 3, 5, 7] {
        let j = h(t);
        let n = n_amplitude_matrix(j, C64::new(-0.2, 1.7));
        let ph = n_phase(j) * n_phase(j);
        assert!(max_abs(&(n * n - CompMat12::identity() * ph)) < 1e-14);
        assert!((ph - HalfInt::from_twice(2 * (j.twice() + 2)).minus_one_pow()).norm() < 1e-15);
    }
}

#[test]
fn sector_eigenvalues() {
    let [plus, _] = n_eigensectors(h(3), ONE).unwrap();
    assert!((plus.eigenvalue - C64::new(0.0, 1.0)).norm() < 1e-15);
    let [_, minus] = n_eigensectors(h(1), cis(r(0.4))).unwrap();
    assert!((minus.eigenvalue - C64::new(0.0, 1.0)).norm() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let u = minus.apply(&random_amps(&mut rng, h(1)));
    assert!(minus.residual(&u) < 1e-12);
    assert!(check_structure(h(1), &u).is_ok());
    assert!(n_eigensectors(h(0), ONE).is_err());
}

#[test]
fn projected_states_are_eigenstates() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for j in [h(1), h(3), h(7)] {
        let alpha = C64::new(1.2, -0.5);
        for sector in n_eigensectors(j, alpha).unwrap() {
            for _ in 0..8 {
                let u = sector.projector() * random_amps(&mut rng, j);
                assert!(sector.residual(&u) < 1e-12);
                let v = sector.apply(&random_amps(&mut rng, j));
                assert!(sector.residual(&v) < 1e-12);
            }
        }
    }
}

#[test]
fn projectors_are_complementary() {
    for j in [h(1), h(3), h(5)] {
        let [p, m] = n_eigensectors(j, cis(C64::new(0.3, 0.2))).unwrap();
        let (pp, pm) = (p.projector(), m.projector());
        assert!(max_abs(&(pp + pm - component_mask(j))) < 1e-13);
        assert!(max_abs(&(pp * pm)) < 1e-13);
        assert!(max_abs(&(pp * pp - pp)) < 1e-13);
    }
}

#[test]
fn commutation_dichotomy_examples() {
    let j = h(3);
    let v = commutation_dichotomy(&MonopoleProfile::trivial(), j, cis(r(1.1)), 0.4, 1.0, 1.0).unwrap();
    assert!(v.commutes, "{:e}", v.norm);
    let v = commutation_dichotomy(&MonopoleProfile::bps(1.0), j, ONE, 0.4, 1.0, 1.0).unwrap();
    assert!(v.commutes, "{:e}", v.norm);
    let v = commutation_dichotomy(&MonopoleProfile::bps(1.0), j, cis(r(0.7)), 0.4, 1.0, 1.0).unwrap();
    assert!(!v.commutes && v.norm > 1e-3);
    let v = commutation_dichotomy(&MonopoleProfile::trivial(), h(1), C64::new(0.3, 2.0), 0.4, 1.0, 0.6).unwrap();
    assert!(v.commutes);
}

#[test]
fn alpha_minus_one_anticommutes_with_mixing() {
    let v = commutation_dichotomy(&MonopoleProfile::bps(1.0), h(3), -ONE, 0.4, 1.0, 1.0).unwrap();
    assert!(!v.commutes);
}

#[test]
fn k_h_sector() {
    let mut u = Vec12::zeros();
    u[4] = ONE;
    u[5] = ONE;
    let s = SectorConstraint::new(Sign::Plus, h(3), ONE);
    let st = TripletState::fixed(0.3, h(3), h(1), s.apply(&u));
    let d = k_decompose(&st, 1.0, &[(0.7, 0.2), (1.5, 2.1), (2.4, -0.6)]).unwrap();
    assert_eq!(d.sector, KSector::H);
    assert!((d.lambda - 2.0).abs() < 1e-15);
    assert!(d.residual < 1e-6, "{:e}", d.residual);
}

#[test]
fn k_f_sector() {
    let mut u = Vec12::zeros();
    u[0] = ONE;
    u[3] = -ONE;
    u[1] = r(0.4);
    u[2] = r(-0.4);
    let s = SectorConstraint::new(Sign::Plus, h(3), ONE);
    let st = TripletState::fixed(0.3, h(3), h(-1), s.apply(&u));
    let d = k_decompose(&st, 1.0, &[(0.7, 0.2), (1.5, 2.1)]).unwrap();
    assert_eq!(d.sector, KSector::F { mu: Some(Sign::Minus) });
    assert!((d.lambda + 3f64.sqrt()).abs() < 1e-14);
    assert!(d.residual < 1e-6, "{:e}", d.residual);
}

#[test]
fn k_minimal_f_sector() {
    let mut u = Vec12::zeros();
    u[1] = ONE;
    u[3] = r(0.5);
    let s = SectorConstraint::new(Sign::Minus, h(1), ONE);
    let st = TripletState::fixed(0.3, h(1), h(1), s.apply(&u));
    let d = k_decompose(&st, 1.0, &[(0.9, 1.2), (2.0, -0.3)]).unwrap();
    assert_eq!(d.sector, KSector::F { mu: None });
    assert_eq!(d.lambda, 0.0);
    assert!(d.residual < 1e-6);
}

#[test]
fn k_mixed_state_rejected() {
    let mut u = Vec12::zeros();
    u[0] = ONE;
    u[4] = ONE;
    let st = TripletState::fixed(0.3, h(3), h(1), u);
    match k_decompose(&st, 1.0, &[(1.0, 1.0)]) {
        Err(Error::Classification(msg)) => assert!(msg.contains("f/g") && msg.contains("h projection")),
        other => panic!("{other:?}"),
    }
    u[4] = C64::new(0.0, 0.0);
    u[3] = r(0.3);
    assert!(matches!(k_decompose(&TripletState::fixed(0.3, h(3), h(1), u), 1.0, &[(1.0, 1.0)]), Err(Error::Classification(_))));
}

#[test]
fn k_amplitude_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (j, m) = (h(5), h(3));
    let u = random_amps(&mut rng, j);
    let ku = k_amplitude_matrix(j).unwrap() * u;
    let s = TripletState::fixed(0.2, j, m, u);
    let sk = TripletState::fixed(0.2, j, m, ku);
    let (t, p) = (1.1, 0.7);
    let fd = apply_k_fd(|a, b| assemble_state(&s, 1.0, a, b).unwrap().value, t, p, 1e-4).unwrap();
    let exact = assemble_state(&sk, 1.0, t, p).unwrap().value;
    assert!(vmax(&(fd - exact)) < 1e-7);
}

#[test]
fn k_sectors_are_n_stable() {
    for (j, lams) in [(h(3), vec![2.0, -2.0, 3f64.sqrt(), -(3f64.sqrt())]), (h(5), vec![3.0, -3.0, 8f64.sqrt(), -(8f64.sqrt())]), (h(1), vec![1.0, -1.0, 0.0])] {
        for lam in lams {
            assert!(k_sector_n_stability(j, C64::new(0.6, 0.8), lam).unwrap() < 1e-11);
        }
    }
}

#[test]
fn basis_change_factorization() {
    let id = basis_change_v(r(0.3), r(0.3));
    assert!(max_abs(&(id.v - IsoMat3::identity())) < 1e-15);
    let b = basis_change_v(r(0.1), C64::new(1.3, 0.2));
    let expect = IsoMat3::from_diagonal(&nalgebra::Vector3::new(ONE, ONE, cis(b.gamma * 2.0)));
    assert!(max_abs(&(b.v - expect)) < 1e-14);
    let (a, a2) = (C64::new(0.2, 0.1), C64::new(1.0, -0.3));
    let bc = basis_change_v(a, a2);
    let conj = bc.delta * pi_schwinger(cis(a)) * bc.delta.try_inverse().unwrap();
    assert!(max_abs(&(conj - pi_schwinger(cis(a2)))) < 1e-13);
    let dconj = bc.d * pi_schwinger(cis(a)) * bc.d.try_inverse().unwrap();
    assert!(max_abs(&(dconj - pi_schwinger(cis(a)))) < 1e-13);
}

#[test]
fn cartesian_factors_conjugate_schwinger_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let bc = basis_change_v(r(0.0), C64::new(0.9, 0.3));
    for _ in 0..10 {
        let (t, p) = random_point(&mut rng);
        let u = u_cartesian(t, p);
        let ui = u.try_inverse().unwrap();
        let (dc, fc) = bc.cartesian_factors(t, p);
        assert!(max_abs(&(u * delta_matrix(bc.gamma) * ui - dc)) < 1e-12);
        assert!(max_abs(&(u * d_factor(bc.gamma) * ui - fc)) < 1e-12);
    }
}

#[test]
fn delta_moves_sector_alpha() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let j = h(3);
    let s0 = SectorConstraint::new(Sign::Minus, j, ONE);
    let target = SectorConstraint::new(Sign::Minus, j, cis(r(0.8)));
    for _ in 0..10 {
        let u = s0.apply(&random_amps(&mut rng, j));
        let mut st = TripletState::fixed(0.1, j, h(1), u);
        st.delta = Sign::Minus;
        let moved = apply_delta(&st, r(0.4));
        assert!((moved.a - r(0.8)).norm() < 1e-15);
        assert!(target.residual(&moved.amplitudes_at(1.0)) < 1e-11);
    }
}

#[test]
fn d_scales_only_t0_block() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random_amps(&mut rng, h(3));
    let st = TripletState::fixed(0.1, h(3), h(1), u);
    let v = apply_d(&st, r(1.2)).amplitudes_at(1.0);
    for k in 0..12 {
        let f = if (4..8).contains(&k) { cis(r(-1.2)) } else { ONE };
        assert!((v[k] - u[k] * f).norm() < 1e-15);
    }
    let dd = apply_delta(&apply_d(&st, r(0.7)), r(0.3)).amplitudes_at(1.0);
    let ddr = apply_d(&apply_delta(&st, r(0.3)), r(0.7)).amplitudes_at(1.0);
    assert!(vmax(&(dd - ddr)) < 1e-12);
}

#[test]
fn b_freedom_keeps_sector() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let j = h(5);
    let sec = SectorConstraint::new(Sign::Plus, j, cis(r(0.5)));
    let u = sec.apply(&random_amps(&mut rng, j));
    let st = TripletState::fixed(0.1, j, h(-3), u);
    let same = apply_b_freedom(&st, r(0.2), r(0.2));
    assert_eq!(same.amplitudes_at(1.0), u);
    let flipped = apply_b_freedom(&st, r(0.0), r(PI));
    let v = flipped.amplitudes_at(1.0);
    for k in 4..8 {
        assert!((v[k] + u[k]).norm() < 1e-15);
    }
    assert!(sec.residual(&v) < 1e-12);
    assert_eq!((flipped.epsilon, flipped.j, flipped.m, flipped.delta), (st.epsilon, st.j, st.m, st.delta));
}
