use isotriplet::angular_separation::*;
use isotriplet::linalg::{r, Vec12, C64, I};
use isotriplet::quadrature::SphereGrid;
use isotriplet::su2_wigner::d_sigma;
use isotriplet::{Error, HalfInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn random_amps(rng: &mut ChaCha8Rng, j: HalfInt) -> Vec12 {
    let allowed = allowed_components(j);
    Vec12::from_fn(|k, _| if allowed[k] { C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) } else { C64::new(0.0, 0.0) })
}

fn max_diff(a: &Vec12, b: &Vec12) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

const POINTS: [(f64, f64); 4] = [(0.4, 0.3), (1.0, 2.0), (1.9, -1.1), (2.7, 4.0)];

#[test]
fn zero_state_assembles_to_zero() {
    let s = TripletState::fixed(1.0, h(3), h(1), Vec12::zeros());
    assert_eq!(assemble_state(&s, 2.0, 1.0, 0.5).unwrap().value, Vec12::zeros());
    assert_eq!(apply_sigma(&s, 2.0, 1.0, 0.5).unwrap().value, Vec12::zeros());
}

#[test]
fn single_component_assembly() {
    let mut amps = Vec12::zeros();
    amps[1] = r(1.0);
    let s = TripletState::fixed(1.0, h(3), h(1), amps);
    let v = assemble_state(&s, 2.0, 1.0, 0.5).unwrap().value;
    let expected = d_sigma(h(3), h(1), h(-1), 1.0, 0.5).unwrap() / 2.0;
    assert!((v[1] - expected).norm() < 1e-15);
    for k in (0..12).filter(|k| *k != 1) {
        assert_eq!(v[k], C64::new(0.0, 0.0));
    }
}

#[test]
fn forbidden_half_component() {
    let mut amps = Vec12::zeros();
    amps[0] = r(1.0);
    let s = TripletState::fixed(1.0, h(1), h(1), amps);
    assert!(matches!(assemble_state(&s, 1.0, 1.0, 0.0), Err(Error::Structural(_))));
}

#[test]
fn sigma_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for &(tj, tm) in &[(1, 1), (1, -1), (3, 1), (3, -3), (5, 3), (7, -5)] {
        for _ in 0..3 {
            let s = TripletState::fixed(0.7, h(tj), h(tm), random_amps(&mut rng, h(tj)));
            for &(t, p) in &POINTS {
                let fd = apply_sigma(&s, 1.5, t, p).unwrap().value;
                let cf = sigma_closed_form(&s, 1.5, t, p).unwrap().value;
                assert!(max_diff(&fd, &cf) < 1e-7, "j={tj}/2 m={tm}/2 at {t},{p}: {}", max_diff(&fd, &cf));
            }
        }
    }
}

#[test]
fn sigma_h1_block_pattern() {
    let mut amps = Vec12::zeros();
    amps[4] = r(1.0);
    let s = TripletState::fixed(1.0, h(3), h(1), amps);
    let (x, t, p) = (2.0, 1.1, 0.4);
    let fd = apply_sigma(&s, x, t, p).unwrap().value;
    let expected = -I * 2.0 * d_sigma(h(3), h(1), h(1), t, p).unwrap() / x;
    assert!((fd[7] - expected).norm() < 1e-7);
    for k in (0..12).filter(|k| *k != 7) {
        assert!(fd[k].norm() < 1e-7);
    }
}

#[test]
fn sigma_half_kills_upper_block() {
    let mut amps = Vec12::zeros();
    amps[1] = C64::new(0.3, 0.2);
    amps[3] = C64::new(-0.7, 0.1);
    let s = TripletState::fixed(1.0, h(1), h(-1), amps);
    let fd = apply_sigma(&s, 1.0, 0.9, 0.2).unwrap().value;
    assert!(fd.iter().all(|z| z.norm() < 1e-7));
}

#[test]
fn sigma_rejects_pole() {
    let s = TripletState::fixed(1.0, h(3), h(1), Vec12::zeros());
    assert!(matches!(apply_sigma(&s, 1.0, 1e-8, 0.0), Err(Error::Pole { .. })));
}

#[test]
fn mixing_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(tj, tm) in &[(1, 1), (3, -1), (5, 5)] {
        let s = TripletState::fixed(0.3, h(tj), h(tm), random_amps(&mut rng, h(tj)));
        for &(t, p) in &POINTS {
            let a = apply_mixing(&s, 1.3, t, p, 0.6).unwrap().value;
            let b = mixing_closed_form(&s, 1.3, t, p, 0.6).unwrap().value;
            assert!(max_diff(&a, &b) < 1e-10);
        }
    }
}

#[test]
fn mixing_examples() {
    let mut amps = Vec12::zeros();
    amps[6] = r(1.0);
    let s = TripletState::fixed(1.0, h(3), h(1), amps);
    let (x, t, p, w) = (2.0, 0.8, 0.3, 0.5);
    let out = apply_mixing(&s, x, t, p, w).unwrap().value;
    let expected = I * 2f64.sqrt() * w / (x * x) * d_sigma(h(3), h(1), h(-1), t, p).unwrap();
    assert!((out[1] - expected).norm() < 1e-12);

    let zero = apply_mixing(&s, x, t, p, 0.0).unwrap().value;
    assert_eq!(zero, Vec12::zeros());

    let mut amps = Vec12::zeros();
    amps[0] = r(1.0);
    let s = TripletState::fixed(1.0, h(3), h(1), amps);
    let out = apply_mixing(&s, x, t, p, w).unwrap().value;
    assert!(out.iter().all(|z| z.norm() < 1e-14));
}

#[test]
fn mixing_output_has_no_outer_d_components() {
    let grid = SphereGrid::new(64, 64);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (j, m, x, w) = (h(3), h(1), 1.0, 0.9);
    let s = TripletState::fixed(1.0, j, m, random_amps(&mut rng, j));
    let closed = isotriplet::angular_separation::mixing_amplitude_matrix() * s.amplitudes_at(x) * r(w / x);
    for k in 0..12 {
        let sigma = sigma_of(k);
        let f = |t: f64, p: f64| apply_mixing(&s, x, t, p, w).unwrap().value[k];
        let proj = project_onto_d(f, j, m, sigma, &grid).unwrap();
        let norm = project_onto_d(|t, p| d_sigma(j, m, sigma, t, p).unwrap(), j, m, sigma, &grid).unwrap();
        let amp = proj / norm * x;
        if sigma.abs() == h(3) {
            assert!(proj.norm() < 1e-10, "component {k}: {proj}");
        } else {
            assert!((amp - closed[k]).norm() < 1e-10, "component {k}: {amp} vs {}", closed[k]);
        }
    }
}

#[test]
fn angular_factors_do_not_depend_on_background() {
    let a = angular_factors(h(5), h(-3), 1.2, 0.7).unwrap();
    let b = angular_factors(h(5), h(-3), 1.2, 0.7).unwrap();
    assert_eq!(a, b);
}

#[test]
fn total_j_triplet() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for &(tj, tm) in &[(1, 1), (3, -3), (5, 1)] {
        let s = TripletState::fixed(1.0, h(tj), h(tm), random_amps(&mut rng, h(tj)));
        let rep = total_j_check(&s, 1.0, &POINTS).unwrap();
        assert!(rep.j2_residual < 1e-6 && rep.j3_residual < 1e-6, "{tj}/2 {tm}/2: {rep:?}");
    }
}

#[test]
fn total_j_abelian() {
    let one = r(1.0);
    for &(tj, tm) in &[(2, 0), (2, 2), (4, -2)] {
        let st = AbelianState { j: h(tj), m: h(tm), eg: h(1), amps: [one, C64::new(0.5, -0.2), -one, C64::new(0.1, 0.9)] };
        let rep = abelian_total_j_check(&st, &POINTS).unwrap();
        assert!(rep.j2_residual < 1e-6 && rep.j3_residual < 1e-6, "{rep:?}");
    }
}

#[test]
fn su2_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for &(tj, tm) in &[(1, -1), (3, 1), (5, -5)] {
        let s = TripletState::fixed(1.0, h(tj), h(tm), random_amps(&mut rng, h(tj)));
        let res = j_commutator_residual(&s, 1.0, &POINTS, NESTED_FD_STEP).unwrap();
        assert!(res < 1e-5, "{res}");
    }
}
