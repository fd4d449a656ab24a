use std::sync::Arc;

use isotriplet::angular_separation::{RadialAmplitudes, Sign, TripletState};
use isotriplet::discrete_symmetry::{apply_b_freedom, SectorConstraint};
use isotriplet::linalg::{cis, Vec12, C64, ZERO};
use isotriplet::HalfInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A localized state in the `(δ, A)` sector: amplitudes `c_k r^{p_k} e^{−r}`
/// projected onto the sector, with seeded coefficients.
pub fn sector_state(j: HalfInt, m: HalfInt, delta: Sign, a: C64, b: C64, seed: u64) -> TripletState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coef: Vec<C64> = (0..12).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let powers: Vec<i32> = (0..12).map(|_| rng.gen_range(1..4)).collect();
    let sector = SectorConstraint::new(delta, j, cis(a));
    let mut s = TripletState::fixed(0.0, j, m, Vec12::zeros());
    s.radial = RadialAmplitudes::Analytic(Arc::new(move |x: f64| sector.apply(&Vec12::from_fn(|k, _| coef[k] * (x.powi(powers[k]) * (-x).exp())))));
    s.delta = delta;
    s.a = a;
    if b != ZERO {
        s = apply_b_freedom(&s, ZERO, b);
    }
    s
}
