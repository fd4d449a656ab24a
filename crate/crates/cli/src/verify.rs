use std::f64::consts::PI;

use isotriplet::angular_separation::Sign;
use isotriplet::discrete_symmetry::{commutation_dichotomy, conjugated_pi, k_sector_n_stability, n_eigensectors};
use isotriplet::iso_algebra::*;
use isotriplet::linalg::{c, cis, max_abs, r, BispMat4, IsoMat3, Vec12, C64, ONE};
use isotriplet::matrix_elements::*;
use isotriplet::monopole_gauges::*;
use isotriplet::ode::integrate_fixed;
use isotriplet::radial_dynamics::*;
use isotriplet::su2_wigner::*;
use isotriplet::HalfInt;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Cell, Table};
use crate::states::sector_state;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Wigner,
    Algebra,
    Gauges,
    Discrete,
    Radial,
    Matelem,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Wigner, Suite::Algebra, Suite::Gauges, Suite::Discrete, Suite::Radial, Suite::Matelem];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Wigner => "wigner",
            Suite::Algebra => "algebra",
            Suite::Gauges => "gauges",
            Suite::Discrete => "discrete",
            Suite::Radial => "radial",
            Suite::Matelem => "matelem",
        }
    }
}

/// `value ≤ bound` or, for expected violations, `value > bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    AtMost,
    Above,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub expect: Expect,
}

impl Check {
    pub fn pass(&self) -> bool {
        match self.expect {
            Expect::AtMost => self.value <= self.bound,
            Expect::Above => self.value > self.bound,
        }
    }

    pub fn line(&self) -> String {
        let rel = if self.expect == Expect::AtMost { "≤" } else { ">" };
        format!("{} {}/{}: {:.3e} ({rel} {:.0e})", if self.pass() { "PASS" } else { "FAIL" }, self.suite, self.name, self.value, self.bound)
    }
}

struct Checks {
    suite: &'static str,
    out: Vec<Check>,
}

impl Checks {
    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.out.push(Check { suite: self.suite, name: name.into(), value, bound, expect: Expect::AtMost });
    }

    fn above(&mut self, name: &str, value: f64, bound: f64) {
        self.out.push(Check { suite: self.suite, name: name.into(), value, bound, expect: Expect::Above });
    }
}

fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

fn point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.gen_range(0.05..PI - 0.05), rng.gen_range(0.0..2.0 * PI))
}

fn wigner(ck: &mut Checks) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut unit, mut rec, mut par) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let j = h(2 * rng.gen_range(0..5) + 1);
        let ms: Vec<HalfInt> = j.projections().collect();
        let (m, s) = (ms[rng.gen_range(0..ms.len())], ms[rng.gen_range(0..ms.len())]);
        let (theta, phi) = point(&mut rng);
        let d = wigner_matrix(j, phi, theta, rng.gen_range(0.0..2.0 * PI))?;
        let n = d.nrows();
        unit = unit.max((d.adjoint() * &d - DMatrix::<C64>::identity(n, n)).iter().fold(0.0, |a, z| a.max(z.norm())));
        rec = rec.max(verify_recurrences(j, m, theta.clamp(0.2, PI - 0.2), phi, 1e-4)?.max());
        let (lhs, rhs) = parity_flip(j, m, s, theta, phi)?;
        par = par.max((lhs - rhs).norm());
    }
    ck.at_most("unitarity", unit, 1e-12);
    ck.at_most("recurrences", rec, 1e-8);
    ck.at_most("parity", par, 1e-12);
    let (mut mismatch, mut phi_d) = (0.0, 0.0f64);
    for tl in -8..=8 {
        for tj in -8..=8 {
            let (l, j) = (h(tl), h(tj));
            let rule = j >= l.abs() && (j - l.abs()).is_integer();
            let v = pauli_criterion_half(l, j);
            if v.integer_rule != rule || v.derivative_rule != rule {
                mismatch += 1.0;
            }
            if rule {
                for m in j.projections() {
                    phi_d = phi_d.max((pauli_phi(l, j, m, 1.1, 0.4)? - pauli_as_wigner(l, j, m, 1.1, 0.4)?).norm());
                }
            }
        }
    }
    ck.at_most("pauli_grid_mismatches", mismatch, 0.0);
    ck.at_most("pauli_vs_wigner", phi_d, 1e-10);
    Ok(())
}

fn algebra(ck: &mut Checks) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t = cyclic_generators();
    ck.at_most("casimir", max_abs(&(t[0] * t[0] + t[1] * t[1] + t[2] * t[2] - IsoMat3::identity() * r(2.0))), 1e-14);
    ck.at_most("t0_from_squares", max_abs(&(t0_from_squares() - t0_projector())), 1e-15);
    let (mut idem, mut expo, mut comp, mut vmap) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let (theta, phi) = point(&mut rng);
        let tt = t_tilde0(theta, phi);
        idem = idem.max(max_abs(&(tt * tt - tt)));
        let a = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5));
        let u = u_cartesian(theta, phi);
        let chain = u * delta_matrix(a) * u.try_inverse().expect("unitary");
        expo = expo.max(max_abs(&(exp_iso_rotation(a, &unit_radial(theta, phi)) - chain)));
        let oc = gibbs_rotation(&GibbsVector::composite(theta, phi))?;
        comp = comp.max(max_abs(&(gibbs_rotation(&GibbsVector::to_schwinger(phi))? * gibbs_rotation(&GibbsVector::to_dirac(theta, phi))? - oc)));
        vmap = vmap.max(max_abs(&(spatial_block(&vector_map_of(&sl2c_from_gibbs(&GibbsVector::composite(theta, phi))?)) - oc)));
    }
    ck.at_most("t_tilde0_idempotent", idem, 1e-11);
    ck.at_most("exponential", expo, 1e-11);
    ck.at_most("gibbs_composition", comp, 1e-12);
    ck.at_most("vector_map", vmap, 1e-11);
    Ok(())
}

fn gauges(ck: &mut Checks, cfg: &RunConfig) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let (mut dd, mut ds, mut abel) = (0.0f64, 0.0f64, 0.0f64);
    for prof in [MonopoleProfile::trivial(), cfg.load_profile()?] {
        let (_, dirac, schw) = gauge_pipeline(&prof);
        let cd = UnitaryFramePotential::dirac(prof.clone());
        let cs = UnitaryFramePotential::schwinger(prof.clone());
        for _ in 0..20 {
            let p = Point::new(rng.gen_range(0.2..6.0), rng.gen_range(0.2..PI - 0.2), rng.gen_range(0.0..2.0 * PI));
            dd = dd.max(dirac.eval(p)?.max_deviation(&cd.eval(p)?));
            ds = ds.max(schw.eval(p)?.max_deviation(&cs.eval(p)?));
            if prof.w_vanishes() {
                abel = abel.max(abelian_embedding_check(&prof, p)?);
            }
        }
    }
    ck.at_most("dirac_frame", dd, 1e-9);
    ck.at_most("schwinger_frame", ds, 1e-9);
    ck.at_most("abelian_embedding", abel, 1e-12);
    Ok(())
}

fn discrete(ck: &mut Checks, cfg: &RunConfig) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut eigen = 0.0f64;
    for j in [h(1), h(3), h(5)] {
        let alpha = C64::new(rng.gen_range(0.2..1.5), rng.gen_range(-1.0..1.0));
        for sector in n_eigensectors(j, alpha)? {
            for _ in 0..10 {
                let u = Vec12::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                eigen = eigen.max(sector.residual(&sector.apply(&u)));
            }
        }
    }
    ck.at_most("eigen_constraints", eigen, 1e-12);
    let mut ident = 0.0f64;
    for _ in 0..100 {
        let (theta, phi) = point(&mut rng);
        ident = ident.max(max_abs(&(conjugated_pi(ONE, Frame::Cartesian, theta, phi) + IsoMat3::identity())));
    }
    ck.at_most("frame_identity", ident, 1e-11);
    let j = cfg.js().first().copied().unwrap_or(h(3));
    let comm = |prof: &MonopoleProfile, alpha: C64| commutation_dichotomy(prof, j, alpha, 0.5, cfg.mass, 1.0).map(|v| v.norm);
    if let Some(alpha) = cfg.alpha {
        let prof = cfg.load_profile()?;
        let norm = comm(&prof, alpha)?;
        // With β = 1 only α = +1 (or W = 0) commutes.
        if prof.w_vanishes() || (alpha - ONE).norm() < 1e-14 {
            ck.at_most("commutes", norm, 1e-12);
        } else {
            ck.above("does_not_commute", norm, 1e-3);
        }
    } else {
        let (triv, bps) = (MonopoleProfile::trivial(), MonopoleProfile::bps(1.0));
        ck.at_most("w0_commutes", comm(&triv, cis(r(1.1)))?.max(comm(&triv, c(0.3, 0.8))?), 1e-12);
        ck.above("bps_twisted_does_not_commute", comm(&bps, cis(r(0.7)))?, 1e-3);
        ck.at_most("bps_alpha_plus_commutes", comm(&bps, ONE)?, 1e-12);
        ck.above("bps_alpha_minus_does_not_commute", comm(&bps, -ONE)?, 1e-3);
    }
    let mut stab = 0.0f64;
    for tj in [1, 3, 5] {
        let k = ladder_coefficients(h(tj))?;
        for lam in [k.a, -k.a, k.b, -k.b] {
            stab = stab.max(k_sector_n_stability(h(tj), c(0.6, 0.8), lam)?);
        }
    }
    ck.at_most("k_sector_stability", stab, 1e-11);
    Ok(())
}

fn radial(ck: &mut Checks, cfg: &RunConfig) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let triv = MonopoleProfile::trivial();
    let prof = cfg.load_profile()?;
    let (mut tabulated, mut leak) = (0.0f64, 0.0f64);
    for (j, alpha, p) in [(h(3), cis(r(0.4)), &triv), (h(5), c(0.3, 1.2), &triv), (h(3), ONE, &prof), (h(1), cis(r(1.1)), &triv), (h(1), ONE, &prof)] {
        for d in [Sign::Plus, Sign::Minus] {
            let rep = constraint_reduction_check(j, d, alpha, p, rng.gen_range(-1.0..1.0), cfg.mass, rng.gen_range(0.1..5.0))?;
            tabulated = tabulated.max(rep.tabulated_mismatch);
            leak = leak.max(rep.inconsistency);
        }
    }
    ck.at_most("tabulated_coefficients", tabulated, 1e-13);
    ck.at_most("constraint_leakage", leak, 1e-13);
    let sys = assemble(RadialCase::ReducedW0, RadialParams::new(0.7, h(5), 0.4, Sign::Minus, cis(r(0.9)), triv.clone()))?;
    ck.at_most("w0_block_count_minus_two", (sys.blocks().len() as f64 - 2.0).abs(), 0.0);
    let sys = assemble(RadialCase::ReducedW, RadialParams::new(0.3, h(3), cfg.mass, Sign::Plus, ONE, prof))?;
    let f = sys.rhs();
    let y0 = DVector::from_fn(6, |k, _| c(1.0 - 0.1 * k as f64, 0.2 * k as f64));
    let ys: Vec<_> = [200, 400, 800].iter().map(|&n| integrate_fixed(&f, 0.5, 5.0, &y0, n)).collect();
    ck.above("self_convergence_order", ((&ys[0] - &ys[1]).norm() / (&ys[1] - &ys[2]).norm()).log2(), 4.0);
    let fr = frobenius_start(&sys);
    let r0 = 1e-3;
    let sol = sys.integrate(r0, 5.0, &fr.start_vectors(r0)[0], 1e-10)?;
    ck.at_most("ode_residual", sol.ode_residual(&sys), 1e-7);
    Ok(())
}

fn matelem(ck: &mut Checks) -> CliResult<()> {
    let quad = Quadrature::new(QuadratureSpec { n_theta: 48, n_phi: 48, ..QuadratureSpec::default() });
    let probe = [(0.4, 0.5, 0.3), (1.7, 2.0, 4.0)];
    ck.at_most("density_hermitian", Observable::density().hermiticity_defect(&probe), 1e-14);
    let a = r(0.7);
    ck.at_most("identity_parity_defect", classify_parity(&Observable::identity(), a).defect_plus, 1e-10);
    let cos2 = AngularTag::Cos2Theta.multiplier().expect("non-trivial");
    let g = Observable::new("cos2_theta", vec![KernelTerm::constant(&IsoMat3::identity(), &BispMat4::identity()).with_angular(cos2)], true);
    let mut pairs = Vec::new();
    let mut seed = 40;
    for (jb, jk) in [(1, 1), (1, 3), (3, 3)] {
        for db in [Sign::Plus, Sign::Minus] {
            for dk in [Sign::Plus, Sign::Minus] {
                seed += 2;
                pairs.push((sector_state(h(jb), h(1), db, a, C64::default(), seed), sector_state(h(jk), h(1), dk, a, C64::default(), seed + 1)));
            }
        }
    }
    let rep = selection_rule_check(&g, a, &pairs, &quad)?;
    let worst = |v: Verdict| rep.rows.iter().filter(|row| row.verdict == v).map(|row| row.defect).fold(0.0, f64::max);
    ck.at_most("forbidden_pairs", worst(Verdict::Forbidden), FORBIDDEN_TOL);
    ck.at_most("doubled_pairs", worst(Verdict::Doubled), DOUBLED_TOL);
    let mut iso = IsoMat3::identity();
    iso[(0, 1)] = c(0.2, 0.5);
    iso[(1, 0)] = c(0.2, -0.5);
    let mix = Observable::constant("mixing", iso, gamma(0), true);
    let real = expectation_expansion(&sector_state(h(3), h(1), Sign::Minus, r(0.8), C64::default(), 7), &mix, &quad)?;
    let cplx = expectation_expansion(&sector_state(h(3), h(1), Sign::Plus, c(0.3, 0.2), C64::default(), 8), &mix, &quad)?;
    ck.at_most("expansion_real_a", real.defect, 1e-9);
    ck.at_most("expansion_complex_a", cplx.defect, 1e-9);
    ck.at_most("minus_scale", (cplx.minus_scale - r((-0.4f64).exp())).norm(), 1e-15);
    Ok(())
}

/// Runs one suite, or every suite for `All`.
pub fn run(suite: Suite, cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut all = Vec::new();
    for s in suites {
        let mut ck = Checks { suite: s.name(), out: Vec::new() };
        match s {
            Suite::Wigner => wigner(&mut ck)?,
            Suite::Algebra => algebra(&mut ck)?,
            Suite::Gauges => gauges(&mut ck, cfg)?,
            Suite::Discrete => discrete(&mut ck, cfg)?,
            Suite::Radial => radial(&mut ck, cfg)?,
            Suite::Matelem => matelem(&mut ck)?,
            Suite::All => unreachable!(),
        }
        all.extend(ck.out);
    }
    Ok(all)
}

pub fn table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["suite", "check", "value", "bound", "expect", "pass"]);
    for c in checks {
        let e = if c.expect == Expect::AtMost { "at_most" } else { "above" };
        t.push(vec![c.suite.into(), c.name.clone().into(), c.value.into(), c.bound.into(), e.into(), Cell::Text(c.pass().to_string())]);
    }
    t
}
