use std::f64::consts::PI;
use std::path::PathBuf;

use isotriplet::angular_separation::{Sign, TripletState};
use isotriplet::linalg::C64;
use isotriplet::matrix_elements::*;
use isotriplet::monopole_gauges::*;
use isotriplet::radial_dynamics::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::observable::parse_observable;
use crate::output::{write_json, write_table, Cell, Table};
use crate::states::sector_state;

fn solution_table(case: RadialCase) -> Table {
    let mut cols = vec!["solution".to_string(), "epsilon".to_string(), "r".to_string()];
    for name in case.variable_names() {
        cols.push(format!("re_{name}"));
        cols.push(format!("im_{name}"));
    }
    Table::new(&cols)
}

fn push_solution(t: &mut Table, k: usize, epsilon: f64, sol: &RadialSolution) {
    for row in sol.rows() {
        let mut cells: Vec<Cell> = vec![k.into(), epsilon.into()];
        cells.extend(row.into_iter().map(Cell::Num));
        t.push(cells);
    }
}

fn default_case(j_twice: i32, w_zero: bool) -> RadialCase {
    match (j_twice == 1, w_zero) {
        (true, true) => RadialCase::ReducedMinW0,
        (true, false) => RadialCase::ReducedMinW,
        (false, true) => RadialCase::ReducedW0,
        (false, false) => RadialCase::ReducedW,
    }
}

pub struct SpectrumSummary {
    pub files: Vec<PathBuf>,
    pub modes: usize,
}

/// Mode search plus solution tables.
pub fn spectrum(cfg: &RunConfig) -> CliResult<SpectrumSummary> {
    let j = *cfg.js().first().ok_or_else(|| CliError::Usage("spectrum needs one j".into()))?;
    let delta = cfg.deltas().first().copied().unwrap_or(Sign::Plus);
    let profile = cfg.load_profile()?;
    let case = match &cfg.case {
        Some(s) => s.parse()?,
        None => default_case(j.twice(), profile.w_vanishes()),
    };
    let range = cfg.eps_range.unwrap_or((-0.9 * cfg.mass, 0.9 * cfg.mass));
    let eps0 = cfg.epsilon.unwrap_or(0.5 * (range.0 + range.1));
    let params = RadialParams::new(eps0, j, cfg.mass, delta, cfg.alpha_value(), profile);
    let sys = assemble(case, params.clone())?;
    let mut opts = ShootingOptions::for_params(&params, cfg.profile_scale());
    opts.r0 = cfg.grids.r0;
    opts.scan_points = cfg.grids.scan_points;
    opts.grid_points = cfg.grids.n_r;
    opts.tol = cfg.tolerances.tol;
    let search = find_modes(&sys, range, &opts)?;

    let names = case.variable_names();
    let mut sols = solution_table(case);
    if search.modes.is_empty() {
        let at = sys.with_epsilon(eps0);
        let fr = frobenius_start(&at);
        for (k, y0) in fr.start_vectors(opts.r0).iter().enumerate() {
            let sol = at.integrate(opts.r0, cfg.grids.rmax, y0, cfg.tolerances.tol)?;
            push_solution(&mut sols, k, eps0, &sol);
        }
    } else {
        for (k, m) in search.modes.iter().enumerate() {
            push_solution(&mut sols, k, m.epsilon, &m.solution);
        }
    }
    let mut trace = Table::new(&["epsilon", "block", "re_det", "im_det"]);
    for s in &search.trace {
        trace.push(vec![s.epsilon.into(), s.block.into(), s.value.re.into(), s.value.im.into()]);
    }
    let modes: Vec<_> = search
        .modes
        .iter()
        .map(|m| {
            json!({
                "epsilon": m.epsilon,
                "block": m.block.iter().map(|&k| names[k]).collect::<Vec<_>>(),
                "determinant": m.determinant,
                "ode_residual": m.ode_residual,
                "norm": m.norm,
            })
        })
        .collect();
    let skipped: Vec<Vec<&str>> = search.skipped_blocks.iter().map(|b| b.iter().map(|&k| names[k]).collect()).collect();
    let modes_path = cfg.out.join("modes.json");
    write_json(
        &modes_path,
        cfg,
        json!({
            "case": case.name(),
            "j": j.to_string(),
            "delta": delta.value(),
            "epsilon_range": [range.0, range.1],
            "modes": modes,
            "skipped_blocks": skipped,
        }),
    )?;
    let files = vec![write_table(cfg, "solutions", &sols)?, modes_path, write_table(cfg, "determinant_trace", &trace)?];
    Ok(SpectrumSummary { files, modes: search.modes.len() })
}

pub struct MatelemSummary {
    pub file: PathBuf,
    pub rows: usize,
    pub failed: usize,
    pub omega: Option<Sign>,
}

fn states(cfg: &RunConfig) -> CliResult<Vec<TripletState>> {
    let m = cfg.m();
    let mut out = Vec::new();
    for j in cfg.js() {
        if m.abs() > j {
            return Err(CliError::Usage(format!("m = {m} is out of range for j = {j}")));
        }
        for d in cfg.deltas() {
            let seed = 1000 + 10 * j.twice() as u64 + (d == Sign::Plus) as u64;
            out.push(sector_state(j, m, d, cfg.a, cfg.b, seed));
        }
    }
    Ok(out)
}

fn sign_cell(s: Sign) -> Cell {
    Cell::Int(s.value() as i64)
}

/// Matrix elements over all ordered sector pairs.
pub fn matelem(cfg: &RunConfig) -> CliResult<MatelemSummary> {
    let src = cfg.observable.as_deref().unwrap_or("density");
    let g = parse_observable(src).map_err(|e| CliError::Usage(e.to_string()))?;
    let quad = Quadrature::new(QuadratureSpec { n_theta: cfg.grids.n_theta, n_phi: cfg.grids.n_phi, r0: cfg.grids.r0, r1: cfg.grids.rmax, n_r: cfg.grids.n_r });
    let st = states(cfg)?;
    let pairs: Vec<(TripletState, TripletState)> = st.iter().flat_map(|b| st.iter().map(move |k| (b.clone(), k.clone()))).collect();
    let complex_a = cfg.a.im != 0.0;
    let mut cols = vec!["j", "jp", "m", "mp", "delta", "delta_p", "omega", "re_factor", "im_factor", "re_value", "im_value", "re_half", "im_half", "verdict", "defect", "pass"];
    if complex_a {
        cols.push("minus_scale");
    }
    let mut t = Table::new(&cols);
    let scale = (C64::i() * (cfg.a - cfg.a.conj())).exp().norm();
    let parity = classify_parity(&g, cfg.a);
    let mut failed = 0;
    let mut finish = |mut row: Vec<Cell>, pass: bool| {
        if !pass {
            failed += 1;
        }
        row.push(Cell::Text(pass.to_string()));
        if complex_a {
            row.push(Cell::Num(scale));
        }
        t.push(row);
    };
    match parity.omega {
        Some(_) if g.hermitian => {
            let rep = selection_rule_check(&g, cfg.a, &pairs, &quad)?;
            for r in &rep.rows {
                let row = vec![
                    r.j.to_string().into(),
                    r.jp.to_string().into(),
                    r.m.to_string().into(),
                    r.mp.to_string().into(),
                    sign_cell(r.delta),
                    sign_cell(r.delta_p),
                    sign_cell(r.omega),
                    r.factor.re.into(),
                    r.factor.im.into(),
                    r.value.re.into(),
                    r.value.im.into(),
                    r.half.re.into(),
                    r.half.im.into(),
                    r.verdict.name().into(),
                    r.defect.into(),
                ];
                finish(row, r.pass);
            }
        }
        _ => {
            for (b, k) in &pairs {
                let v = matrix_element(b, &g, k, &quad)?;
                let hv = half_space_element(b, &g, k, &quad)?;
                let row = vec![
                    b.j.to_string().into(),
                    k.j.to_string().into(),
                    b.m.to_string().into(),
                    k.m.to_string().into(),
                    sign_cell(b.delta),
                    sign_cell(k.delta),
                    Cell::Text("none".into()),
                    Cell::Empty,
                    Cell::Empty,
                    v.re.into(),
                    v.im.into(),
                    hv.re.into(),
                    hv.im.into(),
                    Verdict::Descriptive.name().into(),
                    Cell::Empty,
                ];
                finish(row, true);
            }
        }
    }
    let rows = t.rows.len();
    let file = write_table(cfg, "matelem", &t)?;
    Ok(MatelemSummary { file, rows, failed, omega: parity.omega.filter(|_| g.hermitian) })
}

/// Potentials of the three frames on a spherical grid.
pub fn gauge_table(cfg: &RunConfig) -> CliResult<PathBuf> {
    let profile = cfg.load_profile()?;
    let (cart, dirac, schw) = gauge_pipeline(&profile);
    let closed = [None, Some(UnitaryFramePotential::dirac(profile.clone())), Some(UnitaryFramePotential::schwinger(profile.clone()))];
    let radii = if cfg.radii.is_empty() { vec![0.5, 1.0, 2.0, 4.0] } else { cfg.radii.clone() };
    let comps = ["t", "r", "theta", "phi"];
    let mut t = Table::new(&["frame", "r", "theta", "phi", "component", "iso", "re", "im", "closed_form_deviation"]);
    for (name, field, reference) in [("hedgehog", &cart, &closed[0]), ("dirac", &dirac, &closed[1]), ("schwinger", &schw, &closed[2])] {
        for &x in &radii {
            for a in 0..cfg.grids.n_theta {
                let theta = PI * (a as f64 + 0.5) / cfg.grids.n_theta as f64;
                for b in 0..cfg.grids.n_phi {
                    let phi = 2.0 * PI * (b as f64 + 0.5) / cfg.grids.n_phi as f64;
                    let p = Point::new(x, theta, phi);
                    let s = field.eval(p)?;
                    let dev = reference.as_ref().map(|c| c.eval(p).map(|q| s.max_deviation(&q))).transpose()?;
                    for (mu, comp) in comps.iter().enumerate() {
                        for k in 0..3 {
                            let z = s.w[mu][k];
                            let d = dev.map(Cell::Num).unwrap_or(Cell::Empty);
                            t.push(vec![name.into(), x.into(), theta.into(), phi.into(), (*comp).into(), (k + 1).into(), z.re.into(), z.im.into(), d]);
                        }
                    }
                }
            }
        }
    }
    write_table(cfg, "gauge_table", &t)
}
