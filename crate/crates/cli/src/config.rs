use std::path::{Path, PathBuf};

use isotriplet::angular_separation::Sign;
use isotriplet::monopole_gauges::{builtin_profile, CubicSpline, MonopoleProfile, RadialFn};
use isotriplet::HalfInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub forbidden: f64,
    pub doubled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_r: usize,
    pub r0: f64,
    pub rmax: f64,
    pub scan_points: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids { n_theta: 96, n_phi: 96, n_r: 400, r0: 1e-3, rmax: 20.0, scan_points: 120 }
    }
}

/// Everything a run depends on. Serialized into every output header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub suite: Option<String>,
    pub profile: String,
    pub twoj: Vec<i32>,
    pub twom: i32,
    pub delta: Vec<i32>,
    pub a: Complex64,
    pub b: Complex64,
    pub alpha: Option<Complex64>,
    pub mass: f64,
    pub epsilon: Option<f64>,
    pub eps_range: Option<(f64, f64)>,
    pub case: Option<String>,
    pub observable: Option<String>,
    pub radii: Vec<f64>,
    pub tolerances: Tolerances,
    pub grids: Grids,
    pub format: Format,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            command: command.into(),
            suite: None,
            profile: "bps:1".into(),
            twoj: vec![1],
            twom: 1,
            delta: vec![1],
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            alpha: None,
            mass: 1.0,
            epsilon: None,
            eps_range: None,
            case: None,
            observable: None,
            radii: Vec::new(),
            tolerances: Tolerances { tol: 1e-10, forbidden: isotriplet::matrix_elements::FORBIDDEN_TOL, doubled: isotriplet::matrix_elements::DOUBLED_TOL },
            grids: Grids::default(),
            format: Format::Csv,
            out: PathBuf::from("."),
        }
    }

    /// SHA-256 of the JSON form with the output directory blanked.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn js(&self) -> Vec<HalfInt> {
        self.twoj.iter().map(|&t| HalfInt::from_twice(t)).collect()
    }

    pub fn m(&self) -> HalfInt {
        HalfInt::from_twice(self.twom)
    }

    pub fn deltas(&self) -> Vec<Sign> {
        self.delta.iter().map(|&d| if d > 0 { Sign::Plus } else { Sign::Minus }).collect()
    }

    /// `α`, defaulting to `e^{iA}`.
    pub fn alpha_value(&self) -> Complex64 {
        self.alpha.unwrap_or_else(|| (Complex64::i() * self.a).exp())
    }

    pub fn load_profile(&self) -> CliResult<MonopoleProfile> {
        load_profile(&self.profile)
    }

    /// Scale `μ` of a built-in BPS profile, 1 otherwise.
    pub fn profile_scale(&self) -> f64 {
        let s = self.profile.trim();
        s.strip_prefix("bps:").and_then(|v| v.trim().parse().ok()).unwrap_or(1.0)
    }
}

/// Twice a half-integer weight, from `3`, `3/2` or `1.5`. Triplet states need odd values.
pub fn parse_twice(s: &str) -> Result<i32, String> {
    let s = s.trim();
    let t = if s.contains('/') || s.contains('.') {
        s.parse::<HalfInt>().map_err(|e| e.to_string())?.twice()
    } else {
        s.parse::<i32>().map_err(|_| format!("not an integer: {s:?}"))?
    };
    if t % 2 == 0 {
        return Err(format!("{s} is not a half-integer weight (2j must be odd)"));
    }
    Ok(t)
}

pub fn parse_positive_twice(s: &str) -> Result<i32, String> {
    let t = parse_twice(s)?;
    if t < 1 {
        return Err(format!("j must be at least 1/2, got 2j = {t}"));
    }
    Ok(t)
}

/// Half-integer written as `3/2`.
pub fn parse_half(s: &str) -> Result<i32, String> {
    let h: HalfInt = s.parse().map_err(|e: isotriplet::Error| e.to_string())?;
    if h.is_integer() || h.twice() < 1 {
        return Err(format!("{s} is not a positive half-integer"));
    }
    Ok(h.twice())
}

/// Complex number in `a+bi` form.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let z: Complex64 = t.parse().map_err(|_| format!("not a complex number: {s:?} (expected a+bi)"))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite complex number {s:?}"));
    }
    Ok(z)
}

pub fn parse_sign(s: &str) -> Result<i32, String> {
    match s.trim() {
        "1" | "+1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        other => Err(format!("δ must be +1 or -1, got {other:?}")),
    }
}

fn read_table(path: &Path) -> CliResult<RadialFn> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(RadialFn::Tabulated(CubicSpline::from_table(&text)?))
}

/// A built-in name, or `W.txt[,F.txt[,PHI.txt]]` with two-column tables.
pub fn load_profile(spec: &str) -> CliResult<MonopoleProfile> {
    match builtin_profile(spec) {
        Ok(p) => return Ok(p),
        Err(e) if !spec.contains(['/', '.', ',']) || spec.starts_with("bps") => return Err(e.into()),
        Err(_) => {}
    }
    let paths: Vec<&str> = spec.split(',').map(str::trim).collect();
    if paths.len() > 3 || paths.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("profile {spec:?}: expected W[,F[,PHI]] table paths")));
    }
    let w = read_table(Path::new(paths[0]))?;
    let f = paths.get(1).map(|p| read_table(Path::new(p))).transpose()?.unwrap_or(RadialFn::Zero);
    let phi = paths.get(2).map(|p| read_table(Path::new(p))).transpose()?.unwrap_or(RadialFn::Zero);
    Ok(MonopoleProfile::custom(spec, w, f, phi, 1.0, 0.0))
}
