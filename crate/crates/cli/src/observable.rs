//! Text form of kernels: `[c*]ISO:BISP[*tag]...` joined by `+` or `-`,
//! e.g. `I:gamma0*cos_theta - 0.5*t3:gamma5*exp`. `density` and `identity`
//! name the two built-in observables.

use std::fmt;
use std::sync::Arc;

use isotriplet::iso_algebra::{cyclic_generators, t0_projector};
use isotriplet::linalg::{r, IsoMat3};
use isotriplet::matrix_elements::{bispinor_kernel, AngularMultiplier, AngularTag, KernelTerm, Observable, RadialMultiplier, RadialTag};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed observable at column {}: {}", self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Plus,
    Minus,
    Star,
    Colon,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = i + 1;
        match ch {
            ' ' | '\t' => i += 1,
            '+' | '-' | '*' | ':' => {
                let t = match ch {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    _ => Tok::Colon,
                };
                out.push((col, t));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == 'e' || ((chars[i] == '-' || chars[i] == '+') && chars[i - 1] == 'e')) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse().map_err(|_| ParseError { column: col, message: format!("bad number {s:?}") })?;
                out.push((col, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((col, Tok::Ident(chars[start..i].iter().collect())));
            }
            other => return Err(ParseError { column: col, message: format!("unexpected character {other:?}") }),
        }
    }
    Ok(out)
}

fn iso_matrix(name: &str) -> Option<IsoMat3> {
    let t = cyclic_generators();
    Some(match name {
        "I" => IsoMat3::identity(),
        "t0" => t0_projector(),
        "t1" => t[0],
        "t2" => t[1],
        "t3" => t[2],
        _ => return None,
    })
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { column: self.column(), message: message.into() })
    }

    fn ident(&mut self, what: &str) -> Result<(usize, String), ParseError> {
        match self.toks.get(self.pos).cloned() {
            Some((c, Tok::Ident(s))) => {
                self.pos += 1;
                Ok((c, s))
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn term(&mut self, sign: f64) -> Result<KernelTerm, ParseError> {
        let mut coef = sign;
        if let Some(Tok::Num(v)) = self.peek() {
            coef *= *v;
            self.pos += 1;
            if self.peek() != Some(&Tok::Star) {
                return self.err("expected '*' after coefficient");
            }
            self.pos += 1;
        }
        let (c, iso) = self.ident("isotopic matrix (I, t0, t1, t2, t3)")?;
        let iso = iso_matrix(&iso).ok_or(ParseError { column: c, message: format!("unknown isotopic matrix {iso:?} (I, t0, t1, t2, t3)") })?;
        if self.peek() != Some(&Tok::Colon) {
            return self.err("expected ':' between isotopic and bispinor factors");
        }
        self.pos += 1;
        let (c, b) = self.ident("bispinor kernel")?;
        let bisp = bispinor_kernel(&b).map_err(|e| ParseError { column: c, message: e.to_string() })?;
        let mut radial: Vec<RadialMultiplier> = Vec::new();
        let mut angular: Vec<AngularMultiplier> = Vec::new();
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let (c, tag) = self.ident("multiplier")?;
            if let Ok(t) = tag.parse::<RadialTag>() {
                radial.extend(t.multiplier());
            } else if let Ok(t) = tag.parse::<AngularTag>() {
                angular.extend(t.multiplier());
            } else {
                return Err(ParseError { column: c, message: format!("unknown multiplier {tag:?}") });
            }
        }
        let mut term = KernelTerm::constant(&(iso * r(coef)), &bisp);
        if !radial.is_empty() {
            term = term.with_radial(Arc::new(move |x| radial.iter().map(|f| f(x)).product()));
        }
        if !angular.is_empty() {
            term = term.with_angular(Arc::new(move |t, p| angular.iter().map(|f| f(t, p)).product()));
        }
        Ok(term)
    }
}

/// Sample points for the numerical Hermiticity check.
const PROBE: [(f64, f64, f64); 4] = [(0.3, 0.4, 0.2), (1.1, 1.3, 2.5), (2.7, 2.2, -1.0), (5.0, 0.9, 4.1)];

/// Parses an observable; Hermiticity is decided numerically.
pub fn parse_observable(src: &str) -> Result<Observable, ParseError> {
    match src.trim() {
        "density" => return Ok(Observable::density()),
        "identity" => return Ok(Observable::identity()),
        _ => {}
    }
    let mut p = Parser { toks: lex(src)?, pos: 0, end: src.chars().count() + 1 };
    if p.toks.is_empty() {
        return p.err("empty observable");
    }
    let mut terms = Vec::new();
    let mut sign = 1.0;
    if p.peek() == Some(&Tok::Minus) {
        sign = -1.0;
        p.pos += 1;
    }
    loop {
        terms.push(p.term(sign)?);
        match p.peek() {
            None => break,
            Some(Tok::Plus) => sign = 1.0,
            Some(Tok::Minus) => sign = -1.0,
            Some(_) => return p.err("expected '+', '-' or '*'"),
        }
        p.pos += 1;
    }
    let mut g = Observable::new(src.trim(), terms, false);
    g.hermitian = g.hermiticity_defect(&PROBE) < 1e-12;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms() {
        let g = parse_observable("I:gamma0*cos_theta - 0.5*t3:identity*exp").unwrap();
        assert_eq!(g.terms.len(), 2);
        assert!(g.hermitian);
        let k = g.kernel(0.0, 0.0, 0.0);
        assert!((k[(0, 0)].re - (-0.5)).abs() < 1e-15);
    }

    #[test]
    fn detects_non_hermitian() {
        assert!(!parse_observable("t3:gamma5").unwrap().hermitian);
        assert!(parse_observable("density").unwrap().hermitian);
    }

    #[test]
    fn reports_columns() {
        assert_eq!(parse_observable("I:gamma9").unwrap_err().column, 3);
        assert_eq!(parse_observable("I gamma0").unwrap_err().column, 3);
        assert_eq!(parse_observable("I:gamma0*cos_phi").unwrap_err().column, 10);
        assert_eq!(parse_observable("I:gamma0 +").unwrap_err().column, 11);
        assert_eq!(parse_observable("2 I:gamma0").unwrap_err().column, 3);
        assert_eq!(parse_observable("I:gamma0 $").unwrap_err().column, 10);
    }
}
