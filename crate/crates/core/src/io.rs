//! Text formats: roots files and polynomial JSON.
//!
//! A roots file holds one decimal (or `p/q`) per line; `#` starts a comment.
//! Polynomial JSON is `{"degree": N, "etilde": ["1", "-3/2", ...]}` with every
//! coefficient written as an exact decimal or rational string.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polycore::{ExactPoly, FloatPoly, MonicPoly};
use crate::scalar::{parse_rational, Scalar};

pub fn parse_roots(text: &str) -> Result<Vec<BigRational>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let r = parse_rational(body)
            .ok_or_else(|| Error::Parse(format!("line {}: bad number {body:?}", lineno + 1)))?;
        out.push(r);
    }
    if out.is_empty() {
        return Err(Error::EmptyRoots);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub degree: usize,
    pub etilde: Vec<String>,
}

impl PolyJson {
    pub fn from_exact(p: &ExactPoly) -> Self {
        PolyJson {
            degree: p.degree(),
            etilde: p.etilde().iter().map(|c| c.to_string()).collect(),
        }
    }

    /// Floats are written with 17 significant digits, which round-trips.
    pub fn from_float(p: &FloatPoly) -> Self {
        PolyJson {
            degree: p.degree(),
            etilde: p.etilde().iter().map(|c| format!("{c:.16e}")).collect(),
        }
    }

    pub fn to_exact(&self) -> Result<ExactPoly> {
        if self.etilde.len() != self.degree + 1 {
            return Err(Error::Parse(format!(
                "degree {} needs {} coefficients, found {}",
                self.degree,
                self.degree + 1,
                self.etilde.len()
            )));
        }
        let coeffs = self
            .etilde
            .iter()
            .map(|t| parse_rational(t).ok_or_else(|| Error::Parse(format!("bad coefficient {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        MonicPoly::from_etilde(coeffs)
    }
}

/// A polynomial read from disk, exact as parsed.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedPoly {
    pub exact: ExactPoly,
    /// Roots as written, when the source was a roots file.
    pub has_roots: bool,
}

impl LoadedPoly {
    /// Roots (if any) are converted independently, so the float polynomial
    /// keeps them.
    pub fn to_float(&self) -> FloatPoly {
        match self.exact.roots() {
            Some(roots) => FloatPoly::from_roots(roots.iter().map(f64::from_ratio).collect())
                .expect("nonempty roots"),
            None => self.exact.to_f64(),
        }
    }
}

/// Reads either a roots file or polynomial JSON (detected by a leading `{`).
pub fn parse_poly(text: &str) -> Result<LoadedPoly> {
    if text.trim_start().starts_with('{') {
        let json: PolyJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("polynomial JSON: {e}")))?;
        Ok(LoadedPoly {
            exact: json.to_exact()?,
            has_roots: false,
        })
    } else {
        Ok(LoadedPoly {
            exact: ExactPoly::from_roots(parse_roots(text)?)?,
            has_roots: true,
        })
    }
}

pub fn read_poly(path: &std::path::Path) -> Result<LoadedPoly> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_poly(&text)
}

pub fn to_json_string(json: &PolyJson) -> String {
    let mut s = serde_json::to_string_pretty(json).expect("plain struct serializes");
    s.push('\n');
    s
}
