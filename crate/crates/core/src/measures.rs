//! Limiting measures on the negative half-line and their quantile
//! discretizations `p_N`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::polycore::FloatPoly;

/// A compactly supported probability measure on `(-∞, -ε]`.
#[derive(Clone, Debug, PartialEq)]
pub enum ReferenceMeasure {
    PointMass { location: f64 },
    Uniform { a: f64, b: f64 },
    Semicircle { center: f64, radius: f64 },
    Atomic { atoms: Vec<f64>, weights: Vec<f64> },
}

const BISECTION_STEPS: usize = 200;

impl ReferenceMeasure {
    pub fn point_mass(location: f64) -> Result<Self> {
        Self::validated(ReferenceMeasure::PointMass { location })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::validated(ReferenceMeasure::Uniform { a, b })
    }

    pub fn semicircle(center: f64, radius: f64) -> Result<Self> {
        Self::validated(ReferenceMeasure::Semicircle { center, radius })
    }

    /// Atoms are sorted ascending; weights must be positive and sum to 1.
    pub fn atomic(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() || atoms.is_empty() {
            return Err(Error::InvalidMeasure(
                "atomic measure needs one weight per atom".into(),
            ));
        }
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(weights).collect();
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite atoms"));
        let (atoms, weights) = pairs.into_iter().unzip();
        Self::validated(ReferenceMeasure::Atomic { atoms, weights })
    }

    fn validated(m: Self) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidMeasure(msg));
        match &m {
            ReferenceMeasure::PointMass { location } => {
                if !(location.is_finite() && *location < 0.0) {
                    return bad(format!("point mass at {location} is not negative"));
                }
            }
            ReferenceMeasure::Uniform { a, b } => {
                if !(a.is_finite() && a < b && *b < 0.0) {
                    return bad(format!("uniform needs a < b < 0, got [{a}, {b}]"));
                }
            }
            ReferenceMeasure::Semicircle { center, radius } => {
                if !(center.is_finite() && *radius > 0.0 && center + radius < 0.0) {
                    return bad(format!(
                        "semicircle needs radius > 0 and center + radius < 0, got ({center}, {radius})"
                    ));
                }
            }
            ReferenceMeasure::Atomic { atoms, weights } => {
                if atoms.iter().any(|a| !(a.is_finite() && *a < 0.0)) {
                    return bad("atoms must be negative".into());
                }
                if weights.iter().any(|w| !(*w > 0.0)) {
                    return bad("weights must be positive".into());
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return bad(format!("weights sum to {total}, not 1"));
                }
            }
        }
        Ok(m)
    }

    /// Closed support interval `[lo, hi]`, `hi < 0`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            ReferenceMeasure::PointMass { location } => (*location, *location),
            ReferenceMeasure::Uniform { a, b } => (*a, *b),
            ReferenceMeasure::Semicircle { center, radius } => (center - radius, center + radius),
            ReferenceMeasure::Atomic { atoms, .. } => (atoms[0], *atoms.last().unwrap()),
        }
    }

    /// Whether `R_mu` is available in closed form.
    pub fn has_closed_form_r(&self) -> bool {
        !matches!(self, ReferenceMeasure::Atomic { .. })
    }

    /// `G_mu(x) = ∫ dmu(t) / (x - t)` for `x >= 0`.
    pub fn cauchy(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::NonPositivePoint(x));
        }
        Ok(self.cauchy_unchecked(x))
    }

    fn cauchy_unchecked(&self, x: f64) -> f64 {
        match self {
            ReferenceMeasure::PointMass { location } => 1.0 / (x - location),
            ReferenceMeasure::Uniform { a, b } => ((x - a) / (x - b)).ln() / (b - a),
            ReferenceMeasure::Semicircle { center, radius } => {
                // 2 (w - sqrt(w^2 - r^2)) / r^2 rewritten without cancellation
                let w = x - center;
                2.0 / (w + (w * w - radius * radius).sqrt())
            }
            ReferenceMeasure::Atomic { atoms, weights } => {
                atoms.iter().zip(weights).map(|(a, w)| w / (x - a)).sum()
            }
        }
    }

    /// `alpha = G_mu(0)`
    pub fn alpha(&self) -> f64 {
        self.cauchy_unchecked(0.0)
    }

    /// `R_mu(s) = G_mu^(-1)(s) - 1/s` for `0 < s < alpha`.
    pub fn r_transform(&self, s: f64) -> Result<f64> {
        let alpha = self.alpha();
        if !(s > 0.0 && s < alpha) {
            return Err(Error::OutOfDomain { s, alpha });
        }
        Ok(match self {
            ReferenceMeasure::PointMass { location } => *location,
            ReferenceMeasure::Uniform { a, b } => {
                // (z - a) = E (z - b), E = e^(s(b-a))
                let width = b - a;
                b + width / (s * width).exp_m1() - 1.0 / s
            }
            ReferenceMeasure::Semicircle { center, radius } => center + radius * radius * s / 4.0,
            ReferenceMeasure::Atomic { atoms, .. } => {
                // G(z) <= 1/(z - a_max), so G(1/s + a_max) <= s
                let (mut lo, mut hi) = (0.0, 1.0 / s + atoms.last().unwrap());
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.cauchy_unchecked(mid) > s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi) - 1.0 / s
            }
        })
    }

    /// Generalized inverse CDF, `u` in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidMeasure(format!("quantile level {u} outside (0, 1)")));
        }
        Ok(match self {
            ReferenceMeasure::PointMass { location } => *location,
            ReferenceMeasure::Uniform { a, b } => a + u * (b - a),
            ReferenceMeasure::Semicircle { center, radius } => {
                center + radius * semicircle_standard_quantile(u)
            }
            ReferenceMeasure::Atomic { atoms, weights } => {
                let mut cum = 0.0;
                let mut out = *atoms.last().unwrap();
                for (a, w) in atoms.iter().zip(weights) {
                    cum += w;
                    if u <= cum {
                        out = *a;
                        break;
                    }
                }
                out
            }
        })
    }

    /// Degree-`N` polynomial whose roots discretize the measure: midpoint
    /// quantiles `F^(-1)((i - 1/2)/N)`, or largest-remainder multiplicities
    /// for atomic measures. Roots ascending.
    pub fn quantile_poly(&self, n: usize) -> Result<FloatPoly> {
        if n == 0 {
            return Err(Error::DegreeZero);
        }
        let roots = match self {
            ReferenceMeasure::Atomic { atoms, weights } => {
                let counts = largest_remainder(weights, n);
                atoms
                    .iter()
                    .zip(counts)
                    .flat_map(|(&a, c)| std::iter::repeat_n(a, c))
                    .collect()
            }
            _ => (1..=n)
                .map(|i| self.quantile((i as f64 - 0.5) / n as f64))
                .collect::<Result<Vec<f64>>>()?,
        };
        FloatPoly::from_roots(roots)
    }
}

/// Quantile of the semicircle on `[-1, 1]`:
/// `F(y) = 1/2 + (y sqrt(1-y^2) + asin y)/π`, inverted by bisection.
fn semicircle_standard_quantile(u: f64) -> f64 {
    let cdf = |y: f64| 0.5 + (y * (1.0 - y * y).sqrt() + y.asin()) / std::f64::consts::PI;
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Integer counts summing to `n`, proportional to `weights`; leftover units go
/// to the largest fractional parts, ties to the lower index.
fn largest_remainder(weights: &[f64], n: usize) -> Vec<usize> {
    let quotas: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let (fi, fj) = (quotas[i] - quotas[i].floor(), quotas[j] - quotas[j].floor());
        fj.partial_cmp(&fi).expect("finite quotas").then(i.cmp(&j))
    });
    for &i in order.iter().cycle().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

impl FromStr for ReferenceMeasure {
    type Err = Error;

    /// `point:-1.5`, `uniform:-2:-1`, `semicircle:-3:1`, `atomic:-1@0.5,-2@0.5`
    fn from_str(text: &str) -> Result<Self> {
        let parse_num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in measure {text:?}")))
        };
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("measure {text:?} has no kind prefix")))?;
        let fields: Vec<&str> = rest.split(':').collect();
        let want = |k: usize| -> Result<()> {
            if fields.len() == k {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "measure {text:?}: {kind} takes {k} parameter(s)"
                )))
            }
        };
        match kind.trim() {
            "point" => {
                want(1)?;
                ReferenceMeasure::point_mass(parse_num(fields[0])?)
            }
            "uniform" => {
                want(2)?;
                ReferenceMeasure::uniform(parse_num(fields[0])?, parse_num(fields[1])?)
            }
            "semicircle" => {
                want(2)?;
                ReferenceMeasure::semicircle(parse_num(fields[0])?, parse_num(fields[1])?)
            }
            "atomic" => {
                let mut atoms = Vec::new();
                let mut weights = Vec::new();
                for item in rest.split(',') {
                    let (a, w) = item.split_once('@').ok_or_else(|| {
                        Error::Parse(format!("atom {item:?} is not of the form value@weight"))
                    })?;
                    atoms.push(parse_num(a)?);
                    weights.push(parse_num(w)?);
                }
                ReferenceMeasure::atomic(atoms, weights)
            }
            other => Err(Error::Parse(format!("unknown measure kind {other:?}"))),
        }
    }
}

impl fmt::Display for ReferenceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceMeasure::PointMass { location } => write!(f, "point:{location}"),
            ReferenceMeasure::Uniform { a, b } => write!(f, "uniform:{a}:{b}"),
            ReferenceMeasure::Semicircle { center, radius } => {
                write!(f, "semicircle:{center}:{radius}")
            }
            ReferenceMeasure::Atomic { atoms, weights } => {
                let items: Vec<String> = atoms
                    .iter()
                    .zip(weights)
                    .map(|(a, w)| format!("{a}@{w}"))
                    .collect();
                write!(f, "atomic:{}", items.join(","))
            }
        }
    }
}
