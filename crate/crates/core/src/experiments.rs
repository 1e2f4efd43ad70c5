//! Convergence experiments over quantile discretizations, with CSV output.
//!
//! Cells are computed in parallel and collected in input order, so output is
//! byte-identical across runs unless timing is requested.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::analytic::saddle;
use crate::convolution::boxplus;
use crate::error::{Error, Result};
use crate::measures::ReferenceMeasure;
use crate::transforms::finite_R;

/// Float formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One `(N, s)` cell of the rate experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub s: f64,
    pub r_finite: f64,
    /// Voiculescu R-transform of the empirical root distribution of `p_N`.
    pub r_limit: f64,
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    pub runtime_ms: f64,
}

impl ExperimentRow {
    pub fn within_bounds(&self) -> bool {
        self.lower <= self.delta && self.delta <= self.upper
    }
}

#[derive(Clone, Debug)]
pub struct ConvergeReport {
    pub rows: Vec<ExperimentRow>,
    /// Least-squares slope of `log |delta|` against `log N` over the larger
    /// half of the `N` values. `None` with fewer than two usable points.
    pub slope: Option<f64>,
}

impl ConvergeReport {
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from("N,s,r_finite,r_limit,delta,lower,upper");
        if timing {
            out.push_str(",runtime_ms");
        }
        out.push('\n');
        for r in &self.rows {
            let cells = [r.s, r.r_finite, r.r_limit, r.delta, r.lower, r.upper];
            let body: Vec<String> = cells.iter().map(|&c| fmt_f64(c)).collect();
            write!(out, "{},{}", r.n, body.join(",")).unwrap();
            if timing {
                write!(out, ",{}", fmt_f64(r.runtime_ms)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Rate experiment: for each `N`, `delta = R^(N)_(p_N)(s) - R_(mu_(p_N))(s)`
/// together with its two-sided certified envelope.
pub fn converge(mu: &ReferenceMeasure, n_list: &[usize], s: f64) -> Result<ConvergeReport> {
    let alpha = mu.alpha();
    if !(s > 0.0 && s <= 0.9 * alpha) {
        return Err(Error::OutOfDomain { s, alpha });
    }
    let rows = n_list
        .par_iter()
        .map(|&n| -> Result<ExperimentRow> {
            let start = Instant::now();
            let p = mu.quantile_poly(n)?;
            let ctx = saddle(&p, s)?;
            let cert = ctx.certify_r_sandwich()?;
            let r_limit = ctx.voiculescu_r();
            Ok(ExperimentRow {
                n,
                s,
                r_finite: cert.value + r_limit,
                r_limit,
                delta: cert.value,
                lower: cert.lower,
                upper: cert.upper,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.delta.abs())).collect();
    Ok(ConvergeReport {
        slope: loglog_slope_upper_half(&points),
        rows,
    })
}

/// Least squares on `(log N, log y)` over the largest `ceil(len/2)` values of
/// `N`; zero or non-finite `y` are skipped.
pub fn loglog_slope_upper_half(points: &[(usize, f64)]) -> Option<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by_key(|p| p.0);
    let keep = sorted.len().div_ceil(2);
    let tail: Vec<(f64, f64)> = sorted[sorted.len() - keep..]
        .iter()
        .filter(|(_, y)| y.is_finite() && *y > 0.0)
        .map(|&(n, y)| ((n as f64).ln(), y.ln()))
        .collect();
    if tail.len() < 2 {
        return None;
    }
    let m = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / m;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `lo:hi:count`, `count` evenly spaced points including both ends
/// (`count = 1` gives `hi`).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Parse(format!("grid {text:?} is not lo:hi:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !(lo <= hi) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![hi]);
    }
    Ok((0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect())
}

/// Comma-separated positive integers.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Parse(format!("bad degree {t:?} in N list"))),
        })
        .collect()
}

/// One `N` of the convolution experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxplusRow {
    pub n: usize,
    /// `max_s |R^(N)_(r_N)(s) - R_mu(s) - R_nu(s)|`
    pub max_deviation: f64,
    pub argmax_s: f64,
    /// `min_s [R^(N)_(r_N)(s) - R^(N)_(p_N)(s) - R^(N)_(q_N)(s)]`
    pub min_gap: f64,
    pub runtime_ms: f64,
}

pub fn boxplus_rows_to_csv(rows: &[BoxplusRow], timing: bool) -> String {
    let mut out = String::from("N,max_deviation,argmax_s,min_gap");
    if timing {
        out.push_str(",runtime_ms");
    }
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{},{},{},{}",
            r.n,
            fmt_f64(r.max_deviation),
            fmt_f64(r.argmax_s),
            fmt_f64(r.min_gap)
        )
        .unwrap();
        if timing {
            write!(out, ",{}", fmt_f64(r.runtime_ms)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Convergence of `r_N = p_N ⊞_N q_N` towards `mu ⊞ nu`, measured through
/// the finite R-transform of `r_N` against `R_mu + R_nu`.
pub fn boxplus_converge(
    mu: &ReferenceMeasure,
    nu: &ReferenceMeasure,
    n_list: &[usize],
    s_grid: &[f64],
) -> Result<Vec<BoxplusRow>> {
    for m in [mu, nu] {
        if !m.has_closed_form_r() {
            return Err(Error::Unsupported(format!(
                "no closed-form R-transform target for {m}"
            )));
        }
    }
    // supports inside [-b, -a]; the grid must stay inside (0, 1/(2b))
    let b = -(mu.support().0.min(nu.support().0));
    let s_max = 1.0 / (2.0 * b);
    if let Some(&bad) = s_grid.iter().find(|&&s| !(s > 0.0 && s < s_max)) {
        return Err(Error::OutOfDomain { s: bad, alpha: s_max });
    }
    if s_grid.is_empty() {
        return Err(Error::Parse("empty s grid".into()));
    }
    let targets: Vec<f64> = s_grid
        .iter()
        .map(|&s| Ok(mu.r_transform(s)? + nu.r_transform(s)?))
        .collect::<Result<_>>()?;
    n_list
        .par_iter()
        .map(|&n| -> Result<BoxplusRow> {
            let start = Instant::now();
            let p = mu.quantile_poly(n)?;
            let q = nu.quantile_poly(n)?;
            let r = boxplus(&p, &q)?;
            let mut row = BoxplusRow {
                n,
                max_deviation: f64::NEG_INFINITY,
                argmax_s: f64::NAN,
                min_gap: f64::INFINITY,
                runtime_ms: 0.0,
            };
            for (&s, &target) in s_grid.iter().zip(&targets) {
                let rr = finite_R(&r, &s)?;
                let dev = (rr - target).abs();
                if dev > row.max_deviation {
                    row.max_deviation = dev;
                    row.argmax_s = s;
                }
                let gap = rr - finite_R(&p, &s)? - finite_R(&q, &s)?;
                row.min_gap = row.min_gap.min(gap);
            }
            row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            Ok(row)
        })
        .collect()
}
