//! Independent reference computations: adaptive Gauss–Legendre quadrature,
//! set-partition enumeration with Möbius weights, central differences, and
//! the Stirling-type bound used for repeated-root polynomials.
//!
//! Nothing here reuses the closed-form production paths it is compared
//! against. Quadrature works from the product form `prod (x + lambda_i)`,
//! never from the normalized coefficients.

use std::sync::OnceLock;

use crate::analytic::BoundCertificate;
use crate::error::{Error, Result};
use crate::polycore::MonicPoly;
use crate::scalar::compensated_sum;

pub const PARTITION_CAP: usize = 12;

/// Doublings of the truncation point before giving up.
pub const MAX_DOUBLINGS: usize = 12;

/// The integrand is cut where it has dropped by this many e-folds from its
/// peak.
pub const TAIL_DROP: f64 = 40.0;

const GL_ORDER: usize = 20;
const MAX_PANELS: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult {
    /// The integral. May be `inf` when it exceeds the `f64` range; use
    /// `ln_value` then.
    pub value: f64,
    pub ln_value: f64,
    /// Absolute error estimate, same scale as `value`.
    pub est_error: f64,
    pub panels: usize,
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and P_n'
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = pk;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gl_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * compensated_sum(nodes.iter().zip(weights).map(|(x, w)| w * f(mid + half * x)))
}

/// Adaptive Gauss–Legendre on `[a, b]` to absolute tolerance `tol`.
/// Returns `(value, error estimate, panels)`.
fn adaptive_gl(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64, usize)> {
    if b <= a {
        return Ok((0.0, 0.0, 0));
    }
    let width = b - a;
    let mut stack = vec![(a, b, gl_panel(f, a, b))];
    let mut accepted = Vec::new();
    let mut err_total = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl_panel(f, lo, mid);
        let right = gl_panel(f, mid, hi);
        let err = (left + right - whole).abs();
        let local_tol = tol * (hi - lo) / width;
        if err <= local_tol || (hi - lo) < 1e-14 * width.max(1.0) {
            accepted.push(left + right);
            err_total += err;
            panels += 2;
        } else {
            stack.push((lo, mid, left));
            stack.push((mid, hi, right));
        }
        if stack.len() + panels > MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "more than {MAX_PANELS} panels on [{a}, {b}]"
            )));
        }
    }
    Ok((compensated_sum(accepted), err_total, panels))
}

/// `∫_lo^∞ exp(log_f(x)) dx` for a log-concave integrand with its maximum at
/// `mode >= lo`. The integrand is rescaled by its peak, so the result can be
/// far outside the `f64` range (see `ln_value`).
pub fn integrate_log_concave(
    log_f: &dyn Fn(f64) -> f64,
    lo: f64,
    mode: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let peak = log_f(mode);
    if !peak.is_finite() {
        return Err(Error::Quadrature(format!("integrand not finite at mode {mode}")));
    }
    let g = |x: f64| (log_f(x) - peak).exp();

    let mut hi = mode + (mode - lo).max(1.0);
    let mut doublings = 0;
    while log_f(hi) - peak > -TAIL_DROP {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::Quadrature(format!(
                "integrand still above e^-{TAIL_DROP} of its peak at x = {hi}"
            )));
        }
        hi = mode + 2.0 * (hi - mode);
        doublings += 1;
    }

    // coarse pass to set the absolute tolerance
    let coarse: f64 = [(lo, mode), (mode, hi)]
        .iter()
        .filter(|(a, b)| b > a)
        .map(|&(a, b)| {
            let w = (b - a) / 64.0;
            (0..64)
                .map(|i| gl_panel(&g, a + i as f64 * w, a + (i + 1) as f64 * w))
                .sum::<f64>()
        })
        .sum();
    let tol = rel_tol * coarse.abs().max(f64::MIN_POSITIVE);

    let (left, e1, n1) = adaptive_gl(&g, lo, mode, 0.5 * tol)?;
    let (right, e2, n2) = adaptive_gl(&g, mode, hi, 0.5 * tol)?;
    let scaled = left + right;
    let ln_value = peak + scaled.ln();
    Ok(QuadratureResult {
        value: ln_value.exp(),
        ln_value,
        est_error: (e1 + e2) * peak.exp(),
        panels: n1 + n2,
    })
}

/// `∫_0^∞ p(x) e^(-n_scale * s * x) dx`, from the roots of `p`.
pub fn quad_laplace(p: &MonicPoly<f64>, s: f64, n_scale: usize) -> Result<QuadratureResult> {
    let roots = p.roots().ok_or(Error::MissingRoots)?;
    // zero roots are fine here: the integrand only vanishes at x = 0
    if let Some((index, &value)) = roots.iter().enumerate().find(|(_, r)| !(**r <= 0.0)) {
        return Err(Error::NonNegativeRoot { index, value });
    }
    let lambdas: Vec<f64> = roots.iter().map(|r| -r).collect();
    let rate = n_scale as f64 * s;
    let log_f = |x: f64| compensated_sum(lambdas.iter().map(|l| (x + l).ln())) - rate * x;
    // mode: sum 1/(x + lambda) = rate, or 0 if the integrand is decreasing
    let slope = |x: f64| lambdas.iter().map(|l| 1.0 / (x + l)).sum::<f64>() - rate;
    let mode = if slope(0.0) <= 0.0 {
        0.0
    } else {
        let (mut a, mut b) = (0.0, lambdas.len() as f64 / rate);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if slope(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    integrate_log_concave(&log_f, 0.0, mode, 1e-12)
}

/// One set partition of `[n]`, as a restricted-growth string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// `rgs[i]` is the block label of element `i+1`; labels appear in order.
    pub rgs: Vec<u8>,
    pub blocks: usize,
    /// `mu(pi, 1_n) = (-1)^(|pi|-1) (|pi|-1)!`
    pub mobius: i64,
}

impl Partition {
    /// Block sizes, sorted descending.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.blocks];
        for &b in &self.rgs {
            sizes[b as usize] += 1;
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

fn mobius_to_top(blocks: usize) -> i64 {
    let f: i64 = (1..blocks as i64).product();
    if blocks % 2 == 1 {
        f
    } else {
        -f
    }
}

/// Lazy enumeration of set partitions in restricted-growth order.
pub struct Partitions {
    rgs: Vec<u8>,
    maxes: Vec<u8>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let n = self.rgs.len();
        let blocks = self.maxes.last().map_or(0, |&m| m as usize + 1);
        let out = Partition {
            rgs: self.rgs.clone(),
            blocks,
            mobius: mobius_to_top(blocks),
        };
        // advance: rightmost position that can be incremented
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            let bound = self.maxes[i - 1] + 1;
            if self.rgs[i] < bound {
                self.rgs[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                break;
            }
        }
        Some(out)
    }
}

/// All set partitions of `[n]` (`1 <= n <= 12`) with their Möbius weights.
pub fn enumerate_partitions(n: usize) -> Result<Partitions> {
    if n > PARTITION_CAP {
        return Err(Error::PartitionCap {
            n,
            cap: PARTITION_CAP,
        });
    }
    if n == 0 {
        return Err(Error::Unsupported("partitions of the empty set".into()));
    }
    Ok(Partitions {
        rgs: vec![0; n],
        maxes: vec![0; n],
        done: false,
    })
}

/// `(f(x+h) - f(x-h)) / 2h`
pub fn finite_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `(n + 1/2) ln(1 + 1/n) - 1 = sum_{k>=1} y^(2k) / (2k+1)`, `y = 1/(2n+1)`.
/// Every term is positive, so there is no cancellation.
fn stirling_step(n: usize) -> f64 {
    let y2 = 1.0 / ((2 * n + 1) as f64).powi(2);
    let mut term = y2;
    let mut acc = 0.0f64;
    let mut k = 1;
    while term > 1e-19 * acc.max(f64::MIN_POSITIVE) && k < 200 {
        acc += term / (2 * k + 1) as f64;
        term *= y2;
        k += 1;
    }
    acc
}

/// Checks `∫_{-1}^∞ (w+1)^N e^(-Nw) dw = N! e^N / N^(N+1) <= e^(1/(12N)) sqrt(2π/N)`
/// in log form. `value` and `upper` are the two logs; `slack = upper - value`
/// is evaluated without cancellation through the telescoping identity
/// `θ(n) - θ(n+1) = (n+1/2) ln(1+1/n) - 1` for the Stirling remainder
/// `θ(N) = ln N! - (N+1/2) ln N + N - ln(2π)/2`.
pub fn stirling_bound_check(n: usize) -> BoundCertificate {
    assert!(n >= 1, "stirling_bound_check needs N >= 1");
    let nf = n as f64;
    let ln_fact = compensated_sum((1..=n).map(|k| (k as f64).ln()));
    let value = ln_fact + nf - (nf + 1.0) * nf.ln();
    let upper = 1.0 / (12.0 * nf) + 0.5 * (2.0 * std::f64::consts::PI / nf).ln();
    let theta_1 = 1.0 - 0.5 * (2.0 * std::f64::consts::PI).ln();
    let theta_n = theta_1 - compensated_sum((1..n).map(stirling_step));
    let slack = 1.0 / (12.0 * nf) - theta_n;
    BoundCertificate {
        name: format!("stirling(N={n})"),
        lower: f64::NEG_INFINITY,
        value,
        upper,
        holds: slack > 0.0,
        slack,
    }
}

/// Bell numbers `B_0..=B_n`, via the Bell triangle.
pub fn bell_numbers(n: usize) -> Vec<u64> {
    let mut out = vec![1u64];
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        out.push(next[0]);
        row = next;
    }
    out.truncate(n + 1);
    out
}
