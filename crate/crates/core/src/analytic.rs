//! Analytic side of the comparison between the finite R-transform and the
//! Voiculescu R-transform of the empirical root distribution.
//!
//! For `p(x) = prod (x + lambda_i)` with `lambda_i > 0`:
//!
//! ```text
//! G_p(x) = (1/N) sum 1/(x + lambda_i)          Cauchy transform
//! H_p(x) = (1/N) sum log(x + lambda_i)         logarithmic potential
//! G_p(x_s) = s,  0 < s < alpha = G_p(0)        saddle point
//! psi_s(x) = -s (x - x_s) + H_p(x) - H_p(x_s)  <= 0
//! ```
//!
//! Every quantity is computed from the roots, never from `p'/p`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::oracles::integrate_log_concave;
use crate::polycore::MonicPoly;
use crate::scalar::{binomial_row, compensated_sum, Scalar};
use crate::transforms::{finite_R, ln_fff};

/// Outcome of checking `lower <= value <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCertificate {
    pub name: String,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub holds: bool,
    /// `min(value - lower, upper - value)` unless documented otherwise.
    pub slack: f64,
}

impl BoundCertificate {
    fn from_sandwich(name: &str, lower: f64, value: f64, upper: f64) -> Self {
        BoundCertificate {
            name: name.to_string(),
            lower,
            value,
            upper,
            holds: lower <= value && value <= upper,
            slack: (value - lower).min(upper - value),
        }
    }
}

/// Distinct root magnitudes `lambda = -root > 0` with their weights
/// (multiplicity / N). Grouping keeps point masses exact.
#[derive(Clone, Debug, PartialEq)]
struct RootMagnitudes {
    values: Vec<f64>,
    weights: Vec<f64>,
    degree: usize,
}

impl RootMagnitudes {
    fn from_poly(p: &MonicPoly<f64>) -> Result<Self> {
        let roots = p.roots().ok_or(Error::MissingRoots)?;
        p.require_negative_roots()?;
        let mut lambdas: Vec<f64> = roots.iter().map(|r| -r).collect();
        lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
        let n = lambdas.len();
        let mut values: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for l in lambdas {
            if values.last() == Some(&l) {
                *counts.last_mut().unwrap() += 1;
            } else {
                values.push(l);
                counts.push(1);
            }
        }
        let weights = counts.iter().map(|&c| c as f64 / n as f64).collect();
        Ok(RootMagnitudes {
            values,
            weights,
            degree: n,
        })
    }

    fn mean_of(&self, f: impl Fn(f64) -> f64) -> f64 {
        compensated_sum(self.values.iter().zip(&self.weights).map(|(&l, w)| w * f(l)))
    }

    fn min(&self) -> f64 {
        self.values[0]
    }

    fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    fn cauchy(&self, x: f64) -> f64 {
        self.mean_of(|l| 1.0 / (x + l))
    }

    fn cauchy_prime(&self, x: f64) -> f64 {
        -self.mean_of(|l| 1.0 / ((x + l) * (x + l)))
    }

    fn log_potential(&self, x: f64) -> f64 {
        self.mean_of(|l| (x + l).ln())
    }
}

fn check_point(x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositivePoint(x))
    }
}

/// `G_p(x)`, for `x > 0`.
pub fn cauchy(p: &MonicPoly<f64>, x: f64) -> Result<f64> {
    check_point(x)?;
    Ok(RootMagnitudes::from_poly(p)?.cauchy(x))
}

/// `G_p'(x) < 0`.
pub fn cauchy_derivative(p: &MonicPoly<f64>, x: f64) -> Result<f64> {
    check_point(x)?;
    Ok(RootMagnitudes::from_poly(p)?.cauchy_prime(x))
}

/// `H_p(x)`, for `x > 0`.
pub fn log_potential(p: &MonicPoly<f64>, x: f64) -> Result<f64> {
    check_point(x)?;
    Ok(RootMagnitudes::from_poly(p)?.log_potential(x))
}

/// `alpha = G_p(0) = (1/N) sum 1/lambda_i`, the right end of the admissible
/// `s` range.
pub fn alpha(p: &MonicPoly<f64>) -> Result<f64> {
    Ok(RootMagnitudes::from_poly(p)?.mean_of(|l| 1.0 / l))
}

/// `L^(N)(s) = (1/N) log ∫_0^∞ p(x) e^(-Nsx) dx`, through the FFF transform:
/// `(1/N) [log N! + log p^(Ns) - (N+1) log(Ns)]`.
pub fn l_finite<T: Scalar>(p: &MonicPoly<T>, s: &T) -> Result<f64> {
    p.require_negative_roots()?;
    let sf = s.to_f64_lossy();
    if !s.is_positive() {
        return Err(Error::OutOfDomain {
            s: sf,
            alpha: f64::INFINITY,
        });
    }
    let n = p.degree();
    let nf = n as f64;
    let t = T::from_count(n) * s.clone();
    let ln_fact = compensated_sum((1..=n).map(|k| (k as f64).ln()));
    let ln_hat = ln_fff(p, &t)?;
    Ok((ln_fact + ln_hat - (nf + 1.0) * (nf * sf).ln()) / nf)
}

/// Finite R-transform through the tilted measure `p(x) e^(-Nsx) dx`:
///
/// ```text
/// R_p(s) = (1/s) E[x G_p(x)] - 1/s,
/// E[x G_p(x)] = ∫ x p'(x) e^(-Nsx) dx / (N ∫ p(x) e^(-Nsx) dx)
/// ```
///
/// Both integrals are finite sums of monomial moments
/// `∫ x^j e^(-tx) dx = j!/t^(j+1)` over the monomial coefficients of `p`.
/// This shares nothing with [`finite_R`] beyond the coefficients themselves.
pub fn tilted_r<T: Scalar>(p: &MonicPoly<T>, s: &T) -> Result<T> {
    p.require_negative_roots()?;
    if !s.is_positive() {
        return Err(Error::OutOfDomain {
            s: s.to_f64_lossy(),
            alpha: f64::INFINITY,
        });
    }
    let n = p.degree();
    let t = (T::from_count(n) * s.clone()).widen();
    let binoms = binomial_row(n);
    let signed = p.signed_etilde();

    // moment_j = j! / t^(j+1), built upward
    let mut moment = T::Wide::one() / t.clone();
    let mut mass = T::Wide::zero();
    let mut first = T::Wide::zero();
    for j in 0..=n {
        if j > 0 {
            moment = moment * T::from_count(j).widen() / t.clone();
        }
        // monomial coefficient of x^j: (-1)^(N-j) C(N, N-j) e~_(N-j), nonnegative here
        let k = n - j;
        let coeff = signed[k].widen() * T::wide_from_bigint(&binoms[k]);
        let w = coeff * moment.clone();
        first = first + w.clone() * T::from_count(j).widen();
        mass = mass + w;
    }
    if mass.is_zero() {
        return Err(Error::Pole(s.to_f64_lossy()));
    }
    let sw = s.widen();
    let expectation = first / (T::from_count(n).widen() * mass);
    Ok(T::narrow(&(expectation / sw.clone() - T::Wide::one() / sw)))
}

/// Saddle point and derived quantities for one `(p, s)` with `0 < s < alpha`.
#[derive(Clone, Debug)]
pub struct TiltContext {
    poly: MonicPoly<f64>,
    roots: RootMagnitudes,
    s: f64,
    x_s: f64,
    sigma2: f64,
    alpha: f64,
}

const BISECTION_STEPS: usize = 60;
const NEWTON_STEPS: usize = 50;

/// Solve `G_p(x_s) = s`.
pub fn saddle(p: &MonicPoly<f64>, s: f64) -> Result<TiltContext> {
    TiltContext::new(p, s)
}

impl TiltContext {
    pub fn new(p: &MonicPoly<f64>, s: f64) -> Result<Self> {
        let roots = RootMagnitudes::from_poly(p)?;
        let alpha = roots.mean_of(|l| 1.0 / l);
        if !(s > 0.0 && s < alpha) {
            return Err(Error::OutOfDomain { s, alpha });
        }
        // 1/(x + lambda_max) <= G_p(x) <= 1/(x + lambda_min)
        let mut lo = (1.0 / s - roots.max()).max(0.0);
        let mut hi = 1.0 / s - roots.min();
        for _ in 0..BISECTION_STEPS {
            if hi - lo <= 1e-6 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if roots.cauchy(mid) > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Newton from the left: G is convex and decreasing, so iterates stay
        // left of the root and increase monotonically.
        let mut x = lo;
        let mut converged = false;
        for _ in 0..NEWTON_STEPS {
            let f = roots.cauchy(x) - s;
            if f == 0.0 {
                converged = true;
                break;
            }
            let step = -f / roots.cauchy_prime(x);
            let next = (x + step).clamp(lo.min(x), hi);
            if (next - x).abs() <= 1e-15 * next.abs().max(f64::MIN_POSITIVE) {
                x = next;
                converged = true;
                break;
            }
            x = next;
        }
        let residual = (roots.cauchy(x) - s).abs();
        if !converged && residual > 1e-13 * s {
            return Err(Error::SaddleFailed(format!(
                "no convergence for s = {s}: |G(x) - s| = {residual:e} at x = {x}"
            )));
        }
        if residual > 1e-12 * s || x <= 0.0 {
            return Err(Error::SaddleFailed(format!(
                "saddle x = {x} misses G(x) = s = {s} by {residual:e}"
            )));
        }
        let sigma2 = -roots.cauchy_prime(x);
        Ok(TiltContext {
            poly: p.clone(),
            roots,
            s,
            x_s: x,
            sigma2,
            alpha,
        })
    }

    pub fn poly(&self) -> &MonicPoly<f64> {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.roots.degree
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn x_s(&self) -> f64 {
        self.x_s
    }

    /// `sigma_s^2 = -G_p'(x_s)`
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn cauchy(&self, x: f64) -> f64 {
        self.roots.cauchy(x)
    }

    pub fn log_potential(&self, x: f64) -> f64 {
        self.roots.log_potential(x)
    }

    /// Voiculescu R-transform of the empirical root distribution,
    /// `G_p^(-1)(s) - 1/s = x_s - 1/s`.
    pub fn voiculescu_r(&self) -> f64 {
        self.x_s - 1.0 / self.s
    }

    /// `L^(∞)(s) = sup_x {-sx + H_p(x)} = -s x_s + H_p(x_s)`.
    pub fn l_infinity(&self) -> f64 {
        -self.s * self.x_s + self.roots.log_potential(self.x_s)
    }

    pub fn psi(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::NonPositivePoint(x));
        }
        Ok(-self.s * (x - self.x_s) + self.roots.log_potential(x)
            - self.roots.log_potential(self.x_s))
    }

    /// `psi_s'(x) = G_p(x) - s`
    pub fn psi_prime(&self, x: f64) -> f64 {
        self.roots.cauchy(x) - self.s
    }

    /// `T_p(x) = (1/N) sum lambda_i / ((x + lambda_i)(x_s + lambda_i))`.
    pub fn t_kernel(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::NonPositivePoint(x));
        }
        let xs = self.x_s;
        Ok(self.roots.mean_of(|l| l / ((x + l) * (xs + l))))
    }

    pub fn finite_r(&self) -> Result<f64> {
        finite_R(&self.poly, &self.s)
    }

    pub fn tilted_r(&self) -> Result<f64> {
        tilted_r(&self.poly, &self.s)
    }

    pub fn l_finite(&self) -> Result<f64> {
        l_finite(&self.poly, &self.s)
    }

    /// `∫_0^∞ e^(N psi_s(x)) dx` by adaptive quadrature.
    pub fn laplace_mass(&self) -> Result<f64> {
        let n = self.degree() as f64;
        let log_f = |x: f64| n * self.psi(x).unwrap_or(f64::NEG_INFINITY);
        let res = integrate_log_concave(&log_f, 0.0, self.x_s, 1e-12)?;
        Ok(res.value)
    }

    /// `sqrt(π/(2Nσ²)) <= ∫_0^∞ e^(Nψ) dx <= p(x_s)^(1/N) e^(1/(12N)) sqrt(2π/N)`
    pub fn certify_laplace_mass(&self) -> Result<BoundCertificate> {
        let n = self.degree() as f64;
        let value = self.laplace_mass()?;
        let lower = (std::f64::consts::PI / (2.0 * n * self.sigma2)).sqrt();
        let geo_mean = self.roots.log_potential(self.x_s).exp();
        let upper = geo_mean * (1.0 / (12.0 * n)).exp() * (2.0 * std::f64::consts::PI / n).sqrt();
        Ok(BoundCertificate::from_sandwich("laplace-mass", lower, value, upper))
    }

    /// `-α/(s N x_s σ²) <= R^(N)(s) - R^(∞)(s) <= 1/(N x_s σ²)`
    pub fn certify_r_sandwich(&self) -> Result<BoundCertificate> {
        let n = self.degree() as f64;
        let value = self.finite_r()? - self.voiculescu_r();
        let scale = n * self.x_s * self.sigma2;
        let lower = -self.alpha / (self.s * scale);
        let upper = 1.0 / scale;
        Ok(BoundCertificate::from_sandwich("r-sandwich", lower, value, upper))
    }

    /// On every grid point checks
    /// `-psi'(x) <= σ²(x - x_s) <= -(x/x_s) psi'(x)`, and that `T_p` is
    /// decreasing along the grid with `0 <= T_p <= s`.
    ///
    /// Both gaps vanish to second order at `x_s`, so `slack` is the smallest
    /// gap divided by `(x - x_s)^2`, over grid points not within `1e-6` of
    /// `x_s` (relative). `value` is `T_p` at the first grid point, bracketed by
    /// `[0, s]`.
    pub fn certify_kernel_inequalities(&self, grid: &[f64]) -> Result<BoundCertificate> {
        let xs = self.x_s;
        let mut holds = true;
        let mut slack = f64::INFINITY;
        let mut sorted = grid.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        let mut prev_t: Option<f64> = None;
        for &x in &sorted {
            let dpsi = self.psi_prime(x);
            let left = -dpsi;
            let mid = self.sigma2 * (x - xs);
            let right = -(x / xs) * dpsi;
            let tol = 1e-12 * (left.abs() + mid.abs() + right.abs() + self.s * (1.0 + x));
            if left > mid + tol || mid > right + tol {
                holds = false;
            }
            let dx = x - xs;
            if dx.abs() > 1e-6 * xs.max(1.0) {
                let d2 = dx * dx;
                slack = slack.min((mid - left) / d2).min((right - mid) / d2);
            }
            let t = self.t_kernel(x)?;
            if t < 0.0 || t > self.s * (1.0 + 1e-12) {
                holds = false;
            }
            if let Some(pt) = prev_t {
                if t > pt * (1.0 + 1e-14) {
                    holds = false;
                }
            }
            prev_t = Some(t);
        }
        if slack.is_finite() && slack <= 0.0 {
            holds = false;
        }
        let first = sorted.first().copied().unwrap_or(0.0);
        Ok(BoundCertificate {
            name: "kernel-inequalities".to_string(),
            lower: 0.0,
            value: self.t_kernel(first)?,
            upper: self.s,
            holds,
            slack,
        })
    }

    /// A default grid for the kernel certificate: `count` points spread over
    /// `[0, 4 x_s + 4 mean(lambda)]`.
    pub fn default_grid(&self, count: usize) -> Vec<f64> {
        let span = 4.0 * self.x_s + 4.0 * self.roots.mean_of(|l| l);
        (0..count)
            .map(|i| span * i as f64 / (count.max(2) - 1) as f64)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::finite_diff;
    use crate::polycore::{ExactPoly, FloatPoly};
    use num_rational::BigRational;

    fn two_roots() -> FloatPoly {
        FloatPoly::from_roots(vec![-1.0, -2.0]).unwrap()
    }

    #[test]
    fn cauchy_examples() {
        let lam = 1.3;
        let p = FloatPoly::power_of_linear(-lam, 7).unwrap();
        assert!((cauchy(&p, 0.4).unwrap() - 1.0 / (0.4 + lam)).abs() < 1e-15);
        assert_eq!(alpha(&two_roots()).unwrap(), 0.75);
        let mut prev = f64::INFINITY;
        for x in [0.1, 1.0, 10.0, 100.0, 1e4] {
            let g = cauchy(&two_roots(), x).unwrap();
            assert!(g < prev && g > 0.0);
            prev = g;
        }
        assert!(prev < 1e-3);
        assert_eq!(cauchy(&two_roots(), 0.0), Err(Error::NonPositivePoint(0.0)));
    }

    #[test]
    fn cauchy_matches_derivative_ratio() {
        let p = FloatPoly::from_roots(vec![-0.5, -1.5, -2.0, -4.0]).unwrap();
        for x in [0.2, 1.0, 3.0] {
            let ratio = p.derivative().eval(&x) / (4.0 * p.eval(&x));
            let g = cauchy(&p, x).unwrap();
            assert!((g - ratio).abs() <= 1e-10 * g);
        }
    }

    #[test]
    fn log_potential_examples() {
        let p = FloatPoly::power_of_linear(-2.5, 5).unwrap();
        assert!((log_potential(&p, 1.0).unwrap() - 3.5f64.ln()).abs() < 1e-15);
        let h = log_potential(&two_roots(), 1.0).unwrap();
        assert!((h - 0.5 * (2f64.ln() + 3f64.ln())).abs() < 1e-15);
        assert!((h - 0.8959).abs() < 1e-4);
        let fd = finite_diff(|x| log_potential(&two_roots(), x).unwrap(), 0.7, 1e-5);
        assert!((fd - cauchy(&two_roots(), 0.7).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn saddle_examples() {
        let lam = 1.5;
        let s = 0.4;
        let p = FloatPoly::power_of_linear(-lam, 9).unwrap();
        let ctx = saddle(&p, s).unwrap();
        assert!((ctx.x_s() - (1.0 / s - lam)).abs() < 1e-14);

        let ctx = saddle(&two_roots(), 0.5).unwrap();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((ctx.x_s() - golden).abs() < 1e-13);
        assert!((ctx.cauchy(ctx.x_s()) - 0.5).abs() <= 1e-12 * 0.5);

        let near = saddle(&two_roots(), 0.75 * (1.0 - 1e-9)).unwrap();
        assert!(near.x_s() < 1e-7);

        assert_eq!(
            saddle(&two_roots(), 0.8).unwrap_err(),
            Error::OutOfDomain { s: 0.8, alpha: 0.75 }
        );
        assert!(saddle(&two_roots(), -0.1).is_err());
    }

    #[test]
    fn voiculescu_r_examples() {
        let p = FloatPoly::power_of_linear(-2.0, 4).unwrap();
        assert_eq!(saddle(&p, 0.25).unwrap().voiculescu_r(), -2.0);
        let r = saddle(&two_roots(), 0.5).unwrap().voiculescu_r();
        assert!((r + 1.381_966_011_250_105).abs() < 1e-12);
        let r0 = saddle(&two_roots(), 1e-7).unwrap().voiculescu_r();
        assert!((r0 + 1.5).abs() < 1e-6);
    }

    #[test]
    fn l_infinity_examples() {
        let (lam, s) = (2.0, 0.3);
        let p = FloatPoly::power_of_linear(-lam, 6).unwrap();
        let ctx = saddle(&p, s).unwrap();
        assert!((ctx.l_infinity() - (s * lam - s.ln() - 1.0)).abs() < 1e-14);

        let ctx = saddle(&two_roots(), 0.5).unwrap();
        assert!((ctx.l_infinity() - 0.4128).abs() < 1e-4);

        // envelope: d/ds L_inf = -x_s
        let q = FloatPoly::from_roots(vec![-0.7, -1.1, -3.0]).unwrap();
        let l = |s: f64| saddle(&q, s).unwrap().l_infinity();
        let s = 0.3;
        let fd = finite_diff(l, s, 1e-5);
        assert!((fd + saddle(&q, s).unwrap().x_s()).abs() < 1e-8);
    }

    #[test]
    fn l_finite_degree_one() {
        let lam = 0.8;
        let p = FloatPoly::from_roots(vec![-lam]).unwrap();
        for s in [0.1, 0.5, 2.0] {
            let want = ((1.0 + lam * s) / (s * s)).ln();
            assert!((l_finite(&p, &s).unwrap() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn laplace_correction_decomposition() {
        let p = FloatPoly::from_roots(vec![-1.0, -1.5, -2.0, -2.5, -3.0, -4.0]).unwrap();
        let a = alpha(&p).unwrap();
        for frac in [0.2, 0.5, 0.8] {
            let ctx = saddle(&p, frac * a).unwrap();
            let n = ctx.degree() as f64;
            let lhs = ctx.l_finite().unwrap() - ctx.l_infinity();
            let rhs = ctx.laplace_mass().unwrap().ln() / n;
            assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1e-3), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn psi_examples() {
        let ctx = saddle(&two_roots(), 0.5).unwrap();
        assert_eq!(ctx.psi(ctx.x_s()).unwrap(), 0.0);
        assert!((ctx.psi(2.0).unwrap() + 0.1703).abs() < 1e-4);
        let h = 1e-4;
        let xs = ctx.x_s();
        let second = (ctx.psi(xs + h).unwrap() - 2.0 * ctx.psi(xs).unwrap()
            + ctx.psi(xs - h).unwrap())
            / (h * h);
        assert!((second + ctx.sigma2()).abs() < 1e-6);
        assert!(ctx.psi(-1.0).is_err());
        for x in [0.0, 0.3, 1.0, 5.0, 50.0] {
            assert!(ctx.psi(x).unwrap() <= 0.0);
        }
    }

    #[test]
    fn kernel_examples() {
        let ctx = saddle(&two_roots(), 0.5).unwrap();
        assert!((ctx.t_kernel(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(ctx.t_kernel(1e8).unwrap() < 1e-7);
        let xs = ctx.x_s();
        for i in 0..40 {
            let x = 0.125 * i as f64;
            let lhs = x * ctx.cauchy(x.max(1e-300)) - xs * 0.5;
            let rhs = ctx.t_kernel(x).unwrap() * (x - xs);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn tilted_r_agrees_with_finite_r_exactly() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let p = ExactPoly::from_roots(vec![q(-1, 1), q(-2, 1)]).unwrap();
        let s = q(1, 2);
        assert_eq!(tilted_r(&p, &s).unwrap(), finite_R(&p, &s).unwrap());
        let lam = q(3, 2);
        let lin = ExactPoly::from_roots(vec![-lam.clone()]).unwrap();
        let s = q(1, 3);
        assert_eq!(tilted_r(&lin, &s).unwrap(), -lam.clone() / (q(1, 1) + lam * s.clone()));
        assert_eq!(tilted_r(&lin, &s).unwrap(), finite_R(&lin, &s).unwrap());
    }

    #[test]
    fn certificates_on_small_example() {
        let ctx = saddle(&two_roots(), 0.5).unwrap();
        assert!(ctx.certify_laplace_mass().unwrap().holds);
        assert!(ctx.certify_r_sandwich().unwrap().holds);
        let grid: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
        let cert = ctx.certify_kernel_inequalities(&grid).unwrap();
        assert!(cert.holds && cert.slack > 0.0);
        assert!((cert.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn laplace_mass_degree_one_by_hand() {
        // p = x + 1, s = 1/2: x_s = 1, ∫ e^psi = 3 e^(1/2)
        let p = FloatPoly::from_roots(vec![-1.0]).unwrap();
        let ctx = saddle(&p, 0.5).unwrap();
        assert!((ctx.x_s() - 1.0).abs() < 1e-15);
        let cert = ctx.certify_laplace_mass().unwrap();
        assert!((cert.value - 3.0 * 0.5f64.exp()).abs() < 1e-9);
        assert!((cert.lower - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        let upper = 2.0 * (1.0f64 / 12.0).exp() * (2.0 * std::f64::consts::PI).sqrt();
        assert!((cert.upper - upper).abs() < 1e-12);
        assert!(cert.holds);
    }

    #[test]
    fn r_sandwich_for_repeated_root_matches_closed_form() {
        // (x+1)^10, s = 1/2: delta = (sλ)^(N+1) e^(-N(sλ-1)) / (N s ∫_{sλ-1}^∞ (w+1)^N e^(-Nw) dw)
        let n = 10usize;
        let (lam, s) = (1.0f64, 0.5f64);
        let p = FloatPoly::power_of_linear(-lam, n).unwrap();
        let ctx = saddle(&p, s).unwrap();
        let cert = ctx.certify_r_sandwich().unwrap();
        let nf = n as f64;
        let a = s * lam - 1.0;
        let log_f = |w: f64| nf * (w + 1.0).ln() - nf * w;
        let integral = crate::oracles::integrate_log_concave(&log_f, a, 0.0, 1e-12).unwrap();
        let want = (s * lam).powi(n as i32 + 1) * (-nf * a).exp() / (nf * s * integral.value);
        assert!((cert.value - want).abs() < 1e-10 * want);
        assert!(cert.holds && cert.value > 0.0);
    }

    #[test]
    fn analytic_ops_need_roots() {
        let c = FloatPoly::from_etilde(vec![1.0, -1.5, 2.0]).unwrap();
        assert_eq!(cauchy(&c, 1.0), Err(Error::MissingRoots));
        assert!(saddle(&c, 0.1).is_err());
    }
}
