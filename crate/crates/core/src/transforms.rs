//! FFF transform, its logarithm, the finite R-transform and finite free
//! cumulants.
//!
//! For a degree-`N` polynomial the FFF transform is the exponential
//! generating polynomial
//!
//! ```text
//! p^(s) = sum_k (-1)^k e~_k s^k / k!
//! ```
//!
//! and the finite R-transform is `R_p(s) = -p^'(Ns) / p^(Ns)`. Its Taylor
//! coefficients are the finite free cumulants `kappa_1..kappa_N`, computed
//! here both from the formal logarithm of `p^` and from the Möbius inversion
//! over set partitions.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::oracles::enumerate_partitions;
use crate::polycore::{DensePoly, MonicPoly};
use crate::scalar::{binomial_row, factorial, Scalar, WideNum};
use crate::convolution::boxplus;

/// Largest `n` for which the Möbius route is attempted.
pub const MOBIUS_CAP: usize = 12;

/// A formal power series known modulo `s^(order+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series keeps at least a_0");
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order + 1, T::zero());
        TruncatedSeries { coeffs: c }
    }

    /// Product modulo `s^(min order + 1)`.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        let mut out = vec![T::zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(m + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(m + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Full product of two series viewed as polynomials (no truncation).
    pub fn poly_mul(&self, other: &Self) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Formal logarithm of a series with `a_0 = 1`, via
    /// `n b_n = n a_n - sum_{j<n} j b_j a_(n-j)`.
    pub fn log(&self) -> Self {
        assert!(self.coeffs[0].is_one(), "formal log needs a_0 = 1");
        let m = self.order();
        let mut b = vec![T::zero(); m + 1];
        for n in 1..=m {
            let nf = T::from_count(n);
            let mut acc = nf.clone() * self.coeffs[n].clone();
            for j in 1..n {
                acc = acc - T::from_count(j) * b[j].clone() * self.coeffs[n - j].clone();
            }
            b[n] = acc / nf;
        }
        TruncatedSeries { coeffs: b }
    }

    /// Term-wise derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return TruncatedSeries::new(vec![T::zero()]);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| a.clone() * T::from_count(k))
            .collect();
        TruncatedSeries { coeffs: c }
    }

    /// Quotient modulo `s^(min order + 1)`; needs `other.a_0 != 0`.
    pub fn div(&self, other: &Self) -> Self {
        let b0 = other.coeffs[0].clone();
        assert!(!b0.is_zero(), "series division by a series with zero constant term");
        let m = self.order().min(other.order());
        let mut q: Vec<T> = Vec::with_capacity(m + 1);
        for n in 0..=m {
            let mut acc = self.coeffs[n].clone();
            for j in 1..=n {
                acc = acc - other.coeffs[j].clone() * q[n - j].clone();
            }
            q.push(acc / b0.clone());
        }
        TruncatedSeries { coeffs: q }
    }

    /// Substitute `s -> c s`.
    pub fn scale_argument(&self, c: &T) -> Self {
        let mut pow = T::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let out = a.clone() * pow.clone();
                pow = pow.clone() * c.clone();
                out
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn eval(&self, s: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * s.clone() + c.clone())
    }

    /// `self ≡ other (mod s^(order+1))`.
    pub fn agrees_to(&self, other: &Self, order: usize) -> bool {
        (0..=order).all(|k| self.coeff(k) == other.coeff(k))
    }
}

/// Finite free cumulants `kappa_1..kappa_n` of a degree-`N` polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantVector<T> {
    kappa: Vec<T>,
    source_degree: usize,
}

impl<T: Scalar> CumulantVector<T> {
    pub fn new(kappa: Vec<T>, source_degree: usize) -> Self {
        CumulantVector {
            kappa,
            source_degree,
        }
    }

    /// `kappa[0]` is `kappa_1`.
    pub fn kappa(&self) -> &[T] {
        &self.kappa
    }

    pub fn source_degree(&self) -> usize {
        self.source_degree
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    /// Recover `c_n = kappa_n (n-1)! / (-N)^(n-1)`.
    pub fn log_coefficients(&self) -> Vec<T> {
        let big_n = T::from_count(self.source_degree);
        let mut scale = T::one(); // (n-1)! / (-N)^(n-1)
        self.kappa
            .iter()
            .enumerate()
            .map(|(i, k)| {
                if i > 0 {
                    scale = scale.clone() * T::from_count(i) / (-big_n.clone());
                }
                k.clone() * scale.clone()
            })
            .collect()
    }

    fn from_log_coefficients(c: Vec<T>, n: usize) -> Self {
        let big_n = T::from_count(n);
        let mut scale = T::one(); // (-N)^(m-1) / (m-1)!
        let kappa = c
            .into_iter()
            .enumerate()
            .map(|(i, cn)| {
                if i > 0 {
                    scale = scale.clone() * (-big_n.clone()) / T::from_count(i);
                }
                cn * scale.clone()
            })
            .collect();
        CumulantVector::new(kappa, n)
    }
}

/// The FFF transform as a degree-`N` series.
pub fn fff<T: Scalar>(p: &MonicPoly<T>) -> TruncatedSeries<T> {
    let mut inv_fact = T::one();
    let coeffs = p
        .signed_etilde()
        .into_iter()
        .enumerate()
        .map(|(k, a)| {
            if k > 0 {
                inv_fact = inv_fact.clone() / T::from_count(k);
            }
            a * inv_fact.clone()
        })
        .collect();
    TruncatedSeries::new(coeffs)
}

/// `C_p = log p^` as a series modulo `s^(N+1)`.
pub fn log_fff<T: Scalar>(p: &MonicPoly<T>) -> TruncatedSeries<T> {
    fff(p).log()
}

/// True iff `(p boxplus q)^ ≡ p^ q^ (mod s^(N+1))`.
pub fn fff_linearization_check<T: Scalar>(p: &MonicPoly<T>, q: &MonicPoly<T>) -> Result<bool> {
    let r = boxplus(p, q)?;
    let n = p.degree();
    let prod = fff(p).mul(&fff(q));
    if T::EXACT {
        return Ok(fff(&r).agrees_to(&prod, n));
    }
    let rhat = fff(&r);
    Ok((0..=n).all(|k| {
        let a = rhat.coeff(k).to_f64_lossy();
        let b = prod.coeff(k).to_f64_lossy();
        (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }))
}

/// `p^(d/dx) x^N`, which reproduces `p`.
pub fn apply_fff_operator<T: Scalar>(p: &MonicPoly<T>) -> DensePoly<T> {
    let n = p.degree();
    let series = fff(p);
    // d^k/dx^k x^N = N!/(N-k)! x^(N-k)
    let mut out = vec![T::zero(); n + 1];
    let mut falling = T::one();
    for k in 0..=n {
        if k > 0 {
            falling = falling.clone() * T::from_count(n + 1 - k);
        }
        out[n - k] = series.coeff(k) * falling.clone();
    }
    DensePoly::new(out)
}

/// `sum_k a_k t^k / k!` in the wide type, by nested Horner with ratios `t/(k+1)`
/// (no factorials are ever formed).
pub(crate) fn exp_horner_wide<T: Scalar>(a: &[T], t: &T) -> T::Wide {
    let Some(last) = a.last() else {
        return T::Wide::zero();
    };
    let tw = t.widen();
    let mut acc = last.widen();
    for k in (0..a.len() - 1).rev() {
        acc = a[k].widen() + acc * tw.clone() / T::from_count(k + 1).widen();
    }
    acc
}

/// `(p^(t), p^'(t))` in the wide type.
pub(crate) fn fff_and_derivative_wide<T: Scalar>(p: &MonicPoly<T>, t: &T) -> (T::Wide, T::Wide) {
    let a = p.signed_etilde();
    let val = exp_horner_wide(&a, t);
    let der = exp_horner_wide(&a[1..], t);
    (val, der)
}

/// `p^(s)` evaluated directly from the coefficients.
pub fn fff_eval<T: Scalar>(p: &MonicPoly<T>, s: &T) -> T {
    T::narrow(&exp_horner_wide(&p.signed_etilde(), s))
}

/// `log p^(s)`, finite even when `p^(s)` itself overflows `f64`.
pub fn ln_fff<T: Scalar>(p: &MonicPoly<T>, s: &T) -> Result<f64> {
    let val = exp_horner_wide(&p.signed_etilde(), s);
    if !val.is_positive() {
        return Err(Error::Pole(s.to_f64_lossy()));
    }
    Ok(val.ln_abs())
}

/// The finite R-transform `R_p(s) = -p^'(Ns) / p^(Ns)`.
#[allow(non_snake_case)]
pub fn finite_R<T: Scalar>(p: &MonicPoly<T>, s: &T) -> Result<T> {
    let t = T::from_count(p.degree()) * s.clone();
    let (val, der) = fff_and_derivative_wide(p, &t);
    if val.is_zero() {
        return Err(Error::Pole(t.to_f64_lossy()));
    }
    Ok(T::narrow(&(-der / val)))
}

/// Taylor expansion of the finite R-transform at 0, by series division of
/// `-(1/N) d/ds p^(Ns)` by `p^(Ns)`. Order `N-1`.
pub fn finite_r_series<T: Scalar>(p: &MonicPoly<T>) -> TruncatedSeries<T> {
    let n = T::from_count(p.degree());
    let scaled = fff(p).scale_argument(&n);
    let num = scaled.derivative();
    let den = scaled.truncate(num.order());
    let q = num.div(&den);
    TruncatedSeries::new(q.coeffs.into_iter().map(|c| -c / n.clone()).collect())
}

/// Cumulants via the formal logarithm of the FFF transform.
pub fn finite_cumulants_logseries<T: Scalar>(p: &MonicPoly<T>) -> CumulantVector<T> {
    let n = p.degree();
    let log = log_fff(p);
    // C_p = sum (-1)^m c_m s^m / m!  =>  c_m = (-1)^m m! C_m
    let mut fact = T::one();
    let c = (1..=n)
        .map(|m| {
            fact = fact.clone() * T::from_count(m);
            let v = log.coeff(m) * fact.clone();
            if m % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    CumulantVector::from_log_coefficients(c, n)
}

/// Cumulants via `c_n = sum_{pi in P(n)} e~_pi mu(pi, 1_n)`, for `n <= max_n`.
pub fn finite_cumulants_mobius<T: Scalar>(
    p: &MonicPoly<T>,
    max_n: usize,
) -> Result<CumulantVector<T>> {
    let n_deg = p.degree();
    let cap = n_deg.min(MOBIUS_CAP);
    if max_n > cap {
        return Err(Error::PartitionCap { n: max_n, cap });
    }
    let e = p.etilde();
    let mut c = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        // group partitions by their multiset of block sizes; the product
        // e~_pi only depends on that
        let mut weights: HashMap<Vec<usize>, i64> = HashMap::new();
        for part in enumerate_partitions(n)? {
            *weights.entry(part.block_sizes()).or_insert(0) += part.mobius;
        }
        let mut keys: Vec<_> = weights.into_iter().collect();
        keys.sort();
        let cn = keys
            .into_iter()
            .filter(|(_, w)| *w != 0)
            .fold(T::zero(), |acc, (sizes, w)| {
                let prod = sizes.iter().fold(T::one(), |a, &b| a * e[b].clone());
                acc + prod * T::from_i64(w).expect("weight fits")
            });
        c.push(cn);
    }
    Ok(CumulantVector::from_log_coefficients(c, n_deg))
}

/// Both sides of `p^(s) = s^(N+1)/N! * L{p}(s)` where the Laplace transform
/// is the closed form `sum_k (-1)^k C(N,k) e~_k (N-k)! / s^(N-k+1)`.
pub fn laplace_fff_identity<T: Scalar>(p: &MonicPoly<T>, s: &T) -> Result<(T, T)> {
    p.require_negative_roots()?;
    if !s.is_positive() {
        return Err(Error::OutOfDomain {
            s: s.to_f64_lossy(),
            alpha: f64::INFINITY,
        });
    }
    let n = p.degree();
    let lhs = fff_eval(p, s);
    let binoms = binomial_row(n);
    let sw = s.widen();
    let mut laplace = T::Wide::zero();
    for (k, a) in p.signed_etilde().iter().enumerate() {
        let m = n - k;
        let mut s_pow = T::Wide::one();
        for _ in 0..=m {
            s_pow = s_pow * sw.clone();
        }
        let term = a.widen() * T::wide_from_bigint(&binoms[k]) * T::wide_from_bigint(&factorial(m))
            / s_pow;
        laplace = laplace + term;
    }
    let mut prefactor = T::Wide::one();
    for _ in 0..=n {
        prefactor = prefactor * sw.clone();
    }
    prefactor = prefactor / T::wide_from_bigint(&factorial(n));
    Ok((lhs, T::narrow(&(prefactor * laplace))))
}
