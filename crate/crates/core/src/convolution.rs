//! Finite free additive convolution and the superadditivity of the finite
//! R-transform under it.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::polycore::MonicPoly;
use crate::scalar::{binomial_row, Scalar, WideNum};
use crate::transforms::{fff_and_derivative_wide, finite_R};

/// `e~_k(p ⊞_N q) = sum_i C(k,i) e~_i(p) e~_(k-i)(q)`.
pub fn boxplus<T: Scalar>(p: &MonicPoly<T>, q: &MonicPoly<T>) -> Result<MonicPoly<T>> {
    let n = p.degree();
    if q.degree() != n {
        return Err(Error::DegreeMismatch {
            left: n,
            right: q.degree(),
        });
    }
    let (ep, eq) = (p.etilde(), q.etilde());
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let row = binomial_row(k);
        let mut acc = T::zero();
        for i in 0..=k {
            acc = acc + T::from_bigint(&row[i]) * ep[i].clone() * eq[k - i].clone();
        }
        out.push(acc);
    }
    MonicPoly::from_etilde(out)
}

/// Both sides of `R_r(s) - R_p(s) - R_q(s) = g'(Ns)/(1 - g(Ns))` for
/// `r = p ⊞_N q` and `g = (p^ q^ - r^)/(p^ q^)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperadditivityReport<T> {
    pub s: T,
    /// `R_r(s)`
    pub lhs: T,
    /// `R_p(s) + R_q(s)`
    pub rhs_sum: T,
    pub gap: T,
    /// `g'(Ns) / (1 - g(Ns))`
    pub correction: T,
    /// `1 - g(Ns) = r^(Ns) / (p^(Ns) q^(Ns))`, strictly inside (0, 1)
    pub one_minus_g: T,
}

/// `d_(N+1), ..., d_(2N)`: the exponential-basis coefficients of `p^ q^ - r^`
/// (`f = sum d_k s^k / k!`), `d_k = sum_(i+j=k) C(k,i) a_i b_j` with
/// `a_i = (-1)^i e~_i(p)`. Everything below degree `N+1` cancels.
pub fn excess_coefficients<T: Scalar>(p: &MonicPoly<T>, q: &MonicPoly<T>) -> Result<Vec<T>> {
    let n = p.degree();
    if q.degree() != n {
        return Err(Error::DegreeMismatch {
            left: n,
            right: q.degree(),
        });
    }
    let (a, b) = (p.signed_etilde(), q.signed_etilde());
    let mut out = Vec::with_capacity(n);
    for k in n + 1..=2 * n {
        let row = binomial_row(k);
        let mut acc = T::zero();
        for i in k - n..=n {
            acc = acc + T::from_bigint(&row[i]) * a[i].clone() * b[k - i].clone();
        }
        out.push(acc);
    }
    Ok(out)
}

pub fn superadditivity_report<T: Scalar>(
    p: &MonicPoly<T>,
    q: &MonicPoly<T>,
    s: &T,
) -> Result<SuperadditivityReport<T>> {
    let n = p.degree();
    if q.degree() != n {
        return Err(Error::DegreeMismatch {
            left: n,
            right: q.degree(),
        });
    }
    p.require_negative_roots()?;
    q.require_negative_roots()?;
    if !s.is_positive() {
        return Err(Error::OutOfDomain {
            s: s.to_f64_lossy(),
            alpha: f64::INFINITY,
        });
    }
    let r = boxplus(p, q)?;

    let lhs = finite_R(&r, s)?;
    let rhs_sum = finite_R(p, s)? + finite_R(q, s)?;
    let gap = lhs.clone() - rhs_sum.clone();

    // correction = (f' r^ - f r^') / (p^ q^ r^), evaluated at t = Ns with
    // f' r^ - f r^' = sum_{k>N, l<=N} d_k c_l (k-l) t^(k+l-1) / (k! l!)
    let t = T::from_count(n) * s.clone();
    let tw = t.widen();
    let d = excess_coefficients(p, q)?;
    let c = r.signed_etilde();

    // t^m / m! for m = 0..=2N
    let mut scaled_pow = Vec::with_capacity(2 * n + 1);
    let mut cur = T::Wide::one();
    scaled_pow.push(cur.clone());
    for m in 1..=2 * n {
        cur = cur * tw.clone() / T::from_count(m).widen();
        scaled_pow.push(cur.clone());
    }
    let mut numer = T::Wide::zero();
    for (idx, dk) in d.iter().enumerate() {
        let k = n + 1 + idx;
        let dkw = dk.widen();
        for (l, cl) in c.iter().enumerate() {
            // d_k c_l (k-l) t^(k+l-1)/(k! l!) = d_k c_l (k-l) [t^k/k!][t^l/l!] / t
            let w = dkw.clone()
                * cl.widen()
                * T::from_count(k - l).widen()
                * scaled_pow[k].clone()
                * scaled_pow[l].clone();
            numer = numer + w;
        }
    }
    numer = numer / tw;

    let (p_val, _) = fff_and_derivative_wide(p, &t);
    let (q_val, _) = fff_and_derivative_wide(q, &t);
    let (r_val, _) = fff_and_derivative_wide(&r, &t);
    let pq = p_val * q_val;
    let correction = numer / (pq.clone() * r_val.clone());
    let one_minus_g = r_val / pq;

    let one = T::Wide::one();
    if !(one_minus_g.is_positive() && one_minus_g < one) {
        return Err(Error::Unsupported(format!(
            "1 - g(Ns) = {:?} is not inside (0, 1)",
            T::narrow(&one_minus_g)
        )));
    }

    Ok(SuperadditivityReport {
        s: s.clone(),
        lhs,
        rhs_sum,
        gap,
        correction: T::narrow(&correction),
        one_minus_g: T::narrow(&one_minus_g),
    })
}

/// Counts sign changes of `r` on a uniform grid over `[lo, hi]` and reports
/// how many fall inside `[inner_lo, inner_hi]` (a crossing is attributed to
/// the midpoint of its grid cell). Used to check root localization without a
/// root finder; double roots are invisible to it.
pub fn sign_change_locations(
    r: &MonicPoly<f64>,
    lo: f64,
    hi: f64,
    step: f64,
) -> Vec<f64> {
    let dense = r.to_dense();
    let cells = ((hi - lo) / step).ceil() as usize;
    let mut out = Vec::new();
    let mut prev_x = lo;
    let mut prev = dense.eval(&lo);
    for i in 1..=cells {
        let x = (lo + i as f64 * step).min(hi);
        let v = dense.eval(&x);
        if v == 0.0 {
            out.push(x);
        } else if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            out.push(0.5 * (prev_x + x));
        }
        prev = v;
        prev_x = x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{ExactPoly, FloatPoly};
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }
    fn qi(n: i64) -> BigRational {
        q(n, 1)
    }

    #[test]
    fn boxplus_examples() {
        let x = ExactPoly::from_roots(vec![qi(0)]).unwrap();
        assert_eq!(boxplus(&x, &x).unwrap().etilde(), x.etilde());

        let p = ExactPoly::from_roots(vec![qi(-1), qi(-2)]).unwrap();
        let a = q(5, 3);
        let pa = ExactPoly::power_of_linear(a.clone(), 2).unwrap();
        let want = ExactPoly::from_roots(vec![a.clone() - qi(1), a - qi(2)]).unwrap();
        assert_eq!(boxplus(&p, &pa).unwrap().etilde(), want.etilde());

        let d = ExactPoly::power_of_linear(qi(-1), 2).unwrap();
        let want = ExactPoly::power_of_linear(qi(-2), 2).unwrap();
        assert_eq!(boxplus(&d, &d).unwrap().etilde(), want.etilde());

        let three = ExactPoly::from_roots(vec![qi(-1); 3]).unwrap();
        assert_eq!(
            boxplus(&p, &three),
            Err(Error::DegreeMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn superadditivity_degree_one_by_hand() {
        let p = ExactPoly::from_roots(vec![qi(-1)]).unwrap();
        let rep = superadditivity_report(&p, &p, &qi(1)).unwrap();
        assert_eq!(rep.gap, q(1, 3));
        assert_eq!(rep.correction, q(1, 3));
        assert_eq!(rep.one_minus_g, q(3, 4));
        // closed form 2s/((1+s)(1+2s)) at other s
        let s = q(2, 5);
        let rep = superadditivity_report(&p, &p, &s).unwrap();
        let want = qi(2) * s.clone() / ((qi(1) + s.clone()) * (qi(1) + qi(2) * s));
        assert_eq!(rep.gap, want);
    }

    #[test]
    fn superadditivity_gap_positive_and_vanishing_at_zero() {
        let p = ExactPoly::from_roots(vec![qi(-1), qi(-1)]).unwrap();
        let r = ExactPoly::from_roots(vec![qi(-2), qi(-2)]).unwrap();
        let rep = superadditivity_report(&p, &r, &q(1, 2)).unwrap();
        assert!(rep.gap > qi(0));
        assert_eq!(rep.gap, rep.correction);

        let pf = FloatPoly::from_roots(vec![-1.0, -3.0, -0.5]).unwrap();
        let qf = FloatPoly::from_roots(vec![-2.0, -2.5, -1.0]).unwrap();
        let mut last = f64::INFINITY;
        for s in [1e-1, 1e-2, 1e-3] {
            let rep = superadditivity_report(&pf, &qf, &s).unwrap();
            assert!(rep.gap >= 0.0 && rep.gap < last);
            last = rep.gap;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn superadditivity_rejects_bad_inputs() {
        let p = ExactPoly::from_roots(vec![qi(-1), qi(1)]).unwrap();
        let r = ExactPoly::from_roots(vec![qi(-2), qi(-2)]).unwrap();
        assert!(matches!(
            superadditivity_report(&p, &r, &qi(1)),
            Err(Error::NonNegativeRoot { index: 1, .. })
        ));
        let three = ExactPoly::from_roots(vec![qi(-1); 3]).unwrap();
        assert!(matches!(
            superadditivity_report(&r, &three, &qi(1)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn excess_coefficients_degree_one() {
        // (1+s)^2 - (1+2s) = s^2 = 2 * s^2/2!
        let p = ExactPoly::from_roots(vec![qi(-1)]).unwrap();
        assert_eq!(excess_coefficients(&p, &p).unwrap(), vec![qi(2)]);
    }

    #[test]
    fn sign_changes_find_simple_roots() {
        let r = FloatPoly::from_roots(vec![-1.0, -2.0, -3.5]).unwrap();
        let locs = sign_change_locations(&r, -4.0, 0.0, 0.01);
        assert_eq!(locs.len(), 3);
        for (l, want) in locs.iter().zip([-3.5, -2.0, -1.0]) {
            assert!((l - want).abs() <= 0.01);
        }
    }
}
