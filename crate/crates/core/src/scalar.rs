//! Arithmetic backends.
//!
//! Everything in the crate is generic over [`Scalar`], which is implemented
//! for exact rationals ([`BigRational`]) and for `f64`. Identities are checked
//! in the exact backend; large-degree experiments run in `f64`.
//!
//! Sums that can leave the `f64` range (the FFF transform evaluated at `N*s`,
//! factorial moments of the Laplace transform) are carried out in the
//! backend's [`Scalar::Wide`] type. For rationals that is the rational itself;
//! for `f64` it is [`ExpFloat`], a mantissa with a separately tracked binary
//! exponent.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Arithmetic used for intermediate sums that may overflow the narrow type.
pub trait WideNum:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Natural log of the absolute value; `-inf` for zero.
    fn ln_abs(&self) -> f64;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

/// A scalar field element usable as polynomial coefficient.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    type Wide: WideNum;

    /// True for backends where `==` is a meaningful identity check.
    const EXACT: bool;

    fn from_bigint(n: &BigInt) -> Self;
    fn from_ratio(r: &BigRational) -> Self;
    fn widen(&self) -> Self::Wide;
    fn narrow(w: &Self::Wide) -> Self;
    fn wide_from_bigint(n: &BigInt) -> Self::Wide;

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits every backend")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl WideNum for BigRational {
    fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }
}

impl Scalar for BigRational {
    type Wide = BigRational;
    const EXACT: bool = true;

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn widen(&self) -> Self::Wide {
        self.clone()
    }

    fn narrow(w: &Self::Wide) -> Self {
        w.clone()
    }

    fn wide_from_bigint(n: &BigInt) -> Self::Wide {
        BigRational::from_integer(n.clone())
    }
}

impl Scalar for f64 {
    type Wide = ExpFloat;
    const EXACT: bool = false;

    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(if n.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        })
    }

    fn from_ratio(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn widen(&self) -> ExpFloat {
        ExpFloat::from_f64(*self)
    }

    fn narrow(w: &ExpFloat) -> Self {
        w.to_f64()
    }

    fn wide_from_bigint(n: &BigInt) -> ExpFloat {
        ExpFloat::from_bigint(n)
    }
}

/// Natural log of |n| without converting through `f64` (which overflows past
/// roughly 1e308).
pub fn ln_bigint(n: &BigInt) -> f64 {
    let mag = n.magnitude();
    let bits = mag.bits();
    if bits <= 1000 {
        return mag.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigUint = mag >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Row `n` of Pascal's triangle, exact.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for t in terms {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
    }
    sum + comp
}

/// A floating value `mant * 2^exp` with `0.5 <= |mant| < 1` (or `mant == 0`).
///
/// The exponent is an `i64`, so products of a few thousand factorial-sized
/// factors stay representable. Precision is that of `f64`.
#[derive(Clone, Copy, Debug)]
pub struct ExpFloat {
    mant: f64,
    exp: i64,
}

const TWO_POW_64: f64 = 18446744073709551616.0;

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // subnormal
        let (m, e) = frexp(x * TWO_POW_64);
        return (m, e - 64);
    }
    let e = raw - 1022;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, e)
}

fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    if e > 1100 {
        return m.signum() * f64::INFINITY;
    }
    if e < -1200 {
        return 0.0 * m.signum();
    }
    // split to avoid intermediate overflow/underflow of 2^e
    let half = e / 2;
    m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
}

impl ExpFloat {
    pub fn from_f64(x: f64) -> Self {
        let (mant, exp) = frexp(x);
        ExpFloat { mant, exp }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        let mag = n.magnitude();
        let bits = mag.bits();
        let (m, shift) = if bits <= 1000 {
            (mag.to_f64().unwrap_or(0.0), 0)
        } else {
            let shift = bits - 64;
            let top: BigUint = mag >> shift;
            (top.to_f64().unwrap_or(0.0), shift as i64)
        };
        let m = if n.sign() == Sign::Minus { -m } else { m };
        let mut out = ExpFloat::from_f64(m);
        out.exp += shift;
        out
    }

    pub fn to_f64(&self) -> f64 {
        ldexp(self.mant, self.exp)
    }

    pub fn ln(&self) -> f64 {
        self.ln_abs()
    }

    fn normalized(mant: f64, exp: i64) -> Self {
        if mant == 0.0 {
            return ExpFloat { mant: 0.0, exp: 0 };
        }
        let (m, e) = frexp(mant);
        ExpFloat { mant: m, exp: exp + e }
    }
}

impl WideNum for ExpFloat {
    fn ln_abs(&self) -> f64 {
        if self.mant == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.mant.abs().ln() + self.exp as f64 * std::f64::consts::LN_2
    }
}

impl Zero for ExpFloat {
    fn zero() -> Self {
        ExpFloat { mant: 0.0, exp: 0 }
    }
    fn is_zero(&self) -> bool {
        self.mant == 0.0
    }
}

impl One for ExpFloat {
    fn one() -> Self {
        ExpFloat::from_f64(1.0)
    }
}

impl Add for ExpFloat {
    type Output = ExpFloat;
    fn add(self, rhs: ExpFloat) -> ExpFloat {
        if self.mant == 0.0 {
            return rhs;
        }
        if rhs.mant == 0.0 {
            return self;
        }
        let (big, small) = if self.exp >= rhs.exp { (self, rhs) } else { (rhs, self) };
        let diff = big.exp - small.exp;
        if diff > 60 {
            return big;
        }
        ExpFloat::normalized(big.mant + ldexp(small.mant, -diff), big.exp)
    }
}

impl Neg for ExpFloat {
    type Output = ExpFloat;
    fn neg(self) -> ExpFloat {
        ExpFloat {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Sub for ExpFloat {
    type Output = ExpFloat;
    fn sub(self, rhs: ExpFloat) -> ExpFloat {
        self + (-rhs)
    }
}

impl Mul for ExpFloat {
    type Output = ExpFloat;
    fn mul(self, rhs: ExpFloat) -> ExpFloat {
        ExpFloat::normalized(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for ExpFloat {
    type Output = ExpFloat;
    fn div(self, rhs: ExpFloat) -> ExpFloat {
        if rhs.mant == 0.0 {
            return ExpFloat::from_f64(self.mant / 0.0);
        }
        ExpFloat::normalized(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl PartialEq for ExpFloat {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for ExpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        d.mant.partial_cmp(&0.0)
    }
}

/// Parse a decimal (`-1.25`, `3e-2`, `.5`) or a fraction (`-3/2`) exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (negative, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_float_survives_factorial_growth() {
        let mut w = ExpFloat::one();
        for k in 1..=400 {
            w = w * ExpFloat::from_f64(k as f64);
        }
        let ln_400_fact: f64 = (1..=400).map(|k| (k as f64).ln()).sum();
        assert!((w.ln_abs() - ln_400_fact).abs() < 1e-10);
        assert!(w.to_f64().is_infinite());
        let back = w / w;
        assert_eq!(back.to_f64(), 1.0);
    }

    #[test]
    fn exp_float_ordering_and_sub() {
        let a = ExpFloat::from_f64(3.0);
        let b = ExpFloat::from_f64(2.5);
        assert!(a > b);
        assert_eq!((a - b).to_f64(), 0.5);
        assert_eq!((b - a).to_f64(), -0.5);
        assert!(ExpFloat::from_f64(-1e-300) < ExpFloat::zero());
    }

    #[test]
    fn exp_float_from_huge_bigint() {
        let f = factorial(300);
        let w = ExpFloat::from_bigint(&f);
        assert!((w.ln_abs() - ln_bigint(&f)).abs() < 1e-12);
        let small = ExpFloat::from_bigint(&BigInt::from(-12));
        assert_eq!(small.to_f64(), -12.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 7), BigInt::zero());
        let row = binomial_row(10);
        for (k, c) in row.iter().enumerate() {
            assert_eq!(*c, binomial(10, k));
        }
    }

    #[test]
    fn parse_decimals_exactly() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("-1.5"), Some(r(-3, 2)));
        assert_eq!(parse_rational("  2 "), Some(r(2, 1)));
        assert_eq!(parse_rational("1.25e-1"), Some(r(1, 8)));
        assert_eq!(parse_rational("-3/6"), Some(r(-1, 2)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("-2.5E+1"), Some(r(-25, 1)));
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("-"), None);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(terms), 2.0);
    }
}
