//! Monic polynomials in normalized-coefficient form.
//!
//! A degree-`N` monic polynomial is stored through its normalized elementary
//! symmetric coefficients
//!
//! ```text
//! p(x) = sum_k x^(N-k) (-1)^k C(N,k) e~_k,    e~_k = e_k(roots) / C(N,k),
//! ```
//!
//! optionally together with its roots. Coefficient-only polynomials (for
//! example the output of a convolution) never have roots recovered.


use crate::error::{Error, Result};
use crate::scalar::{binomial, binomial_row, Scalar};

/// Dense polynomial in the monomial basis, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePoly<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> DensePoly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = DensePoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> DensePoly<T> {
        if self.coeffs.len() <= 1 {
            return DensePoly::new(vec![T::zero()]);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.clone() * T::from_count(j))
            .collect();
        DensePoly::new(coeffs)
    }

    /// Expand `prod (x - r_i)`.
    pub fn from_roots(roots: &[T]) -> DensePoly<T> {
        let mut coeffs = vec![T::one()];
        for r in roots {
            let mut next = vec![T::zero(); coeffs.len() + 1];
            for (j, c) in coeffs.iter().enumerate() {
                next[j + 1] = next[j + 1].clone() + c.clone();
                next[j] = next[j].clone() - r.clone() * c.clone();
            }
            coeffs = next;
        }
        DensePoly::new(coeffs)
    }
}

/// A monic polynomial of degree `N >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPoly<T> {
    etilde: Vec<T>,
    roots: Option<Vec<T>>,
}

pub type ExactPoly = MonicPoly<num_rational::BigRational>;
pub type FloatPoly = MonicPoly<f64>;

impl<T: Scalar> MonicPoly<T> {
    /// Build from the actual roots, `p(x) = prod (x - root_i)`.
    pub fn from_roots(roots: Vec<T>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::EmptyRoots);
        }
        let etilde = if T::EXACT {
            etilde_via_binomials(&roots)
        } else {
            etilde_normalized_recurrence(&roots)
        };
        Ok(MonicPoly {
            etilde,
            roots: Some(roots),
        })
    }

    pub fn from_etilde(etilde: Vec<T>) -> Result<Self> {
        match etilde.first() {
            None => return Err(Error::DegreeZero),
            Some(e0) if !e0.is_one() => {
                return Err(Error::LeadingCoefficient(format!("{e0:?}")))
            }
            _ => {}
        }
        if etilde.len() < 2 {
            return Err(Error::DegreeZero);
        }
        Ok(MonicPoly {
            etilde,
            roots: None,
        })
    }

    /// Build from ascending monomial coefficients of a monic polynomial.
    pub fn from_monomial(coeffs: &[T]) -> Result<Self> {
        let n = coeffs.len().checked_sub(1).ok_or(Error::DegreeZero)?;
        if n == 0 {
            return Err(Error::DegreeZero);
        }
        if !coeffs[n].is_one() {
            return Err(Error::LeadingCoefficient(format!("{:?}", coeffs[n])));
        }
        let binoms = binomial_row(n);
        let etilde = (0..=n)
            .map(|k| {
                let c = coeffs[n - k].clone() / T::from_bigint(&binoms[k]);
                if k % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        MonicPoly::from_etilde(etilde)
    }

    /// `(x - a)^N`
    pub fn power_of_linear(a: T, n: usize) -> Result<Self> {
        Self::from_roots(vec![a; n])
    }

    pub fn degree(&self) -> usize {
        self.etilde.len() - 1
    }

    pub fn etilde(&self) -> &[T] {
        &self.etilde
    }

    pub fn roots(&self) -> Option<&[T]> {
        self.roots.as_deref()
    }

    /// `(-1)^k e~_k`, the numerators of the FFF transform. All strictly
    /// positive when every root is negative.
    pub fn signed_etilde(&self) -> Vec<T> {
        self.etilde
            .iter()
            .enumerate()
            .map(|(k, e)| if k % 2 == 1 { -e.clone() } else { e.clone() })
            .collect()
    }

    /// Ascending monomial coefficients.
    pub fn monomial_coeffs(&self) -> Vec<T> {
        let n = self.degree();
        let binoms = binomial_row(n);
        let mut out = vec![T::zero(); n + 1];
        for (k, e) in self.etilde.iter().enumerate() {
            let c = e.clone() * T::from_bigint(&binoms[k]);
            out[n - k] = if k % 2 == 1 { -c } else { c };
        }
        out
    }

    pub fn to_dense(&self) -> DensePoly<T> {
        DensePoly::new(self.monomial_coeffs())
    }

    pub fn eval(&self, x: &T) -> T {
        self.to_dense().eval(x)
    }

    /// Product form `prod (x - root_i)`, when roots are known.
    pub fn eval_product(&self, x: &T) -> Option<T> {
        self.roots.as_ref().map(|rs| {
            rs.iter()
                .fold(T::one(), |acc, r| acc * (x.clone() - r.clone()))
        })
    }

    pub fn derivative(&self) -> DensePoly<T> {
        self.to_dense().derivative()
    }

    /// `q(x) = p(x - a)`. Roots move by `+a`.
    pub fn shift(&self, a: &T) -> MonicPoly<T> {
        if let Some(rs) = &self.roots {
            let moved = rs.iter().map(|r| r.clone() + a.clone()).collect();
            return MonicPoly::from_roots(moved).expect("non-empty roots");
        }
        // Taylor shift: evaluate at x + h with h = -a.
        let h = -a.clone();
        let mut c = self.monomial_coeffs();
        let n = c.len() - 1;
        for i in 0..n {
            for j in (i..n).rev() {
                c[j] = c[j].clone() + h.clone() * c[j + 1].clone();
            }
        }
        MonicPoly::from_monomial(&c).expect("Taylor shift keeps the polynomial monic")
    }

    /// Fails unless every root is strictly negative. For coefficient-only
    /// polynomials the necessary sign-alternation condition is checked.
    pub fn require_negative_roots(&self) -> Result<()> {
        if let Some(rs) = &self.roots {
            for (index, r) in rs.iter().enumerate() {
                if !r.is_negative() {
                    return Err(Error::NonNegativeRoot {
                        index,
                        value: r.to_f64_lossy(),
                    });
                }
            }
            return Ok(());
        }
        for (k, a) in self.signed_etilde().iter().enumerate() {
            if !a.is_positive() {
                return Err(Error::NotSignAlternating(k));
            }
        }
        Ok(())
    }

    pub fn to_f64(&self) -> FloatPoly {
        MonicPoly {
            etilde: self.etilde.iter().map(|e| e.to_f64_lossy()).collect(),
            roots: self
                .roots
                .as_ref()
                .map(|rs| rs.iter().map(|r| r.to_f64_lossy()).collect()),
        }
    }
}

/// `e~_k` by product expansion of `e_k`, then exact division by `C(N,k)`.
fn etilde_via_binomials<T: Scalar>(roots: &[T]) -> Vec<T> {
    let n = roots.len();
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (m, r) in roots.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] = e[k].clone() + r.clone() * e[k - 1].clone();
        }
    }
    e.into_iter()
        .enumerate()
        .map(|(k, ek)| ek / T::from_bigint(&binomial(n, k)))
        .collect()
}

/// Same quantity kept normalized at every step:
/// `e~_k(m) = ((m-k)/m) e~_k(m-1) + (k/m) r_m e~_(k-1)(m-1)`.
/// A convex combination, so magnitudes never exceed `max|r|^k`.
fn etilde_normalized_recurrence<T: Scalar>(roots: &[T]) -> Vec<T> {
    let n = roots.len();
    let mut e = vec![T::zero(); n + 1];
    e[0] = T::one();
    for (idx, r) in roots.iter().enumerate() {
        let m = idx + 1;
        let mf = T::from_count(m);
        for k in (1..=m).rev() {
            let keep = T::from_count(m - k) / mf.clone();
            let take = T::from_count(k) / mf.clone();
            e[k] = keep * e[k].clone() + take * r.clone() * e[k - 1].clone();
        }
    }
    e
}

/// Uniform probability measure on the roots of `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution<T> {
    atoms: Vec<T>,
}

impl<T: Scalar> EmpiricalDistribution<T> {
    pub fn from_poly(p: &MonicPoly<T>) -> Result<Self> {
        let mut atoms = p.roots().ok_or(Error::MissingRoots)?.to_vec();
        atoms.sort_by(|a, b| a.partial_cmp(b).expect("roots are comparable"));
        Ok(EmpiricalDistribution { atoms })
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight(&self) -> T {
        T::one() / T::from_count(self.atoms.len())
    }

    pub fn mean(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| acc + a.clone()) * self.weight()
    }
}
