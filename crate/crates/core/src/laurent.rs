//! Integer Laurent polynomials with exact division.
//!
//! Used for Alexander polynomials of torus knots and cables, and for Euler
//! characteristic cross-checks of knot Floer homology. All arithmetic is
//! exact over Z; division reports an error if the quotient is not exact.

use crate::{CfError, Result};
use std::fmt;

/// A Laurent polynomial sum c_k t^(lo + k), trimmed so that the first and
/// last coefficients are nonzero (or the vector is empty for zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laurent {
    lo: i64,
    coeffs: Vec<i64>,
}

impl Laurent {
    pub fn zero() -> Laurent {
        Laurent { lo: 0, coeffs: vec![] }
    }

    pub fn one() -> Laurent {
        Laurent::monomial(1, 0)
    }

    /// c * t^e.
    pub fn monomial(c: i64, e: i64) -> Laurent {
        if c == 0 {
            Laurent::zero()
        } else {
            Laurent { lo: e, coeffs: vec![c] }
        }
    }

    /// Build from (coefficient, exponent) terms; repeated exponents add.
    pub fn from_terms(terms: &[(i64, i64)]) -> Laurent {
        let mut p = Laurent::zero();
        for &(c, e) in terms {
            p = p.add(&Laurent::monomial(c, e));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of t^e.
    pub fn coeff(&self, e: i64) -> i64 {
        if self.is_zero() || e < self.lo {
            return 0;
        }
        let k = (e - self.lo) as usize;
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    /// Lowest exponent with nonzero coefficient; None for zero.
    pub fn min_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.lo)
        }
    }

    /// Highest exponent with nonzero coefficient; None for zero.
    pub fn max_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.lo + self.coeffs.len() as i64 - 1)
        }
    }

    /// Nonzero terms as (coefficient, exponent), ascending exponent.
    pub fn terms(&self) -> Vec<(i64, i64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (c, self.lo + k as i64))
            .collect()
    }

    fn trim(mut self) -> Laurent {
        while let Some(&0) = self.coeffs.last() {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.lo += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
        self
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.max_exp().unwrap().max(other.max_exp().unwrap());
        let mut coeffs = vec![0i64; (hi - lo + 1) as usize];
        for (c, e) in self.terms() {
            coeffs[(e - lo) as usize] += c;
        }
        for (c, e) in other.terms() {
            coeffs[(e - lo) as usize] += c;
        }
        Laurent { lo, coeffs }.trim()
    }

    pub fn neg(&self) -> Laurent {
        Laurent {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        if self.is_zero() || other.is_zero() {
            return Laurent::zero();
        }
        let lo = self.lo + other.lo;
        let mut coeffs = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Laurent { lo, coeffs }.trim()
    }

    /// Shift by t^e.
    pub fn shift(&self, e: i64) -> Laurent {
        if self.is_zero() {
            return Laurent::zero();
        }
        Laurent {
            lo: self.lo + e,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Substitute t -> t^p (p >= 1).
    pub fn substitute_power(&self, p: i64) -> Laurent {
        assert!(p >= 1, "substitute_power needs p >= 1");
        let mut out = Laurent::zero();
        for (c, e) in self.terms() {
            out = out.add(&Laurent::monomial(c, e * p));
        }
        out
    }

    /// Exact division; errors if the remainder is nonzero or a leading
    /// coefficient does not divide exactly along the way.
    pub fn div_exact(&self, d: &Laurent) -> Result<Laurent> {
        if d.is_zero() {
            return Err(CfError::Internal("laurent division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Laurent::zero());
        }
        // Work with plain polynomial parts; track the exponent shift.
        let shift = self.lo - d.lo;
        let mut rem = self.coeffs.clone();
        let div = &d.coeffs;
        let dlead = *div.last().unwrap();
        if rem.len() < div.len() {
            return Err(CfError::Internal(format!(
                "laurent division not exact: {} / {}",
                self, d
            )));
        }
        let qlen = rem.len() - div.len() + 1;
        let mut q = vec![0i64; qlen];
        for k in (0..qlen).rev() {
            let lead = rem[k + div.len() - 1];
            if lead % dlead != 0 {
                return Err(CfError::Internal(format!(
                    "laurent division not exact: {} / {}",
                    self, d
                )));
            }
            let c = lead / dlead;
            q[k] = c;
            if c != 0 {
                for (i, &dc) in div.iter().enumerate() {
                    rem[k + i] -= c * dc;
                }
            }
        }
        if rem.iter().any(|&c| c != 0) {
            return Err(CfError::Internal(format!(
                "laurent division not exact: {} / {}",
                self, d
            )));
        }
        Ok(Laurent { lo: shift, coeffs: q }.trim())
    }

    /// Evaluate at t = 1 (sum of coefficients).
    pub fn eval_one(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// True if P(t) = P(1/t).
    pub fn is_symmetric(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let (lo, hi) = (self.min_exp().unwrap(), self.max_exp().unwrap());
        if lo != -hi {
            return false;
        }
        (lo..=hi).all(|e| self.coeff(e) == self.coeff(-e))
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Descending exponents read most naturally for Alexander polynomials.
        for (c, e) in self.terms().into_iter().rev() {
            let mag = c.abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (mag, e) {
                (m, 0) => write!(f, "{}", m)?,
                (1, 1) => write!(f, "t")?,
                (1, e) => write!(f, "t^{}", e)?,
                (m, 1) => write!(f, "{}t", m)?,
                (m, e) => write!(f, "{}t^{}", m, e)?,
            }
        }
        Ok(())
    }
}

/// The symmetrized Alexander polynomial of the (p, q) torus knot:
///
/// ```text
///   (t^(pq) - 1)(t - 1) / ((t^p - 1)(t^q - 1)),
/// ```
///
/// shifted by t^(-g) with g = (p-1)(q-1)/2 so that it is symmetric.
pub fn torus_alexander(p: i64, q: i64) -> Result<Laurent> {
    if p < 2 || q < 2 || gcd(p, q) != 1 {
        return Err(CfError::Parameter(format!(
            "torus knot parameters must be coprime and at least 2: got ({}, {})",
            p, q
        )));
    }
    let num = Laurent::from_terms(&[(1, p * q), (-1, 0)])
        .mul(&Laurent::from_terms(&[(1, 1), (-1, 0)]));
    let den = Laurent::from_terms(&[(1, p), (-1, 0)])
        .mul(&Laurent::from_terms(&[(1, q), (-1, 0)]));
    let quot = num.div_exact(&den)?;
    let g = (p - 1) * (q - 1) / 2;
    let sym = quot.shift(-g);
    debug_assert!(sym.is_symmetric());
    Ok(sym)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_basics() {
        let p = Laurent::from_terms(&[(1, 2), (-1, 0), (3, -1)]);
        let q = Laurent::from_terms(&[(1, 1), (1, 0)]);
        assert_eq!(p.coeff(2), 1);
        assert_eq!(p.coeff(1), 0);
        assert_eq!(p.coeff(-1), 3);
        assert_eq!(p.add(&p.neg()), Laurent::zero());
        let r = p.mul(&q);
        // (t^2 - 1 + 3t^-1)(t + 1) = t^3 + t^2 - t + 2 + 3t^-1
        assert_eq!(r, Laurent::from_terms(&[(1, 3), (1, 2), (-1, 1), (2, 0), (3, -1)]));
    }

    #[test]
    fn exact_division_roundtrip() {
        let a = Laurent::from_terms(&[(1, 3), (-2, 1), (1, -2)]);
        let b = Laurent::from_terms(&[(1, 1), (1, 0), (2, -1)]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        // Non-exact division errors.
        let c = prod.add(&Laurent::one());
        assert!(c.div_exact(&b).is_err());
    }

    #[test]
    fn torus_alexander_trefoil() {
        // t - 1 + t^-1
        let d = torus_alexander(3, 2).unwrap();
        assert_eq!(d, Laurent::from_terms(&[(1, 1), (-1, 0), (1, -1)]));
        assert_eq!(d.eval_one(), 1);
    }

    #[test]
    fn torus_alexander_5_2() {
        // t^2 - t + 1 - t^-1 + t^-2
        let d = torus_alexander(5, 2).unwrap();
        assert_eq!(
            d,
            Laurent::from_terms(&[(1, 2), (-1, 1), (1, 0), (-1, -1), (1, -2)])
        );
    }

    #[test]
    fn torus_alexander_5_3() {
        // t^4 - t^3 + t - 1 + t^-1 - t^-3 + t^-4
        let d = torus_alexander(5, 3).unwrap();
        assert_eq!(
            d,
            Laurent::from_terms(&[
                (1, 4),
                (-1, 3),
                (1, 1),
                (-1, 0),
                (1, -1),
                (-1, -3),
                (1, -4)
            ])
        );
        assert!(d.is_symmetric());
        assert_eq!(d.eval_one(), 1);
    }

    #[test]
    fn torus_alexander_rejects_bad_parameters() {
        assert!(torus_alexander(4, 2).is_err());
        assert!(torus_alexander(1, 2).is_err());
    }

    #[test]
    fn substitution_and_symmetry() {
        let d = torus_alexander(3, 2).unwrap();
        let d3 = d.substitute_power(3);
        assert_eq!(d3, Laurent::from_terms(&[(1, 3), (-1, 0), (1, -3)]));
        assert!(d3.is_symmetric());
    }

    #[test]
    fn display_reads_descending() {
        let d = torus_alexander(3, 2).unwrap();
        assert_eq!(d.to_string(), "t - 1 + t^-1");
    }
}
