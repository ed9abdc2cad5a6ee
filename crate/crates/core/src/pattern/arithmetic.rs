//! Arithmetic of (p, q) cable parameters.
//!
//! For coprime `p > q >= 2` the pattern diagram is governed by four derived
//! integers `(x, y, u, v)`:
//!
//! * `x` is the multiplicative inverse of `q` modulo `p`, taken in `1..p`,
//! * `y = p - x`,
//! * `u = (q*x - 1) / p` (an exact integer since `q*x ≡ 1 (mod p)`),
//! * `v = q - u`.
//!
//! They satisfy `q*x = p*u + 1` and the generator-count identity
//! `x*v + y*u = 2*v*x - 1`. The number of intersection points of the pattern
//! curve with the two alpha arcs — hence the generator counts of the type-A
//! module — and the basepoint multiplicity of the distinguished self-operation
//! are all expressed in terms of these.

use crate::{CfError, Result};

/// Derived arithmetic data for a supported (p, q) cable pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CableParams {
    /// Cabling parameter p (number of strands), `p >= 3`.
    pub p: i64,
    /// Cabling parameter q, reduced to `2 <= q < p`, coprime to p.
    pub q: i64,
    /// Inverse of q modulo p, in `1..p`.
    pub x: i64,
    /// `p - x`.
    pub y: i64,
    /// `(q*x - 1) / p`.
    pub u: i64,
    /// `q - u`.
    pub v: i64,
}

impl CableParams {
    /// Multiplicity of the interior basepoint in the distinguished
    /// self-operation of the generator `a`: `v*x + 1`.
    pub fn n_w(&self) -> i64 {
        self.v * self.x + 1
    }

    /// Number of generators in idempotent 0: `x*v + y*u = 2*v*x - 1`.
    pub fn rank_iota0(&self) -> i64 {
        self.x * self.v + self.y * self.u
    }

    /// Number of generators in idempotent 1: `2*x*y`.
    pub fn rank_iota1(&self) -> i64 {
        2 * self.x * self.y
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn check_pq(p: i64, q: i64) -> Result<()> {
    if p < 3 {
        return Err(CfError::Parameter(format!(
            "cabling parameter p must be at least 3, got {p}"
        )));
    }
    if !(0..p).contains(&q) {
        return Err(CfError::Parameter(format!(
            "cable residue q must satisfy 0 <= q < p, got q={q} for p={p}"
        )));
    }
    if gcd(p, q) != 1 {
        return Err(CfError::Parameter(format!(
            "cabling parameters must be coprime, got gcd({p}, {q}) = {}",
            gcd(p, q)
        )));
    }
    if q < 2 {
        return Err(CfError::Unsupported(format!(
            "(p, q) cables with residue q = {q} are not supported; \
             q mod p must lie in 2..p (change the framing to shift q by multiples of p)"
        )));
    }
    Ok(())
}

/// Compute the derived parameters for a (p, q) cable pattern, closed form.
///
/// Requires `p >= 3`, `2 <= q < p`, `gcd(p, q) = 1`. The inverse `x` is found
/// by the extended Euclidean algorithm.
pub fn decompose_pq(p: i64, q: i64) -> Result<CableParams> {
    check_pq(p, q)?;
    // Extended Euclid: find x with q*x ≡ 1 (mod p).
    let (mut r0, mut r1) = (p, q);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    debug_assert_eq!(r0, 1);
    let x = t0.rem_euclid(p);
    let u = (q * x - 1) / p;
    let params = CableParams {
        p,
        q,
        x,
        y: p - x,
        u,
        v: q - u,
    };
    debug_assert_eq!(q * x, p * u + 1);
    debug_assert_eq!(params.rank_iota0(), 2 * params.v * params.x - 1);
    Ok(params)
}

/// Reference implementation of [`decompose_pq`] by exhaustive search.
///
/// Scans all candidate inverses instead of running Euclid, and cross-checks
/// every defining identity. Used as an independent oracle in tests.
pub fn decompose_pq_exhaustive(p: i64, q: i64) -> Result<CableParams> {
    check_pq(p, q)?;
    let mut found = None;
    for x in 1..p {
        if (q * x) % p == 1 {
            assert!(found.is_none(), "inverse mod p must be unique");
            found = Some(x);
        }
    }
    let x = found.ok_or_else(|| {
        CfError::Parameter(format!("{q} has no inverse modulo {p} (not coprime)"))
    })?;
    let u = (q * x - 1) / p;
    let v = q - u;
    let y = p - x;
    assert_eq!(q * x - p * u, 1, "defining identity q*x = p*u + 1");
    assert!(x >= 2 && y >= 1 && u >= 1 && v >= 1, "derived parameters positive");
    assert_eq!(x * v + y * u, 2 * v * x - 1, "generator count identity");
    Ok(CableParams { p, q, x, y, u, v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_quadruples() {
        // (p, q) -> (x, y, u, v)
        let cases = [
            (3, 2, (2, 1, 1, 1)),
            (5, 2, (3, 2, 1, 1)),
            (5, 3, (2, 3, 1, 2)),
            (7, 5, (3, 4, 2, 3)),
        ];
        for (p, q, (x, y, u, v)) in cases {
            let c = decompose_pq(p, q).unwrap();
            assert_eq!((c.x, c.y, c.u, c.v), (x, y, u, v), "({p},{q})");
        }
    }

    #[test]
    fn known_counts() {
        let c = decompose_pq(3, 2).unwrap();
        assert_eq!(c.n_w(), 3);
        assert_eq!(c.rank_iota0(), 3);
        assert_eq!(c.rank_iota1(), 4);

        let c = decompose_pq(5, 3).unwrap();
        assert_eq!(c.n_w(), 5);
        assert_eq!(c.rank_iota0(), 7);
        assert_eq!(c.rank_iota1(), 12);
    }

    #[test]
    fn closed_form_matches_exhaustive_search() {
        for p in 3..=30 {
            for q in 2..p {
                if gcd(p, q) != 1 {
                    continue;
                }
                let a = decompose_pq(p, q).unwrap();
                let b = decompose_pq_exhaustive(p, q).unwrap();
                assert_eq!(a, b, "({p},{q})");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(decompose_pq(4, 2), Err(CfError::Parameter(_))));
        assert!(matches!(decompose_pq(2, 1), Err(CfError::Parameter(_))));
        assert!(matches!(decompose_pq(3, 3), Err(CfError::Parameter(_))));
        assert!(matches!(decompose_pq(3, -1), Err(CfError::Parameter(_))));
        // q = 1 is a valid torus pattern but outside the supported regime.
        assert!(matches!(decompose_pq(3, 1), Err(CfError::Unsupported(_))));
        assert!(matches!(decompose_pq(5, 0), Err(CfError::Parameter(_))));
    }
}
