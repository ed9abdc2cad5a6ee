//! The torus algebra over F2 and its extended grading group.
//!
//! The algebra has idempotents i0, i1 and six chord elements
//! r1, r2, r3, r12, r23, r123 with idempotent decompositions
//!
//! ```text
//!   r1 = i0 r1 i1     r12  = i0 r12 i0
//!   r2 = i1 r2 i0     r23  = i1 r23 i1
//!   r3 = i0 r3 i1     r123 = i0 r123 i1
//! ```
//!
//! The only nonzero chord products are r1*r2 = r12, r2*r3 = r23,
//! r12*r3 = r1*r23 = r123. The algebra is associative with no differential
//! and no higher operations; the unit is i0 + i1.
//!
//! Gradings live in the group G of quadruples (m; i, j; n) with
//! m, i, j in (1/2)Z, i + j in Z, n in Z, multiplied by
//!
//! ```text
//!   (m1; i1, j1; n1) * (m2; i2, j2; n2)
//!     = (m1 + m2 + (i1*j2 - i2*j1); i1 + i2, j1 + j2; n1 + n2).
//! ```
//!
//! The central elements lambda = (1;0,0;0) and u = (0;0,0;-1) span the
//! subgroup that survives coset reduction: given periods g (left) and
//! h (right), every x with solvable spin-c equations reduces to a unique
//! lambda^a * u^b, the canonical bigrading used for thinness verdicts.

use crate::halfint::Half;
use crate::{CfError, Result};
use serde::Serialize;
use std::fmt;

// ---------------------------------------------------------------------------
// Idempotents and basis elements
// ---------------------------------------------------------------------------

/// One of the two idempotents of the torus algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Idem {
    I0,
    I1,
}

impl fmt::Display for Idem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Idem::I0 => write!(f, "i0"),
            Idem::I1 => write!(f, "i1"),
        }
    }
}

/// Basis element of the torus algebra (idempotents and chords).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    I0,
    I1,
    R1,
    R2,
    R3,
    R12,
    R23,
    R123,
}

pub const BASIS: [Basis; 8] = [
    Basis::I0,
    Basis::I1,
    Basis::R1,
    Basis::R2,
    Basis::R3,
    Basis::R12,
    Basis::R23,
    Basis::R123,
];

impl Basis {
    /// Left idempotent: the e with e * self = self.
    pub fn left_idem(self) -> Idem {
        match self {
            Basis::I0 | Basis::R1 | Basis::R3 | Basis::R12 | Basis::R123 => Idem::I0,
            Basis::I1 | Basis::R2 | Basis::R23 => Idem::I1,
        }
    }

    /// Right idempotent: the e with self * e = self.
    pub fn right_idem(self) -> Idem {
        match self {
            Basis::I0 | Basis::R2 | Basis::R12 => Idem::I0,
            Basis::I1 | Basis::R1 | Basis::R3 | Basis::R23 | Basis::R123 => Idem::I1,
        }
    }

    fn bit(self) -> u8 {
        match self {
            Basis::I0 => 1 << 0,
            Basis::I1 => 1 << 1,
            Basis::R1 => 1 << 2,
            Basis::R2 => 1 << 3,
            Basis::R3 => 1 << 4,
            Basis::R12 => 1 << 5,
            Basis::R23 => 1 << 6,
            Basis::R123 => 1 << 7,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Basis::I0 => "i0",
            Basis::I1 => "i1",
            Basis::R1 => "r1",
            Basis::R2 => "r2",
            Basis::R3 => "r3",
            Basis::R12 => "r12",
            Basis::R23 => "r23",
            Basis::R123 => "r123",
        };
        write!(f, "{}", s)
    }
}

/// Product of two basis elements; `None` means zero.
pub fn basis_mul(a: Basis, b: Basis) -> Option<Basis> {
    use Basis::*;
    // Idempotent absorption.
    match (a, b) {
        (I0, _) | (I1, _) => return if b.left_idem() == idem_of(a) { Some(b) } else { None },
        (_, I0) | (_, I1) => return if a.right_idem() == idem_of(b) { Some(a) } else { None },
        _ => {}
    }
    // Chord * chord: idempotents must match in the middle, then the table.
    if a.right_idem() != b.left_idem() {
        return None;
    }
    match (a, b) {
        (R1, R2) => Some(R12),
        (R2, R3) => Some(R23),
        (R12, R3) => Some(R123),
        (R1, R23) => Some(R123),
        _ => None,
    }
}

fn idem_of(b: Basis) -> Idem {
    match b {
        Basis::I0 => Idem::I0,
        Basis::I1 => Idem::I1,
        _ => unreachable!("idem_of called on a chord"),
    }
}

// ---------------------------------------------------------------------------
// F2 linear combinations of basis elements
// ---------------------------------------------------------------------------

/// An element of the torus algebra: an F2 linear combination of the eight
/// basis elements, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AlgebraElement(pub u8);

impl AlgebraElement {
    pub const ZERO: AlgebraElement = AlgebraElement(0);

    pub fn from_basis(b: Basis) -> AlgebraElement {
        AlgebraElement(b.bit())
    }

    /// The unit i0 + i1.
    pub fn unit() -> AlgebraElement {
        AlgebraElement(Basis::I0.bit() | Basis::I1.bit())
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, b: Basis) -> bool {
        self.0 & b.bit() != 0
    }

    /// F2 addition (symmetric difference of supports).
    pub fn add(self, other: AlgebraElement) -> AlgebraElement {
        AlgebraElement(self.0 ^ other.0)
    }

    /// Algebra multiplication, extended bilinearly over F2.
    pub fn mul(self, other: AlgebraElement) -> AlgebraElement {
        let mut out = 0u8;
        for &x in BASIS.iter() {
            if !self.contains(x) {
                continue;
            }
            for &y in BASIS.iter() {
                if !other.contains(y) {
                    continue;
                }
                if let Some(z) = basis_mul(x, y) {
                    out ^= z.bit();
                }
            }
        }
        AlgebraElement(out)
    }

    pub fn terms(self) -> Vec<Basis> {
        BASIS.iter().copied().filter(|b| self.contains(*b)).collect()
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for b in self.terms() {
            if !first {
                write!(f, "+")?;
            }
            write!(f, "{}", b)?;
            first = false;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Chords
// ---------------------------------------------------------------------------

/// One of the six Reeb chords, used to label type-D arrows and type-A inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Chord {
    C1,
    C2,
    C3,
    C12,
    C23,
    C123,
}

pub const CHORDS: [Chord; 6] = [
    Chord::C1,
    Chord::C2,
    Chord::C3,
    Chord::C12,
    Chord::C23,
    Chord::C123,
];

impl Chord {
    pub fn basis(self) -> Basis {
        match self {
            Chord::C1 => Basis::R1,
            Chord::C2 => Basis::R2,
            Chord::C3 => Basis::R3,
            Chord::C12 => Basis::R12,
            Chord::C23 => Basis::R23,
            Chord::C123 => Basis::R123,
        }
    }

    pub fn algebra(self) -> AlgebraElement {
        AlgebraElement::from_basis(self.basis())
    }

    pub fn left_idem(self) -> Idem {
        self.basis().left_idem()
    }

    pub fn right_idem(self) -> Idem {
        self.basis().right_idem()
    }

    /// Grading of the chord in the extended grading group.
    pub fn gr(self) -> ExtendedGrading {
        match self {
            Chord::C1 => ExtendedGrading::new(Half(-1), Half(1), Half(-1), 0),
            Chord::C2 => ExtendedGrading::new(Half(-1), Half(1), Half(1), 0),
            Chord::C3 => ExtendedGrading::new(Half(-1), Half(-1), Half(1), 0),
            Chord::C12 => ExtendedGrading::new(Half(-1), Half(2), Half(0), 0),
            Chord::C23 => ExtendedGrading::new(Half(-1), Half(0), Half(2), 0),
            Chord::C123 => ExtendedGrading::new(Half(-1), Half(1), Half(1), 0),
        }
    }

    /// Pairs (s, t) of chords with s * t == self in the algebra.
    /// Used to check the type-D structure condition and A-infinity relations.
    pub fn factor_pairs(self) -> &'static [(Chord, Chord)] {
        match self {
            Chord::C12 => &[(Chord::C1, Chord::C2)],
            Chord::C23 => &[(Chord::C2, Chord::C3)],
            Chord::C123 => &[(Chord::C1, Chord::C23), (Chord::C12, Chord::C3)],
            _ => &[],
        }
    }

    /// Product of two chords as a chord, `None` if zero in the algebra.
    pub fn mul(a: Chord, b: Chord) -> Option<Chord> {
        let p = basis_mul(a.basis(), b.basis())?;
        CHORDS.iter().copied().find(|c| c.basis() == p)
    }

    /// Parse "1", "2", "3", "12", "23", "123".
    pub fn parse(s: &str) -> Option<Chord> {
        match s {
            "1" => Some(Chord::C1),
            "2" => Some(Chord::C2),
            "3" => Some(Chord::C3),
            "12" => Some(Chord::C12),
            "23" => Some(Chord::C23),
            "123" => Some(Chord::C123),
            _ => None,
        }
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Chord::C1 => "1",
            Chord::C2 => "2",
            Chord::C3 => "3",
            Chord::C12 => "12",
            Chord::C23 => "23",
            Chord::C123 => "123",
        };
        write!(f, "{}", s)
    }
}

// ---------------------------------------------------------------------------
// Extended grading group
// ---------------------------------------------------------------------------

/// Element (m; i, j; n) of the extended grading group.
///
/// m is the Maslov component, (i, j) the spin-c pair, n the extra central
/// coordinate tracked by u = (0;0,0;-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ExtendedGrading {
    pub m: Half,
    pub i: Half,
    pub j: Half,
    pub n: i64,
}

impl ExtendedGrading {
    pub fn new(m: Half, i: Half, j: Half, n: i64) -> ExtendedGrading {
        debug_assert!(
            (i + j).is_integer(),
            "spin-c pair must have integral sum: ({}, {})",
            i,
            j
        );
        ExtendedGrading { m, i, j, n }
    }

    /// The group identity (0;0,0;0).
    pub fn identity() -> ExtendedGrading {
        ExtendedGrading::new(Half::ZERO, Half::ZERO, Half::ZERO, 0)
    }

    /// lambda = (1;0,0;0), central.
    pub fn lambda() -> ExtendedGrading {
        ExtendedGrading::new(Half::from_int(1), Half::ZERO, Half::ZERO, 0)
    }

    /// u = (0;0,0;-1), central; one factor of u per power of U.
    pub fn u_elem() -> ExtendedGrading {
        ExtendedGrading::new(Half::ZERO, Half::ZERO, Half::ZERO, -1)
    }

    /// Group law with the antisymmetric cross term on the Maslov component.
    pub fn compose(self, rhs: ExtendedGrading) -> ExtendedGrading {
        // cross = i1*j2 - i2*j1 in (1/2)Z; in doubled representation the
        // product of doubles is 4x the value, so halve it (exact because the
        // spin-c sums are integral).
        let quad = self.i.0 * rhs.j.0 - rhs.i.0 * self.j.0;
        assert!(quad % 2 == 0, "grading cross term left (1/2)Z");
        let cross = Half(quad / 2);
        ExtendedGrading::new(
            self.m + rhs.m + cross,
            self.i + rhs.i,
            self.j + rhs.j,
            self.n + rhs.n,
        )
    }

    /// Group inverse (-m;-i,-j;-n).
    pub fn invert(self) -> ExtendedGrading {
        ExtendedGrading::new(-self.m, -self.i, -self.j, -self.n)
    }

    /// k-th power. Linear in k because the cross term of an element with
    /// itself vanishes (i*j - i*j = 0), so e^k = (k*m; k*i, k*j; k*n) for all
    /// integers k, including negative ones.
    pub fn pow(self, k: i64) -> ExtendedGrading {
        ExtendedGrading::new(self.m.scale(k), self.i.scale(k), self.j.scale(k), self.n * k)
    }

    /// The spin-c pair (i, j).
    pub fn spinc(self) -> (Half, Half) {
        (self.i, self.j)
    }

    pub fn has_zero_spinc(self) -> bool {
        self.i == Half::ZERO && self.j == Half::ZERO
    }
}

impl fmt::Display for ExtendedGrading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{},{};{})", self.m, self.i, self.j, self.n)
    }
}

// ---------------------------------------------------------------------------
// Coset reduction to the canonical bigrading
// ---------------------------------------------------------------------------

/// The canonical bigrading lambda^a * u^b obtained by reducing a grading
/// group element modulo the left period g and the right period h.
///
/// As a group element this is (a; 0, 0; -b); it displays as "(a;0,0;b)" with
/// b the exponent of u (one u per power of U).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalGrading {
    pub a: i64,
    pub b: i64,
}

impl fmt::Display for CanonicalGrading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};0,0;{})", self.a, self.b)
    }
}

/// Reduce x modulo the periods: find the unique integers (s, t) with
/// spinc(g^s * x * h^t) = (0, 0) and return the surviving lambda/u exponents.
///
/// The spin-c equations are linear:
///
/// ```text
///   s*gi + t*hi = -xi
///   s*gj + t*hj = -xj
/// ```
///
/// solved exactly by Cramer's rule in the doubled-integer representation.
/// A zero determinant or a non-integral solution means the periods do not
/// act freely transitively on the spin-c plane; for the gradings this engine
/// produces that is impossible, so both are reported as internal errors.
pub fn coset_reduce(
    x: ExtendedGrading,
    g: ExtendedGrading,
    h: ExtendedGrading,
) -> Result<CanonicalGrading> {
    // Doubled-integer matrix [gi hi; gj hj] * (s, t)^T = (-xi, -xj)^T.
    let (gi, gj) = (g.i.0, g.j.0);
    let (hi, hj) = (h.i.0, h.j.0);
    let (xi, xj) = (x.i.0, x.j.0);

    let det = gi * hj - hi * gj;
    if det == 0 {
        return Err(CfError::Internal(format!(
            "degenerate grading periods: g={} h={} have dependent spin-c parts",
            g, h
        )));
    }
    let s_num = -xi * hj + hi * xj;
    let t_num = -gi * xj + gj * xi;
    if s_num % det != 0 || t_num % det != 0 {
        return Err(CfError::Internal(format!(
            "non-integral coset solution for x={} with periods g={} h={}",
            x, g, h
        )));
    }
    let s = s_num / det;
    let t = t_num / det;

    let y = g.pow(s).compose(x).compose(h.pow(t));
    if !y.has_zero_spinc() {
        return Err(CfError::Internal(format!(
            "coset reduction failed to reach zero spin-c: x={} -> {}",
            x, y
        )));
    }
    let a = y.m.as_int().ok_or_else(|| {
        CfError::Internal(format!(
            "coset reduction produced a half-integral Maslov exponent: {}",
            y
        ))
    })?;
    Ok(CanonicalGrading { a, b: -y.n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grading(m: i64, i: i64, j: i64, n: i64) -> ExtendedGrading {
        // All components given in halves for brevity in tests.
        ExtendedGrading::new(Half(m), Half(i), Half(j), n)
    }

    #[test]
    fn idempotent_decompositions() {
        use Basis::*;
        let expect = [
            (R1, Idem::I0, Idem::I1),
            (R2, Idem::I1, Idem::I0),
            (R3, Idem::I0, Idem::I1),
            (R12, Idem::I0, Idem::I0),
            (R23, Idem::I1, Idem::I1),
            (R123, Idem::I0, Idem::I1),
        ];
        for (b, l, r) in expect {
            assert_eq!(b.left_idem(), l, "left idem of {}", b);
            assert_eq!(b.right_idem(), r, "right idem of {}", b);
        }
    }

    #[test]
    fn multiplication_table() {
        use Basis::*;
        // The complete list of nonzero products not involving idempotents.
        let nonzero = [
            (R1, R2, R12),
            (R2, R3, R23),
            (R12, R3, R123),
            (R1, R23, R123),
        ];
        for &a in BASIS.iter() {
            for &b in BASIS.iter() {
                let got = basis_mul(a, b);
                let expected = match (a, b) {
                    (I0, _) | (I1, _) => {
                        if b.left_idem() == (if a == I0 { Idem::I0 } else { Idem::I1 }) {
                            Some(b)
                        } else {
                            None
                        }
                    }
                    (_, I0) | (_, I1) => {
                        if a.right_idem() == (if b == I0 { Idem::I0 } else { Idem::I1 }) {
                            Some(a)
                        } else {
                            None
                        }
                    }
                    _ => nonzero
                        .iter()
                        .find(|(x, y, _)| *x == a && *y == b)
                        .map(|(_, _, z)| *z),
                };
                assert_eq!(got, expected, "{} * {}", a, b);
            }
        }
    }

    #[test]
    fn associativity_all_triples() {
        for &a in BASIS.iter() {
            for &b in BASIS.iter() {
                for &c in BASIS.iter() {
                    let ea = AlgebraElement::from_basis(a);
                    let eb = AlgebraElement::from_basis(b);
                    let ec = AlgebraElement::from_basis(c);
                    assert_eq!(
                        ea.mul(eb).mul(ec),
                        ea.mul(eb.mul(ec)),
                        "({} * {}) * {}",
                        a,
                        b,
                        c
                    );
                }
            }
        }
    }

    #[test]
    fn unit_acts_as_identity() {
        let u = AlgebraElement::unit();
        for &b in BASIS.iter() {
            let e = AlgebraElement::from_basis(b);
            assert_eq!(u.mul(e), e, "unit * {}", b);
            assert_eq!(e.mul(u), e, "{} * unit", b);
        }
    }

    #[test]
    fn chord_gradings_frozen() {
        assert_eq!(Chord::C1.gr(), grading(-1, 1, -1, 0));
        assert_eq!(Chord::C2.gr(), grading(-1, 1, 1, 0));
        assert_eq!(Chord::C3.gr(), grading(-1, -1, 1, 0));
        assert_eq!(Chord::C12.gr(), grading(-1, 2, 0, 0));
        assert_eq!(Chord::C23.gr(), grading(-1, 0, 2, 0));
        assert_eq!(Chord::C123.gr(), grading(-1, 1, 1, 0));
    }

    #[test]
    fn composite_chord_gradings_from_rule() {
        // gr of a composite chord r_I r_J equals lambda * gr(r_J) * gr(r_I).
        let l = ExtendedGrading::lambda();
        let via = |j: Chord, i: Chord| l.compose(j.gr()).compose(i.gr());
        assert_eq!(via(Chord::C2, Chord::C1), Chord::C12.gr());
        assert_eq!(via(Chord::C3, Chord::C2), Chord::C23.gr());
        // Both factorizations of r123 agree.
        assert_eq!(via(Chord::C23, Chord::C1), Chord::C123.gr());
        assert_eq!(via(Chord::C3, Chord::C12), Chord::C123.gr());
    }

    #[test]
    fn product_gr_r2_r3() {
        // In the written order gr(r2) * gr(r3): cross term +1/2.
        let p = Chord::C2.gr().compose(Chord::C3.gr());
        assert_eq!(p, grading(-1, 0, 2, 0));
    }

    #[test]
    fn powers_of_r23_grading() {
        for k in 0..6 {
            let p = Chord::C23.gr().pow(k);
            assert_eq!(p, grading(-k, 0, 2 * k, 0), "gr(r23)^{}", k);
        }
    }

    #[test]
    fn pow_linear_matches_repeated_compose() {
        let samples = [
            grading(-1, 1, -1, 0),
            grading(3, 1, 1, 2),
            grading(0, -1, 3, -1),
            grading(2, 0, 2, 5),
        ];
        for &e in samples.iter() {
            let mut acc = ExtendedGrading::identity();
            for k in 0..=4i64 {
                assert_eq!(e.pow(k), acc, "{}^{}", e, k);
                assert_eq!(e.pow(-k), acc.invert(), "{}^-{}", e, k);
                acc = acc.compose(e);
            }
        }
    }

    #[test]
    fn inverse_law() {
        let samples = [
            grading(-1, 1, -1, 0),
            grading(3, 1, 1, 2),
            grading(0, -1, 3, -1),
        ];
        for &e in samples.iter() {
            assert_eq!(e.compose(e.invert()), ExtendedGrading::identity());
            assert_eq!(e.invert().compose(e), ExtendedGrading::identity());
        }
    }

    #[test]
    fn lambda_and_u_are_central() {
        let l = ExtendedGrading::lambda();
        let u = ExtendedGrading::u_elem();
        let samples = [grading(-1, 1, -1, 0), grading(3, 1, 1, 2), grading(0, -1, 3, -1)];
        for &e in samples.iter() {
            assert_eq!(l.compose(e), e.compose(l));
            assert_eq!(u.compose(e), e.compose(u));
        }
    }

    #[test]
    fn display_formats() {
        assert_eq!(Chord::C1.gr().to_string(), "(-1/2;1/2,-1/2;0)");
        assert_eq!(Chord::C12.gr().to_string(), "(-1/2;1,0;0)");
        assert_eq!(CanonicalGrading { a: -1, b: 2 }.to_string(), "(-1;0,0;2)");
        assert_eq!(
            AlgebraElement::unit().to_string(),
            "i0+i1"
        );
        assert_eq!(AlgebraElement::ZERO.to_string(), "0");
    }

    #[test]
    fn coset_reduce_identity_periods_ok() {
        // x already has zero spin-c: nothing to do regardless of periods.
        let g = grading(-1, 0, 2, 6); // (-1/2;0,1;3) doubled i,j
        let h = grading(-1, -2, 0, 0); // (-1/2;-1,0;0)
        let x = ExtendedGrading::identity();
        let c = coset_reduce(x, g, h).unwrap();
        assert_eq!(c, CanonicalGrading { a: 0, b: 0 });
    }

    #[test]
    fn coset_reduce_frozen_examples() {
        // Periods with unimodular spin-c parts. g = (-1/2;0,1;3),
        // h = (-1/2;-1,0;0).
        let g = ExtendedGrading::new(Half(-1), Half(0), Half(2), 3);
        let h = ExtendedGrading::new(Half(-1), Half(-2), Half(0), 0);

        let x1 = ExtendedGrading::new(Half(-1), Half(0), Half(2), 0); // (-1/2;0,1;0)
        assert_eq!(coset_reduce(x1, g, h).unwrap(), CanonicalGrading { a: 0, b: 3 });

        let x2 = ExtendedGrading::new(Half(-3), Half(0), Half(2), 1); // (-3/2;0,1;1)
        assert_eq!(coset_reduce(x2, g, h).unwrap(), CanonicalGrading { a: -1, b: 2 });
    }

    #[test]
    fn coset_reduce_invariant_under_period_shift() {
        let g = ExtendedGrading::new(Half(-1), Half(0), Half(2), 3);
        let h = ExtendedGrading::new(Half(-1), Half(-2), Half(0), 0);
        let x = ExtendedGrading::new(Half(-3), Half(0), Half(2), 1);
        let base = coset_reduce(x, g, h).unwrap();
        for s in -3..=3i64 {
            for t in -3..=3i64 {
                let shifted = g.pow(s).compose(x).compose(h.pow(t));
                assert_eq!(coset_reduce(shifted, g, h).unwrap(), base, "s={} t={}", s, t);
            }
        }
    }

    #[test]
    fn coset_reduce_degenerate_periods_error() {
        let g = ExtendedGrading::new(Half(0), Half(2), Half(0), 0);
        let h = ExtendedGrading::new(Half(0), Half(4), Half(0), 0); // parallel spin-c
        let x = ExtendedGrading::new(Half(0), Half(2), Half(2), 0);
        assert!(coset_reduce(x, g, h).is_err());
    }

    #[test]
    fn chord_factor_pairs_multiply_back() {
        for &c in CHORDS.iter() {
            for &(s, t) in c.factor_pairs() {
                assert_eq!(Chord::mul(s, t), Some(c), "{} = {} * {}", c, s, t);
            }
        }
        // And the full product table over chords matches factor_pairs.
        for &a in CHORDS.iter() {
            for &b in CHORDS.iter() {
                let p = Chord::mul(a, b);
                if let Some(c) = p {
                    assert!(
                        c.factor_pairs().contains(&(a, b)),
                        "{} * {} = {} missing from factor_pairs",
                        a,
                        b,
                        c
                    );
                }
            }
        }
    }
}
