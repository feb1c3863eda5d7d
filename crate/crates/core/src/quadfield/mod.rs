//! Exact arithmetic in real quadratic fields `K = Q(sqrt D)`.

mod class;
mod residue;
mod unit;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use class::{class_number, class_number_with_bound, DEFAULT_CLASS_NUMBER_BOUND};
pub use residue::{multiplicative_order, phi_finite, phi_finite_brute, Residue, ResidueRing};
pub use unit::{fundamental_unit, totally_positive_unit, CF_PERIOD_CAP};

/// A real quadratic field `Q(sqrt D)` with `D` square-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadField {
    radicand: u64,
}

impl QuadField {
    pub fn new(radicand: u64) -> Result<Self> {
        if radicand < 2 {
            return Err(Error::InvalidArgument(format!(
                "radicand must be >= 2, got {radicand}"
            )));
        }
        if !is_squarefree(radicand) {
            return Err(Error::InvalidArgument(format!(
                "radicand {radicand} is not square-free"
            )));
        }
        Ok(Self { radicand })
    }

    /// The square-free integer `D`.
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    /// Fundamental discriminant: `D` if `D = 1 mod 4`, else `4D`.
    pub fn discriminant(&self) -> u64 {
        if self.radicand % 4 == 1 {
            self.radicand
        } else {
            4 * self.radicand
        }
    }

    /// Whether the ring of integers has half-integer elements.
    pub fn is_one_mod_four(&self) -> bool {
        self.radicand % 4 == 1
    }

    /// The integral generator `omega`: `(1 + sqrt D)/2` or `sqrt D`.
    pub fn omega(&self) -> QuadElem {
        if self.is_one_mod_four() {
            QuadElem::from_halves(*self, 1, 1)
        } else {
            QuadElem::from_halves(*self, 0, 2)
        }
    }

    pub fn one(&self) -> QuadElem {
        QuadElem::from_halves(*self, 2, 0)
    }

    pub fn from_int(&self, n: i64) -> QuadElem {
        QuadElem::from_halves(*self, 2 * n, 0)
    }

    /// `a + b*omega` as a field element.
    pub fn from_omega_coords(&self, a: &BigInt, b: &BigInt) -> QuadElem {
        if self.is_one_mod_four() {
            QuadElem::new_unchecked(*self, a * 2 + b, b.clone())
        } else {
            QuadElem::new_unchecked(*self, a * 2, b * 2)
        }
    }
}

fn is_squarefree(n: u64) -> bool {
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Sign of `a + b*sqrt(D)` computed with integers only.
pub(crate) fn sign_of_surd(a: &BigInt, b: &BigInt, radicand: u64) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    use num_bigint::Sign::*;
    match (sa, sb) {
        (NoSign, NoSign) => Ordering::Equal,
        (_, NoSign) => a.cmp(&BigInt::zero()),
        (NoSign, _) => b.cmp(&BigInt::zero()),
        (Plus, Plus) => Ordering::Greater,
        (Minus, Minus) => Ordering::Less,
        _ => {
            // opposite signs: compare a^2 with D b^2
            let lhs = a * a;
            let rhs = b * b * BigInt::from(radicand);
            match lhs.cmp(&rhs) {
                Ordering::Equal => Ordering::Equal,
                Ordering::Greater => a.cmp(&BigInt::zero()),
                Ordering::Less => b.cmp(&BigInt::zero()),
            }
        }
    }
}

/// A real embedding of `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RealPlace {
    /// `sqrt D` maps to the positive root.
    First,
    /// `sqrt D` maps to the negative root.
    Second,
}

/// The element `(x + y sqrt D)/2` of a real quadratic field.
///
/// Elements produced by ring operations on integral inputs stay integral;
/// the half-integer convention is used for every `D` (for `D != 1 mod 4`
/// both coordinates of an integral element are even).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    x: BigInt,
    y: BigInt,
    field: QuadField,
}

impl QuadElem {
    pub fn new(field: QuadField, x: BigInt, y: BigInt) -> Result<Self> {
        let e = Self { x, y, field };
        if !e.is_integral() {
            return Err(Error::InvalidArgument(format!(
                "({} + {} sqrt {})/2 is not an algebraic integer",
                e.x, e.y, field.radicand
            )));
        }
        Ok(e)
    }

    pub(crate) fn new_unchecked(field: QuadField, x: BigInt, y: BigInt) -> Self {
        Self { x, y, field }
    }

    pub(crate) fn from_halves(field: QuadField, x: i64, y: i64) -> Self {
        Self::new_unchecked(field, BigInt::from(x), BigInt::from(y))
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    /// Twice the rational part.
    pub fn x(&self) -> &BigInt {
        &self.x
    }

    /// Twice the coefficient of `sqrt D`.
    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn is_integral(&self) -> bool {
        let d = self.field.radicand;
        if d % 4 == 1 {
            (&self.x - &self.y).is_even()
        } else {
            self.x.is_even() && self.y.is_even()
        }
    }

    /// Coordinates `(a, b)` with `self = a + b*omega`.
    pub fn omega_coords(&self) -> (BigInt, BigInt) {
        if self.field.is_one_mod_four() {
            ((&self.x - &self.y) / 2, self.y.clone())
        } else {
            (&self.x / 2, &self.y / 2)
        }
    }

    pub fn norm(&self) -> BigInt {
        let d = BigInt::from(self.field.radicand);
        (&self.x * &self.x - d * &self.y * &self.y) / 4
    }

    pub fn trace(&self) -> BigInt {
        self.x.clone()
    }

    /// The non-trivial Galois automorphism `sqrt D -> -sqrt D`.
    pub fn conj(&self) -> QuadElem {
        Self::new_unchecked(self.field, self.x.clone(), -&self.y)
    }

    /// `(N(e), Tr(e), conj(e))`.
    pub fn norm_trace_conj(&self) -> (BigInt, BigInt, QuadElem) {
        (self.norm(), self.trace(), self.conj())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x == BigInt::from(2) && self.y.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.is_integral() && self.norm().abs().is_one()
    }

    pub fn sign_at(&self, place: RealPlace) -> Ordering {
        match place {
            RealPlace::First => sign_of_surd(&self.x, &self.y, self.field.radicand),
            RealPlace::Second => sign_of_surd(&self.x, &-&self.y, self.field.radicand),
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign_at(RealPlace::First) == Ordering::Greater
            && self.sign_at(RealPlace::Second) == Ordering::Greater
    }

    /// Exact comparison with the rational integer `n` under the first embedding.
    pub fn cmp_int(&self, n: i64) -> Ordering {
        sign_of_surd(&(&self.x - 2 * n), &self.y, self.field.radicand)
    }

    /// Inverse of a unit.
    pub fn unit_inverse(&self) -> Option<QuadElem> {
        let n = self.norm();
        if !self.is_integral() || !n.abs().is_one() {
            return None;
        }
        let c = self.conj();
        Some(if n.is_one() { c } else { -c })
    }

    pub fn pow(&self, mut exp: u64) -> QuadElem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Floating-point value under the first embedding.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        (x + y * (self.field.radicand as f64).sqrt()) / 2.0
    }

    fn check_same_field(&self, other: &QuadElem) {
        assert_eq!(
            self.field, other.field,
            "arithmetic across different quadratic fields"
        );
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.field.radicand;
        if self.x.is_even() && self.y.is_even() {
            let a: BigInt = &self.x / 2;
            let b: BigInt = &self.y / 2;
            if b.is_zero() {
                write!(f, "{a}")
            } else if b.is_negative() {
                write!(f, "{a} - {}*sqrt({d})", -b)
            } else {
                write!(f, "{a} + {b}*sqrt({d})")
            }
        } else if self.y.is_negative() {
            write!(f, "({} - {}*sqrt({d}))/2", self.x, -&self.y)
        } else {
            write!(f, "({} + {}*sqrt({d}))/2", self.x, self.y)
        }
    }
}

impl<'a> Mul<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &'a QuadElem) -> QuadElem {
        self.check_same_field(rhs);
        let d = BigInt::from(self.field.radicand);
        let xx = &self.x * &rhs.x + d * &self.y * &rhs.y;
        let yy = &self.x * &rhs.y + &self.y * &rhs.x;
        debug_assert!(xx.is_even() && yy.is_even(), "product left the half-integer lattice");
        QuadElem::new_unchecked(self.field, xx / 2, yy / 2)
    }
}

impl Mul for QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: QuadElem) -> QuadElem {
        &self * &rhs
    }
}

impl<'a> Add<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &'a QuadElem) -> QuadElem {
        self.check_same_field(rhs);
        QuadElem::new_unchecked(self.field, &self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl<'a> Sub<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &'a QuadElem) -> QuadElem {
        self.check_same_field(rhs);
        QuadElem::new_unchecked(self.field, &self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new_unchecked(self.field, -self.x, -self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(d: u64) -> QuadField {
        QuadField::new(d).unwrap()
    }

    #[test]
    fn rejects_non_squarefree() {
        assert!(QuadField::new(12).is_err());
        assert!(QuadField::new(1).is_err());
        assert!(QuadField::new(30).is_ok());
    }

    #[test]
    fn norm_trace_conj_examples() {
        let u = QuadElem::from_halves(k(5), 3, 1);
        let (n, t, c) = u.norm_trace_conj();
        assert_eq!(n, BigInt::from(1));
        assert_eq!(t, BigInt::from(3));
        assert_eq!(c, QuadElem::from_halves(k(5), 3, -1));

        let v = QuadElem::from_halves(k(2), 2, 2);
        let (n, t, _) = v.norm_trace_conj();
        assert_eq!(n, BigInt::from(-1));
        assert_eq!(t, BigInt::from(2));
    }

    #[test]
    fn integrality_depends_on_radicand() {
        assert!(QuadElem::new(k(5), 1.into(), 1.into()).is_ok());
        assert!(QuadElem::new(k(3), 1.into(), 1.into()).is_err());
        assert!(QuadElem::new(k(3), 2.into(), 4.into()).is_ok());
    }

    #[test]
    fn signs_at_places() {
        // 1 - sqrt 2 < 0 at the first place, > 0 at the second
        let e = QuadElem::from_halves(k(2), 2, -2);
        assert_eq!(e.sign_at(RealPlace::First), Ordering::Less);
        assert_eq!(e.sign_at(RealPlace::Second), Ordering::Greater);
        assert_eq!(k(5).omega().cmp_int(1), Ordering::Greater);
        assert_eq!(k(5).omega().cmp_int(2), Ordering::Less);
    }

    #[test]
    fn element_times_conjugate_is_norm() {
        let e = QuadElem::from_halves(k(13), 7, 3);
        let n = e.norm();
        let prod = &e * &e.conj();
        assert_eq!(prod.x(), &(n * 2));
        assert!(prod.y().is_zero());
    }

    fn elem(d: u64) -> impl Strategy<Value = QuadElem> {
        (-10_i64.pow(12)..10_i64.pow(12), -10_i64.pow(12)..10_i64.pow(12)).prop_map(move |(a, b)| {
            let f = k(d);
            f.from_omega_coords(&BigInt::from(a), &BigInt::from(b))
        })
    }

    proptest! {
        #[test]
        fn multiplication_is_associative_and_norm_is_multiplicative(
            (a, b, c) in prop_oneof![Just(5u64), Just(2), Just(13), Just(94)]
                .prop_flat_map(|d| (elem(d), elem(d), elem(d)))
        ) {
            let ab = &a * &b;
            prop_assert_eq!(&(&ab * &c), &(&a * &(&b * &c)));
            prop_assert_eq!(ab.norm(), a.norm() * b.norm());
            prop_assert!(ab.is_integral());
        }
    }
}
