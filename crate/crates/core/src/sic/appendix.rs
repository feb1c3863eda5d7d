//! The `d = 19` unit polynomials over `Q(sqrt 5)` and one explicit root,
//! checked exactly (reciprocity) and in binary fixed point (the root).

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::quadfield::{QuadElem, QuadField};

/// Fractional bits of [`Fixed`]; about 96 decimal digits.
pub const FRAC_BITS: u64 = 320;

/// Fixed-point number `v / 2^FRAC_BITS`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn from_int(n: i64) -> Self {
        Fixed(BigInt::from(n) << FRAC_BITS)
    }

    pub fn zero() -> Self {
        Fixed(BigInt::zero())
    }

    pub fn raw(&self) -> &BigInt {
        &self.0
    }

    pub fn div_int(&self, n: i64) -> Self {
        Fixed(&self.0 / n)
    }

    pub fn div(&self, o: &Self) -> Self {
        Fixed((&self.0 << FRAC_BITS) / &o.0)
    }

    pub fn abs(&self) -> Self {
        Fixed(self.0.abs())
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.0.is_negative(), "square root of a negative number");
        Fixed((&self.0 << FRAC_BITS).sqrt())
    }

    pub fn to_f64(&self) -> f64 {
        // scale in two steps so that tiny values keep their precision
        let bits = self.0.bits();
        if bits > 900 {
            let shift = bits - 900;
            return (&self.0 >> shift).to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32 - FRAC_BITS as i32);
        }
        self.0.to_f64().unwrap_or(f64::NAN) / 2f64.powi(FRAC_BITS as i32)
    }

    /// `pi` from Machin's formula `16 atan(1/5) - 4 atan(1/239)`.
    pub fn pi() -> Self {
        fn atan_inv(n: i64) -> Fixed {
            let x = Fixed::from_int(1).div_int(n);
            let x2 = n * n;
            let mut term = x.clone();
            let mut sum = x;
            let mut k = 1i64;
            while !term.0.is_zero() {
                term = term.div_int(x2);
                let t = term.div_int(2 * k + 1);
                sum = if k % 2 == 1 { &sum - &t } else { &sum + &t };
                k += 1;
            }
            sum
        }
        &(&atan_inv(5) * &Fixed::from_int(16)) - &(&atan_inv(239) * &Fixed::from_int(4))
    }

    /// Taylor series; intended for `|x| <= 1`.
    pub fn cos(&self) -> Self {
        let x2 = self * self;
        let mut term = Fixed::from_int(1);
        let mut sum = term.clone();
        let mut k = 1i64;
        while !term.0.is_zero() {
            term = (&term * &x2).div_int((2 * k - 1) * (2 * k));
            sum = if k % 2 == 1 { &sum - &term } else { &sum + &term };
            k += 1;
        }
        sum
    }
}

impl Add for &Fixed {
    type Output = Fixed;
    fn add(self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }
}

impl Sub for &Fixed {
    type Output = Fixed;
    fn sub(self, o: &Fixed) -> Fixed {
        Fixed(&self.0 - &o.0)
    }
}

impl Mul for &Fixed {
    type Output = Fixed;
    fn mul(self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> FRAC_BITS)
    }
}

impl Neg for &Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(-&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedComplex {
    pub re: Fixed,
    pub im: Fixed,
}

impl FixedComplex {
    pub fn new(re: Fixed, im: Fixed) -> Self {
        Self { re, im }
    }

    pub fn real(re: Fixed) -> Self {
        Self { re, im: Fixed::zero() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&(&self.re * &o.re) - &(&self.im * &o.im), &(&self.re * &o.im) + &(&self.im * &o.re))
    }

    /// Modulus from the raw integers, so tiny values are not rounded away.
    pub fn abs(&self) -> Fixed {
        Fixed((&self.re.0 * &self.re.0 + &self.im.0 * &self.im.0).sqrt())
    }
}

/// Half-integer pairs `(x, y)` meaning `(x + y sqrt 5)/2` for the
/// coefficients of the degree-18 factor, from `y^18` down to `y^0`.
pub const F3_COEFFS: [(i64, i64); 19] = [
    (2, 0),
    (-5, 5),
    (-12, 10),
    (268, -114),
    (-166, 82),
    (-2285, 1031),
    (2008, -890),
    (9538, -4260),
    (-3917, 1757),
    (-19204, 8594),
    (-3917, 1757),
    (9538, -4260),
    (2008, -890),
    (-2285, 1031),
    (-166, 82),
    (268, -114),
    (-12, 10),
    (-5, 5),
    (2, 0),
];

/// The quadratic factor `y^2 + (sqrt 5 - 5)/2 y + 1`.
pub const F2_COEFFS: [(i64, i64); 3] = [(2, 0), (-5, 1), (2, 0)];

/// Coefficients of the explicit root in `t = cos(pi/19)`, low degree first,
/// as `(x, y)` for `x + y sqrt 5`. The root is
/// `(i/19) A(t) sqrt(2 sqrt 5 + 1) + B(t) + (1 - sqrt 5)/2`.
const ROOT_A: [(i64, i64); 8] = [(-2, 4), (-77, 21), (-50, -14), (550, -150), (204, -28), (-1144, 312), (-176, 48), (704, -192)];
const ROOT_B: [(i64, i64); 7] = [(0, 0), (3, -3), (-6, 6), (-10, 10), (20, -20), (8, -8), (-16, 16)];

fn field() -> QuadField {
    QuadField::new(5).expect("5 is square-free")
}

fn coeffs(raw: &[(i64, i64)]) -> Vec<QuadElem> {
    raw.iter().map(|&(x, y)| QuadElem::from_halves(field(), x, y)).collect()
}

fn is_reciprocal(c: &[QuadElem]) -> bool {
    c.iter().eq(c.iter().rev())
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixReport {
    pub f2_reciprocal: bool,
    pub f3_reciprocal: bool,
    pub f3_monic: bool,
    /// `|f3(u)| / max |coefficient|`.
    pub relative_residual: f64,
    /// `| |u| - 1 |`.
    pub modulus_defect: f64,
    pub root_re: f64,
    pub root_im: f64,
    pub decimal_digits: u32,
    pub residual_tolerance: f64,
    pub modulus_tolerance: f64,
}

impl AppendixReport {
    pub fn passed(&self) -> bool {
        self.f2_reciprocal
            && self.f3_reciprocal
            && self.f3_monic
            && self.relative_residual < self.residual_tolerance
            && self.modulus_defect < self.modulus_tolerance
            && self.decimal_digits >= 50
    }
}

/// `(x + y sqrt 5) / 2` in fixed point, with `sqrt 5` supplied.
fn embed_half(x: &BigInt, y: &BigInt, sqrt5: &Fixed) -> Fixed {
    let xi = Fixed(x << FRAC_BITS);
    let yi = Fixed(y << FRAC_BITS);
    (&xi + &(&yi * sqrt5)).div_int(2)
}

fn embed_full(x: i64, y: i64, sqrt5: &Fixed) -> Fixed {
    &Fixed::from_int(x) + &(&Fixed::from_int(y) * sqrt5)
}

fn horner_real(c: &[(i64, i64)], t: &Fixed, sqrt5: &Fixed) -> Fixed {
    c.iter().rev().fold(Fixed::zero(), |acc, &(x, y)| &(&acc * t) + &embed_full(x, y, sqrt5))
}

/// The explicit root `u` in fixed point.
pub fn appendix_root() -> FixedComplex {
    let sqrt5 = Fixed::from_int(5).sqrt();
    let t = Fixed::pi().div_int(19).cos();
    let a = horner_real(&ROOT_A, &t, &sqrt5);
    let rad = (&(&sqrt5 * &Fixed::from_int(2)) + &Fixed::from_int(1)).sqrt();
    let b = &horner_real(&ROOT_B, &t, &sqrt5) + &(&Fixed::from_int(1) - &sqrt5).div_int(2);
    FixedComplex::new(b, (&a * &rad).div_int(19))
}

pub fn appendix19_certificate() -> AppendixReport {
    let f2 = coeffs(&F2_COEFFS);
    let f3 = coeffs(&F3_COEFFS);
    let sqrt5 = Fixed::from_int(5).sqrt();
    let u = appendix_root();
    let value = f3.iter().fold(FixedComplex::real(Fixed::zero()), |acc, c| {
        acc.mul(&u).add(&FixedComplex::real(embed_half(c.x(), c.y(), &sqrt5)))
    });
    let scale = f3
        .iter()
        .map(|c| embed_half(c.x(), c.y(), &sqrt5).abs())
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        .expect("nonempty");
    let modulus_defect = (&u.abs() - &Fixed::from_int(1)).abs();
    AppendixReport {
        f2_reciprocal: is_reciprocal(&f2),
        f3_reciprocal: is_reciprocal(&f3),
        f3_monic: f3[0].is_one(),
        relative_residual: value.abs().div(&scale).to_f64(),
        modulus_defect: modulus_defect.to_f64(),
        root_re: u.re.to_f64(),
        root_im: u.im.to_f64(),
        decimal_digits: (FRAC_BITS as f64 * std::f64::consts::LOG10_2).floor() as u32,
        residual_tolerance: 1e-6,
        modulus_tolerance: 1e-10,
    }
}
