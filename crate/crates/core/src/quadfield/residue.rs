use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{QuadElem, QuadField};
use crate::error::{Error, Result};

/// Moduli up to this size get their totient cross-checked by brute force.
const BRUTE_CROSS_CHECK_LIMIT: u64 = 64;

/// The residue ring `Z_K / n Z_K` for a rational integer `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueRing {
    field: QuadField,
    n: u64,
    // omega^2 = omega_lin * omega + omega_const
    omega_lin: u64,
    omega_const: u64,
}

/// `a + b*omega mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    pub a: u64,
    pub b: u64,
}

impl ResidueRing {
    pub fn new(field: QuadField, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let d = field.radicand();
        let (omega_lin, omega_const) = if field.is_one_mod_four() {
            (1 % n, ((d - 1) / 4) % n)
        } else {
            (0, d % n)
        };
        Ok(Self { field, n, omega_lin, omega_const })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    /// Ring size `n^2`.
    pub fn size(&self) -> u128 {
        (self.n as u128) * (self.n as u128)
    }

    pub fn one(&self) -> Residue {
        Residue { a: 1 % self.n, b: 0 }
    }

    pub fn reduce(&self, e: &QuadElem) -> Residue {
        assert_eq!(e.field(), self.field);
        let (a, b) = e.omega_coords();
        Residue { a: mod_big(&a, self.n), b: mod_big(&b, self.n) }
    }

    pub fn neg(&self, x: Residue) -> Residue {
        Residue { a: (self.n - x.a) % self.n, b: (self.n - x.b) % self.n }
    }

    pub fn mul(&self, x: Residue, y: Residue) -> Residue {
        let n = self.n as u128;
        let (a, b, c, e) = (x.a as u128, x.b as u128, y.a as u128, y.b as u128);
        let be = b * e % n;
        let a_new = (a * c + be * self.omega_const as u128) % n;
        let b_new = (a * e + b * c + be * self.omega_lin as u128) % n;
        Residue { a: a_new as u64, b: b_new as u64 }
    }

    /// Norm of `a + b*omega` reduced mod `n`.
    pub fn norm(&self, x: Residue) -> u64 {
        // N(a + b w) = a^2 + a b Tr(w) + b^2 N(w)
        let n = self.n as i128;
        let (a, b) = (x.a as i128, x.b as i128);
        let d = self.field.radicand() as i128;
        let v = if self.field.is_one_mod_four() {
            a * a + a * b - b * b * ((d - 1) / 4)
        } else {
            a * a - d * b * b
        };
        v.rem_euclid(n) as u64
    }

    pub fn is_invertible(&self, x: Residue) -> bool {
        self.norm(x).gcd(&self.n) == 1
    }

    pub fn pow(&self, x: Residue, mut e: u64) -> Residue {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of an invertible residue, by iterated multiplication.
    pub fn order(&self, x: Residue) -> Result<u64> {
        if !self.is_invertible(x) {
            return Err(Error::NotInvertible(self.n));
        }
        let one = self.one();
        let mut acc = x;
        let mut t: u64 = 1;
        let bound = self.size();
        while acc != one {
            acc = self.mul(acc, x);
            t += 1;
            if t as u128 > bound {
                unreachable!("order exceeds ring size");
            }
        }
        Ok(t)
    }
}

fn mod_big(v: &BigInt, n: u64) -> u64 {
    v.mod_floor(&BigInt::from(n)).to_u64().expect("reduced residue fits in u64")
}

/// Smallest `t >= 1` with `e^t = 1` in `Z_K / n`.
pub fn multiplicative_order(e: &QuadElem, n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("modulus must be >= 2, got {n}")));
    }
    let ring = ResidueRing::new(e.field(), n)?;
    ring.order(ring.reduce(e))
}

/// `|(Z_K/n)^x|` by brute-force count over all `n^2` residues.
pub fn phi_finite_brute(field: QuadField, n: u64) -> u64 {
    let ring = ResidueRing::new(field, n).expect("n >= 1");
    let mut count = 0;
    for a in 0..n {
        for b in 0..n {
            if ring.is_invertible(Residue { a, b }) {
                count += 1;
            }
        }
    }
    count
}

/// Kronecker symbol `(disc | p)` for a prime `p`: 1 split, -1 inert, 0 ramified.
pub(crate) fn splitting_symbol(field: QuadField, p: u64) -> i32 {
    let disc = field.discriminant();
    if p == 2 {
        if disc.is_multiple_of(2) {
            return 0;
        }
        return match disc % 8 {
            1 | 7 => 1,
            _ => -1,
        };
    }
    let r = disc % p;
    if r == 0 {
        return 0;
    }
    let mut acc: u128 = 1;
    let mut base = r as u128;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `Phi(n) = |(Z_K/n)^x|` from the splitting type of each prime dividing `n`.
///
/// Small moduli are recomputed by counting and the two values compared.
pub fn phi_finite(field: QuadField, n: u64) -> u64 {
    let mut phi: u64 = 1;
    for (p, k) in factor_u64(n) {
        let local = match splitting_symbol(field, p) {
            1 => (p - 1) * (p - 1),
            -1 => p * p - 1,
            _ => p * (p - 1),
        };
        phi *= local * p.pow(2 * (k - 1));
    }
    if n <= BRUTE_CROSS_CHECK_LIMIT {
        assert_eq!(phi, phi_finite_brute(field, n), "totient formula disagrees with count");
    }
    phi
}
