use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, Zero};

use super::{QuadElem, QuadField};
use crate::error::{Error, Result};

/// Step cap for the continued-fraction expansion of `omega`.
pub const CF_PERIOD_CAP: usize = 1_000_000;

/// The fundamental unit `u_f > 1` of the ring of integers.
///
/// Walks the continued fraction of `omega` and stops at the first convergent
/// `p/q` for which `p - q*omega` is a unit. Every unit below 1 in absolute
/// value arises this way, so the first hit is `u_f^{-1}` up to sign.
pub fn fundamental_unit(field: QuadField) -> QuadElem {
    try_fundamental_unit(field, CF_PERIOD_CAP).expect("continued fraction period exceeds cap")
}

pub(crate) fn try_fundamental_unit(field: QuadField, cap: usize) -> Result<QuadElem> {
    let d = field.radicand() as i128;
    let s = (field.radicand()).sqrt() as i128;
    let (mut p_num, mut q_den): (i128, i128) = if field.is_one_mod_four() { (1, 2) } else { (0, 1) };

    let omega = field.omega();
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());

    for _ in 0..cap {
        debug_assert!(q_den > 0);
        let a = (p_num + s).div_euclid(q_den);
        let ab = BigInt::from(a);
        let p_next = &ab * &p_cur + &p_prev;
        let q_next = &ab * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);

        let eta = &field.from_omega_coords(&p_cur, &BigInt::zero()) - &(&omega * &field.from_omega_coords(&q_cur, &BigInt::zero()));
        if eta.norm().abs().is_one() {
            return Ok(normalize_above_one(eta));
        }

        p_num = a * q_den - p_num;
        q_den = (d - p_num * p_num) / q_den;
    }
    Err(Error::PeriodCap(cap))
}

/// Of `e, -e, 1/e, -1/e` return the one greater than 1.
fn normalize_above_one(e: QuadElem) -> QuadElem {
    let inv = e.unit_inverse().expect("unit");
    for cand in [e.clone(), -e, inv.clone(), -inv] {
        if cand.cmp_int(1) == Ordering::Greater {
            return cand;
        }
    }
    unreachable!("a unit different from +-1 has a conjugate above 1")
}

/// `u_D`: the first power of `u_f` with norm `+1`.
pub fn totally_positive_unit(field: QuadField) -> QuadElem {
    let uf = fundamental_unit(field);
    if uf.norm().is_one() {
        uf
    } else {
        &uf * &uf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Smallest unit above 1 among `(x + y sqrt D)/2` with small coordinates.
    fn brute_force_unit(d: u64, limit: i64) -> Option<QuadElem> {
        let field = QuadField::new(d).unwrap();
        let mut best: Option<QuadElem> = None;
        for x in -limit..=limit {
            for y in -limit..=limit {
                let Ok(e) = QuadElem::new(field, x.into(), y.into()) else { continue };
                if !e.is_unit() || e.cmp_int(1) != Ordering::Greater {
                    continue;
                }
                let smaller = match &best {
                    None => true,
                    Some(b) => e.to_f64() < b.to_f64(),
                };
                if smaller {
                    best = Some(e);
                }
            }
        }
        best
    }

    #[test]
    fn matches_brute_force_for_small_radicands() {
        for d in [2u64, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 21, 29] {
            let field = QuadField::new(d).unwrap();
            let expected = brute_force_unit(d, 40).expect("unit within search box");
            assert_eq!(fundamental_unit(field), expected, "D = {d}");
        }
    }

    #[test]
    fn known_units() {
        let k5 = QuadField::new(5).unwrap();
        assert_eq!(fundamental_unit(k5), QuadElem::from_halves(k5, 1, 1));
        let uf = fundamental_unit(k5);
        assert_eq!(&uf * &uf, QuadElem::from_halves(k5, 3, 1));
        assert_eq!(totally_positive_unit(k5), QuadElem::from_halves(k5, 3, 1));

        let k2 = QuadField::new(2).unwrap();
        assert_eq!(fundamental_unit(k2), QuadElem::from_halves(k2, 2, 2));
        assert_eq!(totally_positive_unit(k2), QuadElem::from_halves(k2, 6, 4));

        // norm +1 branch: u_D = u_f
        let k3 = QuadField::new(3).unwrap();
        assert_eq!(totally_positive_unit(k3), fundamental_unit(k3));

        // 29718 + 3805 sqrt 61 is the fundamental unit of Z[sqrt 61]; Z_K has its cube root.
        let k61 = QuadField::new(61).unwrap();
        let u = fundamental_unit(k61);
        assert_eq!(u, QuadElem::from_halves(k61, 39, 5));
        assert_eq!(u.pow(3), QuadElem::from_halves(k61, 2 * 29718, 2 * 3805));
    }

    #[test]
    fn unit_norms_are_exact() {
        for d in (2u64..400).filter(|&d| QuadField::new(d).is_ok()) {
            let field = QuadField::new(d).unwrap();
            let uf = fundamental_unit(field);
            assert!((&uf * &uf.conj()).x().abs() == BigInt::from(2), "D = {d}");
            let ud = totally_positive_unit(field);
            assert!((&ud * &ud.conj()).is_one());
            assert!(ud.is_totally_positive());
        }
    }

    #[test]
    fn period_cap_is_reported() {
        let field = QuadField::new(94).unwrap();
        assert_eq!(try_fundamental_unit(field, 2), Err(Error::PeriodCap(2)));
    }
}
