//! Wide class number via reduced ideals.
//!
//! A primitive ideal is written `[a, (b + sqrt disc)/2]` with `4a | b^2 - disc`.
//! Every class has a representative of norm at most the Minkowski bound
//! `sqrt(disc)/2`; two ideals are equivalent exactly when their reduction
//! cycles coincide, so the class number is the number of distinct cycles
//! reached from the ideals below that bound.

use std::collections::BTreeSet;

use num_integer::Roots;

use super::QuadField;
use crate::error::{Error, Result};

pub const DEFAULT_CLASS_NUMBER_BOUND: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Ideal {
    a: i64,
    b: i64,
}

struct Reducer {
    disc: i64,
    isqrt: i64,
}

impl Reducer {
    fn new(disc: i64) -> Self {
        Self { disc, isqrt: (disc as u64).sqrt() as i64 }
    }

    fn is_reduced(&self, i: Ideal) -> bool {
        let s = self.isqrt;
        i.b > 0 && i.b <= s && s < 2 * i.a + i.b && 2 * i.a - i.b <= s
    }

    /// One reduction step `[a, (b + sqrt disc)/2] -> [|c|, (b' + sqrt disc)/2]`.
    fn rho(&self, i: Ideal) -> Ideal {
        let c = (i.b * i.b - self.disc) / (4 * i.a);
        let a = c.abs();
        let m = 2 * a;
        let target = -i.b;
        let b = if a <= self.isqrt {
            // largest b' <= isqrt with b' = -b mod 2a'
            self.isqrt - (self.isqrt - target).rem_euclid(m)
        } else {
            // -a' < b' <= a'
            a - (a - target).rem_euclid(m)
        };
        Ideal { a, b }
    }

    fn reduce(&self, mut i: Ideal) -> Ideal {
        let mut steps = 0;
        while !self.is_reduced(i) {
            i = self.rho(i);
            steps += 1;
            assert!(steps < 10_000, "ideal reduction did not terminate");
        }
        i
    }

    fn cycle(&self, start: Ideal) -> Vec<Ideal> {
        let mut out = vec![start];
        let mut cur = self.rho(start);
        while cur != start {
            debug_assert!(self.is_reduced(cur));
            out.push(cur);
            cur = self.rho(cur);
        }
        out
    }
}

/// Wide class number `h_K` for `D` up to [`DEFAULT_CLASS_NUMBER_BOUND`].
pub fn class_number(field: QuadField) -> Result<u64> {
    class_number_with_bound(field, DEFAULT_CLASS_NUMBER_BOUND)
}

pub fn class_number_with_bound(field: QuadField, bound: u64) -> Result<u64> {
    if field.radicand() > bound {
        return Err(Error::ClassNumberBound { radicand: field.radicand(), bound });
    }
    let disc = field.discriminant() as i64;
    let red = Reducer::new(disc);
    let mut seen: BTreeSet<Ideal> = BTreeSet::new();
    let mut classes = 0;
    // norms up to the Minkowski bound: 4a^2 <= disc
    for a in (1..).take_while(|a| 4 * a * a <= disc) {
        for b in 0..2 * a {
            if (b - disc).rem_euclid(2) != 0 || (b * b - disc).rem_euclid(4 * a) != 0 {
                continue;
            }
            let r = red.reduce(Ideal { a, b });
            if seen.contains(&r) {
                continue;
            }
            classes += 1;
            seen.extend(red.cycle(r));
        }
    }
    Ok(classes)
}
