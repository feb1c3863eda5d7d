//! Dimension towers `d_r = 1 + u_D^r + u_D^{-r}` and their divisibility laws.
//!
//! A dimension `d >= 4` belongs to the field `Q(sqrt D)` where `D` is the
//! square-free part of `(d-1)^2 - 4`. All `d` sharing a `D` are the traces
//! (plus one) of the powers of the totally positive unit `u_D`, and the
//! shifted Chebyshev polynomials `T*_n(x) = 1 + 2 T_n((x-1)/2)` carry `d_r`
//! to `d_{nr}`.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::{multiplicative_order, totally_positive_unit, QuadElem, QuadField};

/// Default factorization bound: cofactors below this are known to be prime
/// once trial division reaches its square root.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000_000_000;

/// Square-free part of `m` by trial division.
pub fn squarefree_core(m: &BigUint) -> Result<BigUint> {
    squarefree_core_with_bound(m, DEFAULT_FACTOR_BOUND)
}

pub fn squarefree_core_with_bound(m: &BigUint, bound: u64) -> Result<BigUint> {
    if m.is_zero() {
        return Err(Error::InvalidArgument("square-free core of 0".into()));
    }
    let limit = bound.sqrt();
    let mut rest = m.clone();
    let mut core = BigUint::one();
    let mut p: u64 = 2;
    while p <= limit {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut k = 0;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            k += 1;
        }
        if k % 2 == 1 {
            core *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_one() {
        return Ok(core);
    }
    let p = BigUint::from(p);
    if &p * &p > rest || rest < BigUint::from(bound) {
        // no factor up to sqrt(rest) (or below sqrt(bound) with rest < bound): rest is prime
        return Ok(core * rest);
    }
    let r = rest.sqrt();
    if &r * &r == rest && r < BigUint::from(bound) {
        // p^2 with p prime above the trial limit
        return Ok(core);
    }
    Err(Error::FactorizationBound { value: m.to_string(), bound })
}

/// The radicand `D` attached to a dimension `d >= 4`.
pub fn radicand_for_dim(d: &BigUint) -> Result<u64> {
    if d < &BigUint::from(4u32) {
        return Err(Error::InvalidArgument(format!("dimension must be >= 4, got {d}")));
    }
    let m = (d - 1u32) * (d - 1u32) - 4u32;
    squarefree_core(&m)?
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("radicand does not fit in 64 bits".into()))
}

/// The dimensions `d_1 < d_2 < ... < d_max_r` attached to `D`.
#[derive(Debug, Clone, Serialize)]
pub struct DimTower {
    radicand: u64,
    #[serde(skip)]
    unit: QuadElem,
    #[serde(serialize_with = "ser_bigints")]
    dims: Vec<BigInt>,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl DimTower {
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    /// `u_D`.
    pub fn unit(&self) -> &QuadElem {
        &self.unit
    }

    /// `d_1, ..., d_max_r`.
    pub fn dims(&self) -> &[BigInt] {
        &self.dims
    }

    pub fn max_r(&self) -> usize {
        self.dims.len()
    }

    /// `d_r` for `1 <= r <= max_r`; `None` for `r = 0`.
    pub fn get(&self, r: usize) -> Option<&BigInt> {
        if r == 0 {
            None
        } else {
            self.dims.get(r - 1)
        }
    }

    /// Index `r` with `d_r = d`, if present.
    pub fn index_of(&self, d: &BigInt) -> Option<usize> {
        self.dims.iter().position(|x| x == d).map(|i| i + 1)
    }
}

/// Values of `(d-1)^2 - 4` below this are also round-tripped through
/// [`squarefree_core`]; above it the Pell identity alone is checked.
const ROUND_TRIP_FACTOR_LIMIT: u64 = 1 << 40;

/// Exact `d_r` for `r = 1..=max_r` by powering `u_D`.
pub fn dims_for_radicand(radicand: u64, max_r: usize) -> Result<DimTower> {
    if max_r == 0 {
        return Err(Error::InvalidArgument("max_r must be >= 1".into()));
    }
    let field = QuadField::new(radicand)?;
    let unit = totally_positive_unit(field);
    let mut dims = Vec::with_capacity(max_r);
    let mut power = unit.clone();
    let dd = BigInt::from(radicand);
    for r in 1..=max_r {
        // u_D^r = (x + y sqrt D)/2 has norm 1, so d_r = 1 + x and x^2 - 4 = D y^2
        let x = power.x();
        let y = power.y();
        let d = x + 1;
        assert_eq!(x * x - 4, &dd * y * y, "unit power left the Pell conic");
        assert!(d >= BigInt::from(4), "d_{r} < 4");
        if let Some(prev) = dims.last() {
            assert!(&d > prev, "tower not increasing at r = {r}");
        }
        let m: BigInt = x * x - 4;
        if m < BigInt::from(ROUND_TRIP_FACTOR_LIMIT) {
            let m = m.to_biguint().expect("positive");
            assert_eq!(squarefree_core(&m)?, BigUint::from(radicand), "round trip failed at r = {r}");
        }
        dims.push(d);
        power = &power * &unit;
    }
    Ok(DimTower { radicand, unit, dims })
}

/// `T*_n(x) = 1 + 2 T_n((x-1)/2)`, with `T*_{-n} = T*_n`.
pub fn shifted_chebyshev(n: i64, x: &BigInt) -> BigInt {
    let n = n.unsigned_abs();
    if n == 0 {
        return BigInt::from(3);
    }
    // (T*_{k-2}, T*_{k-1}, T*_k) starting at k = 1 with T*_{-1} = x
    let mut a = x.clone();
    let mut b = BigInt::from(3);
    let mut c = x.clone();
    for _ in 1..n {
        let next = x * &c - x * &b + &a;
        a = b;
        b = c;
        c = next;
    }
    c
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CongruenceFailure {
    pub law: String,
    pub n: usize,
    pub r: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceReport {
    pub radicand: u64,
    pub max_n: usize,
    pub max_r: usize,
    pub checks: usize,
    pub failures: Vec<CongruenceFailure>,
}

impl CongruenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the mod-3 divisibility cases, the `n -> n-3` reduction and the
/// Chebyshev composition law on a tower.
pub fn verify_congruences(radicand: u64, max_n: usize, max_r: usize) -> Result<CongruenceReport> {
    if max_n == 0 || max_r == 0 {
        return Err(Error::InvalidArgument("max_n and max_r must be >= 1".into()));
    }
    let tower = dims_for_radicand(radicand, max_n * max_r)?;
    let d_at = |k: usize| -> BigInt {
        if k == 0 {
            BigInt::from(3)
        } else {
            tower.get(k).unwrap().clone()
        }
    };
    let d1 = d_at(1);
    let mut checks = 0;
    let mut failures = Vec::new();
    let mut fail = |law: &str, n: usize, r: usize| failures.push(CongruenceFailure { law: law.into(), n, r });

    for r in 1..=max_r {
        let dr = d_at(r);
        for n in 1..=max_n {
            let dnr = d_at(n * r);
            checks += 1;
            if n % 3 == 0 {
                if !(&dnr - 3u32).is_multiple_of(&dr) {
                    fail("C0: d_r | d_nr - 3", n, r);
                }
            } else if !dnr.is_multiple_of(&dr) {
                fail(if n % 3 == 1 { "C1: d_r | d_nr" } else { "C2: d_r | d_nr" }, n, r);
            }
            if n >= 3 {
                checks += 1;
                if !(&dnr - d_at((n - 3) * r)).is_multiple_of(&dr) {
                    fail("reduction: d_nr = d_(n-3)r mod d_r", n, r);
                }
            }
            checks += 1;
            let rs = shifted_chebyshev(n as i64, &shifted_chebyshev(r as i64, &d1));
            let sr = shifted_chebyshev(r as i64, &shifted_chebyshev(n as i64, &d1));
            if rs != dnr || sr != dnr || shifted_chebyshev(n as i64, &dr) != dnr {
                fail("composition: T*_n(T*_r(d_1)) = d_nr = T*_r(T*_n(d_1))", n, r);
            }
        }
    }
    Ok(CongruenceReport { radicand, max_n, max_r, checks, failures })
}

/// `(d_{i_1}, d_{i_2}, ...)` for indices coprime to 3, each dividing the next.
pub fn tower_chain(radicand: u64, indices: &[usize]) -> Result<Vec<BigInt>> {
    if indices.is_empty() {
        return Err(Error::InvalidArgument("empty index list".into()));
    }
    for w in indices.windows(2) {
        if w[1] <= w[0] || w[1] % w[0] != 0 {
            return Err(Error::InvalidArgument(format!(
                "indices must increase with each dividing the next: {} then {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&i) = indices.iter().find(|&&i| i == 0 || i % 3 == 0) {
        return Err(Error::InvalidArgument(format!("index {i} is not a positive integer coprime to 3")));
    }
    let tower = dims_for_radicand(radicand, *indices.last().unwrap())?;
    let chain: Vec<BigInt> = indices.iter().map(|&i| tower.get(i).unwrap().clone()).collect();
    for w in chain.windows(2) {
        assert!(w[1].is_multiple_of(&w[0]), "divisibility chain broken: {} does not divide {}", w[0], w[1]);
    }
    Ok(chain)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct UnitOrderEntry {
    pub r: usize,
    pub d_r: u64,
    pub modulus: u64,
    pub order: u64,
    pub predicted: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub radicand: u64,
    pub entries: Vec<UnitOrderEntry>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.order == e.predicted)
    }

    pub fn mismatches(&self) -> Vec<&UnitOrderEntry> {
        self.entries.iter().filter(|e| e.order != e.predicted).collect()
    }
}

/// Order of `u_D` modulo `d_r'` against the closed form `3r d_r'/d_r`.
pub fn unit_order_law(radicand: u64, max_r: usize) -> Result<LawReport> {
    let tower = dims_for_radicand(radicand, max_r)?;
    let mut entries = Vec::with_capacity(max_r);
    for r in 1..=max_r {
        let d_r = tower.get(r).unwrap().to_u64().filter(|&d| d < 1 << 62).ok_or_else(|| {
            Error::InvalidArgument(format!("d_{r} too large for residue arithmetic"))
        })?;
        let modulus = crate::d_prime(d_r);
        let order = multiplicative_order(tower.unit(), modulus)?;
        let predicted = 3 * r as u64 * (modulus / d_r);
        entries.push(UnitOrderEntry { r, d_r, modulus, order, predicted });
    }
    Ok(LawReport { radicand, entries })
}

/// Largest `r` with `d_r' <= bound`.
pub fn max_r_with_modulus_below(radicand: u64, bound: u64) -> Result<usize> {
    let field = QuadField::new(radicand)?;
    let unit = totally_positive_unit(field);
    let mut power = unit.clone();
    let mut r = 0;
    loop {
        let d: BigInt = power.x() + 1;
        let dp = if d.is_even() { &d * 2 } else { d };
        if dp > BigInt::from(bound) {
            return Ok(r);
        }
        r += 1;
        power = &power * &unit;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn core_examples() {
        assert_eq!(squarefree_core(&320u32.into()).unwrap(), 5u32.into());
        assert_eq!(squarefree_core(&5u32.into()).unwrap(), 5u32.into());
        assert_eq!(squarefree_core(&12u32.into()).unwrap(), 3u32.into());
        assert_eq!(squarefree_core(&1u32.into()).unwrap(), 1u32.into());
        // 2205 = 21^2 * 5
        assert_eq!(squarefree_core(&2205u32.into()).unwrap(), 5u32.into());
    }

    #[test]
    fn core_large_prime_cofactors() {
        // 1000003 is prime; its square has core 1, times 7 has core 7
        let p = BigUint::from(1_000_003u64);
        assert_eq!(squarefree_core(&(&p * &p)).unwrap(), 1u32.into());
        assert_eq!(squarefree_core(&(&p * 7u32)).unwrap(), &p * 7u32);
        // product of two primes above the trial limit cannot be certified
        let q = BigUint::from(1_000_033u64);
        let r = BigUint::from(1_000_037u64);
        assert!(matches!(
            squarefree_core_with_bound(&(&q * &r * &r), 1_000_000_000_000),
            Err(Error::FactorizationBound { .. })
        ));
    }

    #[test]
    fn dims_examples() {
        let t = dims_for_radicand(5, 4).unwrap();
        assert_eq!(t.dims(), &[big(4), big(8), big(19), big(48)]);
        assert_eq!(dims_for_radicand(2, 1).unwrap().dims(), &[big(7)]);
        assert_eq!(radicand_for_dim(&19u32.into()).unwrap(), 5);
        assert_eq!(radicand_for_dim(&4u32.into()).unwrap(), 5);
        assert_eq!(radicand_for_dim(&5u32.into()).unwrap(), 3);
        assert!(radicand_for_dim(&3u32.into()).is_err());
    }

    #[test]
    fn every_dimension_lands_in_its_tower() {
        for d in 4u64..=500 {
            let rad = radicand_for_dim(&d.into()).unwrap();
            let field = QuadField::new(rad).unwrap();
            let r = max_r_with_modulus_below(rad, 2 * d).unwrap();
            assert!(r >= 1);
            let t = dims_for_radicand(field.radicand(), r).unwrap();
            assert!(t.index_of(&BigInt::from(d)).is_some(), "d = {d}, D = {rad}");
        }
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(shifted_chebyshev(3, &big(4)), big(19));
        assert_eq!(shifted_chebyshev(0, &big(12345)), big(3));
        assert_eq!(shifted_chebyshev(-1, &big(9)), big(9));
        for x in -5..20 {
            assert_eq!(shifted_chebyshev(2, &big(x)), big(x * (x - 2)));
            assert_eq!(shifted_chebyshev(3, &big(x)), big(x * x * (x - 3) + 3));
            assert_eq!(shifted_chebyshev(-4, &big(x)), shifted_chebyshev(4, &big(x)));
        }
    }

    /// Direct definition through the ordinary Chebyshev recursion.
    fn chebyshev_by_definition(n: u32, x: i64) -> BigInt {
        // S_k = 2 T_k(y/2) with y = x - 1: S_0 = 2, S_1 = y, S_k = y S_{k-1} - S_{k-2}
        let y = big(x - 1);
        let (mut a, mut b) = (big(2), y.clone());
        if n == 0 {
            return 1 + a;
        }
        for _ in 1..n {
            let c = &y * &b - &a;
            a = b;
            b = c;
        }
        1 + b
    }

    #[test]
    fn recursion_matches_definition() {
        for n in 0..12u32 {
            for x in -10..30 {
                assert_eq!(shifted_chebyshev(n as i64, &big(x)), chebyshev_by_definition(n, x), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn congruence_examples() {
        let rep = verify_congruences(5, 4, 2).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let t = dims_for_radicand(5, 4).unwrap();
        assert_eq!(t.get(3).unwrap() % 4, big(3));
        assert!(t.get(4).unwrap().is_multiple_of(&big(4)));
        assert!(t.get(2).unwrap().is_multiple_of(&big(4)));
    }

    #[test]
    fn chain_examples() {
        assert_eq!(tower_chain(5, &[1, 2, 4]).unwrap(), vec![big(4), big(8), big(48)]);
        assert_eq!(tower_chain(5, &[1]).unwrap(), vec![big(4)]);
        assert!(tower_chain(5, &[1, 3]).is_err());
        assert!(tower_chain(5, &[2, 5]).is_err());
        assert!(tower_chain(5, &[2, 2]).is_err());
        let chain = tower_chain(13, &[1, 2, 4, 8, 16]).unwrap();
        assert_eq!(chain.len(), 5);
    }

    #[test]
    fn unit_order_examples() {
        let rep = unit_order_law(5, 3).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.entries[0].modulus, 8);
        assert_eq!(rep.entries[0].order, 6);
        assert_eq!(rep.entries[2].modulus, 19);
        assert_eq!(rep.entries[2].order, 9);
        let rep = unit_order_law(2, 1).unwrap();
        assert_eq!(rep.entries[0].order, 3);
    }

    #[test]
    fn tower_properties() {
        for rad in [2u64, 3, 5, 6, 7, 13, 21, 94] {
            let t = dims_for_radicand(rad, 12).unwrap();
            for r in 1..12 {
                assert!(t.get(r + 1).unwrap() > t.get(r).unwrap());
                let dr = t.get(r).unwrap();
                if dr.is_even() && 2 * r <= 12 {
                    assert!(t.get(2 * r).unwrap().is_multiple_of(&(dr * 2)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn chebyshev_composition(r in 0i64..=6, s in 0i64..=6, x in 0i64..=1_000_000) {
            let x = big(x);
            prop_assert_eq!(shifted_chebyshev(r, &shifted_chebyshev(s, &x)), shifted_chebyshev(r * s, &x));
        }
    }
}
