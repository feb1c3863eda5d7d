//! Displacement operators `D_j = (-zeta_{2d})^{j1 j2} X^{j1} Z^{j2}` on `C^d`.
//!
//! Phases are carried as exact exponents of `zeta_{2d}` and only turned into
//! complex numbers when a matrix or vector is assembled. Indices live in
//! `(Z/d')^2`, where the section is well defined.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::d_prime;
use crate::error::{Error, Result};

/// Largest dimension for which dense identity checks are run.
pub const MATRIX_BOUND: u64 = 48;

/// `exp(2 pi i k / n)` held exactly as a reduced fraction `k/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RootOfUnity {
    pub exponent: u64,
    pub order: u64,
}

impl RootOfUnity {
    pub fn new(exponent: i64, order: u64) -> Self {
        let e = exponent.rem_euclid(order as i64) as u64;
        let g = e.gcd(&order);
        let g = if e == 0 { order } else { g };
        Self { exponent: e / g, order: order / g }
    }

    pub fn one() -> Self {
        Self { exponent: 0, order: 1 }
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order.lcm(&other.order);
        let e = self.exponent * (n / self.order) + other.exponent * (n / other.order);
        Self::new(e as i64, n)
    }

    pub fn inv(&self) -> Self {
        Self::new(-(self.exponent as i64), self.order)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.exponent as f64 / self.order as f64)
    }
}

/// `j = (j1, j2)` in `(Z/d')^2` for dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DisplacementIndex {
    pub j1: u64,
    pub j2: u64,
    pub d: u64,
}

impl DisplacementIndex {
    pub fn new(d: u64, j1: i64, j2: i64) -> Self {
        let m = d_prime(d) as i64;
        Self { j1: j1.rem_euclid(m) as u64, j2: j2.rem_euclid(m) as u64, d }
    }

    pub fn zero(d: u64) -> Self {
        Self { j1: 0, j2: 0, d }
    }

    pub fn d_prime(&self) -> u64 {
        d_prime(self.d)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d);
        Self::new(self.d, (self.j1 + other.j1) as i64, (self.j2 + other.j2) as i64)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.d, -(self.j1 as i64), -(self.j2 as i64))
    }

    /// Whether `j = 0 mod d` (the trivial overlap class).
    pub fn is_zero_mod_d(&self) -> bool {
        self.j1.is_multiple_of(self.d) && self.j2.is_multiple_of(self.d)
    }

    /// All of `(Z/d')^2`, row-major.
    pub fn all(d: u64) -> impl Iterator<Item = Self> {
        let m = d_prime(d);
        (0..m).flat_map(move |a| (0..m).map(move |b| Self { j1: a, j2: b, d }))
    }

    /// Representatives of `(Z/d)^2`.
    pub fn all_mod_d(d: u64) -> impl Iterator<Item = Self> {
        (0..d).flat_map(move |a| (0..d).map(move |b| Self { j1: a, j2: b, d }))
    }

    /// Row-major position in `(Z/d')^2`.
    pub fn flat(&self) -> usize {
        (self.j1 * self.d_prime() + self.j2) as usize
    }
}

/// A dense `d x d` complex matrix expected to be unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(pub DMatrix<Complex64>);

impl UnitaryMatrix {
    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.0.adjoint() * &self.0;
        max_abs_diff(&p, &DMatrix::identity(self.dim(), self.dim()))
    }

    /// `Tr(A^dagger B)`.
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|k| self.0[(i, k)] * v[k]).sum()).collect()
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Table of `zeta_{2d}^k` for `k in 0..2d`.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    two_d: u64,
    table: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(d: u64) -> Self {
        let two_d = 2 * d;
        let table = (0..two_d)
            .map(|k| Complex64::from_polar(1.0, PI * k as f64 / d as f64))
            .collect();
        Self { two_d, table }
    }

    #[inline]
    pub fn get(&self, k: u64) -> Complex64 {
        self.table[(k % self.two_d) as usize]
    }
}

/// Exponent of `zeta_{2d}` for entry `(m, (m - j1) mod d)` of `D_j`.
#[inline]
pub(crate) fn entry_exponent(d: u64, j1: u64, j2: u64, m: u64) -> (usize, u64) {
    let k = (m + d - j1 % d) % d;
    // (-zeta_{2d})^{j1 j2} = zeta_{2d}^{(d+1) j1 j2}; Z^{j2} e_k = zeta_d^{j2 k} e_k
    let two_d = 2 * d;
    let e = ((d + 1) % two_d * (j1 * j2 % two_d) + 2 * (j2 % d) * k) % two_d;
    (k as usize, e)
}

/// `D_j v` without forming the matrix.
pub fn apply_displacement(j: &DisplacementIndex, v: &[Complex64], phases: &PhaseTable) -> Vec<Complex64> {
    let d = j.d;
    (0..d)
        .map(|m| {
            let (k, e) = entry_exponent(d, j.j1, j.j2, m);
            phases.get(e) * v[k]
        })
        .collect()
}

/// The dense unitary `D_j`.
pub fn displacement(j: &DisplacementIndex) -> UnitaryMatrix {
    let d = j.d;
    let phases = PhaseTable::new(d);
    let mut m = DMatrix::zeros(d as usize, d as usize);
    for row in 0..d {
        let (k, e) = entry_exponent(d, j.j1, j.j2, row);
        m[(row as usize, k)] = phases.get(e);
    }
    UnitaryMatrix(m)
}

/// Exponent `e = j2 k1 - j1 k2 mod 2d` with `c_{j,k} = (-zeta_{2d})^e`.
pub fn cocycle_exponent(j: &DisplacementIndex, k: &DisplacementIndex) -> u64 {
    assert_eq!(j.d, k.d);
    let two_d = 2 * j.d as i128;
    let e = j.j2 as i128 * k.j1 as i128 - j.j1 as i128 * k.j2 as i128;
    e.rem_euclid(two_d) as u64
}

/// `c_{j,k}` as an exact root of unity.
pub fn cocycle(j: &DisplacementIndex, k: &DisplacementIndex) -> RootOfUnity {
    let d = j.d;
    let e = cocycle_exponent(j, k);
    RootOfUnity::new(((d + 1) * e % (2 * d)) as i64, 2 * d)
}

/// Exponent `k1 j2 - k2 j1 mod d` with `e_{j,k} = zeta_d^exponent`.
pub fn pairing_exponent(j: &DisplacementIndex, k: &DisplacementIndex) -> u64 {
    assert_eq!(j.d, k.d);
    let d = j.d as i128;
    let e = k.j1 as i128 * j.j2 as i128 - k.j2 as i128 * j.j1 as i128;
    e.rem_euclid(d) as u64
}

pub fn pairing(j: &DisplacementIndex, k: &DisplacementIndex) -> RootOfUnity {
    RootOfUnity::new(pairing_exponent(j, k) as i64, j.d)
}

/// Whether `k -> e_{j,k}` is trivial, which happens only for `j = 0 mod d`.
pub fn pairing_is_trivial_for(j: &DisplacementIndex) -> bool {
    DisplacementIndex::all_mod_d(j.d).all(|k| pairing_exponent(j, &k) == 0)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub d: u64,
    pub pairs_checked: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub worst_pair: Option<(DisplacementIndex, DisplacementIndex)>,
    /// Largest unitarity defect over all `D_j`.
    pub max_unitarity_defect: f64,
    /// Largest deviation in `D_{j + (d, 0)} = (-1)^{(d+1) j2} D_j` and the
    /// analogous shift in the second coordinate.
    pub periodicity_deviation: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
            && self.max_unitarity_defect <= self.tolerance
            && self.periodicity_deviation <= self.tolerance
    }
}

pub fn default_tolerance(d: u64) -> f64 {
    1e-12 * (d.max(1) as f64)
}

/// Exhaustive check of `D_j D_k = c_{j,k} D_{j+k}` over `(Z/d')^4`.
pub fn check_heisenberg(d: u64) -> Result<IdentityReport> {
    if d == 0 || d > MATRIX_BOUND {
        return Err(Error::InvalidArgument(format!("dimension must be in 1..={MATRIX_BOUND}, got {d}")));
    }
    let tol = default_tolerance(d);
    let all: Vec<DisplacementIndex> = DisplacementIndex::all(d).collect();
    let mats: Vec<UnitaryMatrix> = all.iter().map(displacement).collect();

    let max_unitarity_defect = mats.iter().map(|m| m.unitarity_defect()).fold(0.0, f64::max);

    let dd = d as i64;
    let mut periodicity_deviation: f64 = 0.0;
    for j in &all {
        let shifted1 = displacement(&DisplacementIndex::new(d, j.j1 as i64 + dd, j.j2 as i64));
        let shifted2 = displacement(&DisplacementIndex::new(d, j.j1 as i64, j.j2 as i64 + dd));
        let s1 = if ((d + 1) * j.j2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let s2 = if ((d + 1) * j.j1).is_multiple_of(2) { 1.0 } else { -1.0 };
        let base = &mats[j.flat()].0;
        periodicity_deviation = periodicity_deviation
            .max(max_abs_diff(&shifted1.0, &base.map(|z| z * s1)))
            .max(max_abs_diff(&shifted2.0, &base.map(|z| z * s2)));
    }

    let (max_dev, worst) = all
        .par_iter()
        .map(|j| {
            let mut best = (0.0f64, None);
            for k in &all {
                let lhs = &mats[j.flat()].0 * &mats[k.flat()].0;
                let c = cocycle(j, k).to_complex();
                let rhs = mats[j.add(k).flat()].0.map(|z| z * c);
                let dev = max_abs_diff(&lhs, &rhs);
                if dev > best.0 || best.1.is_none() {
                    best = (dev, Some((*j, *k)));
                }
            }
            best
        })
        .reduce(|| (0.0, None), |a, b| if b.0 > a.0 || a.1.is_none() { b } else { a });

    Ok(IdentityReport {
        d,
        pairs_checked: all.len() * all.len(),
        max_deviation: max_dev,
        tolerance: tol,
        worst_pair: if max_dev > tol { worst } else { None },
        max_unitarity_defect,
        periodicity_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_index_is_identity() {
        for d in 1..8 {
            assert_eq!(displacement(&DisplacementIndex::zero(d)), UnitaryMatrix::identity(d as usize));
        }
    }

    #[test]
    fn qubit_y_like_operator() {
        // (-zeta_4) X Z = -i [[0, -1], [1, 0]] = [[0, i], [-i, 0]]
        let m = displacement(&DisplacementIndex::new(2, 1, 1));
        let expected = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
        assert!(max_abs_diff(&m.0, &expected) < 1e-15);
    }

    #[test]
    fn cocycle_examples() {
        for d in [3u64, 4, 5, 6] {
            let j = DisplacementIndex::new(d, 1, 0);
            let k = DisplacementIndex::new(d, 0, 1);
            assert_eq!(cocycle_exponent(&j, &k), 2 * d - 1);
            assert_eq!(cocycle_exponent(&j, &j), 0);
            assert!(cocycle(&k, &k).is_one());
            assert_eq!(pairing(&j, &k), RootOfUnity::new(-1, d));
        }
    }

    #[test]
    fn cocycle_identity_in_exponents() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for d in [5u64, 6] {
            let m = d_prime(d) as i64;
            for _ in 0..1000 {
                let mut idx = || DisplacementIndex::new(d, rng.gen_range(0..m), rng.gen_range(0..m));
                let (j, k, l) = (idx(), idx(), idx());
                let lhs = (cocycle_exponent(&k, &l) + cocycle_exponent(&j, &k.add(&l))) % (2 * d);
                let rhs = (cocycle_exponent(&j.add(&k), &l) + cocycle_exponent(&j, &k)) % (2 * d);
                // (-zeta_{2d}) has order d', so compare exponents mod d'
                assert_eq!(lhs % d_prime(d), rhs % d_prime(d));
                assert_eq!(cocycle(&k, &l).mul(&cocycle(&j, &k.add(&l))), cocycle(&j.add(&k), &l).mul(&cocycle(&j, &k)));
            }
        }
    }

    #[test]
    fn pairing_is_commutator_and_nondegenerate() {
        for d in 2..=12u64 {
            for j in DisplacementIndex::all_mod_d(d) {
                assert!(pairing(&j, &j).is_one());
                assert_eq!(pairing_is_trivial_for(&j), j.is_zero_mod_d());
            }
        }
        for d in [3u64, 4, 7, 12] {
            let all: Vec<_> = DisplacementIndex::all(d).step_by(5).collect();
            for j in &all {
                for k in &all {
                    let (dj, dk) = (displacement(j), displacement(k));
                    let comm = dj.mul(&dk).mul(&dj.adjoint()).mul(&dk.adjoint());
                    let e = pairing(j, k).to_complex();
                    let expected = DMatrix::identity(d as usize, d as usize).map(|z: Complex64| z * e);
                    assert!(max_abs_diff(&comm.0, &expected) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn heisenberg_small() {
        let r = check_heisenberg(1).unwrap();
        assert!(r.passed());
        for d in [3u64, 4] {
            let r = check_heisenberg(d).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.max_deviation < 1e-13);
            assert_eq!(r.pairs_checked, (d_prime(d) as usize).pow(4));
        }
        assert!(check_heisenberg(49).is_err());
    }

    #[test]
    fn matrix_free_application_matches_dense() {
        let d = 6;
        let phases = PhaseTable::new(d);
        let v: Vec<Complex64> = (0..d).map(|i| c(i as f64 + 0.5, 1.0 - i as f64)).collect();
        for j in DisplacementIndex::all(d) {
            let dense = displacement(&j).apply(&v);
            let fast = apply_displacement(&j, &v, &phases);
            for (a, b) in dense.iter().zip(&fast) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn trace_orthogonality() {
        for d in [3u64, 4, 5] {
            let all: Vec<_> = DisplacementIndex::all_mod_d(d).collect();
            for j in &all {
                for k in &all {
                    let t = displacement(j).hs_inner(&displacement(k));
                    if j == k {
                        assert!((t.norm() - d as f64).abs() < 1e-12);
                    } else {
                        assert!(t.norm() < 1e-12);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_is_negated_index(d in 1u64..=12, a in 0i64..24, b in 0i64..24) {
            let j = DisplacementIndex::new(d, a, b);
            let dj = displacement(&j);
            let prod = dj.mul(&displacement(&j.neg()));
            prop_assert!(max_abs_diff(&prod.0, &DMatrix::identity(d as usize, d as usize)) < 1e-12);
            prop_assert!(dj.unitarity_defect() < 1e-12);
        }
    }
}
