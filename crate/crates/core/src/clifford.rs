//! Symplectic matrices over `Z/d'`, the order-3 elements `F_z` and `F_a`, and
//! metaplectic unitaries with `U_F D_j U_F^dagger = D_{Fj}` up to phase.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::d_prime;
use crate::error::{Error, Result};
use crate::weyl::{displacement, max_abs_diff, DisplacementIndex, UnitaryMatrix, MATRIX_BOUND};

/// `(a b; c e)` over `Z/modulus` with determinant `+-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SymplecticMat {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub e: u64,
    pub modulus: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZaunerKind {
    Fz,
    Fa,
}

impl std::fmt::Display for ZaunerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ZaunerKind::Fz => "Fz",
            ZaunerKind::Fa => "Fa",
        })
    }
}

fn modp(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

fn inverse_mod(x: u64, m: u64) -> Option<u64> {
    let g = (x as i64).extended_gcd(&(m as i64));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i64) as u64)
}

impl SymplecticMat {
    pub fn new(a: i64, b: i64, c: i64, e: i64, modulus: u64) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        let m = Self::new_unchecked(a, b, c, e, modulus);
        let det = m.det();
        if det != 1 % modulus && det != modulus - 1 {
            return Err(Error::InvalidArgument(format!("determinant {det} is not +-1 mod {modulus}")));
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(a: i64, b: i64, c: i64, e: i64, modulus: u64) -> Self {
        let r = |x: i64| modp(x as i128, modulus);
        Self { a: r(a), b: r(b), c: r(c), e: r(e), modulus }
    }

    pub fn identity(modulus: u64) -> Self {
        Self::new_unchecked(1, 0, 0, 1, modulus)
    }

    /// `(1 0; 0 -1)`, the image of complex conjugation.
    pub fn conjugation(modulus: u64) -> Self {
        Self::new_unchecked(1, 0, 0, -1, modulus)
    }

    pub fn det(&self) -> u64 {
        modp(self.a as i128 * self.e as i128 - self.b as i128 * self.c as i128, self.modulus)
    }

    pub fn trace(&self) -> u64 {
        (self.a + self.e) % self.modulus
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.modulus, o.modulus);
        let m = self.modulus;
        let f = |x: u64, y: u64, z: u64, w: u64| modp(x as i128 * y as i128 + z as i128 * w as i128, m);
        Self {
            a: f(self.a, o.a, self.b, o.c),
            b: f(self.a, o.b, self.b, o.e),
            c: f(self.c, o.a, self.e, o.c),
            e: f(self.c, o.b, self.e, o.e),
            modulus: m,
        }
    }

    pub fn pow(&self, mut t: u64) -> Self {
        let mut acc = Self::identity(self.modulus);
        let mut base = *self;
        while t > 0 {
            if t & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            t >>= 1;
        }
        acc
    }

    /// Inverse of a determinant `+-1` matrix.
    pub fn inverse(&self) -> Self {
        let det_inv = inverse_mod(self.det(), self.modulus).expect("determinant is a unit");
        let s = det_inv as i64;
        Self::new_unchecked(
            s * self.e as i64,
            -s * self.b as i64,
            -s * self.c as i64,
            s * self.a as i64,
            self.modulus,
        )
    }

    /// Reduction to a divisor of the modulus.
    pub fn reduce(&self, m: u64) -> Self {
        assert_eq!(self.modulus % m, 0);
        Self { a: self.a % m, b: self.b % m, c: self.c % m, e: self.e % m, modulus: m }
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.e
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.a == 1 % self.modulus
    }

    /// `F j` for a displacement index of dimension `d` with `d' = modulus`.
    pub fn apply(&self, j: &DisplacementIndex) -> DisplacementIndex {
        assert_eq!(j.d_prime(), self.modulus);
        let m = self.modulus as i128;
        let (j1, j2) = (j.j1 as i128, j.j2 as i128);
        let k1 = (self.a as i128 * j1 + self.b as i128 * j2).rem_euclid(m);
        let k2 = (self.c as i128 * j1 + self.e as i128 * j2).rem_euclid(m);
        DisplacementIndex::new(j.d, k1 as i64, k2 as i64)
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.e]
    }
}

/// `F_z = (0, d-1; d+1, d-1)` or `F_a = (1, d+3; 4d/3-1, d-2)`, reduced mod `d'`.
pub fn zauner_matrix(d: u64, kind: ZaunerKind) -> Result<SymplecticMat> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 2, got {d}")));
    }
    let dp = d_prime(d);
    let di = d as i64;
    let f = match kind {
        ZaunerKind::Fz => SymplecticMat::new(0, di - 1, di + 1, di - 1, dp)?,
        ZaunerKind::Fa => {
            if d % 9 != 3 {
                return Err(Error::InvalidArgument(format!("Fa requires d = 3 mod 9, got {d}")));
            }
            SymplecticMat::new(1, di + 3, 4 * di / 3 - 1, di - 2, dp)?
        }
    };
    assert_eq!(f.det(), 1 % dp);
    assert_eq!(f.trace() % d, d - 1, "trace must be -1 mod d");
    Ok(f)
}

/// `(order of F mod d, smallest t with F^t scalar mod d')`.
pub fn sym_order(f: &SymplecticMat, d: u64) -> (u64, u64) {
    let fd = f.reduce(d);
    let bound = 6 * f.modulus * f.modulus;
    let mut t = 1;
    let mut acc = fd;
    while !acc.is_identity() {
        acc = acc.mul(&fd);
        t += 1;
        assert!(t <= bound, "no finite order found");
    }
    let mut s = 1;
    let mut acc = *f;
    while !acc.is_scalar() {
        acc = acc.mul(f);
        s += 1;
        assert!(s <= bound, "no finite projective order found");
    }
    (t, s)
}

/// `d x d` unitary for `F` whose upper-right entry is a unit mod `d'`:
/// `U_{rs} = tau^{b^{-1}(a s^2 - 2 r s + e r^2)} / sqrt(d)`, `tau = -zeta_{2d}`.
fn gauss_sum_unitary(d: u64, f: &SymplecticMat) -> Option<DMatrix<Complex64>> {
    let dp = f.modulus;
    let binv = inverse_mod(f.b, dp)? as i128;
    let two_d = 2 * d as i128;
    let tau_pow = |k: i128| {
        // tau = zeta_{2d}^{d+1}
        let e = (k.rem_euclid(two_d) * (d as i128 + 1)).rem_euclid(two_d);
        Complex64::from_polar(1.0, PI * e as f64 / d as f64)
    };
    let scale = 1.0 / (d as f64).sqrt();
    let (a, e) = (f.a as i128, f.e as i128);
    Some(DMatrix::from_fn(d as usize, d as usize, |r, s| {
        let (r, s) = (r as i128, s as i128);
        let k = binv.rem_euclid(two_d) * (a * s * s - 2 * r * s + e * r * r).rem_euclid(two_d);
        tau_pow(k) * scale
    }))
}

fn fix_phase(m: DMatrix<Complex64>) -> UnitaryMatrix {
    let first = m.iter().find(|z| z.norm() > 1e-9).copied();
    match first {
        Some(z) => {
            let p = z.conj() / z.norm();
            UnitaryMatrix(m.map(|w| w * p))
        }
        None => UnitaryMatrix(m),
    }
}

/// `U_F` with `U_F D_j U_F^dagger` proportional to `D_{Fj}`.
///
/// Matrices whose upper-right entry is not a unit are written as
/// `G_1 G_2` with `G_1 = (0, -1; 1, x)`, choosing `x` so that `G_2` has a
/// unit there. The global phase makes the first nonzero entry positive real.
pub fn metaplectic_unitary(f: &SymplecticMat, d: u64) -> Result<UnitaryMatrix> {
    if d == 0 || d > MATRIX_BOUND || f.modulus != d_prime(d) {
        return Err(Error::InvalidArgument(format!("matrix modulus {} does not match d' for d = {d}", f.modulus)));
    }
    if f.det() != 1 % f.modulus {
        return Err(Error::InvalidArgument("metaplectic unitaries need determinant 1".into()));
    }
    if d == 1 {
        return Ok(UnitaryMatrix::identity(1));
    }
    if let Some(m) = gauss_sum_unitary(d, f) {
        return Ok(fix_phase(m));
    }
    let dp = f.modulus;
    for x in 0..dp {
        let g1 = SymplecticMat::new_unchecked(0, -1, 1, x as i64, dp);
        let g2 = g1.inverse().mul(f);
        if let (Some(u1), Some(u2)) = (gauss_sum_unitary(d, &g1), gauss_sum_unitary(d, &g2)) {
            return Ok(fix_phase(u1 * u2));
        }
    }
    Err(Error::InvalidArgument(format!("no factorization found for {f:?}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugationReport {
    pub d: u64,
    pub indices_checked: usize,
    /// Largest `| |<D_{Fj}, U D_j U^dagger>| - d |`.
    pub max_overlap_defect: f64,
    /// Largest entrywise deviation after dividing out the fitted phase.
    pub max_deviation: f64,
    pub unitarity_defect: f64,
    pub tolerance: f64,
}

impl ConjugationReport {
    pub fn passed(&self) -> bool {
        self.max_overlap_defect <= self.tolerance * self.d as f64
            && self.max_deviation <= self.tolerance
            && self.unitarity_defect <= self.tolerance
    }
}

/// Checks `U D_j U^dagger = phase * D_{Fj}` for every `j` in `(Z/d')^2`.
pub fn check_conjugation(u: &UnitaryMatrix, f: &SymplecticMat, d: u64, tolerance: f64) -> ConjugationReport {
    let ud = u.adjoint();
    let all: Vec<DisplacementIndex> = DisplacementIndex::all(d).collect();
    let (overlap, dev) = all
        .par_iter()
        .map(|j| {
            let lhs = u.mul(&displacement(j)).mul(&ud);
            let rhs = displacement(&f.apply(j));
            let ip = rhs.hs_inner(&lhs);
            let phase = ip / ip.norm().max(f64::MIN_POSITIVE);
            let dev = max_abs_diff(&lhs.0, &rhs.0.map(|z| z * phase));
            ((ip.norm() - d as f64).abs(), dev)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    ConjugationReport {
        d,
        indices_checked: all.len(),
        max_overlap_defect: overlap,
        max_deviation: dev,
        unitarity_defect: u.unitarity_defect(),
        tolerance,
    }
}

/// Smallest `t <= max_t` with `U^t` proportional to the identity.
pub fn projective_order(u: &UnitaryMatrix, max_t: u64, tolerance: f64) -> Option<u64> {
    let n = u.dim();
    let mut acc = u.clone();
    for t in 1..=max_t {
        let c = acc.0[(0, 0)];
        if (c.norm() - 1.0).abs() <= tolerance {
            let id = DMatrix::identity(n, n).map(|z: Complex64| z * c);
            if max_abs_diff(&acc.0, &id) <= tolerance {
                return Some(t);
            }
        }
        acc = acc.mul(u);
    }
    None
}

/// Entrywise complex conjugation `J` satisfies `J D_j J = D_{(j1, -j2)}`.
pub fn extended_conjugation(d: u64) -> Result<ConjugationReport> {
    if d == 0 || d > MATRIX_BOUND {
        return Err(Error::InvalidArgument(format!("dimension must be in 1..={MATRIX_BOUND}, got {d}")));
    }
    let conj = SymplecticMat::conjugation(d_prime(d));
    let all: Vec<DisplacementIndex> = DisplacementIndex::all(d).collect();
    let dev = all
        .par_iter()
        .map(|j| {
            let lhs = displacement(j).0.map(|z| z.conj());
            max_abs_diff(&lhs, &displacement(&conj.apply(j)).0)
        })
        .reduce(|| 0.0, f64::max);
    Ok(ConjugationReport {
        d,
        indices_checked: all.len(),
        max_overlap_defect: 0.0,
        max_deviation: dev,
        unitarity_defect: 0.0,
        tolerance: 1e-12,
    })
}

/// Rescales an order-3 (projectively) unitary so that `U^3 = I`.
pub fn normalize_order_three(u: &UnitaryMatrix) -> UnitaryMatrix {
    let cube = u.mul(u).mul(u);
    let c = cube.0[(0, 0)];
    let root = Complex64::from_polar(1.0, -c.arg() / 3.0);
    u.scale(root)
}

/// Orthonormal basis (as columns) of an eigenspace of `U` after rescaling to
/// `U^3 = I`. `which = Some(k)` selects the eigenvalue `omega^k`; `None`
/// selects the largest eigenspace, ties going to the smallest `k`.
pub fn order_three_eigenspace(u: &UnitaryMatrix, which: Option<u32>) -> (u32, DMatrix<Complex64>) {
    let n = u.dim();
    let u = normalize_order_three(u);
    let u2 = u.mul(&u);
    let id: DMatrix<Complex64> = DMatrix::identity(n, n);
    let mut best: Option<(u32, f64, DMatrix<Complex64>)> = None;
    for k in 0..3u32 {
        if which.is_some_and(|w| w % 3 != k) {
            continue;
        }
        let w = Complex64::from_polar(1.0, -2.0 * PI * k as f64 / 3.0);
        let p = (&id + u.0.map(|z| z * w) + u2.0.map(|z| z * w * w)).map(|z| z / 3.0);
        let tr = p.trace().re;
        if best.as_ref().is_none_or(|b| tr > b.1 + 0.5) {
            best = Some((k, tr, p));
        }
    }
    let (k, _, p) = best.expect("at least one projector");
    (k, gram_schmidt(&p))
}

/// Orthonormal basis of the column space of `p`.
pub(crate) fn gram_schmidt(p: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for col in p.column_iter() {
        let mut v = col.clone_owned();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-8 {
            basis.push(v / Complex64::new(nrm, 0.0));
        }
    }
    DMatrix::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zauner_examples() {
        let f = zauner_matrix(19, ZaunerKind::Fz).unwrap();
        assert_eq!(f.entries(), [0, 18, 1, 18]);
        assert_eq!(sym_order(&f, 19), (3, 3));
        let f = zauner_matrix(4, ZaunerKind::Fz).unwrap();
        assert_eq!(f.entries(), [0, 3, 5, 3]);
        assert_eq!(f.pow(3), SymplecticMat::new(5, 0, 0, 5, 8).unwrap());
        assert_eq!(sym_order(&f, 4), (3, 3));
        let fa = zauner_matrix(12, ZaunerKind::Fa).unwrap();
        assert_eq!(fa.entries(), [1, 15, 15, 10]);
        assert_eq!(sym_order(&fa, 12).0, 3);
        assert!(zauner_matrix(7, ZaunerKind::Fa).is_err());
        assert_eq!(sym_order(&SymplecticMat::identity(5), 5), (1, 1));
    }

    #[test]
    fn fz_satisfies_characteristic_polynomial() {
        for d in 2..60u64 {
            let f = zauner_matrix(d, ZaunerKind::Fz).unwrap().reduce(d);
            let s = f.mul(&f);
            let sum = [s.a + f.a + 1, s.b + f.b, s.c + f.c, s.e + f.e + 1].map(|x| x % d);
            assert_eq!(sum, [0; 4], "d = {d}");
        }
    }

    #[test]
    fn identity_gives_identity() {
        for d in [3u64, 4, 6] {
            let u = metaplectic_unitary(&SymplecticMat::identity(d_prime(d)), d).unwrap();
            assert!(max_abs_diff(&u.0, &DMatrix::identity(d as usize, d as usize)) < 1e-12);
        }
    }

    #[test]
    fn fz_conjugation_and_order() {
        for d in [3u64, 4, 5, 6, 7, 8] {
            let f = zauner_matrix(d, ZaunerKind::Fz).unwrap();
            let u = metaplectic_unitary(&f, d).unwrap();
            let r = check_conjugation(&u, &f, d, 1e-11);
            assert!(r.passed(), "{r:?}");
            assert_eq!(projective_order(&u, 12, 1e-10), Some(3));
        }
    }

    #[test]
    fn fa_uses_factorization() {
        let f = zauner_matrix(12, ZaunerKind::Fa).unwrap();
        assert!(gauss_sum_unitary(12, &f).is_none());
        let u = metaplectic_unitary(&f, 12).unwrap();
        assert!(check_conjugation(&u, &f, 12, 1e-10).passed());
        assert_eq!(projective_order(&u, 12, 1e-9), Some(3));
    }

    fn random_sl2(rng: &mut impl Rng, m: u64) -> SymplecticMat {
        loop {
            let v: Vec<i64> = (0..4).map(|_| rng.gen_range(0..m as i64)).collect();
            let f = SymplecticMat::new_unchecked(v[0], v[1], v[2], v[3], m);
            if f.det() == 1 % m {
                return f;
            }
        }
    }

    #[test]
    fn homomorphism_up_to_phase() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in [2u64, 3, 4, 6, 9, 12] {
            let m = d_prime(d);
            for _ in 0..6 {
                let (f, g) = (random_sl2(&mut rng, m), random_sl2(&mut rng, m));
                let uf = metaplectic_unitary(&f, d).unwrap();
                let ug = metaplectic_unitary(&g, d).unwrap();
                let ufg = metaplectic_unitary(&f.mul(&g), d).unwrap();
                assert!(check_conjugation(&ufg, &f.mul(&g), d, 1e-10).passed());
                let prod = uf.mul(&ug);
                let ip = ufg.hs_inner(&prod);
                assert!((ip.norm() - d as f64).abs() < 1e-9, "d = {d}");
            }
        }
    }

    #[test]
    fn complex_conjugation_flips_second_coordinate() {
        for d in 1..=12u64 {
            let r = extended_conjugation(d).unwrap();
            assert!(r.max_deviation < 1e-14, "{r:?}");
        }
    }

    #[test]
    fn inverse_and_det() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in [5u64, 8, 24] {
            for _ in 0..20 {
                let f = random_sl2(&mut rng, m);
                assert!(f.mul(&f.inverse()).is_identity());
            }
        }
        assert!(SymplecticMat::new(2, 0, 0, 2, 8).is_err());
        assert_eq!(SymplecticMat::conjugation(8).det(), 7);
    }

    #[test]
    fn eigenspace_is_invariant() {
        for d in [4u64, 5, 7] {
            let u = metaplectic_unitary(&zauner_matrix(d, ZaunerKind::Fz).unwrap(), d).unwrap();
            let (k, basis) = order_three_eigenspace(&u, None);
            let un = normalize_order_three(&u);
            let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
            assert!(basis.ncols() * 3 >= d as usize);
            let img = &un.0 * &basis;
            assert!(max_abs_diff(&img, &basis.map(|z| z * w)) < 1e-10);
            let gram = basis.adjoint() * &basis;
            assert!(max_abs_diff(&gram, &DMatrix::identity(basis.ncols(), basis.ncols())) < 1e-12);
        }
    }
}
