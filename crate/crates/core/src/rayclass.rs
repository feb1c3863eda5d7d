//! Ray class group orders `h_m = h_K Phi(m_0) Phi(m_inf) / [U_K : U_m^1]`
//! for moduli `m = n * (inf_1) * (inf_2)` with a rational-integer finite part.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::{
    class_number, fundamental_unit, phi_finite, totally_positive_unit, QuadElem, QuadField, RealPlace,
    Residue, ResidueRing,
};
use crate::towers::radicand_for_dim;

/// `m = n * (inf_1)^{e_1} * (inf_2)^{e_2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RayModulus {
    #[serde(skip)]
    pub field: QuadField,
    pub n: u64,
    pub inf1: bool,
    pub inf2: bool,
}

impl RayModulus {
    pub fn new(field: QuadField, n: u64, inf1: bool, inf2: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("finite part must be >= 1".into()));
        }
        Ok(Self { field, n, inf1, inf2 })
    }

    /// Number of real places in the modulus.
    pub fn real_places(&self) -> u32 {
        self.inf1 as u32 + self.inf2 as u32
    }

    fn places(&self) -> Vec<RealPlace> {
        let mut v = Vec::new();
        if self.inf1 {
            v.push(RealPlace::First);
        }
        if self.inf2 {
            v.push(RealPlace::Second);
        }
        v
    }

    pub fn label(&self) -> String {
        let mut s = self.n.to_string();
        if self.inf1 {
            s.push_str("*inf1");
        }
        if self.inf2 {
            s.push_str("*inf2");
        }
        s
    }
}

/// All factors of the ray class number formula for one modulus.
#[derive(Debug, Clone, Serialize)]
pub struct RayClassOrderCert {
    pub modulus: RayModulus,
    pub h_k: u64,
    pub phi0: u64,
    pub phi_inf: u64,
    pub unit_index: u64,
    pub h_m: u64,
}

fn sign_bit(e: &QuadElem, place: RealPlace) -> bool {
    e.sign_at(place) == Ordering::Less
}

/// Image of a unit in `(Z_K/n)^x x {+-1}^{r_m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct UnitImage {
    residue: Residue,
    signs: Vec<bool>,
}

/// `[U_K : U_m^1]`: size of the image of `<-1, u_f>` in
/// `(Z_K/n)^x x {+-1}^{r_m}`, by enumeration.
pub fn unit_index(modulus: &RayModulus) -> Result<u64> {
    let ring = ResidueRing::new(modulus.field, modulus.n)?;
    let uf = fundamental_unit(modulus.field);
    let places = modulus.places();
    let uf_res = ring.reduce(&uf);
    if !ring.is_invertible(uf_res) {
        return Err(Error::NotInvertible(modulus.n));
    }
    let uf_signs: Vec<bool> = places.iter().map(|&p| sign_bit(&uf, p)).collect();
    let minus_one = UnitImage { residue: ring.neg(ring.one()), signs: vec![true; places.len()] };

    let mul = |x: &UnitImage, res: Residue, signs: &[bool]| UnitImage {
        residue: ring.mul(x.residue, res),
        signs: x.signs.iter().zip(signs).map(|(a, b)| a ^ b).collect(),
    };

    let identity = UnitImage { residue: ring.one(), signs: vec![false; places.len()] };
    let mut cyclic = HashSet::new();
    let mut cur = identity.clone();
    loop {
        cyclic.insert(cur.clone());
        cur = mul(&cur, uf_res, &uf_signs);
        if cur == identity {
            break;
        }
    }
    let order = cyclic.len() as u64;
    Ok(if cyclic.contains(&minus_one) { order } else { 2 * order })
}

/// `h_m` with all factors of the class number formula.
pub fn ray_class_order(modulus: &RayModulus) -> Result<RayClassOrderCert> {
    let h_k = class_number(modulus.field)?;
    let phi0 = phi_finite(modulus.field, modulus.n);
    let phi_inf = 1u64 << modulus.real_places();
    let idx = unit_index(modulus)?;
    let numerator = h_k * phi0 * phi_inf;
    if !numerator.is_multiple_of(idx) {
        return Err(Error::InexactDivision { numerator, denominator: idx });
    }
    Ok(RayClassOrderCert { modulus: *modulus, h_k, phi0, phi_inf, unit_index: idx, h_m: numerator / idx })
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientReport {
    pub d: u64,
    pub d_prime: u64,
    pub radicand: u64,
    /// Moduli `d'`, `d' inf_1`, `d' inf_2`, `d' inf_1 inf_2`, in that order.
    pub certs: Vec<RayClassOrderCert>,
    pub ratios_ok: bool,
    pub places_symmetric: bool,
    /// Smallest `t` with `u_f^t = 1 mod d'`.
    pub unit_order: u64,
    pub first_unit_totally_positive: bool,
    /// Smallest `r >= 1` with `-u_D^r = 1 mod d'`, if any.
    pub totally_negative_hit: Option<u64>,
}

impl QuotientReport {
    pub fn passed(&self) -> bool {
        self.ratios_ok && self.places_symmetric && self.first_unit_totally_positive && self.totally_negative_hit.is_none()
    }

    pub fn orders(&self) -> [u64; 4] {
        [self.certs[0].h_m, self.certs[1].h_m, self.certs[2].h_m, self.certs[3].h_m]
    }
}

/// Ray class orders for `d'` with each subset of the real places, and the
/// check that every unit congruent to 1 mod `d'` is totally positive.
pub fn quotient_certificate(d: u64) -> Result<QuotientReport> {
    if d < 4 {
        return Err(Error::InvalidArgument(format!("dimension must be >= 4, got {d}")));
    }
    let radicand = radicand_for_dim(&BigUint::from(d))?;
    let field = QuadField::new(radicand)?;
    let dp = crate::d_prime(d);

    let mut certs = Vec::with_capacity(4);
    for (i1, i2) in [(false, false), (true, false), (false, true), (true, true)] {
        certs.push(ray_class_order(&RayModulus::new(field, dp, i1, i2)?)?);
    }
    let h = [certs[0].h_m, certs[1].h_m, certs[2].h_m, certs[3].h_m];
    let ratios_ok = h[1] == 2 * h[0] && h[2] == 2 * h[0] && h[3] == 4 * h[0];
    let places_symmetric = h[1] == h[2];

    let ring = ResidueRing::new(field, dp)?;
    let uf = fundamental_unit(field);
    let unit_order = ring.order(ring.reduce(&uf))?;
    let first_unit_totally_positive = uf.pow(unit_order).is_totally_positive();

    let ud = totally_positive_unit(field);
    let ud_res = ring.reduce(&ud);
    let ud_order = ring.order(ud_res)?;
    let minus_one = ring.neg(ring.one());
    let mut acc = ring.one();
    let mut totally_negative_hit = None;
    for r in 1..=ud_order {
        acc = ring.mul(acc, ud_res);
        if acc == minus_one {
            totally_negative_hit = Some(r);
            break;
        }
    }

    Ok(QuotientReport {
        d,
        d_prime: dp,
        radicand,
        certs,
        ratios_ok,
        places_symmetric,
        unit_order,
        first_unit_totally_positive,
        totally_negative_hit,
    })
}
