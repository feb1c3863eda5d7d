//! SIC fiducials: search, verification, overlap tables, stabilizers and the
//! `d = 19` unit certificate.

mod appendix;
mod optimize;
mod search;
mod stabilizer;

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weyl::{apply_displacement, DisplacementIndex, PhaseTable};

pub use appendix::{appendix19_certificate, AppendixReport, Fixed, FixedComplex, F3_COEFFS};
pub use optimize::{bfgs, BfgsOutcome, BfgsSettings};
pub use search::{frame_potential, frame_potential_and_gradient, search_fiducial, search_fiducials, SearchOptions};
pub use stabilizer::{
    centralizer_order, is_group, stabilizer_search, StabilizerReport, ENUMERATION_BOUND, STABILIZER_TOLERANCE,
};

/// Symmetry the search was restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    Fz,
    Fa,
    #[serde(rename = "none")]
    None,
}

impl std::fmt::Display for Symmetry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Symmetry::Fz => "Fz",
            Symmetry::Fa => "Fa",
            Symmetry::None => "none",
        })
    }
}

impl std::str::FromStr for Symmetry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fz" => Ok(Symmetry::Fz),
            "fa" => Ok(Symmetry::Fa),
            "none" => Ok(Symmetry::None),
            _ => Err(Error::InvalidArgument(format!("unknown symmetry {s:?}"))),
        }
    }
}

/// A unit vector with its recorded search data.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiducial {
    pub d: u64,
    pub v: Vec<Complex64>,
    /// Largest `| |f(j)|^2 - 1/(d+1) |` over `j != 0 mod d`.
    pub residual: f64,
    pub seed: u64,
    pub symmetry: Symmetry,
}

#[derive(Serialize, Deserialize)]
struct FiducialFile {
    d: u64,
    vector: Vec<[f64; 2]>,
    residual: f64,
    seed: u64,
    symmetry: Symmetry,
}

impl Fiducial {
    /// Normalizes `v` and records its measured residual.
    pub fn new(v: Vec<Complex64>, seed: u64, symmetry: Symmetry) -> Result<Self> {
        let d = v.len() as u64;
        if d == 0 {
            return Err(Error::InvalidArgument("empty vector".into()));
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument("vector must be nonzero and finite".into()));
        }
        let v: Vec<Complex64> = v.into_iter().map(|z| z / n).collect();
        let residual = max_equiangularity_error(d, &v);
        Ok(Self { d, v, residual, seed, symmetry })
    }

    pub fn to_json(&self) -> String {
        let file = FiducialFile {
            d: self.d,
            vector: self.v.iter().map(|z| [z.re, z.im]).collect(),
            residual: self.residual,
            seed: self.seed,
            symmetry: self.symmetry,
        };
        serde_json::to_string_pretty(&file).expect("fiducial serializes")
    }

    /// Parses a fiducial file. The stored residual is kept as written.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: FiducialFile = serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))?;
        if file.vector.len() as u64 != file.d || file.d == 0 {
            return Err(Error::Io(format!("vector has {} entries, expected d = {}", file.vector.len(), file.d)));
        }
        let v: Vec<Complex64> = file.vector.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Io(format!("vector norm^2 is {n}, expected 1")));
        }
        Ok(Self { d: file.d, v, residual: file.residual, seed: file.seed, symmetry: file.symmetry })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
        Self::from_json(&s)
    }

    pub fn frame_potential(&self) -> f64 {
        frame_potential(&self.v)
    }
}

/// `f_v(j) = <v, D_j v> / <v, v>` on `(Z/d')^2`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapTable {
    pub d: u64,
    pub values: Vec<Complex64>,
}

impl OverlapTable {
    pub fn get(&self, j: &DisplacementIndex) -> Complex64 {
        self.values[j.flat()]
    }

    pub fn d_prime(&self) -> u64 {
        crate::d_prime(self.d)
    }

    /// `sum_{j in (Z/d)^2} |f(j)|^2`, equal to `d` for every unit vector.
    pub fn squared_sum(&self) -> f64 {
        DisplacementIndex::all_mod_d(self.d).map(|j| self.get(&j).norm_sqr()).sum()
    }

    /// Largest `|f(-j) - conj f(j)|`.
    pub fn conjugation_defect(&self) -> f64 {
        DisplacementIndex::all(self.d)
            .map(|j| (self.get(&j.neg()) - self.get(&j).conj()).norm())
            .fold(0.0, f64::max)
    }
}

pub fn overlap_table(v: &[Complex64]) -> OverlapTable {
    let d = v.len() as u64;
    let phases = PhaseTable::new(d);
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let values = DisplacementIndex::all(d)
        .map(|j| {
            let w = apply_displacement(&j, v, &phases);
            v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum::<Complex64>() / n
        })
        .collect();
    OverlapTable { d, values }
}

fn max_equiangularity_error(d: u64, v: &[Complex64]) -> f64 {
    let t = overlap_table(v);
    let target = 1.0 / (d as f64 + 1.0);
    DisplacementIndex::all_mod_d(d)
        .filter(|j| !j.is_zero_mod_d())
        .map(|j| (t.get(&j).norm_sqr() - target).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub d: u64,
    pub max_deviation: f64,
    pub worst_index: Option<DisplacementIndex>,
    pub tolerance: f64,
    pub orbit_size: u64,
    pub frame_potential: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < self.tolerance
    }
}

/// Checks `| |f(j)|^2 - 1/(d+1) | < tol` for every `j != 0 mod d`.
pub fn verify_sic(f: &Fiducial, tolerance: f64) -> VerifyReport {
    let d = f.d;
    let t = overlap_table(&f.v);
    let target = 1.0 / (d as f64 + 1.0);
    let mut worst = (0.0, None);
    for j in DisplacementIndex::all_mod_d(d).filter(|j| !j.is_zero_mod_d()) {
        let dev = (t.get(&j).norm_sqr() - target).abs();
        if dev > worst.0 {
            worst = (dev, Some(j));
        }
    }
    VerifyReport {
        d,
        max_deviation: worst.0,
        worst_index: worst.1,
        tolerance,
        orbit_size: d * d,
        frame_potential: frame_potential(&f.v),
    }
}

/// `sqrt(d+1) f(j)` for `j in (Z/d)^2`, `j != 0`.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizedOverlaps {
    pub d: u64,
    pub values: Vec<(DisplacementIndex, Complex64)>,
    /// Largest `| |value| - 1 |`.
    pub modulus_defect: f64,
    /// Largest `|value(-j) - 1/value(j)|`.
    pub inverse_pair_defect: f64,
}

impl NormalizedOverlaps {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.modulus_defect <= tolerance
    }
}

/// Normalized overlaps of a table that passed verification at `tolerance`.
pub fn normalized_overlaps(t: &OverlapTable, tolerance: f64) -> Result<NormalizedOverlaps> {
    let d = t.d;
    let target = 1.0 / (d as f64 + 1.0);
    let s = (d as f64 + 1.0).sqrt();
    let mut values = Vec::new();
    let mut modulus_defect: f64 = 0.0;
    let mut inverse_pair_defect: f64 = 0.0;
    for j in DisplacementIndex::all_mod_d(d).filter(|j| !j.is_zero_mod_d()) {
        let f = t.get(&j);
        if (f.norm_sqr() - target).abs() > tolerance {
            return Err(Error::NotSic((f.norm_sqr() - target).abs()));
        }
        let z = f * s;
        let zm = t.get(&j.neg()) * s;
        modulus_defect = modulus_defect.max((z.norm() - 1.0).abs());
        inverse_pair_defect = inverse_pair_defect.max((zm - z.inv()).norm());
        values.push((j, z));
    }
    Ok(NormalizedOverlaps { d, values, modulus_defect, inverse_pair_defect })
}

/// `(v, B v, B^2 v)` with `B = D_{(n, 2n)}`, `n = d/3`.
pub fn bshift(f: &Fiducial) -> Result<(Fiducial, Fiducial, Fiducial)> {
    if !f.d.is_multiple_of(3) {
        return Err(Error::InvalidArgument(format!("bshift needs 3 | d, got d = {}", f.d)));
    }
    let n = (f.d / 3) as i64;
    let b = DisplacementIndex::new(f.d, n, 2 * n);
    let phases = PhaseTable::new(f.d);
    let v1 = apply_displacement(&b, &f.v, &phases);
    let v2 = apply_displacement(&b, &v1, &phases);
    Ok((
        f.clone(),
        Fiducial::new(v1, f.seed, Symmetry::None)?,
        Fiducial::new(v2, f.seed, Symmetry::None)?,
    ))
}
