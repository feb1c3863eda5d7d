//! Symmetries of an overlap table and their centralizers, by enumeration.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::OverlapTable;
use crate::clifford::SymplecticMat;
use crate::error::{Error, Result};
use crate::weyl::DisplacementIndex;

/// Largest `d'` for which `GL_2(Z/d')` is enumerated.
pub const ENUMERATION_BOUND: u64 = 40;

pub const STABILIZER_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct StabilizerReport {
    pub d: u64,
    pub elements: Vec<SymplecticMat>,
    pub order: usize,
    pub tolerance: f64,
    /// Candidates whose worst mismatch lies in `(tol, 10 tol]`.
    pub near_misses: usize,
    pub is_group: bool,
}

impl StabilizerReport {
    pub fn is_ambiguous(&self) -> bool {
        self.near_misses > 0
    }
}

fn all_matrices(m: u64) -> impl ParallelIterator<Item = SymplecticMat> {
    (0..m * m).into_par_iter().flat_map_iter(move |ab| {
        let (a, b) = (ab / m, ab % m);
        (0..m * m).map(move |ce| SymplecticMat { a, b, c: ce / m, e: ce % m, modulus: m })
    })
}

/// Worst mismatch `|f(g j) - f(j)|`, stopping early above `cutoff`.
fn mismatch(t: &OverlapTable, g: &SymplecticMat, indices: &[DisplacementIndex], cutoff: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for j in indices {
        let dev = (t.get(&g.apply(j)) - t.get(j)).norm();
        worst = worst.max(dev);
        if worst > cutoff {
            break;
        }
    }
    worst
}

/// All `g` with `det g = +-1` and `f(g j) = f(j)` for every `j`, to `tolerance`.
pub fn stabilizer_search(t: &OverlapTable, tolerance: f64) -> Result<StabilizerReport> {
    let m = t.d_prime();
    if m > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { modulus: m, bound: ENUMERATION_BOUND });
    }
    let indices: Vec<DisplacementIndex> = DisplacementIndex::all(t.d).collect();
    let minus_one = m - 1;
    let scored: Vec<(SymplecticMat, f64)> = all_matrices(m)
        .filter(|g| {
            let det = g.det();
            det == 1 % m || det == minus_one
        })
        .map(|g| (g, mismatch(t, &g, &indices, 10.0 * tolerance)))
        .filter(|(_, w)| *w <= 10.0 * tolerance)
        .collect();
    let elements: Vec<SymplecticMat> = scored.iter().filter(|(_, w)| *w <= tolerance).map(|(g, _)| *g).collect();
    let near_misses = scored.len() - elements.len();
    let is_group = is_group(&elements);
    Ok(StabilizerReport { d: t.d, order: elements.len(), elements, tolerance, near_misses, is_group })
}

/// Closure under products and inverses, with the identity present.
pub fn is_group(elements: &[SymplecticMat]) -> bool {
    let Some(first) = elements.first() else { return false };
    let set: std::collections::HashSet<_> = elements.iter().collect();
    if !set.contains(&SymplecticMat::identity(first.modulus)) {
        return false;
    }
    elements.iter().all(|g| set.contains(&g.inverse()) && elements.iter().all(|h| set.contains(&g.mul(h))))
}

/// `|{g in GL_2(Z/d') : g s = s g for all s in S}|`.
pub fn centralizer_order(s: &[SymplecticMat], d_prime: u64) -> Result<u64> {
    if d_prime > ENUMERATION_BOUND {
        return Err(Error::EnumerationBound { modulus: d_prime, bound: ENUMERATION_BOUND });
    }
    if s.is_empty() {
        return Err(Error::InvalidArgument("centralizer of an empty set".into()));
    }
    if s.iter().any(|g| g.modulus != d_prime) {
        return Err(Error::InvalidArgument("matrices must be reduced mod d'".into()));
    }
    let count = all_matrices(d_prime)
        .filter(|g| g.det().gcd(&d_prime) == 1 && s.iter().all(|h| g.mul(h) == h.mul(g)))
        .count();
    Ok(count as u64)
}
