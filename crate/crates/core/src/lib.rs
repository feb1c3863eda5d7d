//! Exact arithmetic in real quadratic fields and numerical Weyl-Heisenberg
//! geometry, cross-checked against each other.
//!
//! The exact half ([`quadfield`], [`towers`], [`rayclass`]) works with
//! arbitrary-precision integers throughout. The numerical half ([`weyl`],
//! [`clifford`], [`sic`]) works in double precision, with phases kept as
//! exact integer exponents until a matrix is assembled.

pub mod clifford;
pub mod error;
pub mod quadfield;
pub mod rayclass;
pub mod sic;
pub mod towers;
pub mod weyl;

pub use clifford::{SymplecticMat, ZaunerKind};
pub use error::{Error, Result};
pub use quadfield::{QuadElem, QuadField, ResidueRing};
pub use rayclass::{RayClassOrderCert, RayModulus};
pub use sic::{Fiducial, NormalizedOverlaps, OverlapTable, SearchOptions, Symmetry};
pub use towers::DimTower;
pub use weyl::{DisplacementIndex, RootOfUnity, UnitaryMatrix};

/// `d' = 2d` for even `d`, `d` for odd `d`.
pub fn d_prime(d: u64) -> u64 {
    if d.is_multiple_of(2) {
        2 * d
    } else {
        d
    }
}
