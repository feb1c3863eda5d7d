//! Frame-potential minimization restricted to an eigenspace of a Zauner unitary.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::optimize::{bfgs, BfgsSettings};
use super::{Fiducial, Symmetry};
use crate::clifford::{metaplectic_unitary, order_three_eigenspace, zauner_matrix, ZaunerKind};
use crate::error::{Error, Result};
use crate::weyl::{apply_displacement, DisplacementIndex, PhaseTable, MATRIX_BOUND};

/// Restarts are run in fixed-size batches so the result does not depend on
/// the number of threads.
const BATCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Accept once the frame potential is below this.
    pub tol: f64,
    pub seed: u64,
    pub symmetry: Symmetry,
    /// Eigenvalue `omega^k` of the normalized Zauner unitary; `None` picks the
    /// largest eigenspace.
    pub eigenspace: Option<u32>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 32, max_iter: 2000, tol: 1e-24, seed: 0, symmetry: Symmetry::Fz, eigenspace: None }
    }
}

/// `sum_{j != 0 in (Z/d)^2} (|f_v(j)|^2 - 1/(d+1))^2`.
pub fn frame_potential(v: &[Complex64]) -> f64 {
    potential_impl(v, false).0
}

/// Frame potential and its Wirtinger gradient with respect to `conj(v)`.
pub fn frame_potential_and_gradient(v: &[Complex64]) -> (f64, Vec<Complex64>) {
    potential_impl(v, true)
}

fn potential_impl(v: &[Complex64], with_grad: bool) -> (f64, Vec<Complex64>) {
    let d = v.len() as u64;
    let phases = PhaseTable::new(d);
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let target = 1.0 / (d as f64 + 1.0);
    let mut total = 0.0;
    let mut grad = vec![Complex64::new(0.0, 0.0); if with_grad { v.len() } else { 0 }];
    for j in DisplacementIndex::all_mod_d(d).filter(|j| !j.is_zero_mod_d()) {
        let av = apply_displacement(&j, v, &phases);
        let g: Complex64 = v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum();
        let p = g.norm_sqr() / (n * n);
        let r = p - target;
        total += r * r;
        if with_grad {
            // d p / d conj(v) = (conj(g) A v + g A^dagger v)/n^2 - 2 |g|^2 v / n^3
            let adv = apply_displacement(&j.neg(), v, &phases);
            let w = 2.0 * r;
            for i in 0..v.len() {
                let dp = (g.conj() * av[i] + g * adv[i]) / (n * n) - v[i] * (2.0 * g.norm_sqr() / (n * n * n));
                grad[i] += dp * w;
            }
        }
    }
    (total, grad)
}

/// Columns spanning the search subspace.
fn search_basis(d: u64, opts: &SearchOptions) -> Result<DMatrix<Complex64>> {
    let kind = match opts.symmetry {
        Symmetry::None => return Ok(DMatrix::identity(d as usize, d as usize)),
        Symmetry::Fz => ZaunerKind::Fz,
        Symmetry::Fa => ZaunerKind::Fa,
    };
    let f = zauner_matrix(d, kind)?;
    let u = metaplectic_unitary(&f, d)?;
    Ok(order_three_eigenspace(&u, opts.eigenspace).1)
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// One restart: returns the final potential and unit vector.
fn run_restart(basis: &DMatrix<Complex64>, opts: &SearchOptions, restart: usize) -> (f64, Vec<Complex64>) {
    let k = basis.ncols();
    let mut rng = restart_rng(opts.seed, restart);
    let x0 = DVector::from_iterator(2 * k, (0..2 * k).map(|_| rng.gen_range(-1.0..1.0)));
    let to_v = |x: &DVector<f64>| -> Vec<Complex64> {
        let c = DVector::from_iterator(k, (0..k).map(|i| Complex64::new(x[i], x[k + i])));
        (basis * c).iter().copied().collect()
    };
    let fg = |x: &DVector<f64>| -> (f64, DVector<f64>) {
        let v = to_v(x);
        let (f, g) = frame_potential_and_gradient(&v);
        let gc = basis.adjoint() * DVector::from_vec(g);
        let grad = DVector::from_iterator(2 * k, (0..2 * k).map(|i| if i < k { 2.0 * gc[i].re } else { 2.0 * gc[i - k].im }));
        (f, grad)
    };
    let settings = BfgsSettings { max_iter: opts.max_iter, target: opts.tol * 1e-2, grad_tol: 1e-32 };
    let mut out = bfgs(fg, x0, &settings);
    // a fresh Hessian often pushes a stalled run through the last few digits
    for _ in 0..3 {
        if out.value <= settings.target || out.value > 1e-6 {
            break;
        }
        let x = out.x.clone();
        let next = bfgs(fg, x / out.x.norm(), &settings);
        if next.value >= out.value {
            break;
        }
        out = next;
    }
    let v = to_v(&out.x);
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (frame_potential(&v), v.into_iter().map(|z| z / n).collect())
}

fn check_dimension(d: u64, opts: &SearchOptions) -> Result<()> {
    if !(2..=MATRIX_BOUND).contains(&d) {
        return Err(Error::InvalidArgument(format!("dimension must be in 2..={MATRIX_BOUND}, got {d}")));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    Ok(())
}

/// Runs restarts in batches until one reaches `opts.tol`; returns the
/// restart with the lowest potential (ties to the lowest restart index).
pub fn search_fiducial(d: u64, opts: &SearchOptions) -> Result<Fiducial> {
    check_dimension(d, opts)?;
    let basis = search_basis(d, opts)?;
    let mut best: Option<(f64, usize, Vec<Complex64>)> = None;
    for start in (0..opts.restarts).step_by(BATCH) {
        let end = (start + BATCH).min(opts.restarts);
        let results: Vec<(f64, Vec<Complex64>)> = (start..end).into_par_iter().map(|r| run_restart(&basis, opts, r)).collect();
        for (i, (value, v)) in results.into_iter().enumerate() {
            if best.as_ref().is_none_or(|b| value < b.0) {
                best = Some((value, start + i, v));
            }
        }
        if best.as_ref().is_some_and(|b| b.0 < opts.tol) {
            break;
        }
    }
    let (value, _, v) = best.expect("at least one restart");
    if value >= opts.tol {
        return Err(Error::NotFound { restarts: opts.restarts, best: value });
    }
    Fiducial::new(v, opts.seed, opts.symmetry)
}

/// Every restart that reaches `opts.tol`, in restart order.
pub fn search_fiducials(d: u64, opts: &SearchOptions) -> Result<Vec<Fiducial>> {
    check_dimension(d, opts)?;
    let basis = search_basis(d, opts)?;
    let results: Vec<(f64, Vec<Complex64>)> =
        (0..opts.restarts).into_par_iter().map(|r| run_restart(&basis, opts, r)).collect();
    let best = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let found: Vec<Fiducial> = results
        .into_iter()
        .filter(|r| r.0 < opts.tol)
        .map(|(_, v)| Fiducial::new(v, opts.seed, opts.symmetry))
        .collect::<Result<_>>()?;
    if found.is_empty() {
        return Err(Error::NotFound { restarts: opts.restarts, best });
    }
    Ok(found)
}
