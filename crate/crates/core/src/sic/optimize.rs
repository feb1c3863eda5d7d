//! Dense BFGS with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct BfgsSettings {
    pub max_iter: usize,
    /// Stop once the objective drops below this value.
    pub target: f64,
    /// Stop once the gradient norm drops below this value.
    pub grad_tol: f64,
}

impl Default for BfgsSettings {
    fn default() -> Self {
        Self { max_iter: 2000, target: 0.0, grad_tol: 1e-30 }
    }
}

#[derive(Debug, Clone)]
pub struct BfgsOutcome {
    pub x: DVector<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

/// Minimizes `f` where `fg(x)` returns the value and gradient.
pub fn bfgs<F>(fg: F, x0: DVector<f64>, settings: &BfgsSettings) -> BfgsOutcome
where
    F: Fn(&DVector<f64>) -> (f64, DVector<f64>),
{
    let n = x0.len();
    let mut x = x0;
    let (mut f, mut g) = fg(&x);
    let mut evals = 1;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut fresh = true;
    let mut iter = 0;
    while iter < settings.max_iter {
        if f <= settings.target || g.norm() <= settings.grad_tol {
            break;
        }
        iter += 1;
        let mut p = -(&h * &g);
        let mut slope = g.dot(&p);
        if slope >= 0.0 {
            h = DMatrix::identity(n, n);
            p = -g.clone();
            slope = -g.norm_squared();
        }
        // first trial step: unit for quasi-Newton, scaled for steepest descent
        let alpha0 = if fresh { (1.0 / p.norm()).min(1.0) } else { 1.0 };
        let Some((alpha, f_new, g_new, used)) = line_search(&fg, &x, f, slope, &p, alpha0) else {
            evals += 40;
            if fresh {
                break;
            }
            h = DMatrix::identity(n, n);
            fresh = true;
            continue;
        };
        evals += used;
        let s = &p * alpha;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        x += &s;
        f = f_new;
        g = g_new;
        if sy > 1e-300 {
            if fresh {
                // Shanno scaling of the initial inverse Hessian
                h *= sy / y.norm_squared();
                fresh = false;
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            h += (&s * s.transpose()) * (rho * rho * yhy + rho) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
    }
    BfgsOutcome { x, value: f, iterations: iter, evaluations: evals }
}

type Eval = (f64, DVector<f64>);

fn line_search<F>(
    fg: &F,
    x: &DVector<f64>,
    f0: f64,
    slope0: f64,
    p: &DVector<f64>,
    alpha0: f64,
) -> Option<(f64, f64, DVector<f64>, usize)>
where
    F: Fn(&DVector<f64>) -> Eval,
{
    let phi = |a: f64| -> (f64, f64, DVector<f64>) {
        let (v, g) = fg(&(x + p * a));
        (v, g.dot(p), g)
    };
    let mut used = 0;
    let mut a_prev = 0.0;
    let (mut f_prev, mut d_prev) = (f0, slope0);
    let mut a = alpha0;
    for i in 0..20 {
        let (fa, da, ga) = phi(a);
        used += 1;
        if !fa.is_finite() {
            a = 0.5 * (a_prev + a);
            continue;
        }
        if fa > f0 + C1 * a * slope0 || (i > 0 && fa >= f_prev) {
            return zoom(&phi, f0, slope0, (a_prev, f_prev, d_prev), (a, fa, da), used);
        }
        if da.abs() <= -C2 * slope0 {
            return Some((a, fa, ga, used));
        }
        if da >= 0.0 {
            return zoom(&phi, f0, slope0, (a, fa, da), (a_prev, f_prev, d_prev), used);
        }
        a_prev = a;
        f_prev = fa;
        d_prev = da;
        a *= 2.0;
    }
    None
}

fn zoom<P>(
    phi: &P,
    f0: f64,
    slope0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    mut used: usize,
) -> Option<(f64, f64, DVector<f64>, usize)>
where
    P: Fn(f64) -> (f64, f64, DVector<f64>),
{
    let mut best: Option<(f64, f64, DVector<f64>)> = None;
    for _ in 0..30 {
        // cubic interpolation, safeguarded to the middle of the bracket
        let (a0, f0i, d0) = lo;
        let (a1, f1, d1) = hi;
        let d1c = d0 + d1 - 3.0 * (f0i - f1) / (a0 - a1);
        let disc = d1c * d1c - d0 * d1;
        let mut a = if disc >= 0.0 {
            let d2 = disc.sqrt() * (a1 - a0).signum();
            a1 - (a1 - a0) * (d1 + d2 - d1c) / (d1 - d0 + 2.0 * d2)
        } else {
            f64::NAN
        };
        let (left, right) = (a0.min(a1), a0.max(a1));
        let margin = 0.1 * (right - left);
        if !a.is_finite() || a < left + margin || a > right - margin {
            a = 0.5 * (left + right);
        }
        let (fa, da, ga) = phi(a);
        used += 1;
        if fa < f0 && best.as_ref().is_none_or(|b| fa < b.1) {
            best = Some((a, fa, ga.clone()));
        }
        if fa > f0 + C1 * a * slope0 || fa >= lo.1 {
            hi = (a, fa, da);
        } else {
            if da.abs() <= -C2 * slope0 {
                return Some((a, fa, ga, used));
            }
            if da * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, fa, da);
        }
        if (hi.0 - lo.0).abs() < 1e-16 * lo.0.abs().max(1e-300) {
            break;
        }
    }
    // accept any strict decrease when the bracket collapses
    best.map(|(a, f, g)| (a, f, g, used))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = DVector::from_vec(vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)]);
        (f, g)
    }

    #[test]
    fn minimizes_rosenbrock() {
        let out = bfgs(rosenbrock, DVector::from_vec(vec![-1.2, 1.0]), &BfgsSettings::default());
        assert!(out.value < 1e-20, "{out:?}");
        assert!((out.x[0] - 1.0).abs() < 1e-9 && (out.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn minimizes_quadratic_in_few_steps() {
        let q = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]);
        let fg = |x: &DVector<f64>| (0.5 * x.dot(&(&q * x)), &q * x);
        let out = bfgs(fg, DVector::from_vec(vec![1.0, -2.0, 3.0]), &BfgsSettings { target: 1e-30, ..Default::default() });
        assert!(out.value < 1e-28);
        assert!(out.iterations < 30);
    }
}
