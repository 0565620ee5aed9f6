//! Matrix-free symmetric linear algebra: power iteration and conjugate
//! gradients.

use ndarray::{Array1, ArrayView1};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

const POWER_SEED: u64 = 0x5e_ed0f_1ab0;

/// Largest eigenvalue of a symmetric positive semidefinite operator.
///
/// Stops once the eigen-residual `||Av - rho v||` falls below `tol * rho`;
/// the Rayleigh quotient error is then of order `(tol rho)^2 / gap`.
pub fn power_iteration<F>(apply: F, dim: usize, tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(ArrayView1<f64>) -> Array1<f64>,
{
    if dim == 0 {
        return Err(Error::InvalidArgument("power iteration on an empty operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut v: Array1<f64> = Array1::from_shape_fn(dim, |_| StandardNormal.sample(&mut rng));
    v /= v.dot(&v).sqrt();
    for _ in 0..max_iter {
        let w = apply(v.view());
        let rho = v.dot(&w);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let residual = &w - &(&v * rho);
        if residual.dot(&residual).sqrt() <= tol * rho.abs() {
            return Ok(rho);
        }
        v = w / norm;
    }
    Err(Error::InvalidState(format!(
        "power iteration did not reach tolerance {tol} in {max_iter} iterations"
    )))
}

/// Solve `Ax = b` for symmetric positive semidefinite `A` by conjugate
/// gradients from `x = 0`. For singular `A` and `b` in its range the iterates
/// stay in the range and converge to the minimum-norm solution.
///
/// Returns the solution and the iteration count; fails if `||Ax - b||` does
/// not fall below `tol`.
pub fn conjugate_gradient<F>(apply: F, b: ArrayView1<f64>, tol: f64, max_iter: usize) -> Result<(Array1<f64>, usize)>
where
    F: Fn(ArrayView1<f64>) -> Array1<f64>,
{
    let mut x = Array1::zeros(b.len());
    let mut r = b.to_owned();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    for it in 0..max_iter {
        if rr.sqrt() <= tol {
            // recompute the true residual; the recursive one drifts
            let true_r = &b - &apply(x.view());
            if true_r.dot(&true_r).sqrt() <= tol {
                return Ok((x, it));
            }
            r = true_r;
            rr = r.dot(&r);
            p = r.clone();
        }
        let ap = apply(p.view());
        let curvature = p.dot(&ap);
        if !(curvature > 0.0) {
            break;
        }
        let alpha = rr / curvature;
        x.scaled_add(alpha, &p);
        r.scaled_add(-alpha, &ap);
        let rr_next = r.dot(&r);
        p = &r + &(&p * (rr_next / rr));
        rr = rr_next;
    }
    let true_r = &b - &apply(x.view());
    let res = true_r.dot(&true_r).sqrt();
    if res <= tol {
        Ok((x, max_iter))
    } else {
        Err(Error::ReferenceFailed(format!(
            "conjugate gradients stalled at residual {res:e} (tolerance {tol:e})"
        )))
    }
}
