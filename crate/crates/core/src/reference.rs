//! Reference optimum `(x*, f*)` for the built-in problems.
//!
//! Unconstrained quadratics are solved exactly by conjugate gradients with a
//! verified residual. Everything else runs a monotone accelerated projected
//! gradient method until the gradient mapping norm is below tolerance. A
//! solve that does not get there is an error, never an approximate `f*`.

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::conjugate_gradient;
use crate::problem::{cycle_laplacian_apply, FeasibleSet, Objective, Problem};

/// Residual tolerance for the linear solves.
pub const LINEAR_TOL: f64 = 1e-10;
/// Gradient-mapping tolerance for the iterative solves.
pub const STATIONARITY_TOL: f64 = 1e-9;
const MAX_ITER: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMethod {
    ClosedForm,
    ConjugateGradient,
    RestartedFista,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub point: Array1<f64>,
    pub value: f64,
    pub method: ReferenceMethod,
    /// Final residual (linear solves) or gradient-mapping norm.
    pub certificate: f64,
}

pub fn reference_optimum(problem: &Problem) -> Result<Reference> {
    let n = problem.dim();
    let unconstrained = problem.feasible_set == FeasibleSet::AllSpace;
    match (&problem.objective, unconstrained) {
        (Objective::DiagonalQuadratic { diag, center }, _)
            if !matches!(problem.feasible_set, FeasibleSet::Simplex | FeasibleSet::L1Ball { .. }) =>
        {
            // separable: clamp the center into the box (or keep it)
            let point = problem.feasible_set.project(center.view())?;
            if diag.iter().any(|&d| d < 0.0) {
                return Err(Error::ReferenceFailed("diagonal quadratic has a negative entry".into()));
            }
            Ok(finish(problem, point, ReferenceMethod::ClosedForm, 0.0))
        }
        (Objective::CycleQuadratic { linear }, true) => {
            if linear.sum().abs() > LINEAR_TOL {
                return Err(Error::ReferenceFailed(
                    "linear term is not orthogonal to the Laplacian kernel; f is unbounded below".into(),
                ));
            }
            let (point, _) = conjugate_gradient(cycle_laplacian_apply, linear.view(), LINEAR_TOL, 10 * n + 100)?;
            let res = residual_norm(&(cycle_laplacian_apply(point.view()) - linear));
            Ok(finish(problem, point, ReferenceMethod::ConjugateGradient, res))
        }
        (Objective::LeastSquares { design, targets }, true) => {
            let m = design.nrows() as f64;
            let rhs = design.t().dot(targets) / m;
            let normal = |x: ArrayView1<f64>| design.t().dot(&design.dot(&x)) / m;
            let (point, _) = conjugate_gradient(normal, rhs.view(), LINEAR_TOL, 20 * n + 100)?;
            let res = residual_norm(&problem.gradient(point.view()));
            Ok(finish(problem, point, ReferenceMethod::ConjugateGradient, res))
        }
        _ => restarted_fista(problem),
    }
}

fn residual_norm(r: &Array1<f64>) -> f64 {
    r.dot(r).sqrt()
}

fn finish(problem: &Problem, point: Array1<f64>, method: ReferenceMethod, certificate: f64) -> Reference {
    let value = problem.value(point.view());
    Reference {
        point,
        value,
        method,
        certificate,
    }
}

/// `L ||x - P(x - grad f(x) / L)||`.
pub fn gradient_mapping_norm(problem: &Problem, x: ArrayView1<f64>) -> Result<f64> {
    let l = problem.smoothness;
    let g = problem.gradient(x);
    let step = problem.feasible_set.project((&x - &(g / l)).view())?;
    Ok(l * residual_norm(&(&x - &step)))
}

/// Accelerated projected gradient with function-value restart: whenever
/// an extrapolated step fails to decrease `f`, momentum is dropped and the
/// step is retaken from the last iterate, so `f(x_k)` never increases.
fn restarted_fista(problem: &Problem) -> Result<Reference> {
    let l = problem.smoothness;
    let set = &problem.feasible_set;
    let grad_step = |y: &Array1<f64>| -> Result<Array1<f64>> {
        let g = problem.gradient(y.view());
        set.project((y - &(g / l)).view())
    };

    let mut x = problem.default_start();
    let mut fx = problem.value(x.view());
    let mut y = x.clone();
    let mut t = 1.0f64;
    for it in 0..MAX_ITER {
        if it % 16 == 0 {
            let gm = gradient_mapping_norm(problem, x.view())?;
            if gm <= STATIONARITY_TOL {
                return Ok(finish(problem, x, ReferenceMethod::RestartedFista, gm));
            }
        }
        let mut x_next = grad_step(&y)?;
        let mut f_next = problem.value(x_next.view());
        if f_next > fx {
            t = 1.0;
            x_next = grad_step(&x)?;
            f_next = problem.value(x_next.view());
            y = x_next.clone();
        } else {
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            y = &x_next + &((&x_next - &x) * ((t - 1.0) / t_next));
            t = t_next;
        }
        if !f_next.is_finite() {
            return Err(Error::ReferenceFailed(format!(
                "objective became non-finite at iteration {it}"
            )));
        }
        x = x_next;
        fx = f_next;
    }
    let gm = gradient_mapping_norm(problem, x.view())?;
    if gm <= STATIONARITY_TOL {
        return Ok(finish(problem, x, ReferenceMethod::RestartedFista, gm));
    }
    Err(Error::ReferenceFailed(format!(
        "{}: gradient mapping norm {gm:e} after {MAX_ITER} iterations (tolerance {STATIONARITY_TOL:e})",
        problem.name
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_hard_instance;
    use ndarray::array;

    #[test]
    fn hard_instance_n4_exact() {
        let p = make_hard_instance(4).unwrap();
        let r = reference_optimum(&p).unwrap();
        let expect = array![0.375, 0.125, -0.125, -0.375];
        assert!((&r.point - &expect).iter().all(|d| d.abs() < 1e-12));
        assert!((r.value + 0.375).abs() < 1e-12);
        assert_eq!(r.method, ReferenceMethod::ConjugateGradient);
    }

    #[test]
    fn simplex_projection_example() {
        let p = Problem::new(
            "q",
            Objective::DiagonalQuadratic {
                diag: Array1::ones(3),
                center: array![2.0, 0.0, 0.0],
            },
            1.0,
            1.0,
            FeasibleSet::Simplex,
        )
        .unwrap();
        let r = reference_optimum(&p).unwrap();
        assert!((&r.point - &array![1.0, 0.0, 0.0]).iter().all(|d| d.abs() < 1e-9));
        assert!((r.value - 0.5).abs() < 1e-10);
        assert_eq!(r.method, ReferenceMethod::RestartedFista);
    }

    #[test]
    fn unbounded_problems_fail_loudly() {
        let p = Problem::new(
            "c",
            Objective::CycleQuadratic {
                linear: array![1.0, 0.0, 0.0],
            },
            4.0,
            0.0,
            FeasibleSet::AllSpace,
        )
        .unwrap();
        assert!(matches!(reference_optimum(&p), Err(Error::ReferenceFailed(_))));
    }
}
