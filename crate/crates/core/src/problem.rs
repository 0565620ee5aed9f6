//! Problems: a smooth convex objective, its constants, and a feasible set.

use ndarray::{Array1, Array2, ArrayView1, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;

/// Convex feasible region. All built-ins use the Euclidean norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibleSet {
    AllSpace,
    /// Probability simplex `{x >= 0, sum x = 1}`.
    Simplex,
    L1Ball {
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

impl FeasibleSet {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            FeasibleSet::AllSpace | FeasibleSet::Simplex => Ok(()),
            FeasibleSet::L1Ball { radius } => {
                if *radius > 0.0 && radius.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!(
                        "l1 ball radius must be positive, got {radius}"
                    )))
                }
            }
            FeasibleSet::Box { lower, upper } => {
                if lower.len() != dim || upper.len() != dim {
                    return Err(Error::InvalidArgument(format!(
                        "box bounds have lengths {}/{} but dimension is {dim}",
                        lower.len(),
                        upper.len()
                    )));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l <= u)) {
                    return Err(Error::InvalidArgument("box lower bound exceeds upper bound".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, FeasibleSet::AllSpace)
    }

    /// Exact l2 diameter; `None` for the whole space.
    pub fn diameter(&self, dim: usize) -> Option<f64> {
        match self {
            FeasibleSet::AllSpace => None,
            FeasibleSet::Simplex => Some(if dim >= 2 { 2f64.sqrt() } else { 0.0 }),
            FeasibleSet::L1Ball { radius } => Some(2.0 * radius),
            FeasibleSet::Box { lower, upper } => Some(
                lower
                    .iter()
                    .zip(upper)
                    .map(|(l, u)| (u - l) * (u - l))
                    .sum::<f64>()
                    .sqrt(),
            ),
        }
    }

    /// `max_{u in X} ||u - x||`. The maximum of a convex function over a
    /// polytope sits at a vertex, so this is exact for every bounded kind.
    pub fn max_distance_from(&self, x: ArrayView1<f64>) -> Option<f64> {
        let sq = x.dot(&x);
        match self {
            FeasibleSet::AllSpace => None,
            FeasibleSet::Simplex => {
                let min_coord = x.iter().cloned().fold(f64::INFINITY, f64::min);
                Some((sq - 2.0 * min_coord + 1.0).max(0.0).sqrt())
            }
            FeasibleSet::L1Ball { radius } => {
                let max_abs = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                Some((sq + 2.0 * radius * max_abs + radius * radius).sqrt())
            }
            FeasibleSet::Box { lower, upper } => Some(
                x.iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(xi, (l, u))| {
                        let d = (xi - l).abs().max((u - xi).abs());
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt(),
            ),
        }
    }

    pub fn contains(&self, x: ArrayView1<f64>, tol: f64) -> bool {
        match self {
            FeasibleSet::AllSpace => x.iter().all(|v| v.is_finite()),
            FeasibleSet::Simplex => {
                x.iter().all(|&v| v >= -tol) && (x.sum() - 1.0).abs() <= tol * x.len().max(1) as f64
            }
            FeasibleSet::L1Ball { radius } => x.iter().map(|v| v.abs()).sum::<f64>() <= radius + tol,
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol),
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, z: ArrayView1<f64>) -> Result<Array1<f64>> {
        match self {
            FeasibleSet::AllSpace => Ok(z.to_owned()),
            FeasibleSet::Simplex => geometry::project_simplex(z),
            FeasibleSet::L1Ball { radius } => geometry::project_l1_ball(z, *radius),
            FeasibleSet::Box { lower, upper } => geometry::project_box(z, lower, upper),
        }
    }
}

/// Built-in smooth convex objectives.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// `1/2 <Ax, x> - <b, x>` with `A` the Laplacian of the n-cycle.
    CycleQuadratic { linear: Array1<f64> },
    /// `1/2 sum_i d_i (x_i - c_i)^2`.
    DiagonalQuadratic { diag: Array1<f64>, center: Array1<f64> },
    /// `(1/2m) ||Dx - y||^2`.
    LeastSquares { design: Array2<f64>, targets: Array1<f64> },
    /// `(1/m) sum_i log(1 + exp(-s_i <d_i, x>))` with `s_i` in {-1, +1}.
    Logistic { design: Array2<f64>, signs: Array1<f64> },
}

/// `y = A x` for the cycle Laplacian (2 on the diagonal, -1 to each neighbour).
pub fn cycle_laplacian_apply(x: ArrayView1<f64>) -> Array1<f64> {
    let n = x.len();
    Array1::from_shape_fn(n, |i| {
        let prev = x[(i + n - 1) % n];
        let next = x[(i + 1) % n];
        2.0 * x[i] - prev - next
    })
}

fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl Objective {
    pub fn dim(&self) -> usize {
        match self {
            Objective::CycleQuadratic { linear } => linear.len(),
            Objective::DiagonalQuadratic { diag, .. } => diag.len(),
            Objective::LeastSquares { design, .. } | Objective::Logistic { design, .. } => design.ncols(),
        }
    }

    pub fn value(&self, x: ArrayView1<f64>) -> f64 {
        match self {
            Objective::CycleQuadratic { linear } => 0.5 * cycle_laplacian_apply(x).dot(&x) - linear.dot(&x),
            Objective::DiagonalQuadratic { diag, center } => {
                0.5 * Zip::from(diag)
                    .and(center)
                    .and(&x)
                    .fold(0.0, |acc, d, c, xi| acc + d * (xi - c) * (xi - c))
            }
            Objective::LeastSquares { design, targets } => {
                let r = design.dot(&x) - targets;
                0.5 * r.dot(&r) / design.nrows() as f64
            }
            Objective::Logistic { design, signs } => {
                let margins = design.dot(&x);
                Zip::from(&margins)
                    .and(signs)
                    .fold(0.0, |acc, m, s| acc + softplus(-s * m))
                    / design.nrows() as f64
            }
        }
    }

    pub fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        match self {
            Objective::CycleQuadratic { linear } => cycle_laplacian_apply(x) - linear,
            Objective::DiagonalQuadratic { diag, center } => {
                Zip::from(diag).and(center).and(&x).map_collect(|d, c, xi| d * (xi - c))
            }
            Objective::LeastSquares { design, targets } => {
                let r = design.dot(&x) - targets;
                design.t().dot(&r) / design.nrows() as f64
            }
            Objective::Logistic { design, signs } => {
                let margins = design.dot(&x);
                let weights = Zip::from(&margins).and(signs).map_collect(|m, s| -s * sigmoid(-s * m));
                design.t().dot(&weights) / design.nrows() as f64
            }
        }
    }
}

/// A smooth convex minimization problem over a feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub objective: Objective,
    /// Lipschitz constant of the gradient.
    pub smoothness: f64,
    /// Strong convexity modulus; zero for merely convex problems.
    pub strong_convexity: f64,
    pub feasible_set: FeasibleSet,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        objective: Objective,
        smoothness: f64,
        strong_convexity: f64,
        feasible_set: FeasibleSet,
    ) -> Result<Self> {
        if !(smoothness > 0.0 && smoothness.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "smoothness constant must be positive, got {smoothness}"
            )));
        }
        if !(strong_convexity >= 0.0 && strong_convexity <= smoothness) {
            return Err(Error::InvalidArgument(format!(
                "strong convexity {strong_convexity} must lie in [0, L = {smoothness}]"
            )));
        }
        let dim = objective.dim();
        if dim == 0 {
            return Err(Error::InvalidArgument("problem dimension must be positive".into()));
        }
        feasible_set.validate(dim)?;
        Ok(Problem {
            name: name.into(),
            objective,
            smoothness,
            strong_convexity,
            feasible_set,
        })
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn value(&self, x: ArrayView1<f64>) -> f64 {
        self.objective.value(x)
    }

    pub fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        self.objective.gradient(x)
    }

    /// Default starting point: the projection of the origin onto the set.
    pub fn default_start(&self) -> Array1<f64> {
        self.feasible_set
            .project(Array1::zeros(self.dim()).view())
            .expect("feasible set validated at construction")
    }

    pub fn ensure_dim(&self, x: ArrayView1<f64>) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "point has dimension {} but problem has dimension {}",
                x.len(),
                self.dim()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn diameters_of_bounded_sets() {
        assert_eq!(FeasibleSet::Simplex.diameter(5), Some(2f64.sqrt()));
        assert_eq!(FeasibleSet::L1Ball { radius: 3.0 }.diameter(4), Some(6.0));
        assert_eq!(FeasibleSet::AllSpace.diameter(4), None);
        let b = FeasibleSet::Box {
            lower: vec![0.0, 0.0],
            upper: vec![3.0, 4.0],
        };
        assert_eq!(b.diameter(2), Some(5.0));
    }

    #[test]
    fn max_distance_hits_a_vertex() {
        let x = array![0.5, 0.5, 0.0];
        // farthest vertex of the simplex is e_3
        let r = FeasibleSet::Simplex.max_distance_from(x.view()).unwrap();
        assert!((r - (0.25f64 + 0.25 + 1.0).sqrt()).abs() < 1e-15);
        let r = FeasibleSet::L1Ball { radius: 1.0 }
            .max_distance_from(array![0.0, 0.0].view())
            .unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn rejects_bad_constants() {
        let obj = Objective::DiagonalQuadratic {
            diag: array![1.0],
            center: array![0.0],
        };
        assert!(Problem::new("q", obj.clone(), 0.0, 0.0, FeasibleSet::AllSpace).is_err());
        assert!(Problem::new("q", obj.clone(), 1.0, 2.0, FeasibleSet::AllSpace).is_err());
        assert!(Problem::new("q", obj, 1.0, 0.0, FeasibleSet::L1Ball { radius: -1.0 }).is_err());
    }

    #[test]
    fn logistic_pieces_are_stable() {
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!(softplus(-800.0) >= 0.0);
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
        assert!(sigmoid(-800.0).is_finite());
    }
}
