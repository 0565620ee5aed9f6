//! Projections, the quadratic mirror map and its conjugate gradient, and the
//! minimizer of the strongly convex lower-bound model.

use ndarray::{Array1, ArrayView1, Zip};

use crate::error::{Error, Result};
use crate::problem::FeasibleSet;

/// Shift `theta` such that `sum_i max(v_i - theta, 0) = total` for nonnegative
/// targets. Sort-based; ties are ordered by coordinate index.
fn simplex_threshold(values: ArrayView1<f64>, total: f64) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &idx) in order.iter().enumerate() {
        cumsum += values[idx];
        let candidate = (cumsum - total) / (j + 1) as f64;
        if values[idx] - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    theta
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(z: ArrayView1<f64>) -> Result<Array1<f64>> {
    if z.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot project an empty vector onto the simplex".into(),
        ));
    }
    let theta = simplex_threshold(z, 1.0);
    Ok(z.mapv(|v| (v - theta).max(0.0)))
}

/// Euclidean projection onto `{x : ||x||_1 <= radius}`.
pub fn project_l1_ball(z: ArrayView1<f64>, radius: f64) -> Result<Array1<f64>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "l1 ball radius must be positive, got {radius}"
        )));
    }
    let l1: f64 = z.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        return Ok(z.to_owned());
    }
    let magnitudes = z.mapv(f64::abs);
    let theta = simplex_threshold(magnitudes.view(), radius);
    Ok(z.mapv(|v| v.signum() * (v.abs() - theta).max(0.0)))
}

pub fn project_box(z: ArrayView1<f64>, lower: &[f64], upper: &[f64]) -> Result<Array1<f64>> {
    if lower.len() != z.len() || upper.len() != z.len() {
        return Err(Error::InvalidArgument(format!(
            "box bounds of length {}/{} do not match point of length {}",
            lower.len(),
            upper.len(),
            z.len()
        )));
    }
    Ok(Array1::from_shape_fn(z.len(), |i| z[i].clamp(lower[i], upper[i])))
}

/// Quadratic mirror map `psi(x) = (c/2) ||x||^2` restricted to a feasible set.
///
/// `c` is also the strong convexity modulus of `psi`. Non-quadratic mirror maps
/// (e.g. entropy on the simplex) would need Bregman projections and are not
/// provided.
#[derive(Debug, Clone, PartialEq)]
pub struct Regularizer {
    pub scale: f64,
    pub feasible_set: FeasibleSet,
}

impl Regularizer {
    pub fn new(scale: f64, feasible_set: FeasibleSet) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "regularizer scale must be positive, got {scale}"
            )));
        }
        Ok(Regularizer { scale, feasible_set })
    }

    pub fn strong_convexity(&self) -> f64 {
        self.scale
    }

    pub fn value(&self, x: ArrayView1<f64>) -> f64 {
        0.5 * self.scale * x.dot(&x)
    }

    pub fn gradient(&self, x: ArrayView1<f64>) -> Array1<f64> {
        x.mapv(|v| self.scale * v)
    }

    /// `argmax_{x in X} <z, x> - psi(x)`, i.e. the projection of `z / c`.
    pub fn conjugate_gradient(&self, z: ArrayView1<f64>) -> Result<Array1<f64>> {
        grad_psi_star(self, z)
    }
}

/// `grad psi*(z)`; see [`Regularizer::conjugate_gradient`].
pub fn grad_psi_star(reg: &Regularizer, z: ArrayView1<f64>) -> Result<Array1<f64>> {
    if let FeasibleSet::Box { lower, .. } = &reg.feasible_set {
        if lower.len() != z.len() {
            return Err(Error::UnsupportedCombination(format!(
                "box of dimension {} paired with dual point of dimension {}",
                lower.len(),
                z.len()
            )));
        }
    }
    let scaled = z.mapv(|v| v / reg.scale);
    reg.feasible_set.project(scaled.view())
}

/// `psi(x) - psi(y) - <grad psi(y), x - y>`.
pub fn bregman_divergence(psi: &Regularizer, x: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "bregman divergence of points with dimensions {} and {}",
            x.len(),
            y.len()
        )));
    }
    let diff = &x - &y;
    let d = psi.value(x) - psi.value(y) - psi.gradient(y).dot(&diff);
    Ok(d.max(0.0))
}

/// Weighted sums defining the strongly convex lower-bound model
/// `m_k(u) = sum_i a_i (<g_i, u - x_i> + mu/2 ||u - x_i||^2) + mu0/2 ||u - x0||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundSums {
    /// `sum_i a_i g_i`
    pub grad_sum: Array1<f64>,
    /// `sum_i a_i x_i`
    pub point_sum: Array1<f64>,
    /// `sum_i a_i`
    pub weight_sum: f64,
}

impl LowerBoundSums {
    pub fn zeros(dim: usize) -> Self {
        LowerBoundSums {
            grad_sum: Array1::zeros(dim),
            point_sum: Array1::zeros(dim),
            weight_sum: 0.0,
        }
    }
}

/// Minimizer of `m_k` over the set. The Hessian of `m_k` is
/// `(mu A_k + mu0) I`, so the constrained minimizer is the Euclidean
/// projection of the stationary point.
pub fn argmin_m_k(
    sums: &LowerBoundSums,
    mu: f64,
    mu0: f64,
    x0: ArrayView1<f64>,
    set: &FeasibleSet,
) -> Result<Array1<f64>> {
    let curvature = mu * sums.weight_sum + mu0;
    if !(curvature > 0.0) {
        return Err(Error::InvalidState(format!(
            "lower-bound model curvature mu*A_k + mu0 = {curvature} is not positive"
        )));
    }
    let dim = x0.len();
    if sums.grad_sum.len() != dim || sums.point_sum.len() != dim {
        return Err(Error::InvalidArgument(
            "lower-bound sums and anchor point differ in dimension".into(),
        ));
    }
    let center = Zip::from(&sums.point_sum)
        .and(&sums.grad_sum)
        .and(&x0)
        .map_collect(|sx, sg, x| (mu * sx - sg + mu0 * x) / curvature);
    set.project(center.view())
}
