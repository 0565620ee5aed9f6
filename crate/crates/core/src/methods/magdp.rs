//! Accelerated method for smooth strongly convex objectives, driven by the
//! minimizer of the strongly convex lower-bound model `m_k`.

use ndarray::{Array1, ArrayView1};

use super::{Method, Phase, StepReport};
use crate::error::{Error, Result};
use crate::geometry::{argmin_m_k, LowerBoundSums};
use crate::oracle::GradientOracle;
use crate::schedule::{Schedule, ScheduleCursor};

/// State of the strongly convex method.
///
/// The model sums are stored divided by `A_k`, so geometric schedules whose
/// `A_k` eventually overflows keep a finite state; only `theta_k = a_k / A_k`
/// enters the update.
#[derive(Debug, Clone, PartialEq)]
pub struct MagdpState {
    pub y: Array1<f64>,
    pub v: Array1<f64>,
    pub x: Array1<f64>,
    pub x0: Array1<f64>,
    pub cursor: ScheduleCursor,
    /// `sum_i a_i g_i / A_k`
    grad_avg: Array1<f64>,
    /// `sum_i a_i x_i / A_k`
    point_avg: Array1<f64>,
    /// `mu0 / A_k`
    anchor_weight: f64,
    first_weight: f64,
    mu: f64,
    smoothness: f64,
}

impl MagdpState {
    pub fn new(x0: Array1<f64>, mu: f64, smoothness: f64, schedule: Schedule) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::InvalidConfiguration(
                "the strongly convex method needs a strong convexity constant mu > 0".into(),
            ));
        }
        let n = x0.len();
        Ok(MagdpState {
            y: x0.clone(),
            v: x0.clone(),
            x: x0.clone(),
            x0,
            cursor: schedule.cursor(),
            grad_avg: Array1::zeros(n),
            point_avg: Array1::zeros(n),
            anchor_weight: 0.0,
            first_weight: 0.0,
            mu,
            smoothness,
        })
    }

    pub fn k(&self) -> usize {
        self.cursor.index()
    }

    /// `mu0 = a_1 (L - mu)`, defined after the first step.
    pub fn mu0(&self) -> f64 {
        self.first_weight * (self.smoothness - self.mu)
    }

    /// Un-normalized sums `(sum a_i g_i, sum a_i x_i, A_k)`.
    pub fn sums(&self) -> LowerBoundSums {
        let a = self.cursor.sum();
        LowerBoundSums {
            grad_sum: &self.grad_avg * a,
            point_sum: &self.point_avg * a,
            weight_sum: a,
        }
    }

    /// `||sum_i a_i g_i / A_k||^2`.
    pub fn gradient_energy(&self) -> f64 {
        self.grad_avg.dot(&self.grad_avg)
    }
}

/// One iteration with `theta_k = a_k / A_k`:
/// `x_k = y_{k-1}/(1+theta_k) + theta_k v_{k-1}/(1+theta_k)`,
/// `v_k = argmin m_k`, `y_k = (1-theta_k) y_{k-1} + theta_k v_k`.
pub fn magdp_step(state: &mut MagdpState, oracle: &mut GradientOracle<'_>) -> Result<()> {
    let step = state.cursor.advance();
    let theta = step.ratio;
    state.x = &state.y * (1.0 / (1.0 + theta)) + &state.v * (theta / (1.0 + theta));
    let g = oracle.query(state.x.view())?;

    if step.index == 1 {
        state.first_weight = step.weight;
        state.grad_avg = g;
        state.point_avg = state.x.clone();
        state.anchor_weight = state.smoothness - state.mu;
    } else {
        let keep = 1.0 - theta;
        state.grad_avg = &state.grad_avg * keep + &g * theta;
        state.point_avg = &state.point_avg * keep + &state.x * theta;
        state.anchor_weight *= keep;
    }

    let normalized = LowerBoundSums {
        grad_sum: state.grad_avg.clone(),
        point_sum: state.point_avg.clone(),
        weight_sum: 1.0,
    };
    let set = &oracle.problem().feasible_set;
    state.v = argmin_m_k(&normalized, state.mu, state.anchor_weight, state.x0.view(), set)?;
    state.y = &state.y * (1.0 - theta) + &state.v * theta;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct StronglyConvexAgdp {
    pub state: MagdpState,
}

impl Method for StronglyConvexAgdp {
    fn step(&mut self, oracle: &mut GradientOracle<'_>) -> Result<StepReport> {
        magdp_step(&mut self.state, oracle)?;
        Ok(StepReport::default())
    }

    fn output(&self) -> ArrayView1<'_, f64> {
        self.state.y.view()
    }

    fn dual_energy(&self) -> f64 {
        self.state.gradient_energy()
    }

    fn phase(&self) -> Option<Phase> {
        None
    }
}
