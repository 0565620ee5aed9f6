use ndarray::{Array1, ArrayView1};

use super::{Method, Phase, StepReport};
use crate::error::Result;
use crate::oracle::GradientOracle;

/// Projected gradient step `P_X(x - grad f(x) / L)`, the Euclidean `Grad`
/// operator.
pub fn gd_step(oracle: &mut GradientOracle<'_>, x: ArrayView1<f64>) -> Result<Array1<f64>> {
    let g = oracle.query(x)?;
    grad_map(oracle, x, &g)
}

/// `Grad` with an already-sampled gradient.
pub(crate) fn grad_map(oracle: &GradientOracle<'_>, x: ArrayView1<f64>, g: &Array1<f64>) -> Result<Array1<f64>> {
    let problem = oracle.problem();
    let step = 1.0 / problem.smoothness;
    let target = &x - &(g * step);
    problem.feasible_set.project(target.view())
}

#[derive(Debug, Clone)]
pub struct GradientDescent {
    x: Array1<f64>,
}

impl GradientDescent {
    pub fn new(x0: Array1<f64>) -> Self {
        GradientDescent { x: x0 }
    }
}

impl Method for GradientDescent {
    fn step(&mut self, oracle: &mut GradientOracle<'_>) -> Result<StepReport> {
        self.x = gd_step(oracle, self.x.view())?;
        Ok(StepReport::default())
    }

    fn output(&self) -> ArrayView1<'_, f64> {
        self.x.view()
    }

    fn dual_energy(&self) -> f64 {
        0.0
    }

    fn phase(&self) -> Option<Phase> {
        None
    }
}
