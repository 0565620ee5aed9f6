//! AGD, AXGD and AGD+: three couplings of a primal sequence `y_k` with the
//! dual state `z_k = z_0 - sum_i a_i g_i`, `z_0 = grad psi(x_0)`.

use ndarray::{Array1, ArrayView1};

use super::gd::grad_map;
use super::restart::RestartController;
use super::{Method, Phase, StepReport};
use crate::error::Result;
use crate::geometry::Regularizer;
use crate::oracle::GradientOracle;
use crate::schedule::{Schedule, ScheduleCursor, Step};

/// Iterate bundle shared by the dual-averaging methods.
#[derive(Debug, Clone, PartialEq)]
pub struct AgdpState {
    /// `y_k`
    pub y: Array1<f64>,
    /// `z_k`
    pub z: Array1<f64>,
    /// `grad psi*(z_k)`
    pub v: Array1<f64>,
    /// Last query point `x_k`.
    pub x: Array1<f64>,
    /// Gradient sample used in the last dual update.
    pub last_gradient: Array1<f64>,
    /// Restart anchor `x_0` of the current phase.
    pub anchor: Array1<f64>,
    pub cursor: ScheduleCursor,
    pub phase: Phase,
    /// `sum_i a_i^2 E||eta_i||^2` over the current phase.
    pub noise_budget: f64,
}

impl AgdpState {
    pub fn new(x0: Array1<f64>, reg: &Regularizer, schedule: Schedule) -> Result<Self> {
        let z = reg.gradient(x0.view());
        let v = reg.conjugate_gradient(z.view())?;
        Ok(AgdpState {
            y: x0.clone(),
            last_gradient: Array1::zeros(x0.len()),
            x: x0.clone(),
            z,
            v,
            anchor: x0,
            cursor: schedule.cursor(),
            phase: Phase::Accelerated,
            noise_budget: 0.0,
        })
    }

    /// Iterations taken in the current phase.
    pub fn k(&self) -> usize {
        self.cursor.index()
    }

    /// `A_k` of the current phase.
    pub fn a_sum(&self) -> f64 {
        self.cursor.sum()
    }

    pub fn z_energy(&self) -> f64 {
        self.z.dot(&self.z)
    }

    /// Restart from `anchor` with a fresh schedule.
    pub(crate) fn reseed(
        &mut self,
        anchor: Array1<f64>,
        reg: &Regularizer,
        schedule: Schedule,
        phase: Phase,
    ) -> Result<()> {
        self.z = reg.gradient(anchor.view());
        self.v = reg.conjugate_gradient(self.z.view())?;
        self.x = anchor.clone();
        self.y = anchor.clone();
        self.anchor = anchor;
        self.cursor = schedule.cursor();
        self.phase = phase;
        self.noise_budget = 0.0;
        Ok(())
    }

    fn begin_step(&mut self) -> (Step, f64, f64) {
        let step = self.cursor.advance();
        let mix = step.ratio;
        (step, 1.0 - mix, mix)
    }

    fn combine(&self, keep: f64, mix: f64, point: ArrayView1<f64>) -> Array1<f64> {
        &self.y * keep + &point * mix
    }

    fn charge_noise(&mut self, step: &Step, oracle: &GradientOracle<'_>) {
        self.noise_budget += step.weight * step.weight * oracle.second_moment();
    }
}

/// One AGD+ iteration:
/// `x_k = (A_{k-1}/A_k) y_{k-1} + (a_k/A_k) grad psi*(z_{k-1})`,
/// `z_k = z_{k-1} - a_k g(x_k)`,
/// `y_k = (A_{k-1}/A_k) y_{k-1} + (a_k/A_k) grad psi*(z_k)`.
pub fn agdp_step(state: &mut AgdpState, oracle: &mut GradientOracle<'_>, reg: &Regularizer) -> Result<()> {
    let (step, keep, mix) = state.begin_step();
    state.x = state.combine(keep, mix, state.v.view());
    let g = oracle.query(state.x.view())?;
    state.z.scaled_add(-step.weight, &g);
    state.v = reg.conjugate_gradient(state.z.view())?;
    state.y = state.combine(keep, mix, state.v.view());
    state.last_gradient = g;
    state.charge_noise(&step, oracle);
    Ok(())
}

/// One AGD iteration: as AGD+, but `y_k = Grad(x_k)` reusing the same sample.
pub fn agd_step(state: &mut AgdpState, oracle: &mut GradientOracle<'_>, reg: &Regularizer) -> Result<()> {
    let (step, keep, mix) = state.begin_step();
    state.x = state.combine(keep, mix, state.v.view());
    let g = oracle.query(state.x.view())?;
    state.z.scaled_add(-step.weight, &g);
    state.v = reg.conjugate_gradient(state.z.view())?;
    state.y = grad_map(oracle, state.x.view(), &g)?;
    state.last_gradient = g;
    state.charge_noise(&step, oracle);
    Ok(())
}

/// One AXGD iteration (two queries):
/// `y_k = (A_{k-1}/A_k) y_{k-1} + (a_k/A_k) grad psi*(z_{k-1} - a_k g(x_k))`,
/// `z_k = z_{k-1} - a_k g(y_k)`.
pub fn axgd_step(state: &mut AgdpState, oracle: &mut GradientOracle<'_>, reg: &Regularizer) -> Result<()> {
    let (step, keep, mix) = state.begin_step();
    state.x = state.combine(keep, mix, state.v.view());
    let gx = oracle.query(state.x.view())?;
    let mut lookahead = state.z.clone();
    lookahead.scaled_add(-step.weight, &gx);
    let v_hat = reg.conjugate_gradient(lookahead.view())?;
    state.y = state.combine(keep, mix, v_hat.view());
    let gy = oracle.query(state.y.view())?;
    state.z.scaled_add(-step.weight, &gy);
    state.v = reg.conjugate_gradient(state.z.view())?;
    state.last_gradient = gy;
    state.charge_noise(&step, oracle);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualVariant {
    Agd,
    Axgd,
    Agdp,
}

/// A dual-averaging method with optional restart/slow-down control.
#[derive(Debug, Clone)]
pub struct DualAveraging {
    pub variant: DualVariant,
    pub state: AgdpState,
    pub regularizer: Regularizer,
    pub restart: RestartController,
}

impl DualAveraging {
    pub fn new(
        variant: DualVariant,
        x0: Array1<f64>,
        regularizer: Regularizer,
        schedule: Schedule,
        restart: RestartController,
    ) -> Result<Self> {
        let state = AgdpState::new(x0, &regularizer, schedule)?;
        Ok(DualAveraging {
            variant,
            state,
            regularizer,
            restart,
        })
    }
}

impl Method for DualAveraging {
    fn step(&mut self, oracle: &mut GradientOracle<'_>) -> Result<StepReport> {
        match self.variant {
            DualVariant::Agd => agd_step(&mut self.state, oracle, &self.regularizer)?,
            DualVariant::Axgd => axgd_step(&mut self.state, oracle, &self.regularizer)?,
            DualVariant::Agdp => agdp_step(&mut self.state, oracle, &self.regularizer)?,
        }
        let restarted = self.restart.maybe_restart(&mut self.state, &self.regularizer)?;
        Ok(StepReport { restarted })
    }

    fn output(&self) -> ArrayView1<'_, f64> {
        self.state.y.view()
    }

    fn dual_energy(&self) -> f64 {
        self.state.z_energy()
    }

    fn phase(&self) -> Option<Phase> {
        Some(self.state.phase)
    }
}
