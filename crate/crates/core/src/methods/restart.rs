//! Restart + slow-down control for the dual-averaging methods.
//!
//! A restart fires when the dual signal energy `||z_k||^2` falls to the
//! accumulated noise energy `sum_i a_i^2 E||eta_i||^2`. The method then
//! restarts from `y_k` with a slower schedule: uniform first, then (for the
//! two-stage chain) inverse square root.

use serde::{Deserialize, Serialize};

use super::dual::AgdpState;
use super::Phase;
use crate::error::Result;
use crate::geometry::Regularizer;
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartPolicy {
    #[default]
    None,
    /// One slow-down to `a_i = mu_psi / L`.
    Rsd,
    /// Slow down to `a_i = mu_psi / L`, then to `a_i = mu_psi / (L sqrt(i))`.
    Rsd2Chain,
}

impl RestartPolicy {
    pub fn max_slowdowns(self) -> usize {
        match self {
            RestartPolicy::None => 0,
            RestartPolicy::Rsd => 1,
            RestartPolicy::Rsd2Chain => 2,
        }
    }
}

/// `||z_k||^2 <= sum_i a_i^2 E||eta_i||^2`.
pub fn restart_check(state: &AgdpState) -> bool {
    state.z_energy() <= state.noise_budget
}

/// First phase index at which the criterion is evaluated; at `k = 0` the
/// budget is zero and `z` holds no gradient information.
const COOLDOWN: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct RestartController {
    policy: RestartPolicy,
    /// `mu_psi / L`
    slow_gamma: f64,
    slowdowns: usize,
}

impl RestartController {
    pub fn new(policy: RestartPolicy, slow_gamma: f64) -> Self {
        RestartController {
            policy,
            slow_gamma,
            slowdowns: 0,
        }
    }

    pub fn policy(&self) -> RestartPolicy {
        self.policy
    }

    pub fn slowdowns(&self) -> usize {
        self.slowdowns
    }

    pub fn exhausted(&self) -> bool {
        self.slowdowns >= self.policy.max_slowdowns()
    }

    /// Restart from `y_k` and switch to the next slower schedule. Returns
    /// `false` (and leaves the state alone) once the policy is exhausted.
    pub fn apply_restart(&mut self, state: &mut AgdpState, reg: &Regularizer) -> Result<bool> {
        if self.exhausted() {
            return Ok(false);
        }
        let (schedule, phase) = match self.slowdowns {
            0 => (Schedule::Uniform { gamma: self.slow_gamma }, Phase::Uniform),
            _ => (Schedule::InvSqrt { gamma: self.slow_gamma }, Phase::InvSqrt),
        };
        let anchor = state.y.clone();
        state.reseed(anchor, reg, schedule, phase)?;
        self.slowdowns += 1;
        Ok(true)
    }

    pub fn maybe_restart(&mut self, state: &mut AgdpState, reg: &Regularizer) -> Result<bool> {
        if self.exhausted() || state.k() < COOLDOWN || !restart_check(state) {
            return Ok(false);
        }
        self.apply_restart(state, reg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::FeasibleSet;
    use ndarray::array;

    fn state() -> (AgdpState, Regularizer) {
        let reg = Regularizer::new(1.0, FeasibleSet::AllSpace).unwrap();
        let s = AgdpState::new(array![0.0, 0.0], &reg, Schedule::Accelerated { gamma: 1.0 }).unwrap();
        (s, reg)
    }

    #[test]
    fn check_examples() {
        let (mut s, _) = state();
        s.noise_budget = 0.5;
        assert!(restart_check(&s));

        s.z = array![10f64.sqrt(), 0.0];
        s.noise_budget = 1.0;
        assert!(!restart_check(&s));

        // exact oracle: zero budget only passes for a zero dual vector
        s.noise_budget = 0.0;
        assert!(!restart_check(&s));
        s.z = array![0.0, 0.0];
        assert!(restart_check(&s));
    }

    #[test]
    fn chain_switches_phases_then_exhausts() {
        let (mut s, reg) = state();
        s.y = array![1.0, -1.0];
        let mut rc = RestartController::new(RestartPolicy::Rsd2Chain, 1.0);

        assert!(rc.apply_restart(&mut s, &reg).unwrap());
        assert_eq!(s.phase, Phase::Uniform);
        assert_eq!(s.x, array![1.0, -1.0]);
        assert_eq!(s.anchor, array![1.0, -1.0]);
        assert_eq!(s.z, reg.gradient(array![1.0, -1.0].view()));
        assert_eq!((s.k(), s.a_sum(), s.noise_budget), (0, 0.0, 0.0));

        assert!(rc.apply_restart(&mut s, &reg).unwrap());
        assert_eq!(s.phase, Phase::InvSqrt);

        s.y = array![5.0, 5.0];
        assert!(!rc.apply_restart(&mut s, &reg).unwrap());
        assert_eq!(s.phase, Phase::InvSqrt);
        assert_eq!(s.anchor, array![1.0, -1.0]);
    }

    #[test]
    fn single_slowdown_policy() {
        let (mut s, reg) = state();
        let mut rc = RestartController::new(RestartPolicy::Rsd, 0.5);
        assert!(rc.apply_restart(&mut s, &reg).unwrap());
        assert_eq!(s.phase, Phase::Uniform);
        assert_eq!(s.cursor.schedule(), Schedule::Uniform { gamma: 0.5 });
        assert!(!rc.apply_restart(&mut s, &reg).unwrap());
    }

    #[test]
    fn cooldown_blocks_early_trigger() {
        let (mut s, reg) = state();
        let mut rc = RestartController::new(RestartPolicy::Rsd, 1.0);
        s.noise_budget = 1.0;
        assert!(!rc.maybe_restart(&mut s, &reg).unwrap());
        s.cursor.advance();
        s.cursor.advance();
        assert!(rc.maybe_restart(&mut s, &reg).unwrap());
    }

    #[test]
    fn no_policy_never_restarts() {
        let (mut s, reg) = state();
        let mut rc = RestartController::new(RestartPolicy::None, 1.0);
        s.cursor.advance();
        s.cursor.advance();
        s.noise_budget = 1e9;
        assert!(!rc.maybe_restart(&mut s, &reg).unwrap());
    }
}
