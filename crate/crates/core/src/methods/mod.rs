//! First-order methods: gradient descent, AGD, AXGD, AGD+ (with its
//! theoretically-optimal schedule and restart control) and the strongly
//! convex variant.

pub mod dual;
pub mod gd;
pub mod magdp;
pub mod restart;

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

pub use dual::{agd_step, agdp_step, axgd_step, AgdpState, DualAveraging, DualVariant};
pub use gd::{gd_step, GradientDescent};
pub use magdp::{magdp_step, MagdpState, StronglyConvexAgdp};
pub use restart::{restart_check, RestartController, RestartPolicy};

use crate::error::{Error, Result};
use crate::geometry::Regularizer;
use crate::oracle::GradientOracle;
use crate::problem::Problem;
use crate::schedule::{make_schedule, Schedule, ScheduleContext, ScheduleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Gd,
    Agd,
    Axgd,
    Agdp,
    /// AGD+ with the horizon-dependent, noise-aware schedule.
    ToAgdp,
    Magdp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Gd,
        Algorithm::Agd,
        Algorithm::Axgd,
        Algorithm::Agdp,
        Algorithm::ToAgdp,
        Algorithm::Magdp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gd => "gd",
            Algorithm::Agd => "agd",
            Algorithm::Axgd => "axgd",
            Algorithm::Agdp => "agdp",
            Algorithm::ToAgdp => "to_agdp",
            Algorithm::Magdp => "magdp",
        }
    }

    /// Gradient queries per iteration.
    pub fn queries_per_iteration(self) -> u64 {
        match self {
            Algorithm::Axgd => 2,
            _ => 1,
        }
    }

    pub fn default_schedule(self, horizon: usize) -> Option<ScheduleSpec> {
        match self {
            Algorithm::Gd => None,
            Algorithm::Agd | Algorithm::Axgd | Algorithm::Agdp => Some(ScheduleSpec::Accelerated { gamma: None }),
            Algorithm::ToAgdp => Some(ScheduleSpec::TheoreticallyOptimal {
                horizon: Some(horizon),
                sigma_unknown: false,
            }),
            Algorithm::Magdp => Some(ScheduleSpec::ScGeometric { ratio: None }),
        }
    }

    pub fn supports_restart(self) -> bool {
        matches!(
            self,
            Algorithm::Agd | Algorithm::Axgd | Algorithm::Agdp | Algorithm::ToAgdp
        )
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfiguration(format!("unknown algorithm '{s}'")))
    }
}

/// Schedule phase of a restartable method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Accelerated,
    Uniform,
    InvSqrt,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepReport {
    pub restarted: bool,
}

/// An iterative method advanced one iteration at a time.
pub trait Method {
    fn step(&mut self, oracle: &mut GradientOracle<'_>) -> Result<StepReport>;

    /// Current output point `y_k`.
    fn output(&self) -> ArrayView1<'_, f64>;

    /// `||z_k||^2` for the dual-averaging methods; see each implementation.
    fn dual_energy(&self) -> f64;

    fn phase(&self) -> Option<Phase>;
}

/// Everything needed to instantiate a method on a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSetup {
    pub algorithm: Algorithm,
    /// `None` selects the algorithm's default.
    pub schedule: Option<ScheduleSpec>,
    pub restart: RestartPolicy,
    /// Scale `c` of `psi = (c/2)||x||^2`; `None` means `c = L`.
    pub psi_scale: Option<f64>,
    pub iterations: usize,
}

impl MethodSetup {
    pub fn new(algorithm: Algorithm, iterations: usize) -> Self {
        MethodSetup {
            algorithm,
            schedule: None,
            restart: RestartPolicy::None,
            psi_scale: None,
            iterations,
        }
    }

    pub fn validate(&self, problem: &Problem) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfiguration("iterations must be positive".into()));
        }
        if self.restart != RestartPolicy::None && !self.algorithm.supports_restart() {
            return Err(Error::InvalidConfiguration(format!(
                "restart policy {:?} does not apply to {}",
                self.restart, self.algorithm
            )));
        }
        if self.algorithm == Algorithm::Magdp && !(problem.strong_convexity > 0.0) {
            return Err(Error::InvalidConfiguration(format!(
                "magdp needs a strongly convex problem, '{}' has mu = 0",
                problem.name
            )));
        }
        if self.algorithm == Algorithm::Gd && self.schedule.is_some() {
            return Err(Error::InvalidConfiguration("gd takes no schedule".into()));
        }
        Ok(())
    }

    pub fn regularizer(&self, problem: &Problem) -> Result<Regularizer> {
        Regularizer::new(
            self.psi_scale.unwrap_or(problem.smoothness),
            problem.feasible_set.clone(),
        )
    }

    pub fn resolve_schedule(&self, problem: &Problem, second_moment: f64) -> Result<Option<Schedule>> {
        let spec = match (&self.schedule, self.algorithm.default_schedule(self.iterations)) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => s,
            (None, None) => return Ok(None),
        };
        let mu_psi = match self.algorithm {
            Algorithm::Magdp => problem.smoothness - problem.strong_convexity,
            _ => self.psi_scale.unwrap_or(problem.smoothness),
        };
        let ctx = ScheduleContext {
            mu_psi,
            smoothness: problem.smoothness,
            strong_convexity: problem.strong_convexity,
            second_moment: Some(second_moment),
            horizon: Some(self.iterations),
        };
        make_schedule(&spec, &ctx).map(Some)
    }

    /// Build the method starting at `x0`.
    pub fn build(&self, problem: &Problem, second_moment: f64, x0: Array1<f64>) -> Result<Box<dyn Method + Send>> {
        self.validate(problem)?;
        problem.ensure_dim(x0.view())?;
        let schedule = self.resolve_schedule(problem, second_moment)?;
        let variant = match self.algorithm {
            Algorithm::Gd => return Ok(Box::new(GradientDescent::new(x0))),
            Algorithm::Magdp => {
                let state = MagdpState::new(
                    x0,
                    problem.strong_convexity,
                    problem.smoothness,
                    schedule.expect("magdp has a default schedule"),
                )?;
                return Ok(Box::new(StronglyConvexAgdp { state }));
            }
            Algorithm::Agd => DualVariant::Agd,
            Algorithm::Axgd => DualVariant::Axgd,
            Algorithm::Agdp | Algorithm::ToAgdp => DualVariant::Agdp,
        };
        let reg = self.regularizer(problem)?;
        let slow_gamma = reg.strong_convexity() / problem.smoothness;
        let restart = RestartController::new(self.restart, slow_gamma);
        Ok(Box::new(DualAveraging::new(
            variant,
            x0,
            reg,
            schedule.expect("dual methods have a default schedule"),
            restart,
        )?))
    }
}
