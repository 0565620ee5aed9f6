//! Step-weight schedules `a_k` and their running sums `A_k = sum_{i<=k} a_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Schedule as written in a run configuration. `gamma: None` means "use the
/// admissible default `mu_psi / L`", resolved by [`make_schedule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleSpec {
    Accelerated {
        #[serde(default)]
        gamma: Option<f64>,
    },
    Uniform {
        #[serde(default)]
        gamma: Option<f64>,
    },
    InvSqrt {
        #[serde(default)]
        gamma: Option<f64>,
    },
    /// `a_k^2 / A_k = gamma` with equality at every step.
    Tight {
        #[serde(default)]
        gamma: Option<f64>,
    },
    /// Noise-aware accelerated weights for a fixed horizon.
    TheoreticallyOptimal {
        #[serde(default)]
        horizon: Option<usize>,
        /// Drop the known second-moment bound and use the unknown-sigma rule.
        #[serde(default)]
        sigma_unknown: bool,
    },
    /// `a_1 = 1`, `a_k / A_k = ratio` for `k >= 2`; defaults to `sqrt(mu/L)`.
    ScGeometric {
        #[serde(default)]
        ratio: Option<f64>,
    },
    /// `a_k = k^power`.
    Poly { power: u32 },
}

/// A resolved schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `a_k = gamma (k + 1) / 2`
    Accelerated {
        gamma: f64,
    },
    /// `a_k = gamma`
    Uniform {
        gamma: f64,
    },
    /// `a_k = gamma / sqrt(k)`
    InvSqrt {
        gamma: f64,
    },
    Tight {
        gamma: f64,
    },
    /// Same weights as `Accelerated`, with `gamma` tuned for `horizon` steps.
    TheoreticallyOptimal {
        gamma: f64,
        horizon: usize,
    },
    ScGeometric {
        ratio: f64,
    },
    Poly {
        power: u32,
    },
}

/// Quantities for one step of a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub index: usize,
    /// `a_k`
    pub weight: f64,
    /// `A_k`
    pub sum: f64,
    /// `a_k / A_k`, exact for the geometric kind even once `A_k` overflows.
    pub ratio: f64,
}

impl Schedule {
    pub fn cursor(self) -> ScheduleCursor {
        ScheduleCursor {
            schedule: self,
            index: 0,
            sum: 0.0,
        }
    }

    /// First `count` weights.
    pub fn weights(self, count: usize) -> Vec<f64> {
        let mut c = self.cursor();
        (0..count).map(|_| c.advance().weight).collect()
    }

    /// The `gamma` bounding `a_k^2 / A_k`, where that admissibility
    /// condition applies.
    pub fn admissibility_bound(&self) -> Option<f64> {
        match *self {
            Schedule::Accelerated { gamma }
            | Schedule::Uniform { gamma }
            | Schedule::InvSqrt { gamma }
            | Schedule::Tight { gamma }
            | Schedule::TheoreticallyOptimal { gamma, .. } => Some(gamma),
            Schedule::ScGeometric { .. } | Schedule::Poly { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Schedule::Accelerated { gamma }
            | Schedule::Uniform { gamma }
            | Schedule::InvSqrt { gamma }
            | Schedule::Tight { gamma }
            | Schedule::TheoreticallyOptimal { gamma, .. } => gamma > 0.0 && gamma.is_finite(),
            Schedule::ScGeometric { ratio } => ratio > 0.0 && ratio < 1.0,
            Schedule::Poly { power } => power >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfiguration(format!(
                "invalid schedule parameters: {self:?}"
            )))
        }
    }
}

/// Walks a schedule, carrying `A_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleCursor {
    schedule: Schedule,
    index: usize,
    sum: f64,
}

impl ScheduleCursor {
    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    /// Steps taken so far.
    pub fn index(&self) -> usize {
        self.index
    }

    /// `A_k` after the last step.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn advance(&mut self) -> Step {
        let k = self.index + 1;
        let prev = self.sum;
        let (weight, ratio_override) = match self.schedule {
            Schedule::Accelerated { gamma } | Schedule::TheoreticallyOptimal { gamma, .. } => {
                (gamma * (k as f64 + 1.0) / 2.0, None)
            }
            Schedule::Uniform { gamma } => (gamma, None),
            Schedule::InvSqrt { gamma } => (gamma / (k as f64).sqrt(), None),
            Schedule::Tight { gamma } => ((gamma + (gamma * gamma + 4.0 * gamma * prev).sqrt()) / 2.0, None),
            Schedule::ScGeometric { ratio } => {
                if k == 1 {
                    (1.0, None)
                } else {
                    (ratio / (1.0 - ratio) * prev, Some(ratio))
                }
            }
            Schedule::Poly { power } => ((k as f64).powi(power as i32), None),
        };
        let sum = match (self.schedule, k) {
            (Schedule::ScGeometric { ratio }, k) if k > 1 => prev / (1.0 - ratio),
            _ => prev + weight,
        };
        self.index = k;
        self.sum = sum;
        Step {
            index: k,
            weight,
            sum,
            ratio: ratio_override.unwrap_or(weight / sum),
        }
    }
}

/// Context for resolving a [`ScheduleSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleContext {
    /// Strong convexity of the mirror map.
    pub mu_psi: f64,
    /// Smoothness of the objective.
    pub smoothness: f64,
    /// Strong convexity of the objective (for the geometric kind).
    pub strong_convexity: f64,
    /// Declared `E ||eta||^2` of the oracle.
    pub second_moment: Option<f64>,
    pub horizon: Option<usize>,
}

/// `gamma = mu_psi / max{L, sqrt(sum_{i<=K} b_i^2 sigma^2)}`, `b_i = (i+1)/2`.
/// With `second_moment = None` the factor `sigma^2` is dropped.
pub fn theoretically_optimal_gamma(mu_psi: f64, smoothness: f64, horizon: usize, second_moment: Option<f64>) -> f64 {
    let b_sq: f64 = (1..=horizon)
        .map(|i| {
            let b = (i as f64 + 1.0) / 2.0;
            b * b
        })
        .sum();
    let noise = (b_sq * second_moment.unwrap_or(1.0)).sqrt();
    mu_psi / smoothness.max(noise)
}

pub fn make_schedule(spec: &ScheduleSpec, ctx: &ScheduleContext) -> Result<Schedule> {
    let base = ctx.mu_psi / ctx.smoothness;
    let schedule = match *spec {
        ScheduleSpec::Accelerated { gamma } => Schedule::Accelerated {
            gamma: gamma.unwrap_or(base),
        },
        ScheduleSpec::Uniform { gamma } => Schedule::Uniform {
            gamma: gamma.unwrap_or(base),
        },
        ScheduleSpec::InvSqrt { gamma } => Schedule::InvSqrt {
            gamma: gamma.unwrap_or(base),
        },
        ScheduleSpec::Tight { gamma } => Schedule::Tight {
            gamma: gamma.unwrap_or(base),
        },
        ScheduleSpec::TheoreticallyOptimal { horizon, sigma_unknown } => {
            let horizon = horizon.or(ctx.horizon).ok_or_else(|| {
                Error::InvalidConfiguration("theoretically optimal schedule needs a fixed horizon".into())
            })?;
            if horizon == 0 {
                return Err(Error::InvalidConfiguration("horizon must be positive".into()));
            }
            let moment = if sigma_unknown { None } else { ctx.second_moment };
            if !sigma_unknown && moment.is_none() {
                return Err(Error::InvalidConfiguration(
                    "theoretically optimal schedule needs the oracle second-moment bound".into(),
                ));
            }
            Schedule::TheoreticallyOptimal {
                gamma: theoretically_optimal_gamma(ctx.mu_psi, ctx.smoothness, horizon, moment),
                horizon,
            }
        }
        ScheduleSpec::ScGeometric { ratio } => {
            let ratio = match ratio {
                Some(r) => r,
                None => {
                    if !(ctx.strong_convexity > 0.0) {
                        return Err(Error::InvalidConfiguration(
                            "geometric schedule needs a strongly convex objective".into(),
                        ));
                    }
                    (ctx.strong_convexity / ctx.smoothness).sqrt()
                }
            };
            Schedule::ScGeometric { ratio }
        }
        ScheduleSpec::Poly { power } => Schedule::Poly { power },
    };
    schedule.validate()?;
    Ok(schedule)
}
