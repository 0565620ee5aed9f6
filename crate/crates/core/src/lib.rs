//! Accelerated first-order methods under noisy gradient oracles.
//!
//! AGD+ and its strongly convex variant, with gradient descent, AGD and
//! AXGD as baselines, a restart/slow-down controller for noisy gradients,
//! and an experiment harness that writes CSV convergence traces.
//!
//! ```
//! use agdplus::methods::{Algorithm, MethodSetup};
//! use agdplus::oracle::{GradientOracle, NoiseSpec};
//! use agdplus::problems::make_hard_instance;
//! use agdplus::reference::reference_optimum;
//!
//! let problem = make_hard_instance(20).unwrap();
//! let f_star = reference_optimum(&problem).unwrap().value;
//! let mut oracle = GradientOracle::new(&problem, NoiseSpec::Exact, 0).unwrap();
//! let mut method = MethodSetup::new(Algorithm::Agdp, 200)
//!     .build(&problem, 0.0, problem.default_start())
//!     .unwrap();
//! for _ in 0..200 {
//!     method.step(&mut oracle).unwrap();
//! }
//! assert!(problem.value(method.output()) - f_star < 1e-3);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod methods;
pub mod oracle;
pub mod problem;
pub mod problems;
pub mod record;
pub mod reference;
pub mod schedule;

pub use config::{Experiment, MethodConfig, ProblemSpec};
pub use error::{Error, Result};
pub use methods::{Algorithm, Method, MethodSetup, RestartPolicy};
pub use oracle::{GradientOracle, NoiseSpec};
pub use problem::{FeasibleSet, Objective, Problem};
pub use schedule::{Schedule, ScheduleSpec};
