//! Gradient oracles returning `grad f(x) + eta` under several noise models.

use ndarray::{Array1, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Problem;

/// Sampler for `eta(xi)` in the generic stochastic model; the samples are
/// i.i.d. across queries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum StochasticGenerator {
    /// Each coordinate is `+scale` or `-scale` with equal probability.
    Rademacher { scale: f64 },
    /// Each coordinate uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    #[default]
    Exact,
    /// i.i.d. `N(0, sigma^2)` per coordinate.
    Gaussian {
        sigma: f64,
    },
    /// Fixed perturbation with `|<eta, y - z>| <= delta` over the set.
    AdversarialInnerProduct {
        delta: f64,
    },
    /// Exact gradients; `delta` is carried as slack in the smoothness
    /// inequality and only enters error bounds.
    DevolderInexact {
        delta: f64,
    },
    SeededStochastic {
        #[serde(flatten)]
        generator: StochasticGenerator,
    },
}

/// A noise model bound to a problem's dimension and feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    spec: NoiseSpec,
    dim: usize,
    second_moment_bound: f64,
    mean_norm_bound: Option<f64>,
    fixed_perturbation: Option<Array1<f64>>,
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfiguration(format!(
            "{name} must be nonnegative, got {v}"
        )))
    }
}

impl NoiseModel {
    pub fn new(spec: NoiseSpec, problem: &Problem) -> Result<Self> {
        let dim = problem.dim();
        let n = dim as f64;
        let mut fixed_perturbation = None;
        let (second_moment_bound, mean_norm_bound) = match &spec {
            NoiseSpec::Exact | NoiseSpec::DevolderInexact { .. } => {
                if let NoiseSpec::DevolderInexact { delta } = spec {
                    nonnegative("devolder delta", delta)?;
                }
                (0.0, Some(0.0))
            }
            NoiseSpec::Gaussian { sigma } => {
                nonnegative("gaussian sigma", *sigma)?;
                let m2 = n * sigma * sigma;
                // Jensen: E||eta|| <= sqrt(E||eta||^2)
                (m2, Some(m2.sqrt()))
            }
            NoiseSpec::AdversarialInnerProduct { delta } => {
                nonnegative("adversarial delta", *delta)?;
                let diameter = problem.feasible_set.diameter(dim).ok_or_else(|| {
                    Error::InvalidConfiguration("the inner-product noise model needs a bounded feasible set".into())
                })?;
                let magnitude = if diameter > 0.0 { delta / diameter } else { 0.0 };
                let mut eta = Array1::zeros(dim);
                eta[0] = magnitude;
                fixed_perturbation = Some(eta);
                (magnitude * magnitude, Some(magnitude))
            }
            NoiseSpec::SeededStochastic { generator } => match *generator {
                StochasticGenerator::Rademacher { scale } => {
                    nonnegative("rademacher scale", scale)?;
                    (n * scale * scale, Some(scale * n.sqrt()))
                }
                StochasticGenerator::Uniform { half_width } => {
                    nonnegative("uniform half width", half_width)?;
                    let m2 = n * half_width * half_width / 3.0;
                    (m2, Some(m2.sqrt()))
                }
            },
        };
        Ok(NoiseModel {
            spec,
            dim,
            second_moment_bound,
            mean_norm_bound,
            fixed_perturbation,
        })
    }

    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    /// Declared upper bound on `E ||eta||^2`.
    pub fn second_moment(&self) -> f64 {
        self.second_moment_bound
    }

    /// Declared upper bound on `E ||eta||`, when one is known.
    pub fn mean_norm(&self) -> Option<f64> {
        self.mean_norm_bound
    }

    /// Smoothness slack of the inexact-oracle model.
    pub fn devolder_slack(&self) -> Option<f64> {
        match self.spec {
            NoiseSpec::DevolderInexact { delta } => Some(delta),
            _ => None,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Option<Array1<f64>> {
        match &self.spec {
            NoiseSpec::Exact | NoiseSpec::DevolderInexact { .. } => None,
            NoiseSpec::Gaussian { sigma } => {
                if *sigma == 0.0 {
                    return None;
                }
                Some(Array1::from_shape_fn(self.dim, |_| {
                    sigma * rng.sample::<f64, _>(StandardNormal)
                }))
            }
            NoiseSpec::AdversarialInnerProduct { .. } => self.fixed_perturbation.clone(),
            NoiseSpec::SeededStochastic { generator } => Some(match *generator {
                StochasticGenerator::Rademacher { scale } => {
                    Array1::from_shape_fn(self.dim, |_| if rng.random::<bool>() { scale } else { -scale })
                }
                StochasticGenerator::Uniform { half_width } => {
                    Array1::from_shape_fn(self.dim, |_| rng.random_range(-half_width..=half_width))
                }
            }),
        }
    }
}

/// Segment of the random stream consumed by one query, in 32-bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSegment {
    pub start: u128,
    pub end: u128,
}

/// Running statistics over the noise vectors an oracle has emitted.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NoiseStats {
    pub samples: u64,
    pub norm_sum: f64,
    pub norm_sq_sum: f64,
}

impl NoiseStats {
    pub fn mean_norm(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.norm_sum / self.samples as f64
        }
    }

    pub fn mean_norm_sq(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.norm_sq_sum / self.samples as f64
        }
    }
}

/// First-order oracle over a problem. Single-threaded: it owns a mutable
/// random stream and a query counter.
#[derive(Debug, Clone)]
pub struct GradientOracle<'p> {
    problem: &'p Problem,
    noise: NoiseModel,
    rng: ChaCha8Rng,
    query_count: u64,
    stats: NoiseStats,
    segments: Option<Vec<StreamSegment>>,
}

impl<'p> GradientOracle<'p> {
    pub fn new(problem: &'p Problem, spec: NoiseSpec, seed: u64) -> Result<Self> {
        let noise = NoiseModel::new(spec, problem)?;
        Ok(GradientOracle {
            problem,
            noise,
            rng: ChaCha8Rng::seed_from_u64(seed),
            query_count: 0,
            stats: NoiseStats::default(),
            segments: None,
        })
    }

    /// Record the stream segment consumed by every subsequent query.
    pub fn with_stream_log(mut self) -> Self {
        self.segments = Some(Vec::new());
        self
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn noise_stats(&self) -> NoiseStats {
        self.stats
    }

    pub fn stream_position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn stream_log(&self) -> Option<&[StreamSegment]> {
        self.segments.as_deref()
    }

    pub fn second_moment(&self) -> f64 {
        self.noise.second_moment()
    }

    pub fn mean_norm(&self) -> Option<f64> {
        self.noise.mean_norm()
    }

    /// `grad f(x) + eta`.
    pub fn query(&mut self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.problem.ensure_dim(x)?;
        let start = self.rng.get_word_pos();
        let mut g = self.problem.gradient(x);
        if let Some(eta) = self.noise.sample(&mut self.rng) {
            let sq = eta.dot(&eta);
            self.stats.samples += 1;
            self.stats.norm_sum += sq.sqrt();
            self.stats.norm_sq_sum += sq;
            g += &eta;
        }
        self.query_count += 1;
        if let Some(log) = self.segments.as_mut() {
            log.push(StreamSegment {
                start,
                end: self.rng.get_word_pos(),
            });
        }
        Ok(g)
    }
}
