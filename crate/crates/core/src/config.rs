//! Experiment configuration, read from TOML.
//!
//! ```toml
//! seed = 0            # run r uses seed + r
//! repeats = 50
//! aggregation = "median"
//! thin = 200          # optional: keep ~200 log-spaced rows per trace
//!
//! [problem]
//! kind = "hard_instance"
//! n = 100
//!
//! [method]
//! algorithm = "agdp"
//! iterations = 1000
//! restart = "rsd2_chain"
//! schedule = { kind = "accelerated" }
//!
//! [oracle]
//! kind = "gaussian"
//! sigma = 0.1
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::methods::{Algorithm, MethodSetup, RestartPolicy};
use crate::oracle::NoiseSpec;
use crate::problem::Problem;
use crate::problems::{self, BinarizeRule, RegressionData};
use crate::schedule::ScheduleSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Synthetic {
        samples: usize,
        features: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        noise_level: f64,
    },
    Csv {
        path: PathBuf,
        label_column: usize,
        /// Class value mapped to label 1; all others map to 0.
        #[serde(default)]
        positive_class: Option<f64>,
    },
}

impl DataSpec {
    pub fn load(&self) -> Result<RegressionData> {
        match self {
            DataSpec::Synthetic {
                samples,
                features,
                seed,
                noise_level,
            } => problems::synth_data(*samples, *features, *seed, *noise_level),
            DataSpec::Csv {
                path,
                label_column,
                positive_class,
            } => problems::load_csv(
                path,
                *label_column,
                positive_class.map(|c| BinarizeRule { positive_class: c }),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    HardInstance {
        n: usize,
        #[serde(default)]
        simplex: bool,
    },
    /// Diagonal quadratic with spectrum evenly spaced on `[mu, l]`.
    ScQuadratic {
        n: usize,
        mu: f64,
        l: f64,
    },
    Lasso {
        radius: f64,
        data: DataSpec,
    },
    /// Synthetic continuous labels are thresholded at zero.
    Logistic {
        data: DataSpec,
    },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Problem> {
        match self {
            ProblemSpec::HardInstance { n, simplex: false } => problems::make_hard_instance(*n),
            ProblemSpec::HardInstance { n, simplex: true } => problems::make_hard_instance_simplex(*n),
            ProblemSpec::ScQuadratic { n, mu, l } => problems::make_sc_quadratic(*n, *mu, *l),
            ProblemSpec::Lasso { radius, data } => problems::make_lasso(&data.load()?, *radius),
            ProblemSpec::Logistic { data } => {
                let mut d = data.load()?;
                if matches!(data, DataSpec::Synthetic { .. }) {
                    d = d.threshold_labels(0.0);
                }
                problems::make_logistic(&d)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub algorithm: Algorithm,
    pub iterations: usize,
    #[serde(default)]
    pub restart: RestartPolicy,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    /// Scale `c` of `psi = (c/2)||x||^2`; defaults to `L`.
    #[serde(default)]
    pub psi_scale: Option<f64>,
}

impl MethodConfig {
    pub fn new(algorithm: Algorithm, iterations: usize) -> Self {
        MethodConfig {
            algorithm,
            iterations,
            restart: RestartPolicy::None,
            schedule: None,
            psi_scale: None,
        }
    }

    pub fn setup(&self) -> MethodSetup {
        MethodSetup {
            algorithm: self.algorithm,
            schedule: self.schedule.clone(),
            restart: self.restart,
            psi_scale: self.psi_scale,
            iterations: self.iterations,
        }
    }

    /// `agdp`, `agdp-rsd2_chain`, ...
    pub fn label(&self) -> String {
        match self.restart {
            RestartPolicy::None => self.algorithm.name().to_string(),
            RestartPolicy::Rsd => format!("{}-rsd", self.algorithm),
            RestartPolicy::Rsd2Chain => format!("{}-rsd2_chain", self.algorithm),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Per-run traces only.
    None,
    /// Per-run traces plus the aggregate (median, quartiles, mean, variance).
    #[default]
    Median,
    MeanVar,
}

fn one() -> usize {
    1
}

/// A seeded experiment: `repeats` runs of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    /// Seed of run 0; run `r` uses `seed + r`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default)]
    pub aggregation: Aggregation,
    /// Keep roughly this many log-spaced rows per trace.
    #[serde(default)]
    pub thin: Option<usize>,
    /// Worker threads for concurrent repeats; defaults to all cores.
    #[serde(default)]
    pub workers: Option<usize>,
    pub problem: ProblemSpec,
    pub method: MethodConfig,
    #[serde(default)]
    pub oracle: NoiseSpec,
    /// Noise levels for a sweep over Gaussian noise.
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

/// Matrix of method variants x Gaussian noise levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub sigmas: Vec<f64>,
    /// Variants as `algorithm` or `algorithm+restart`, e.g. `agdp+rsd2_chain`.
    pub variants: Vec<String>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            sigmas: vec![0.0, 1e-5, 1e-3, 1e-1],
            variants: ["gd", "agd", "axgd", "agdp", "agdp+rsd2_chain", "to_agdp"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

impl SweepSpec {
    pub fn with_variants(variants: &[&str], sigmas: &[f64]) -> Self {
        SweepSpec {
            sigmas: sigmas.to_vec(),
            variants: variants.iter().map(|v| v.to_string()).collect(),
        }
    }
}

/// Parse `algorithm[+restart]`.
pub fn parse_variant(s: &str) -> Result<(Algorithm, RestartPolicy)> {
    let (alg, restart) = match s.split_once('+') {
        Some((a, r)) => (a, Some(r)),
        None => (s, None),
    };
    let algorithm: Algorithm = alg.trim().parse()?;
    let restart = match restart.map(str::trim) {
        None | Some("none") => RestartPolicy::None,
        Some("rsd") => RestartPolicy::Rsd,
        Some("rsd2_chain") => RestartPolicy::Rsd2Chain,
        Some(other) => return Err(Error::InvalidConfiguration(format!("unknown restart policy '{other}'"))),
    };
    Ok((algorithm, restart))
}

impl Experiment {
    pub fn new(problem: ProblemSpec, method: MethodConfig, oracle: NoiseSpec) -> Self {
        Experiment {
            seed: 0,
            repeats: 1,
            aggregation: Aggregation::default(),
            thin: None,
            workers: None,
            problem,
            method,
            oracle,
            sweep: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Experiment = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks that need no problem instance.
    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfiguration("repeats must be at least 1".into()));
        }
        if self.method.iterations == 0 {
            return Err(Error::InvalidConfiguration("iterations must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfiguration("workers must be at least 1".into()));
        }
        if self.thin == Some(0) {
            return Err(Error::InvalidConfiguration("thin must be at least 1".into()));
        }
        if self.seed.checked_add(self.repeats as u64 - 1).is_none() {
            return Err(Error::InvalidConfiguration("seed + repeats overflows".into()));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
                return Err(Error::InvalidConfiguration("sweep sigmas must be nonnegative".into()));
            }
            for v in &sweep.variants {
                parse_variant(v)?;
            }
        }
        Ok(())
    }

    /// File stem used for this experiment's outputs.
    pub fn stem(&self) -> String {
        self.method.label()
    }
}
