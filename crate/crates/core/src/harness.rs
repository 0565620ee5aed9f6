//! Seeded runs, repeated experiments, sweeps and their on-disk layout.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array1;
use serde::Serialize;

use crate::config::{parse_variant, Aggregation, Experiment, MethodConfig};
use crate::error::{Error, Result};
use crate::oracle::{GradientOracle, NoiseModel, NoiseSpec};
use crate::problem::Problem;
use crate::record::{
    aggregate, thin_indices, write_aggregate_csv, write_metadata, write_trace_csv, AggregateRecord, RunMetadata,
    RunRecord, TraceRow,
};
use crate::reference::{reference_optimum, Reference};

/// Slack allowed below `f*` before a gap counts as a broken reference.
pub const NEGATIVE_GAP_TOL: f64 = 1e-9;

/// A problem with its reference optimum, built once per experiment.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub problem: Problem,
    pub reference: Reference,
    pub x0: Array1<f64>,
}

/// Pre-flight: build the problem, reject invalid method/oracle
/// combinations, and solve for the reference optimum. Nothing iterates
/// before this succeeds.
pub fn prepare(cfg: &Experiment) -> Result<Prepared> {
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    check_method(&problem, &cfg.method, &cfg.oracle)?;
    let reference = reference_optimum(&problem)?;
    let x0 = problem.default_start();
    Ok(Prepared { problem, reference, x0 })
}

fn check_method(problem: &Problem, method: &MethodConfig, oracle: &NoiseSpec) -> Result<()> {
    let noise = NoiseModel::new(oracle.clone(), problem)?;
    let setup = method.setup();
    setup.validate(problem)?;
    setup.resolve_schedule(problem, noise.second_moment())?;
    Ok(())
}

/// One seeded run; the trace has one row per recorded iteration.
pub fn run_single(
    prep: &Prepared,
    method: &MethodConfig,
    oracle: &NoiseSpec,
    seed: u64,
    thin: Option<usize>,
) -> Result<RunRecord> {
    let started = Instant::now();
    let problem = &prep.problem;
    let f_star = prep.reference.value;
    let mut oracle = GradientOracle::new(problem, oracle.clone(), seed)?;
    let setup = method.setup();
    let mut m = setup.build(problem, oracle.second_moment(), prep.x0.clone())?;

    let keep = thin.map(|p| thin_indices(method.iterations, p));
    let mut next_keep = 0usize;
    let mut rows = Vec::with_capacity(keep.as_ref().map_or(method.iterations, Vec::len));
    let mut restarts = Vec::new();
    for k in 1..=method.iterations {
        let report = m.step(&mut oracle)?;
        if report.restarted {
            restarts.push(k);
        }
        let gap = problem.value(m.output()) - f_star;
        let z_energy = m.dual_energy();
        if !gap.is_finite() || !z_energy.is_finite() {
            return Err(Error::NonFinite(format!(
                "{} on {} (seed {seed}): gap {gap}, z energy {z_energy} at iteration {k}",
                method.label(),
                problem.name
            )));
        }
        if gap < -NEGATIVE_GAP_TOL * f_star.abs().max(1.0) {
            return Err(Error::InvalidState(format!(
                "gap {gap:e} below zero at iteration {k}: reference optimum is not optimal"
            )));
        }
        let record = match &keep {
            None => true,
            Some(idx) if next_keep < idx.len() && idx[next_keep] == k => {
                next_keep += 1;
                true
            }
            Some(_) => false,
        };
        if record {
            rows.push(TraceRow {
                k,
                gap,
                z_energy,
                restart: report.restarted,
            });
        }
    }
    Ok(RunRecord {
        rows,
        meta: RunMetadata {
            seed,
            f_star,
            queries: oracle.query_count(),
            restarts,
            noise_mean_norm: oracle.noise_stats().mean_norm(),
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub prepared: Prepared,
    pub runs: Vec<RunRecord>,
    pub aggregate: Option<AggregateRecord>,
}

/// `repeats` runs with seeds `seed, seed + 1, ...`, then the aggregate.
pub fn run_experiment(cfg: &Experiment) -> Result<ExperimentOutput> {
    let prepared = prepare(cfg)?;
    let runs = run_repeats(&prepared, cfg, &cfg.method, &cfg.oracle)?;
    let aggregate = match cfg.aggregation {
        Aggregation::None => None,
        Aggregation::Median | Aggregation::MeanVar => Some(aggregate(&runs)?),
    };
    Ok(ExperimentOutput {
        prepared,
        runs,
        aggregate,
    })
}

fn run_repeats(prep: &Prepared, cfg: &Experiment, method: &MethodConfig, oracle: &NoiseSpec) -> Result<Vec<RunRecord>> {
    let seeds: Vec<u64> = (0..cfg.repeats as u64).map(|r| cfg.seed + r).collect();
    let one = |seed: u64| run_single(prep, method, oracle, seed, cfg.thin);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let work = || seeds.par_iter().map(|&s| one(s)).collect::<Result<Vec<_>>>();
        match cfg.workers {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfiguration(format!("worker pool: {e}")))?
                .install(work),
            None => work(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        seeds.iter().map(|&s| one(s)).collect()
    }
}

#[derive(Debug, Serialize)]
struct ExperimentMeta<'a> {
    config: &'a Experiment,
    problem: &'a str,
    dim: usize,
    smoothness: f64,
    strong_convexity: f64,
    f_star: f64,
    reference_method: crate::reference::ReferenceMethod,
    reference_certificate: f64,
    runs: Vec<&'a RunMetadata>,
}

/// Files written for an experiment with stem `s` in `dir`:
/// `s_run000.csv`, ... one per repeat, `s_aggregate.csv` (unless
/// aggregation is off) and `s_meta.json` (configuration, `f*`, per-run
/// seeds, queries, restarts and wall times). Only the JSON carries timing,
/// so the CSVs are byte-identical across executions.
pub fn write_experiment(out: &ExperimentOutput, cfg: &Experiment, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = cfg.stem();
    let mut written = Vec::new();
    for (r, run) in out.runs.iter().enumerate() {
        let p = dir.join(format!("{stem}_run{r:03}.csv"));
        write_trace_csv(&p, &run.rows)?;
        written.push(p);
    }
    if let Some(agg) = &out.aggregate {
        let p = dir.join(format!("{stem}_aggregate.csv"));
        write_aggregate_csv(&p, agg)?;
        written.push(p);
    }
    let prep = &out.prepared;
    let meta = ExperimentMeta {
        config: cfg,
        problem: &prep.problem.name,
        dim: prep.problem.dim(),
        smoothness: prep.problem.smoothness,
        strong_convexity: prep.problem.strong_convexity,
        f_star: prep.reference.value,
        reference_method: prep.reference.method,
        reference_certificate: prep.reference.certificate,
        runs: out.runs.iter().map(|r| &r.meta).collect(),
    };
    let p = dir.join(format!("{stem}_meta.json"));
    write_metadata(&p, &meta)?;
    written.push(p);
    Ok(written)
}

/// Directory name for one noise level of a sweep.
pub fn sigma_dir(sigma: f64) -> String {
    format!("sigma_{}", crate::record::format_f64(sigma))
}

/// Run every variant at every Gaussian noise level of `cfg.sweep` (or the
/// default matrix), writing `dir/sigma_<s>/<variant>_*` files. All
/// variants and levels are checked before any run starts.
pub fn run_sweep(cfg: &Experiment, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let sweep = cfg.sweep.clone().unwrap_or_default();
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    let mut plan = Vec::new();
    for &sigma in &sweep.sigmas {
        let oracle = NoiseSpec::Gaussian { sigma };
        for v in &sweep.variants {
            let (algorithm, restart) = parse_variant(v)?;
            let method = MethodConfig {
                algorithm,
                restart,
                schedule: None,
                ..cfg.method.clone()
            };
            check_method(&problem, &method, &oracle)?;
            plan.push((sigma, method, oracle.clone()));
        }
    }
    let reference = reference_optimum(&problem)?;
    let x0 = problem.default_start();
    let prepared = Prepared { problem, reference, x0 };
    let mut written = Vec::new();
    for (sigma, method, oracle) in plan {
        let sub = Experiment {
            method: method.clone(),
            oracle: oracle.clone(),
            sweep: None,
            ..cfg.clone()
        };
        let runs = run_repeats(&prepared, &sub, &method, &oracle)?;
        let aggregate = match sub.aggregation {
            Aggregation::None => None,
            _ => Some(aggregate(&runs)?),
        };
        let out = ExperimentOutput {
            prepared: prepared.clone(),
            runs,
            aggregate,
        };
        written.extend(write_experiment(&out, &sub, dir.join(sigma_dir(sigma)))?);
    }
    Ok(written)
}
