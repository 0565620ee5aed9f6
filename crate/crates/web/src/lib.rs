//! Browser bindings for the agdplus demo page. Every export returns a JSON
//! string; the plain-Rust functions behind them are usable natively too.

use agdplus::config::parse_variant;
use agdplus::problem::{FeasibleSet, Problem};
use agdplus::problems::{make_hard_instance, make_sc_quadratic};
use agdplus::reference::reference_optimum;
use agdplus::{Algorithm, GradientOracle, MethodSetup, NoiseSpec, Result, ScheduleSpec};
use ndarray::{array, Array1};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest iteration count the page may request.
pub const MAX_ITERATIONS: usize = 20_000;

#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub label: String,
    pub gaps: Vec<f64>,
    pub restarts: Vec<usize>,
    pub queries: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub f_star: f64,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateCheck {
    pub gaps: Vec<f64>,
    pub bound: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Projection {
    pub point: [f64; 2],
    pub projected: [f64; 2],
}

fn check_iterations(iterations: usize) -> Result<()> {
    if iterations == 0 || iterations > MAX_ITERATIONS {
        return Err(agdplus::Error::InvalidArgument(format!(
            "iterations must be in 1..={MAX_ITERATIONS}, got {iterations}"
        )));
    }
    Ok(())
}

fn oracle_spec(sigma: f64) -> NoiseSpec {
    if sigma == 0.0 {
        NoiseSpec::Exact
    } else {
        NoiseSpec::Gaussian { sigma }
    }
}

fn trace(problem: &Problem, f_star: f64, setup: &MethodSetup, label: &str, sigma: f64, seed: u64) -> Result<Series> {
    let mut oracle = GradientOracle::new(problem, oracle_spec(sigma), seed)?;
    let mut m = setup.build(problem, oracle.second_moment(), problem.default_start())?;
    let mut gaps = Vec::with_capacity(setup.iterations);
    let mut restarts = Vec::new();
    for k in 1..=setup.iterations {
        if m.step(&mut oracle)?.restarted {
            restarts.push(k);
        }
        gaps.push(problem.value(m.output()) - f_star);
    }
    Ok(Series {
        label: label.to_string(),
        gaps,
        restarts,
        queries: oracle.query_count(),
    })
}

/// Gap traces on the cycle-Laplacian hard instance, one per variant such as
/// `gd`, `agdp` or `agdp+rsd2_chain`. All variants see the same seed.
pub fn compare_on_hard_instance(
    n: usize,
    iterations: usize,
    sigma: f64,
    seed: u64,
    variants: &[&str],
) -> Result<Comparison> {
    check_iterations(iterations)?;
    let problem = make_hard_instance(n)?;
    let f_star = reference_optimum(&problem)?.value;
    let series = variants
        .iter()
        .map(|v| {
            let (algorithm, restart) = parse_variant(v)?;
            let mut setup = MethodSetup::new(algorithm, iterations);
            setup.restart = restart;
            trace(&problem, f_star, &setup, v.trim(), sigma, seed)
        })
        .collect::<Result<_>>()?;
    Ok(Comparison { f_star, series })
}

/// Strongly convex method on a diagonal quadratic next to
/// `(1 - sqrt(mu/L))^k (L - mu)/2 ||x0 - x*||^2`.
pub fn strongly_convex_rate(n: usize, mu: f64, l: f64, iterations: usize, sigma: f64, seed: u64) -> Result<RateCheck> {
    check_iterations(iterations)?;
    let problem = make_sc_quadratic(n, mu, l)?;
    let reference = reference_optimum(&problem)?;
    let x0 = problem.default_start();
    let dist_sq = (&reference.point - &x0).mapv(|v| v * v).sum();
    let mut setup = MethodSetup::new(Algorithm::Magdp, iterations);
    setup.schedule = Some(ScheduleSpec::ScGeometric { ratio: None });
    let series = trace(&problem, reference.value, &setup, "magdp", sigma, seed)?;
    let rate = 1.0 - (mu / l).sqrt();
    let bound = (1..=iterations)
        .map(|k| rate.powi(k as i32) * (l - mu) / 2.0 * dist_sq)
        .collect();
    Ok(RateCheck {
        gaps: series.gaps,
        bound,
    })
}

/// Euclidean projection of a planar point onto `simplex` or `l1` (radius
/// `radius`).
pub fn project_point(x: f64, y: f64, set: &str, radius: f64) -> Result<Projection> {
    let set = match set {
        "simplex" => FeasibleSet::Simplex,
        "l1" => FeasibleSet::L1Ball { radius },
        other => {
            return Err(agdplus::Error::InvalidArgument(format!(
                "unknown set '{other}', expected simplex or l1"
            )))
        }
    };
    let p: Array1<f64> = set.project(array![x, y].view())?;
    Ok(Projection {
        point: [x, y],
        projected: [p[0], p[1]],
    })
}

fn to_js<T: Serialize>(r: Result<T>) -> std::result::Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// `variants` is a comma-separated list.
#[wasm_bindgen(js_name = compareHardInstance)]
pub fn compare_hard_instance_js(
    n: usize,
    iterations: usize,
    sigma: f64,
    seed: u32,
    variants: &str,
) -> std::result::Result<String, JsError> {
    let list: Vec<&str> = variants.split(',').filter(|s| !s.trim().is_empty()).collect();
    to_js(compare_on_hard_instance(n, iterations, sigma, seed.into(), &list))
}

#[wasm_bindgen(js_name = stronglyConvexRate)]
pub fn strongly_convex_rate_js(
    n: usize,
    mu: f64,
    l: f64,
    iterations: usize,
    sigma: f64,
    seed: u32,
) -> std::result::Result<String, JsError> {
    to_js(strongly_convex_rate(n, mu, l, iterations, sigma, seed.into()))
}

#[wasm_bindgen(js_name = projectPoint)]
pub fn project_point_js(x: f64, y: f64, set: &str, radius: f64) -> std::result::Result<String, JsError> {
    to_js(project_point(x, y, set, radius))
}
