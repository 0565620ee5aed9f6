//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use agdplus::config::{Experiment, MethodConfig, ProblemSpec};
use agdplus::geometry::{bregman_divergence, Regularizer};
use agdplus::harness::{run_experiment, write_experiment};
use agdplus::methods::{agd_step, agdp_step, AgdpState, Algorithm, MethodSetup, RestartPolicy};
use agdplus::oracle::{GradientOracle, NoiseSpec};
use agdplus::problems::{make_hard_instance, make_hard_instance_simplex, make_sc_quadratic};
use agdplus::record::RunRecord;
use agdplus::reference::reference_optimum;
use agdplus::schedule::{Schedule, ScheduleSpec};
use ndarray::Array1;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn median_gap_at(runs: &[RunRecord], k: usize) -> f64 {
    median(runs.iter().map(|r| r.gap_at(k).expect("iteration recorded")).collect())
}

fn within(limit: Duration, started: Instant) -> Result<Duration, String> {
    let took = started.elapsed();
    if took <= limit {
        Ok(took)
    } else {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    }
}

/// Exact-oracle AGD+ trace on the n = 100 hard instance: gaps, `A_k`, and
/// `D_psi(x*, 0)`.
fn noiseless_agdp_trace(iterations: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let p = make_hard_instance(100).unwrap();
    let r = reference_optimum(&p).unwrap();
    let reg = Regularizer::new(p.smoothness, p.feasible_set.clone()).unwrap();
    let d = bregman_divergence(&reg, r.point.view(), Array1::zeros(100).view()).unwrap();
    let mut o = GradientOracle::new(&p, NoiseSpec::Exact, 0).unwrap();
    let mut s = AgdpState::new(Array1::zeros(100), &reg, Schedule::Accelerated { gamma: 1.0 }).unwrap();
    let mut gaps = Vec::with_capacity(iterations);
    let mut sums = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        agdp_step(&mut s, &mut o, &reg).unwrap();
        gaps.push(p.value(s.y.view()) - r.value);
        sums.push(s.a_sum());
    }
    (gaps, sums, d)
}

fn noiseless_bound() -> Outcome {
    let started = Instant::now();
    let (gaps, sums, d) = noiseless_agdp_trace(2000);
    let mut worst = f64::NEG_INFINITY;
    for (i, (g, a)) in gaps.iter().zip(&sums).enumerate() {
        let excess = g - d / a;
        worst = worst.max(excess);
        if excess > 1e-9 {
            return Err(format!("k = {}: gap {g:e} > D/A_k = {:e}", i + 1, d / a));
        }
    }
    let took = within(Duration::from_secs(5), started)?;
    Ok(format!("max(gap - D/A_k) = {worst:e} over k <= 2000, {took:.2?}"))
}

fn quadratic_rate() -> Outcome {
    let (gaps, _, d) = noiseless_agdp_trace(2000);
    // mu_psi = L, so 4 L D / mu_psi = 4 D
    let mut worst: f64 = 0.0;
    for (i, g) in gaps.iter().enumerate().skip(49) {
        let k = (i + 1) as f64;
        let ratio = k * k * g / (4.0 * d * (1.0 + 10.0 / k));
        worst = worst.max(ratio);
        if ratio > 1.0 {
            return Err(format!("k = {k}: k^2 gap = {:e} exceeds bound", k * k * g));
        }
    }
    Ok(format!("max k^2 gap / bound = {worst:.4} for 50 <= k <= 2000"))
}

fn agd_agdp_equivalence() -> Outcome {
    let p = make_hard_instance(100).unwrap();
    let reg = Regularizer::new(p.smoothness, p.feasible_set.clone()).unwrap();
    let schedule = Schedule::Tight { gamma: 1.0 };
    let mut oa = GradientOracle::new(&p, NoiseSpec::Exact, 0).unwrap();
    let mut ob = GradientOracle::new(&p, NoiseSpec::Exact, 0).unwrap();
    let mut a = AgdpState::new(Array1::zeros(100), &reg, schedule).unwrap();
    let mut b = a.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        agd_step(&mut a, &mut oa, &reg).unwrap();
        agdp_step(&mut b, &mut ob, &reg).unwrap();
        for (u, v) in [(&a.y, &b.y), (&a.x, &b.x), (&a.z, &b.z)] {
            worst = worst.max((u - v).iter().fold(0.0f64, |m, d| m.max(d.abs())));
        }
    }
    if worst <= 1e-9 {
        Ok(format!("max deviation {worst:e} over 100 iterations"))
    } else {
        Err(format!("max deviation {worst:e}"))
    }
}

fn magdp_geometric_rate() -> Outcome {
    let started = Instant::now();
    let (mu, l, n) = (1.0, 100.0, 50);
    let p = make_sc_quadratic(n, mu, l).unwrap();
    let r = reference_optimum(&p).unwrap();
    let x0 = Array1::zeros(n);
    let dist_sq = (&r.point - &x0).mapv(|v| v * v).sum();
    let rate = 1.0 - (mu / l).sqrt();
    let mut setup = MethodSetup::new(Algorithm::Magdp, 500);
    setup.schedule = Some(ScheduleSpec::ScGeometric { ratio: None });
    let mut m = setup.build(&p, 0.0, x0).unwrap();
    let mut o = GradientOracle::new(&p, NoiseSpec::Exact, 0).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..=500 {
        m.step(&mut o).unwrap();
        let gap = p.value(m.output()) - r.value;
        let bound = rate.powi(k) * (l - mu) / 2.0 * dist_sq;
        worst = worst.max(gap / bound);
        if gap > bound * (1.0 + 1e-9) {
            return Err(format!("k = {k}: gap {gap:e} > bound {bound:e}"));
        }
    }
    let took = within(Duration::from_secs(2), started)?;
    Ok(format!("max gap / bound = {worst:.4} for k <= 500, {took:.2?}"))
}

fn poly_noise_proxy() -> Outcome {
    let k = 1000;
    let mut parts = Vec::new();
    for p in 1..=3u32 {
        let mut c = Schedule::Poly { power: p }.cursor();
        let mut acc = 0.0;
        let mut last = 0.0;
        for _ in 0..k {
            let s = c.advance();
            acc += s.weight * s.weight / s.sum;
            last = s.sum;
        }
        let proxy = acc / last;
        let scaling = ((p + 1) * (p + 1)) as f64 / (p as f64 * k as f64);
        let ratio = proxy / scaling;
        if !(0.5..=2.0).contains(&ratio) {
            return Err(format!("p = {p}: proxy {proxy:e} vs {scaling:e}"));
        }
        parts.push(format!("p={p}: ratio {ratio:.4}"));
    }
    Ok(parts.join(", "))
}

fn hard_noisy(method: MethodConfig, simplex: bool) -> Experiment {
    let mut cfg = Experiment::new(
        ProblemSpec::HardInstance { n: 100, simplex },
        method,
        NoiseSpec::Gaussian { sigma: 0.1 },
    );
    cfg.repeats = 50;
    cfg
}

fn noise_accumulation() -> Outcome {
    let started = Instant::now();
    let k = 1000;
    let run = |alg, restart| {
        let mut m = MethodConfig::new(alg, k);
        m.restart = restart;
        run_experiment(&hard_noisy(m, false)).unwrap().runs
    };
    let gd = median_gap_at(&run(Algorithm::Gd, RestartPolicy::None), k);
    let plain = median_gap_at(&run(Algorithm::Agdp, RestartPolicy::None), k);
    let chain = median_gap_at(&run(Algorithm::Agdp, RestartPolicy::Rsd2Chain), k);
    let took = within(Duration::from_secs(120), started)?;
    let detail = format!("median gaps at k = {k}: gd {gd:e}, agdp {plain:e}, agdp+rsd2_chain {chain:e}, {took:.2?}");
    if plain > gd && chain <= 1.5 * gd {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn constrained_boundedness() -> Outcome {
    let k = 1000;
    let out = run_experiment(&hard_noisy(MethodConfig::new(Algorithm::Agdp, k), true)).unwrap();
    let p = make_hard_instance_simplex(100).unwrap();
    let x_star = &out.prepared.reference.point;
    let x0 = &out.prepared.x0;
    let reg = Regularizer::new(p.smoothness, p.feasible_set.clone()).unwrap();
    let d = bregman_divergence(&reg, x_star.view(), x0.view()).unwrap();
    let r = p.feasible_set.max_distance_from(x_star.view()).unwrap();
    if r > 2f64.sqrt() + 1e-12 {
        return Err(format!("R = {r} exceeds sqrt 2"));
    }
    let m_hat = out.runs.iter().map(|r| r.meta.noise_mean_norm).sum::<f64>() / out.runs.len() as f64;
    let a_k = Schedule::Accelerated { gamma: 1.0 }.weights(k).iter().sum::<f64>();
    let bound = d / a_k + r * m_hat;
    let med = median_gap_at(&out.runs, k);
    let detail = format!(
        "median gap {med:e} vs 1.2 x (D/A_k + R M) = {:e} (R = {r:.4}, M = {m_hat:.4})",
        1.2 * bound
    );
    if med <= 1.2 * bound {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn devolder_accumulation() -> Outcome {
    let delta = 1e-4;
    let k = 1000;
    let mut cfg = Experiment::new(
        ProblemSpec::HardInstance { n: 100, simplex: false },
        MethodConfig::new(Algorithm::Agdp, k),
        NoiseSpec::DevolderInexact { delta },
    );
    cfg.repeats = 1;
    let out = run_experiment(&cfg).unwrap();
    let p = &out.prepared.problem;
    let reg = Regularizer::new(p.smoothness, p.feasible_set.clone()).unwrap();
    let d = bregman_divergence(&reg, out.prepared.reference.point.view(), out.prepared.x0.view()).unwrap();
    let mut c = Schedule::Accelerated { gamma: 1.0 }.cursor();
    let mut sum_a = 0.0;
    let mut slack = Vec::with_capacity(k);
    for row in &out.runs[0].rows {
        let s = c.advance();
        sum_a += s.sum;
        let extra = sum_a / s.sum * delta;
        slack.push(extra);
        if row.gap > d / s.sum + extra {
            return Err(format!("k = {}: gap {:e} exceeds bound", row.k, row.gap));
        }
    }
    // linear growth: slack_k / k settles to a constant (here 1/3 * delta)
    let per_k = |k: usize| slack[k - 1] / k as f64;
    let drift = (per_k(1000) / per_k(500) - 1.0).abs();
    let increasing = slack.windows(2).all(|w| w[1] > w[0]);
    let detail = format!(
        "slack/k at k=500: {:e}, k=1000: {:e}; relative drift {drift:.2e}",
        per_k(500),
        per_k(1000)
    );
    if increasing && drift < 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_complexity() -> Outcome {
    let k = 100;
    let mut parts = Vec::new();
    for alg in Algorithm::ALL {
        let problem = match alg {
            Algorithm::Magdp => ProblemSpec::ScQuadratic {
                n: 10,
                mu: 1.0,
                l: 10.0,
            },
            _ => ProblemSpec::HardInstance { n: 100, simplex: false },
        };
        let cfg = Experiment::new(problem, MethodConfig::new(alg, k), NoiseSpec::Gaussian { sigma: 0.01 });
        let q = run_experiment(&cfg).unwrap().runs[0].meta.queries;
        let expected = if alg == Algorithm::Axgd { 2 * k } else { k } as u64;
        if q != expected {
            return Err(format!("{alg}: {q} queries, expected {expected}"));
        }
        parts.push(format!("{alg}={q}"));
    }
    Ok(parts.join(" "))
}

fn determinism() -> Outcome {
    let mut m = MethodConfig::new(Algorithm::Agdp, 300);
    m.restart = RestartPolicy::Rsd2Chain;
    let mut cfg = hard_noisy(m, false);
    cfg.repeats = 5;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_experiment(&run_experiment(&cfg).unwrap(), &cfg, a.path()).unwrap();
    cfg.workers = Some(1);
    write_experiment(&run_experiment(&cfg).unwrap(), &cfg, b.path()).unwrap();
    let mut compared = 0;
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let other = b.path().join(path.file_name().unwrap());
            if std::fs::read(&path).unwrap() != std::fs::read(&other).unwrap() {
                return Err(format!("{} differs", path.display()));
            }
            compared += 1;
        }
    }
    if compared == 6 {
        Ok(format!("{compared} CSV files byte-identical (parallel vs one worker)"))
    } else {
        Err(format!("expected 6 CSV files, found {compared}"))
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("noiseless AGD+ gap below D/A_k", noiseless_bound),
        ("O(1/k^2) rate", quadratic_rate),
        ("AGD and AGD+ coincide under the tight schedule", agd_agdp_equivalence),
        ("strongly convex method geometric rate", magdp_geometric_rate),
        ("polynomial schedule noise proxy ~ 1/k", poly_noise_proxy),
        ("noise accumulation vs restart/slow-down", noise_accumulation),
        ("simplex-constrained gap stays bounded", constrained_boundedness),
        ("inexact-oracle error accumulates linearly", devolder_accumulation),
        ("oracle query counts", oracle_complexity),
        ("byte-identical CSVs across executions", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
