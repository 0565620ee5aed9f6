use agdplus::oracle::{GradientOracle, NoiseSpec, StochasticGenerator};
use agdplus::problem::{FeasibleSet, Objective, Problem};
use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `f = 0`, so every query returns the noise vector itself.
fn flat(n: usize, set: FeasibleSet) -> Problem {
    Problem::new(
        "flat",
        Objective::DiagonalQuadratic {
            diag: Array1::zeros(n),
            center: Array1::zeros(n),
        },
        1.0,
        0.0,
        set,
    )
    .unwrap()
}

#[test]
fn gaussian_second_moment_and_mean() {
    let n = 100;
    let sigma = 0.1;
    let p = flat(n, FeasibleSet::AllSpace);
    let mut o = GradientOracle::new(&p, NoiseSpec::Gaussian { sigma }, 42).unwrap();
    let x = Array1::zeros(n);
    let queries = 100_000;
    let mut sum = Array1::<f64>::zeros(n);
    for _ in 0..queries {
        sum += &o.query(x.view()).unwrap();
    }
    let m2 = o.noise_stats().mean_norm_sq();
    assert!((0.95..=1.05).contains(&m2), "mean ||eta||^2 = {m2}");
    let mean = sum / queries as f64;
    let bound = 3.0 * (n as f64 * sigma * sigma / queries as f64).sqrt();
    assert!(mean.dot(&mean).sqrt() <= bound);
}

#[test]
fn equal_seeds_give_identical_sequences() {
    let p = flat(5, FeasibleSet::AllSpace);
    let spec = NoiseSpec::SeededStochastic {
        generator: StochasticGenerator::Uniform { half_width: 0.3 },
    };
    let mut a = GradientOracle::new(&p, spec.clone(), 9).unwrap();
    let mut b = GradientOracle::new(&p, spec, 9).unwrap();
    let x = Array1::zeros(5);
    for _ in 0..1000 {
        assert_eq!(a.query(x.view()).unwrap(), b.query(x.view()).unwrap());
    }
}

#[test]
fn queries_consume_disjoint_stream_segments() {
    let p = flat(7, FeasibleSet::AllSpace);
    let mut o = GradientOracle::new(&p, NoiseSpec::Gaussian { sigma: 1.0 }, 3)
        .unwrap()
        .with_stream_log();
    let x = Array1::zeros(7);
    for _ in 0..500 {
        o.query(x.view()).unwrap();
    }
    let log = o.stream_log().unwrap();
    assert_eq!(log.len(), 500);
    assert_eq!(log[0].start, 0);
    for w in log.windows(2) {
        assert!(w[0].start < w[0].end);
        assert_eq!(w[0].end, w[1].start);
    }
    assert_eq!(log.last().unwrap().end, o.stream_position());
}

#[test]
fn adversarial_inner_products_bounded_by_delta() {
    let delta = 0.05;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for set in [
        FeasibleSet::Simplex,
        FeasibleSet::L1Ball { radius: 2.0 },
        FeasibleSet::Box {
            lower: vec![-1.0; 4],
            upper: vec![0.5; 4],
        },
    ] {
        let p = flat(4, set.clone());
        let mut o = GradientOracle::new(&p, NoiseSpec::AdversarialInnerProduct { delta }, 0).unwrap();
        let eta = o.query(Array1::zeros(4).view()).unwrap();
        for _ in 0..1000 {
            // random feasible points: project random vectors, plus vertices of the box case
            let mut sample = || {
                let raw = Array1::from_shape_fn(4, |_| rng.random_range(-4.0..4.0));
                set.project(raw.view()).unwrap()
            };
            let (y, z) = (sample(), sample());
            assert!(eta.dot(&(&y - &z)).abs() <= delta + 1e-12, "{set:?}");
        }
    }
}
