//! Built-in problem families: the cycle-Laplacian hard instance, a diagonal
//! strongly convex quadratic, LASSO over an l1 ball and logistic regression,
//! with a CSV loader and a synthetic data generator.

use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::power_iteration;
use crate::problem::{cycle_laplacian_apply, FeasibleSet, Objective, Problem};

const POWER_TOL: f64 = 1e-7;
const POWER_MAX_ITER: usize = 10_000_000;

/// `f(x) = 1/2 <Ax, x> - <b, x>` with `A` the Laplacian of the n-cycle,
/// `b_1 = 1`, `b_n = -1`.
pub fn make_hard_instance(n: usize) -> Result<Problem> {
    make_hard_instance_on(n, FeasibleSet::AllSpace)
}

/// The hard instance restricted to the probability simplex.
pub fn make_hard_instance_simplex(n: usize) -> Result<Problem> {
    make_hard_instance_on(n, FeasibleSet::Simplex)
}

fn make_hard_instance_on(n: usize, set: FeasibleSet) -> Result<Problem> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("hard instance needs n >= 3, got {n}")));
    }
    let mut linear = Array1::zeros(n);
    linear[0] = 1.0;
    linear[n - 1] = -1.0;
    let smoothness = power_iteration(cycle_laplacian_apply, n, POWER_TOL, POWER_MAX_ITER)?;
    let name = match set {
        FeasibleSet::Simplex => format!("hard_instance_simplex_{n}"),
        _ => format!("hard_instance_{n}"),
    };
    Problem::new(name, Objective::CycleQuadratic { linear }, smoothness, 0.0, set)
}

/// `1/2 sum_i d_i (x_i - 1)^2` with `d` evenly spaced on `[mu, smoothness]`.
pub fn make_sc_quadratic(n: usize, mu: f64, smoothness: f64) -> Result<Problem> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadratic dimension must be positive".into()));
    }
    if !(mu > 0.0 && mu <= smoothness) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < mu <= L, got mu = {mu}, L = {smoothness}"
        )));
    }
    let diag = if n == 1 {
        Array1::from_elem(1, smoothness)
    } else {
        Array1::linspace(mu, smoothness, n)
    };
    let mu_eff = if n == 1 { smoothness } else { mu };
    Problem::new(
        format!("sc_quadratic_{n}"),
        Objective::DiagonalQuadratic {
            diag,
            center: Array1::ones(n),
        },
        smoothness,
        mu_eff,
        FeasibleSet::AllSpace,
    )
}

/// Design matrix and labels for the regression problems.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub design: Array2<f64>,
    pub labels: Array1<f64>,
    pub standardized: bool,
}

impl RegressionData {
    pub fn new(design: Array2<f64>, labels: Array1<f64>) -> Result<Self> {
        if design.nrows() == 0 || design.ncols() == 0 {
            return Err(Error::InvalidArgument("regression data is empty".into()));
        }
        if design.nrows() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "design has {} rows but there are {} labels",
                design.nrows(),
                labels.len()
            )));
        }
        Ok(RegressionData {
            design,
            labels,
            standardized: false,
        })
    }

    pub fn samples(&self) -> usize {
        self.design.nrows()
    }

    pub fn features(&self) -> usize {
        self.design.ncols()
    }

    /// Center each feature column and scale it to unit (population)
    /// variance. Zero-variance columns are an error.
    pub fn standardize(mut self) -> Result<Self> {
        let m = self.samples() as f64;
        for (j, mut col) in self.design.axis_iter_mut(Axis(1)).enumerate() {
            let mean = col.sum() / m;
            col.mapv_inplace(|v| v - mean);
            let var = col.dot(&col) / m;
            if !(var > 0.0) {
                return Err(Error::DataColumn {
                    column: j,
                    message: "feature has zero variance".into(),
                });
            }
            let sd = var.sqrt();
            col.mapv_inplace(|v| v / sd);
        }
        self.standardized = true;
        Ok(self)
    }

    pub fn is_binary(&self) -> bool {
        self.labels.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Labels `1` where the current label exceeds `threshold`, else `0`.
    pub fn threshold_labels(mut self, threshold: f64) -> Self {
        self.labels.mapv_inplace(|v| if v > threshold { 1.0 } else { 0.0 });
        self
    }
}

fn gram_top_eigenvalue(design: &Array2<f64>) -> Result<f64> {
    power_iteration(
        |x| design.t().dot(&design.dot(&x)),
        design.ncols(),
        POWER_TOL,
        POWER_MAX_ITER,
    )
}

/// `(1/2m) ||Dx - y||^2` over the l1 ball of the given radius.
pub fn make_lasso(data: &RegressionData, radius: f64) -> Result<Problem> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lasso radius must be positive, got {radius}"
        )));
    }
    let smoothness = gram_top_eigenvalue(&data.design)? / data.samples() as f64;
    Problem::new(
        "lasso",
        Objective::LeastSquares {
            design: data.design.clone(),
            targets: data.labels.clone(),
        },
        smoothness,
        0.0,
        FeasibleSet::L1Ball { radius },
    )
}

/// Unconstrained `(1/2m) ||Dx - y||^2`.
pub fn make_least_squares(data: &RegressionData) -> Result<Problem> {
    let smoothness = gram_top_eigenvalue(&data.design)? / data.samples() as f64;
    Problem::new(
        "least_squares",
        Objective::LeastSquares {
            design: data.design.clone(),
            targets: data.labels.clone(),
        },
        smoothness,
        0.0,
        FeasibleSet::AllSpace,
    )
}

/// Unregularized logistic regression on labels in `{0, 1}`.
pub fn make_logistic(data: &RegressionData) -> Result<Problem> {
    if let Some(i) = data.labels.iter().position(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidArgument(format!(
            "logistic regression needs labels in {{0, 1}}, sample {i} has {}",
            data.labels[i]
        )));
    }
    let smoothness = gram_top_eigenvalue(&data.design)? / (4.0 * data.samples() as f64);
    Problem::new(
        "logistic",
        Objective::Logistic {
            design: data.design.clone(),
            signs: data.labels.mapv(|v| 2.0 * v - 1.0),
        },
        smoothness,
        0.0,
        FeasibleSet::AllSpace,
    )
}

/// Maps a label column to `{0, 1}`: the given class is positive, every
/// other value negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinarizeRule {
    pub positive_class: f64,
}

/// Load a numeric CSV. The first record is taken as a header when any of
/// its fields is not a number. All other columns become standardized
/// features.
pub fn load_csv(path: impl AsRef<Path>, label_column: usize, binarize: Option<BinarizeRule>) -> Result<RegressionData> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;

    let mut features: Vec<f64> = Vec::new();
    let mut labels: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if first {
            first = false;
            if record.iter().any(|f| f.trim().parse::<f64>().is_err()) {
                continue;
            }
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Data {
                row: line,
                column: record.len().min(w),
                message: format!("expected {w} fields, found {}", record.len()),
            });
        }
        if label_column >= w {
            return Err(Error::Data {
                row: line,
                column: label_column,
                message: format!("label column out of range for {w} fields"),
            });
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Data {
                row: line,
                column: j,
                message: format!("non-numeric field '{field}'"),
            })?;
            if !v.is_finite() {
                return Err(Error::Data {
                    row: line,
                    column: j,
                    message: format!("non-finite field '{field}'"),
                });
            }
            if j == label_column {
                labels.push(match binarize {
                    Some(rule) => (v == rule.positive_class) as u8 as f64,
                    None => v,
                });
            } else {
                features.push(v);
            }
        }
    }
    let w = width.ok_or_else(|| Error::InvalidArgument(format!("{} has no data rows", path.display())))?;
    if w < 2 {
        return Err(Error::InvalidArgument(format!(
            "{} needs at least one feature column besides the label",
            path.display()
        )));
    }
    let design = Array2::from_shape_vec((labels.len(), w - 1), features).expect("row widths checked while reading");
    RegressionData::new(design, Array1::from_vec(labels))?
        .standardize()
        .map_err(|e| match e {
            // report the column index as it appears in the file
            Error::DataColumn { column, message } => Error::DataColumn {
                column: if column >= label_column { column + 1 } else { column },
                message,
            },
            other => other,
        })
}

/// Gaussian design (standardized), planted Gaussian weights, and labels
/// `Dw + noise_level * N(0, 1)`.
pub fn synth_data(m: usize, d: usize, seed: u64, noise_level: f64) -> Result<RegressionData> {
    if m < 2 || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "synthetic data needs m >= 2 and d >= 1, got {m}x{d}"
        )));
    }
    if !(noise_level >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "noise level must be nonnegative, got {noise_level}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let design = Array2::from_shape_simple_fn((m, d), || StandardNormal.sample(&mut rng));
    let weights: Array1<f64> = Array1::from_shape_simple_fn(d, || StandardNormal.sample(&mut rng));
    let mut data = RegressionData::new(design, Array1::zeros(m))?.standardize()?;
    let noise: Array1<f64> = Array1::from_shape_simple_fn(m, || StandardNormal.sample(&mut rng));
    data.labels = data.design.dot(&weights) + noise * noise_level;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::io::Write;

    #[test]
    fn hard_instance_basics() {
        let p = make_hard_instance(4).unwrap();
        assert!((p.smoothness - 4.0).abs() < 1e-10);
        let zero = Array1::zeros(4);
        assert_eq!(p.value(zero.view()), 0.0);
        assert_eq!(p.gradient(zero.view()), array![-1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(make_hard_instance(2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn laplacian_kills_constants() {
        for n in [3, 7, 100] {
            let y = cycle_laplacian_apply(Array1::ones(n).view());
            assert!(y.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn lasso_and_logistic_constants() {
        let data = RegressionData::new(Array2::eye(2), array![1.0, 0.0]).unwrap();
        let p = make_lasso(&data, 10.0).unwrap();
        assert!((p.smoothness - 0.5).abs() < 1e-12);
        let p = make_logistic(&data).unwrap();
        assert!((p.smoothness - 0.125).abs() < 1e-12);
        assert!(make_lasso(&data, 0.0).is_err());
        let bad = RegressionData::new(Array2::eye(2), array![1.0, 2.0]).unwrap();
        assert!(matches!(make_logistic(&bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn logistic_scalar_example() {
        let data = RegressionData::new(array![[1.0]], array![1.0]).unwrap();
        let p = make_logistic(&data).unwrap();
        let x = array![0.0];
        assert!((p.value(x.view()) - 2f64.ln()).abs() < 1e-15);
        assert!((p.gradient(x.view())[0] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn csv_standardizes_and_reports_bad_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "a,b,label\n1,10,3\n2,20,1\n3,60,3").unwrap();
        let data = load_csv(&path, 2, Some(BinarizeRule { positive_class: 3.0 })).unwrap();
        assert_eq!(data.labels, array![1.0, 0.0, 1.0]);
        // column a: mean 2, population variance 2/3
        let s = (2.0f64 / 3.0).sqrt();
        assert!((data.design[[0, 0]] + 1.0 / s).abs() < 1e-12);
        for col in data.design.axis_iter(Axis(1)) {
            assert!(col.sum().abs() < 1e-9);
            assert!((col.dot(&col) / 3.0 - 1.0).abs() < 1e-9);
        }

        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "1,2,0\n4,x,1").unwrap();
        match load_csv(&path, 2, None) {
            Err(Error::Data { row, column, .. }) => assert_eq!((row, column), (2, 1)),
            other => panic!("{other:?}"),
        }

        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "1,5,0\n2,5,1").unwrap();
        match load_csv(&path, 2, None) {
            Err(Error::DataColumn { column, .. }) => assert_eq!(column, 1),
            other => panic!("{other:?}"),
        }

        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "1,2,0\n4,1").unwrap();
        assert!(matches!(load_csv(&path, 2, None), Err(Error::Data { row: 2, .. })));
    }

    #[test]
    fn synth_data_is_seeded() {
        let a = synth_data(100, 10, 7, 0.1).unwrap();
        let b = synth_data(100, 10, 7, 0.1).unwrap();
        let c = synth_data(100, 10, 8, 0.1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.standardized);
    }
}
