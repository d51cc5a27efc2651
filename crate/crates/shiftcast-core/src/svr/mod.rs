//! Epsilon-support-vector regression with linear and RBF kernels.
//!
//! Training minimizes `1/2 ||w||^2 + C * sum(xi + xi*)` subject to every
//! residual lying within an epsilon tube, the classic soft-margin regression
//! program. The solver works on the equivalent dual with one variable per
//! training point, `beta_i = alpha_i - alpha_i*`:
//!
//! ```text
//! maximize  -1/2 sum_ij beta_i beta_j k(x_i, x_j)
//!           - epsilon sum_i |beta_i| + sum_i y_i beta_i
//! s.t.      sum_i beta_i = 0,   -C <= beta_i <= C
//! ```
//!
//! Kernelization requires the dual, and folding the alpha pair into a single
//! signed coefficient halves the variable count. The fitted function is
//! `f(x) = sum_i beta_i k(x_i, x) + b`.
//!
//! [`smo`] holds the pairwise solver; [`persist`] the JSON model format.

mod persist;
pub(crate) mod smo;

pub use persist::{load_model, save_model, MODEL_FORMAT_VERSION};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from kernel evaluation, training, and prediction.
#[derive(Debug, Error)]
pub enum SvrError {
    #[error("vector dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("non-finite value in {context}")]
    NonFiniteInput { context: String },
    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },
    #[error("infeasible dual point: {message}")]
    InfeasiblePoint { message: String },
    #[error("model file {path}: {message}")]
    ModelFormat { path: String, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Kernel family selector without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelVariant {
    Linear,
    Rbf,
}

/// Kernel function: linear dot product or Gaussian RBF `exp(-gamma ||u-v||^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn variant(&self) -> KernelVariant {
        match self {
            KernelSpec::Linear => KernelVariant::Linear,
            KernelSpec::Rbf { .. } => KernelVariant::Rbf,
        }
    }

    pub fn validate(&self) -> Result<(), SvrError> {
        match self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma } => {
                if gamma.is_finite() && *gamma > 0.0 {
                    Ok(())
                } else {
                    Err(SvrError::InvalidConfig {
                        message: format!("rbf gamma must be positive and finite, got {gamma}"),
                    })
                }
            }
        }
    }
}

/// Evaluates the kernel on two equal-length vectors.
pub fn kernel_eval(kernel: &KernelSpec, u: &[f64], v: &[f64]) -> Result<f64, SvrError> {
    if u.len() != v.len() {
        return Err(SvrError::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(kernel_eval_unchecked(kernel, u, v))
}

#[inline]
pub(crate) fn kernel_eval_unchecked(kernel: &KernelSpec, u: &[f64], v: &[f64]) -> f64 {
    match kernel {
        KernelSpec::Linear => u.iter().zip(v).map(|(a, b)| a * b).sum(),
        KernelSpec::Rbf { gamma } => {
            let dist_sq: f64 = u
                .iter()
                .zip(v)
                .map(|(a, b)| {
                    let d = a - b;
                    d * d
                })
                .sum();
            (-gamma * dist_sq).exp()
        }
    }
}

/// Training hyperparameters and solver controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Box constraint C: trade-off between flatness and tube violations.
    pub c: f64,
    /// Half-width of the no-loss tube around the fitted function.
    pub epsilon: f64,
    pub kernel: KernelSpec,
    /// Convergence threshold on the maximal KKT violation.
    pub kkt_tolerance: f64,
    /// Upper bound on solver epochs (one epoch is a full sweep of n steps).
    pub max_epochs: usize,
    /// Reserved for stochastic extensions; the solver itself is deterministic.
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(c: f64, epsilon: f64, kernel: KernelSpec) -> Self {
        Self {
            c,
            epsilon,
            kernel,
            kkt_tolerance: 1e-3,
            max_epochs: 1000,
            seed: 0,
        }
    }

    pub fn with_kkt_tolerance(mut self, tolerance: f64) -> Self {
        self.kkt_tolerance = tolerance;
        self
    }

    pub fn with_max_epochs(mut self, max_epochs: usize) -> Self {
        self.max_epochs = max_epochs;
        self
    }

    pub fn validate(&self) -> Result<(), SvrError> {
        self.kernel.validate()?;
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(SvrError::InvalidConfig {
                message: format!("c must be positive and finite, got {}", self.c),
            });
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(SvrError::InvalidConfig {
                message: format!("epsilon must be non-negative and finite, got {}", self.epsilon),
            });
        }
        if !(self.kkt_tolerance.is_finite() && self.kkt_tolerance > 0.0) {
            return Err(SvrError::InvalidConfig {
                message: format!(
                    "kkt_tolerance must be positive and finite, got {}",
                    self.kkt_tolerance
                ),
            });
        }
        if self.max_epochs == 0 {
            return Err(SvrError::InvalidConfig {
                message: "max_epochs must be at least 1".to_string(),
            });
        }
        Ok(())
    }
}

/// A trained regressor: support vectors, dual coefficients, bias, kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: KernelSpec,
    /// Box constraint the model was trained with.
    pub c: f64,
    /// Tube half-width the model was trained with.
    pub epsilon: f64,
    /// Solver tolerance the model was trained with.
    pub kkt_tolerance: f64,
    pub dimension: usize,
    pub bias: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// Dual coefficient differences, one per stored support vector.
    pub betas: Vec<f64>,
    pub feature_names: Vec<String>,
    pub target_name: String,
    /// False when training stopped at the epoch budget with KKT violations left.
    pub converged: bool,
}

impl SvrModel {
    /// Attaches real feature and target names (defaults are `f1..fd` / `y`).
    pub fn set_names<S: AsRef<str>>(
        &mut self,
        feature_names: &[S],
        target_name: &str,
    ) -> Result<(), SvrError> {
        if feature_names.len() != self.dimension {
            return Err(SvrError::DimensionMismatch {
                expected: self.dimension,
                found: feature_names.len(),
            });
        }
        self.feature_names = feature_names
            .iter()
            .map(|s| s.as_ref().to_string())
            .collect();
        self.target_name = target_name.to_string();
        Ok(())
    }

    pub fn validate(&self) -> Result<(), SvrError> {
        self.kernel.validate()?;
        if self.support_vectors.len() != self.betas.len() {
            return Err(SvrError::InvalidConfig {
                message: format!(
                    "{} support vectors but {} betas",
                    self.support_vectors.len(),
                    self.betas.len()
                ),
            });
        }
        for sv in &self.support_vectors {
            if sv.len() != self.dimension {
                return Err(SvrError::DimensionMismatch {
                    expected: self.dimension,
                    found: sv.len(),
                });
            }
        }
        let finite = self.bias.is_finite()
            && self.betas.iter().all(|b| b.is_finite())
            && self
                .support_vectors
                .iter()
                .all(|sv| sv.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(SvrError::NonFiniteInput {
                context: "model coefficients".to_string(),
            });
        }
        Ok(())
    }
}

/// Solver outcome counters for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub epochs_run: usize,
    /// Dual objective at the returned coefficients.
    pub dual_objective: f64,
    /// Points still violating their KKT condition beyond the tolerance.
    pub kkt_violations_remaining: usize,
    /// Dual objective recorded at the end of each epoch; non-decreasing.
    pub epoch_objectives: Vec<f64>,
}

impl SolveStats {
    pub fn converged(&self) -> bool {
        self.kkt_violations_remaining == 0
    }
}

fn check_training_inputs(xs: &[Vec<f64>], ys: &[f64]) -> Result<usize, SvrError> {
    if xs.is_empty() {
        return Err(SvrError::EmptyTrainingSet);
    }
    if xs.len() != ys.len() {
        return Err(SvrError::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let dim = xs[0].len();
    for (i, x) in xs.iter().enumerate() {
        if x.len() != dim {
            return Err(SvrError::DimensionMismatch {
                expected: dim,
                found: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SvrError::NonFiniteInput {
                context: format!("training vector {i}"),
            });
        }
    }
    if let Some(i) = ys.iter().position(|y| !y.is_finite()) {
        return Err(SvrError::NonFiniteInput {
            context: format!("training target {i}"),
        });
    }
    Ok(dim)
}

/// Trains an epsilon-SVR model.
///
/// The returned model satisfies the dual KKT conditions within
/// `config.kkt_tolerance` when `stats.converged()`; otherwise the epoch
/// budget ran out and `stats.kkt_violations_remaining` counts the leftovers
/// (the model is still returned and usable).
pub fn train(
    config: &TrainConfig,
    xs: &[Vec<f64>],
    ys: &[f64],
) -> Result<(SvrModel, SolveStats), SvrError> {
    config.validate()?;
    let dim = check_training_inputs(xs, ys)?;

    let outcome = smo::solve(config, xs, ys);

    // Keep every vector whose coefficient is distinguishable from solver
    // dust. Filtering at kkt_tolerance itself would discard genuinely small
    // support coefficients, whose kernel contributions are not small at all
    // once a raw-scale feature like place pressure enters the dot product.
    let dust = 1e-10 * config.c.max(1.0);
    let mut support_vectors = Vec::new();
    let mut betas = Vec::new();
    for (x, &beta) in xs.iter().zip(&outcome.betas) {
        if beta.abs() > dust {
            support_vectors.push(x.clone());
            betas.push(beta);
        }
    }

    let model = SvrModel {
        kernel: config.kernel,
        c: config.c,
        epsilon: config.epsilon,
        kkt_tolerance: config.kkt_tolerance,
        dimension: dim,
        bias: outcome.bias,
        support_vectors,
        betas,
        feature_names: (1..=dim).map(|i| format!("f{i}")).collect(),
        target_name: "y".to_string(),
        converged: outcome.stats.converged(),
    };
    Ok((model, outcome.stats))
}

/// Evaluates the fitted function at `x`.
pub fn predict(model: &SvrModel, x: &[f64]) -> Result<f64, SvrError> {
    if x.len() != model.dimension {
        return Err(SvrError::DimensionMismatch {
            expected: model.dimension,
            found: x.len(),
        });
    }
    let mut value = model.bias;
    for (sv, beta) in model.support_vectors.iter().zip(&model.betas) {
        value += beta * kernel_eval_unchecked(&model.kernel, sv, x);
    }
    Ok(value)
}

/// Value of the dual objective at a feasible coefficient vector.
///
/// A testing hook: the solver's monotonicity and the reference-solver
/// comparison are both stated in terms of this quantity.
pub fn dual_objective(
    config: &TrainConfig,
    xs: &[Vec<f64>],
    ys: &[f64],
    betas: &[f64],
) -> Result<f64, SvrError> {
    config.validate()?;
    check_training_inputs(xs, ys)?;
    if betas.len() != xs.len() {
        return Err(SvrError::DimensionMismatch {
            expected: xs.len(),
            found: betas.len(),
        });
    }
    let tol = config.kkt_tolerance;
    let sum: f64 = betas.iter().sum();
    if sum.abs() > tol {
        return Err(SvrError::InfeasiblePoint {
            message: format!("sum of betas is {sum}, exceeds tolerance {tol}"),
        });
    }
    if let Some(b) = betas.iter().find(|b| b.abs() > config.c + tol) {
        return Err(SvrError::InfeasiblePoint {
            message: format!("beta {b} outside box [-{c}, {c}]", c = config.c),
        });
    }

    let mut quadratic = 0.0;
    for (i, bi) in betas.iter().enumerate() {
        if *bi == 0.0 {
            continue;
        }
        for (j, bj) in betas.iter().enumerate() {
            if *bj == 0.0 {
                continue;
            }
            quadratic += bi * bj * kernel_eval_unchecked(&config.kernel, &xs[i], &xs[j]);
        }
    }
    let linear: f64 = betas
        .iter()
        .zip(ys)
        .map(|(b, y)| y * b - config.epsilon * b.abs())
        .sum();
    Ok(linear - 0.5 * quadratic)
}

#[cfg(test)]
mod tests;
