//! Model selection: k-fold cross-validation, exhaustive grid search,
//! MAE/RMSE metrics, k-sweeps, and side-by-side model evaluation reports.
//!
//! Fold assignment is a pure function of `(n, k, seed)`, one fold plan is
//! shared across a whole grid search, and grid points and folds may be
//! evaluated in parallel: every fit is pure and results are reassembled in
//! deterministic order, so the output is independent of the schedule.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{FeatureRow, FEATURE_NAMES};
use crate::seed::derive_seed;
use crate::svr::{self, KernelSpec, KernelVariant, SolveStats, SvrError, SvrModel, TrainConfig};

#[derive(Debug, Error)]
pub enum ModelSelError {
    #[error("k = {k} exceeds the number of rows n = {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("k = {k} is below 2")]
    KTooSmall { k: usize },
    #[error("length mismatch: {left} actual vs {right} predicted")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    Empty,
    #[error("grid has an empty parameter list")]
    EmptyGrid,
    #[error(transparent)]
    Svr(#[from] SvrError),
}

/// Prediction target: one of the three shift responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    ShiftXRatio,
    ShiftYRatio,
    ShiftAngleDeg,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::ShiftXRatio, Target::ShiftYRatio, Target::ShiftAngleDeg];

    pub fn value(&self, row: &FeatureRow) -> f64 {
        match self {
            Target::ShiftXRatio => row.y_x,
            Target::ShiftYRatio => row.y_y,
            Target::ShiftAngleDeg => row.y_ang,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Target::ShiftXRatio => "shift_x_ratio",
            Target::ShiftYRatio => "shift_y_ratio",
            Target::ShiftAngleDeg => "shift_angle_deg",
        }
    }

    /// Table-style response label.
    pub fn label(&self) -> &'static str {
        match self {
            Target::ShiftXRatio => "Shift X (ratio)",
            Target::ShiftYRatio => "Shift Y (ratio)",
            Target::ShiftAngleDeg => "Shift Angle (deg)",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shift_x_ratio" | "x" => Ok(Target::ShiftXRatio),
            "shift_y_ratio" | "y" => Ok(Target::ShiftYRatio),
            "shift_angle_deg" | "angle" => Ok(Target::ShiftAngleDeg),
            other => Err(format!(
                "unknown target {other} (expected shift_x_ratio, shift_y_ratio or shift_angle_deg)"
            )),
        }
    }
}

/// Seeded balanced assignment of `n` rows to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n: usize,
    pub k: usize,
    /// `assignment[i]` is the fold of row `i`.
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.assignment[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.assignment[i] != fold).collect()
    }
}

/// Splits `n` rows into `k` uniformly shuffled folds whose sizes differ by
/// at most one. The assignment depends on `(n, k, seed)` only.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan, ModelSelError> {
    if k < 2 {
        return Err(ModelSelError::KTooSmall { k });
    }
    if k > n {
        return Err(ModelSelError::KTooLarge { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, k as u64));
    order.shuffle(&mut rng);
    let mut assignment = vec![0usize; n];
    for (position, &row) in order.iter().enumerate() {
        assignment[row] = position % k;
    }
    Ok(FoldPlan {
        n,
        k,
        assignment,
        seed,
    })
}

/// Mean absolute error.
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64, ModelSelError> {
    check_metric_inputs(actual, predicted)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).abs())
        .sum();
    Ok(sum / actual.len() as f64)
}

/// Root mean squared error.
pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64, ModelSelError> {
    check_metric_inputs(actual, predicted)?;
    let sum: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok((sum / actual.len() as f64).sqrt())
}

fn check_metric_inputs(actual: &[f64], predicted: &[f64]) -> Result<(), ModelSelError> {
    if actual.len() != predicted.len() {
        return Err(ModelSelError::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(ModelSelError::Empty);
    }
    Ok(())
}

/// Per-feature z-score parameters, fitted on training folds only.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(xs: &[Vec<f64>]) -> Self {
        let n = xs.len().max(1) as f64;
        let dim = xs.first().map_or(0, Vec::len);
        let mut means = vec![0.0; dim];
        for x in xs {
            for (m, v) in means.iter_mut().zip(x) {
                *m += v;
            }
        }
        for m in means.iter_mut() {
            *m /= n;
        }
        let mut stds = vec![0.0; dim];
        for x in xs {
            for ((s, v), m) in stds.iter_mut().zip(x).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in stds.iter_mut() {
            // Population std; constant features pass through unscaled.
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Standardizer { means, stds }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// Cross-validation outcome: unweighted means over folds plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub mean_mae: f64,
    pub mean_rmse: f64,
    pub folds: usize,
    /// Folds whose fit stopped at the epoch budget; still included in means.
    pub not_converged_folds: usize,
}

/// Trains on `rows` and attaches the canonical feature/target names.
pub fn fit_rows(
    config: &TrainConfig,
    rows: &[FeatureRow],
    target: Target,
) -> Result<(SvrModel, SolveStats), ModelSelError> {
    if rows.is_empty() {
        return Err(ModelSelError::Empty);
    }
    let xs: Vec<Vec<f64>> = rows.iter().map(|r| r.predictors().to_vec()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| target.value(r)).collect();
    let (mut model, stats) = svr::train(config, &xs, &ys)?;
    model.set_names(&FEATURE_NAMES, target.name())?;
    Ok((model, stats))
}

/// k-fold cross-validation of one configuration.
///
/// Each fold is fitted on its complement (with the optional standardizer
/// fitted on the training part only) and scored on the held-out rows.
pub fn cross_validate(
    config: &TrainConfig,
    rows: &[FeatureRow],
    target: Target,
    k: usize,
    seed: u64,
    standardize: bool,
) -> Result<CvOutcome, ModelSelError> {
    let plan = kfold_split(rows.len(), k, seed)?;
    cross_validate_with_plan(config, rows, target, &plan, standardize)
}

/// As [`cross_validate`] with a caller-provided fold plan, so a whole grid
/// search can share one split.
pub fn cross_validate_with_plan(
    config: &TrainConfig,
    rows: &[FeatureRow],
    target: Target,
    plan: &FoldPlan,
    standardize: bool,
) -> Result<CvOutcome, ModelSelError> {
    config.validate()?;
    if plan.n != rows.len() {
        return Err(ModelSelError::LengthMismatch {
            left: plan.n,
            right: rows.len(),
        });
    }

    let fold_results: Vec<Result<(f64, f64, bool), ModelSelError>> = (0..plan.k)
        .into_par_iter()
        .map(|fold| evaluate_fold(config, rows, target, plan, fold, standardize))
        .collect();

    let mut sum_mae = 0.0;
    let mut sum_rmse = 0.0;
    let mut not_converged = 0usize;
    for result in fold_results {
        let (fold_mae, fold_rmse, converged) = result?;
        sum_mae += fold_mae;
        sum_rmse += fold_rmse;
        if !converged {
            not_converged += 1;
        }
    }
    Ok(CvOutcome {
        mean_mae: sum_mae / plan.k as f64,
        mean_rmse: sum_rmse / plan.k as f64,
        folds: plan.k,
        not_converged_folds: not_converged,
    })
}

fn evaluate_fold(
    config: &TrainConfig,
    rows: &[FeatureRow],
    target: Target,
    plan: &FoldPlan,
    fold: usize,
    standardize: bool,
) -> Result<(f64, f64, bool), ModelSelError> {
    let train_idx = plan.train_indices(fold);
    let test_idx = plan.test_indices(fold);
    debug_assert!(train_idx.iter().all(|i| !test_idx.contains(i)));

    let mut train_xs: Vec<Vec<f64>> = train_idx
        .iter()
        .map(|&i| rows[i].predictors().to_vec())
        .collect();
    let train_ys: Vec<f64> = train_idx.iter().map(|&i| target.value(&rows[i])).collect();
    let mut test_xs: Vec<Vec<f64>> = test_idx
        .iter()
        .map(|&i| rows[i].predictors().to_vec())
        .collect();
    let test_ys: Vec<f64> = test_idx.iter().map(|&i| target.value(&rows[i])).collect();

    if standardize {
        let scaler = Standardizer::fit(&train_xs);
        train_xs = train_xs.iter().map(|x| scaler.transform(x)).collect();
        test_xs = test_xs.iter().map(|x| scaler.transform(x)).collect();
    }

    let (model, stats) = svr::train(config, &train_xs, &train_ys)?;
    let predictions: Vec<f64> = test_xs
        .iter()
        .map(|x| svr::predict(&model, x))
        .collect::<Result<_, _>>()?;
    Ok((
        mae(&test_ys, &predictions)?,
        rmse(&test_ys, &predictions)?,
        stats.converged(),
    ))
}

/// Hyperparameter grid for one kernel family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub kernel: KernelVariant,
    pub cs: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// Ignored for the linear kernel.
    pub gammas: Vec<f64>,
}

impl Grid {
    pub fn validate(&self) -> Result<(), ModelSelError> {
        if self.cs.is_empty() || self.epsilons.is_empty() || self.gammas.is_empty() {
            return Err(ModelSelError::EmptyGrid);
        }
        let finite = self.cs.iter().chain(&self.epsilons).chain(&self.gammas);
        if finite.clone().any(|v| !v.is_finite()) {
            return Err(ModelSelError::Svr(SvrError::NonFiniteInput {
                context: "grid values".to_string(),
            }));
        }
        Ok(())
    }

    fn configs(&self) -> Vec<TrainConfig> {
        let mut out = Vec::new();
        for &c in &self.cs {
            for &epsilon in &self.epsilons {
                match self.kernel {
                    KernelVariant::Linear => {
                        out.push(TrainConfig::new(c, epsilon, KernelSpec::Linear));
                    }
                    KernelVariant::Rbf => {
                        for &gamma in &self.gammas {
                            out.push(TrainConfig::new(c, epsilon, KernelSpec::Rbf { gamma }));
                        }
                    }
                }
            }
        }
        out
    }
}

/// The searched grid, log-spaced with the published winning values included.
pub fn default_grid(kernel: KernelVariant) -> Grid {
    Grid {
        kernel,
        cs: vec![0.01, 0.1, 0.13, 1.0, 10.0, 100.0],
        epsilons: vec![0.00097, 0.001, 0.01, 0.031, 0.1],
        gammas: vec![0.01, 0.1, 1.0, 10.0],
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub c: f64,
    pub epsilon: f64,
    pub gamma: Option<f64>,
    pub mean_mae: f64,
    pub mean_rmse: f64,
    pub not_converged_folds: usize,
}

impl GridPoint {
    /// Tie-breaking order: lowest RMSE, then smaller C, larger epsilon,
    /// smaller gamma.
    fn better_than(&self, other: &GridPoint) -> bool {
        if self.mean_rmse != other.mean_rmse {
            return self.mean_rmse < other.mean_rmse;
        }
        if self.c != other.c {
            return self.c < other.c;
        }
        if self.epsilon != other.epsilon {
            return self.epsilon > other.epsilon;
        }
        match (self.gamma, other.gamma) {
            (Some(a), Some(b)) => a < b,
            _ => false,
        }
    }
}

/// Exhaustively evaluates the grid with one shared fold plan; returns the
/// best configuration and the full result table in grid order.
pub fn grid_search(
    grid: &Grid,
    rows: &[FeatureRow],
    target: Target,
    k: usize,
    seed: u64,
) -> Result<(TrainConfig, Vec<GridPoint>), ModelSelError> {
    grid.validate()?;
    let plan = kfold_split(rows.len(), k, seed)?;
    let configs = grid.configs();

    let table: Vec<GridPoint> = configs
        .par_iter()
        .map(|config| {
            let outcome = cross_validate_with_plan(config, rows, target, &plan, false)?;
            Ok(GridPoint {
                c: config.c,
                epsilon: config.epsilon,
                gamma: match config.kernel {
                    KernelSpec::Linear => None,
                    KernelSpec::Rbf { gamma } => Some(gamma),
                },
                mean_mae: outcome.mean_mae,
                mean_rmse: outcome.mean_rmse,
                not_converged_folds: outcome.not_converged_folds,
            })
        })
        .collect::<Result<_, ModelSelError>>()?;

    let mut best = 0usize;
    for i in 1..table.len() {
        if table[i].better_than(&table[best]) {
            best = i;
        }
    }
    Ok((configs[best].clone(), table))
}

/// Cross-validates one configuration for every `k` in `ks`.
///
/// Per-k fold seeds derive from the master seed, so the sweep is reproducible
/// yet each k gets an independent shuffle.
pub fn k_sweep(
    config: &TrainConfig,
    rows: &[FeatureRow],
    target: Target,
    ks: &[usize],
    seed: u64,
) -> Result<Vec<(usize, f64)>, ModelSelError> {
    ks.par_iter()
        .map(|&k| {
            let outcome = cross_validate(config, rows, target, k, derive_seed(seed, k as u64), false)?;
            Ok((k, outcome.mean_rmse))
        })
        .collect()
}

/// One row of the evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub model_name: String,
    pub target: Target,
    pub mae: f64,
    pub rmse: f64,
    pub k: usize,
    pub c: f64,
    pub epsilon: f64,
    pub gamma: Option<f64>,
    pub not_converged_folds: usize,
}

/// Cross-validated MAE/RMSE per (model, target) cell, ordered models-then-
/// targets with targets in X, Y, angle order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("model,target,mae,rmse,k,c,epsilon,gamma\n");
        for row in &self.rows {
            let gamma = row.gamma.map(|g| g.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.model_name, row.target.name(), row.mae, row.rmse, row.k, row.c, row.epsilon,
                gamma
            ));
        }
        out
    }

    /// Aligned plain-text table in the published results layout.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<12} {:<18} {:>10} {:>10}\n",
            "Model", "Response", "MAE", "RMSE"
        ));
        let mut last_model = "";
        for row in &self.rows {
            let model = if row.model_name == last_model {
                ""
            } else {
                last_model = &row.model_name;
                &row.model_name
            };
            out.push_str(&format!(
                "{:<12} {:<18} {:>10.4} {:>10.4}\n",
                model,
                row.target.label(),
                row.mae,
                row.rmse
            ));
        }
        out
    }
}

/// Cross-validates every named configuration on every target.
pub fn evaluate_models(
    rows: &[FeatureRow],
    configs: &[(String, TrainConfig)],
    targets: &[Target],
    k: usize,
    seed: u64,
) -> Result<EvalReport, ModelSelError> {
    let cells: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|m| (0..targets.len()).map(move |t| (m, t)))
        .collect();
    let rows_out: Vec<EvalRow> = cells
        .par_iter()
        .map(|&(m, t)| {
            let (name, config) = &configs[m];
            let target = targets[t];
            let outcome = cross_validate(config, rows, target, k, seed, false)?;
            Ok(EvalRow {
                model_name: name.clone(),
                target,
                mae: outcome.mean_mae,
                rmse: outcome.mean_rmse,
                k,
                c: config.c,
                epsilon: config.epsilon,
                gamma: match config.kernel {
                    KernelSpec::Linear => None,
                    KernelSpec::Rbf { gamma } => Some(gamma),
                },
                not_converged_folds: outcome.not_converged_folds,
            })
        })
        .collect::<Result<_, ModelSelError>>()?;
    Ok(EvalReport { rows: rows_out })
}

#[cfg(test)]
mod tests;
