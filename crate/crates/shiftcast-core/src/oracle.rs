//! Brute-force reference solver for the epsilon-SVR dual.
//!
//! Deliberately simple and slow: proximal gradient ascent with an exact
//! prox/projection step, used to generate ground truth for the SMO solver's
//! tests. It re-implements the kernel arithmetic locally and shares no code
//! with the solver under test beyond the public config types.
//!
//! Each iteration takes a gradient step on the smooth part of the objective,
//! then applies the exact prox of the separable remainder (the `epsilon`
//! L1 term, the box, and the sum-to-zero coupling): with a scalar multiplier
//! `lambda` for the equality constraint the prox decomposes coordinatewise
//! into a soft-threshold followed by a clamp, and the feasible `lambda` is
//! found by bisection since the coefficient sum is monotone in it. Step sizes
//! start at the inverse curvature bound and slowly diminish.

use thiserror::Error;

use crate::svr::{KernelSpec, TrainConfig};

/// Reference solves refuse instances larger than this.
pub const MAX_PROBLEM_SIZE: usize = 64;

/// Gradient steps before giving up.
pub const DEFAULT_ITERATION_BUDGET: usize = 2_000_000;

/// Consecutive steps with objective change below 1e-14 that count as a plateau.
const PLATEAU_STEPS: usize = 1000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {n} points, reference solver accepts at most {MAX_PROBLEM_SIZE}")]
    TooLarge { n: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("non-finite value in {context}")]
    NonFiniteInput { context: String },
    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },
}

/// Result of a reference solve.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub betas: Vec<f64>,
    pub dual_objective: f64,
    pub iterations: usize,
}

/// Independent kernel arithmetic (not shared with the solver under test).
fn kernel(spec: &KernelSpec, u: &[f64], v: &[f64]) -> f64 {
    match spec {
        KernelSpec::Linear => {
            let mut acc = 0.0;
            for idx in 0..u.len() {
                acc += u[idx] * v[idx];
            }
            acc
        }
        KernelSpec::Rbf { gamma } => {
            let mut dist_sq = 0.0;
            for idx in 0..u.len() {
                let d = u[idx] - v[idx];
                dist_sq += d * d;
            }
            (-gamma * dist_sq).exp()
        }
    }
}

/// Exact prox of `t*eps*||.||_1` over the box intersected with the
/// sum-to-zero hyperplane, by bisection on the equality multiplier.
fn prox(v: &[f64], threshold: f64, c: f64) -> Vec<f64> {
    let soft = |z: f64| -> f64 { z.signum() * (z.abs() - threshold).max(0.0) };
    let coords = |lambda: f64| -> Vec<f64> {
        v.iter().map(|vi| soft(vi - lambda).clamp(-c, c)).collect()
    };
    let sum_at = |lambda: f64| -> f64 { coords(lambda).iter().sum() };

    let vmin = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let vmax = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = vmin - threshold - c - 1.0;
    let mut hi = vmax + threshold + c + 1.0;
    // sum_at is non-increasing: sum_at(lo) = n*C >= 0 >= -n*C = sum_at(hi).
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum_at(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
    }
    let mut out = coords(0.5 * (lo + hi));
    // Spread the residual over nonzero interior coordinates so the iterate
    // is feasible to machine precision; soft-thresholded zeros stay exact.
    let residual: f64 = out.iter().sum();
    if residual != 0.0 {
        let interior = out.iter().filter(|b| **b != 0.0 && b.abs() < c).count();
        if interior > 0 {
            let shift = residual / interior as f64;
            for b in out.iter_mut() {
                if *b != 0.0 && b.abs() < c {
                    *b = (*b - shift).clamp(-c, c);
                }
            }
        }
    }
    out
}

/// Rounds coefficients that sit within fp dust of 0 or the box bounds onto
/// them, rebalancing the leftover sum on the largest interior coordinate.
fn clean_solution(betas: &mut [f64], c: f64) {
    let dust = 1e-12 * c.max(1.0);
    for b in betas.iter_mut() {
        if b.abs() < dust {
            *b = 0.0;
        } else if (*b - c).abs() < dust {
            *b = c;
        } else if (*b + c).abs() < dust {
            *b = -c;
        }
    }
    let residual: f64 = betas.iter().sum();
    if residual != 0.0 {
        let host = (0..betas.len())
            .filter(|&i| betas[i] != 0.0 && betas[i].abs() < c)
            .max_by(|&a, &b| betas[a].abs().total_cmp(&betas[b].abs()));
        if let Some(i) = host {
            betas[i] -= residual;
        }
    }
}

/// Solves the dual by projected/proximal gradient ascent.
///
/// Deterministic: the initial point is the zero vector (`config.seed` does
/// not influence the path). Returns the best feasible iterate seen.
pub fn qp_reference_solve(
    config: &TrainConfig,
    xs: &[Vec<f64>],
    ys: &[f64],
) -> Result<OracleSolution, OracleError> {
    let n = xs.len();
    if n == 0 {
        return Err(OracleError::EmptyTrainingSet);
    }
    if n > MAX_PROBLEM_SIZE {
        return Err(OracleError::TooLarge { n });
    }
    if xs.len() != ys.len() {
        return Err(OracleError::InvalidConfig {
            message: format!("{} vectors but {} targets", xs.len(), ys.len()),
        });
    }
    config.validate().map_err(|e| OracleError::InvalidConfig {
        message: e.to_string(),
    })?;
    for (i, x) in xs.iter().enumerate() {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(OracleError::NonFiniteInput {
                context: format!("vector {i}"),
            });
        }
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(OracleError::NonFiniteInput {
            context: "targets".to_string(),
        });
    }

    let c = config.c;
    let eps = config.epsilon;
    let gram: Vec<f64> = {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = kernel(&config.kernel, &xs[i], &xs[j]);
            }
        }
        m
    };
    let objective = |beta: &[f64]| -> f64 {
        let mut value = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += gram[i * n + j] * beta[j];
            }
            value += ys[i] * beta[i] - eps * beta[i].abs() - 0.5 * beta[i] * row;
        }
        value
    };

    // Curvature bound: the max row sum of |K| dominates the spectral norm.
    let lipschitz = (0..n)
        .map(|i| (0..n).map(|j| gram[i * n + j].abs()).sum::<f64>())
        .fold(f64::MIN, f64::max)
        .max(1e-12);

    let mut beta = vec![0.0; n];
    let mut best_beta = beta.clone();
    let mut best_objective = objective(&beta);
    let mut previous = best_objective;
    let mut plateau = 0usize;
    let mut iterations = 0usize;

    for t in 0..DEFAULT_ITERATION_BUDGET {
        iterations = t + 1;
        // Diminishing step sizes, never above the safe 1/L step.
        let step = (1.0 / lipschitz) * (1e7 / (1e7 + t as f64));
        let mut moved: Vec<f64> = (0..n)
            .map(|i| {
                let mut row = 0.0;
                for j in 0..n {
                    row += gram[i * n + j] * beta[j];
                }
                beta[i] + step * (ys[i] - row)
            })
            .collect();
        moved = prox(&moved, step * eps, c);
        beta = moved;

        let value = objective(&beta);
        if value > best_objective {
            best_objective = value;
            best_beta.copy_from_slice(&beta);
        }
        if (value - previous).abs() < 1e-14 {
            plateau += 1;
            if plateau >= PLATEAU_STEPS {
                break;
            }
        } else {
            plateau = 0;
        }
        previous = value;
    }

    clean_solution(&mut best_beta, c);
    let best_objective = objective(&best_beta);

    Ok(OracleSolution {
        betas: best_beta,
        dual_objective: best_objective,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svr::KernelSpec;
    use approx::assert_relative_eq;

    fn config(c: f64, epsilon: f64, kernel: KernelSpec) -> TrainConfig {
        TrainConfig::new(c, epsilon, kernel)
    }

    #[test]
    fn zero_targets_give_zero_solution() {
        let xs = vec![vec![0.5, -0.2], vec![1.0, 0.3], vec![-0.4, 0.9]];
        let ys = vec![0.0, 0.0, 0.0];
        let sol = qp_reference_solve(&config(1.0, 0.05, KernelSpec::Linear), &xs, &ys).unwrap();
        assert_eq!(sol.dual_objective, 0.0);
        for b in sol.betas {
            assert_eq!(b, 0.0);
        }
    }

    #[test]
    fn two_point_closed_form() {
        // With x = {0, 1}, y = {0, 1}, eps = 0 the reduced dual in t = beta_2
        // is -t^2/2 + t, maximized at t = 1 with value 1/2.
        let xs = vec![vec![0.0], vec![1.0]];
        let ys = vec![0.0, 1.0];
        let sol = qp_reference_solve(&config(10.0, 0.0, KernelSpec::Linear), &xs, &ys).unwrap();
        assert_relative_eq!(sol.dual_objective, 0.5, max_relative = 1e-9);
        assert_relative_eq!(sol.betas[1], 1.0, max_relative = 1e-6);
        assert_relative_eq!(sol.betas[0], -1.0, max_relative = 1e-6);
    }

    #[test]
    fn iterates_are_feasible() {
        let xs = vec![
            vec![0.1, 0.9],
            vec![-0.7, 0.2],
            vec![0.4, -0.5],
            vec![0.9, 0.8],
            vec![-0.3, -0.9],
        ];
        let ys = vec![0.3, -0.8, 0.1, 0.9, -0.2];
        for (c, eps) in [(0.1, 0.0), (1.0, 0.01), (10.0, 0.1)] {
            let sol =
                qp_reference_solve(&config(c, eps, KernelSpec::Rbf { gamma: 0.7 }), &xs, &ys)
                    .unwrap();
            let sum: f64 = sol.betas.iter().sum();
            assert!(sum.abs() <= 1e-9, "sum {sum}");
            for b in &sol.betas {
                assert!(b.abs() <= c + 1e-9);
            }
            assert!(sol.dual_objective >= 0.0, "beta = 0 is always feasible");
        }
    }

    #[test]
    fn deterministic() {
        let xs = vec![vec![0.2], vec![0.8], vec![-0.5]];
        let ys = vec![0.4, -0.1, 0.6];
        let cfg = config(1.0, 0.01, KernelSpec::Linear);
        let a = qp_reference_solve(&cfg, &xs, &ys).unwrap();
        let b = qp_reference_solve(&cfg, &xs, &ys).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_oversized_instances() {
        let xs = vec![vec![0.0]; MAX_PROBLEM_SIZE + 1];
        let ys = vec![0.0; MAX_PROBLEM_SIZE + 1];
        assert!(matches!(
            qp_reference_solve(&config(1.0, 0.1, KernelSpec::Linear), &xs, &ys),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        let xs = vec![vec![f64::NAN]];
        let ys = vec![0.0];
        assert!(matches!(
            qp_reference_solve(&config(1.0, 0.1, KernelSpec::Linear), &xs, &ys),
            Err(OracleError::NonFiniteInput { .. })
        ));
    }
}
