//! SMO-style pairwise solver for the epsilon-SVR dual.
//!
//! Each step picks the pair of coefficients with the largest KKT violation
//! and solves the two-variable subproblem exactly. Moving along
//! `(e_i, -e_j)` keeps the equality constraint satisfied, so with
//! `beta_i <- beta_i + d`, `beta_j <- beta_j - d` the objective changes by
//!
//! ```text
//! dW(d) = g d - eta d^2 / 2
//!         - eps (|beta_i + d| - |beta_i|) - eps (|beta_j - d| - |beta_j|)
//! ```
//!
//! with `g = (y_i - f_i) - (y_j - f_j)` and
//! `eta = K_ii - 2 K_ij + K_jj >= 0`. `dW` is concave and piecewise
//! quadratic in `d` with breakpoints where a coefficient crosses zero, so the
//! exact maximizer over the box-feasible interval is found by checking the
//! segment endpoints and each segment's stationary point.
//!
//! Selection keeps the maximal violators in the working pair but lets each
//! of them pick its exact best partner: pure first-order pairing crawls on
//! badly scaled kernels (curvature between the two pressure clusters is four
//! orders above the within-cluster one), while the gain-scanned partner step
//! is never worse and converges orders of magnitude faster. When no pair can
//! make numerical progress the solver falls back to one exact pass over all
//! pairs; if that also yields nothing the iterate is optimal at
//! floating-point resolution.

use super::{kernel_eval_unchecked, KernelSpec, SolveStats, TrainConfig};

/// Kernel matrices are precomputed up to this many training points and
/// evaluated on demand above it.
pub(crate) const KERNEL_CACHE_LIMIT: usize = 4096;

/// Coefficients snap to 0 or +-C when within this relative distance.
const SNAP: f64 = 1e-13;

pub(crate) enum KernelTable<'a> {
    Cached { n: usize, matrix: Vec<f64> },
    OnDemand { kernel: KernelSpec, xs: &'a [Vec<f64>] },
}

impl<'a> KernelTable<'a> {
    pub(crate) fn new(kernel: KernelSpec, xs: &'a [Vec<f64>], cache_limit: usize) -> Self {
        let n = xs.len();
        if n <= cache_limit {
            let mut matrix = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let v = kernel_eval_unchecked(&kernel, &xs[i], &xs[j]);
                    matrix[i * n + j] = v;
                    matrix[j * n + i] = v;
                }
            }
            KernelTable::Cached { n, matrix }
        } else {
            KernelTable::OnDemand { kernel, xs }
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        match self {
            KernelTable::Cached { n, matrix } => matrix[i * n + j],
            KernelTable::OnDemand { kernel, xs } => kernel_eval_unchecked(kernel, &xs[i], &xs[j]),
        }
    }
}

pub(crate) struct SmoOutcome {
    pub betas: Vec<f64>,
    pub bias: f64,
    pub stats: SolveStats,
}

struct Solver<'a> {
    kernel: KernelTable<'a>,
    ys: &'a [f64],
    c: f64,
    eps: f64,
    tol: f64,
    beta: Vec<f64>,
    /// f_i = sum_j beta_j K_ij, maintained incrementally.
    f: Vec<f64>,
}

/// A candidate two-variable update: objective gain and step length.
#[derive(Clone, Copy, PartialEq)]
struct Step {
    gain: f64,
    delta: f64,
}

impl<'a> Solver<'a> {
    fn n(&self) -> usize {
        self.ys.len()
    }

    /// Coefficients inside this band count as zero for derivative
    /// classification, mirroring the snap applied after each step.
    #[inline]
    fn zero_band(&self) -> f64 {
        SNAP * self.c.max(1.0)
    }

    /// Right derivative of the objective in the +e_i direction,
    /// valid while beta_i < C.
    #[inline]
    fn up_value(&self, i: usize) -> f64 {
        let residual = self.ys[i] - self.f[i];
        if self.beta[i] >= -self.zero_band() {
            residual - self.eps
        } else {
            residual + self.eps
        }
    }

    /// Left derivative of the objective in the -e_i direction (negated),
    /// valid while beta_i > -C.
    #[inline]
    fn down_value(&self, i: usize) -> f64 {
        let residual = self.ys[i] - self.f[i];
        if self.beta[i] > self.zero_band() {
            residual - self.eps
        } else {
            residual + self.eps
        }
    }

    /// Best exact step that keeps `i` in the working pair, scanning all
    /// partners. Ties resolve to the lowest partner index.
    ///
    /// A pair can gain only if some feasible direction has positive slope at
    /// the current point, so partners failing that cheap test are skipped
    /// without solving the subproblem.
    fn best_partner_step(&self, i: usize) -> (usize, Step) {
        let mut best_j = i;
        let mut best = Step {
            gain: 0.0,
            delta: 0.0,
        };
        let can_up_i = self.beta[i] < self.c;
        let can_down_i = self.beta[i] > -self.c;
        let up_i = self.up_value(i);
        let down_i = self.down_value(i);
        for j in 0..self.n() {
            if j == i {
                continue;
            }
            let forward = can_up_i && self.beta[j] > -self.c && up_i > self.down_value(j);
            let backward = can_down_i && self.beta[j] < self.c && self.up_value(j) > down_i;
            if !forward && !backward {
                continue;
            }
            let step = self.best_step(i, j);
            if step.gain > best.gain {
                best = step;
                best_j = j;
            }
        }
        (best_j, best)
    }

    /// Maximal-KKT-violating pair: the index that most wants to grow and the
    /// index that most wants to shrink. Ties resolve to the lowest index.
    fn max_violating_pair(&self) -> Option<(usize, usize, f64)> {
        let mut best_up: Option<(usize, f64)> = None;
        let mut best_down: Option<(usize, f64)> = None;
        for i in 0..self.n() {
            if self.beta[i] < self.c {
                let up = self.up_value(i);
                if best_up.map_or(true, |(_, v)| up > v) {
                    best_up = Some((i, up));
                }
            }
            if self.beta[i] > -self.c {
                let down = self.down_value(i);
                if best_down.map_or(true, |(_, v)| down < v) {
                    best_down = Some((i, down));
                }
            }
        }
        match (best_up, best_down) {
            (Some((i, up)), Some((j, down))) => Some((i, j, up - down)),
            _ => None,
        }
    }

    /// Exact solution of the two-variable subproblem on pair `(i, j)`,
    /// without applying it.
    fn best_step(&self, i: usize, j: usize) -> Step {
        let zero = Step {
            gain: 0.0,
            delta: 0.0,
        };
        if i == j {
            return zero;
        }
        let bi = self.beta[i];
        let bj = self.beta[j];
        let lo = (-self.c - bi).max(bj - self.c);
        let hi = (self.c - bi).min(bj + self.c);
        if !(hi > lo) {
            return zero;
        }

        let eta = (self.kernel.at(i, i) - 2.0 * self.kernel.at(i, j) + self.kernel.at(j, j))
            .max(0.0);
        let g = (self.ys[i] - self.f[i]) - (self.ys[j] - self.f[j]);
        let eps = self.eps;

        let gain_at = |d: f64| -> f64 {
            g * d - 0.5 * eta * d * d
                - eps * ((bi + d).abs() - bi.abs())
                - eps * ((bj - d).abs() - bj.abs())
        };

        // Segment boundaries: box limits plus the |.| breakpoints inside them.
        let mut cuts = [lo, hi, f64::NAN, f64::NAN];
        let mut ncuts = 2;
        for bp in [-bi, bj] {
            if bp > lo && bp < hi {
                cuts[ncuts] = bp;
                ncuts += 1;
            }
        }
        let cuts = &mut cuts[..ncuts];
        cuts.sort_by(f64::total_cmp);

        let mut candidates = [f64::NAN; 7];
        let mut ncand = 0;
        for &c in cuts.iter() {
            candidates[ncand] = c;
            ncand += 1;
        }
        if eta > 0.0 {
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                if !(b > a) {
                    continue;
                }
                let mid = 0.5 * (a + b);
                let si = sign(bi + mid);
                let sj = sign(bj - mid);
                let stationary = (g - eps * si + eps * sj) / eta;
                if stationary > a && stationary < b {
                    candidates[ncand] = stationary;
                    ncand += 1;
                }
            }
        }
        let candidates = &mut candidates[..ncand];
        candidates.sort_by(f64::total_cmp);

        let mut best = zero;
        for &d in candidates.iter() {
            let gain = gain_at(d);
            if gain > best.gain {
                best = Step { gain, delta: d };
            }
        }
        best
    }

    /// Applies a step to pair `(i, j)` and refreshes the cached predictions.
    fn apply(&mut self, i: usize, j: usize, delta: f64) {
        let old_i = self.beta[i];
        let old_j = self.beta[j];
        self.beta[i] = self.snap(old_i + delta);
        self.beta[j] = self.snap(old_j - delta);
        let di = self.beta[i] - old_i;
        let dj = self.beta[j] - old_j;
        for a in 0..self.n() {
            self.f[a] += di * self.kernel.at(a, i) + dj * self.kernel.at(a, j);
        }
    }

    #[inline]
    fn snap(&self, value: f64) -> f64 {
        let scale = SNAP * self.c.max(1.0);
        if value.abs() < scale {
            0.0
        } else if (value - self.c).abs() < scale {
            self.c
        } else if (value + self.c).abs() < scale {
            -self.c
        } else {
            value
        }
    }

    fn objective(&self) -> f64 {
        let mut value = 0.0;
        for i in 0..self.n() {
            value += self.ys[i] * self.beta[i] - self.eps * self.beta[i].abs()
                - 0.5 * self.beta[i] * self.f[i];
        }
        value
    }

    /// Bias from unbounded support vectors; with none, the midpoint of the
    /// KKT-feasible interval for b.
    fn bias(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..self.n() {
            let b = self.beta[i];
            if b != 0.0 && b.abs() < self.c {
                sum += (self.ys[i] - self.f[i]) - b.signum() * self.eps;
                count += 1;
            }
        }
        if count > 0 {
            return sum / count as f64;
        }
        match self.max_violating_pair() {
            Some((i, j, _)) => 0.5 * (self.up_value(i) + self.down_value(j)),
            None => 0.0,
        }
    }

    /// Indices participating in a violating pair beyond the tolerance.
    fn count_violations(&self) -> usize {
        let Some((i_up, j_down, gap)) = self.max_violating_pair() else {
            return 0;
        };
        if gap <= self.tol {
            return 0;
        }
        let max_up = self.up_value(i_up);
        let min_down = self.down_value(j_down);
        let mut count = 0;
        for i in 0..self.n() {
            if self.beta[i] < self.c && self.up_value(i) > min_down + self.tol {
                count += 1;
            }
            if self.beta[i] > -self.c && self.down_value(i) < max_up - self.tol {
                count += 1;
            }
        }
        count
    }

    /// One exact pass over all pairs; applies the best improving step.
    fn full_pair_sweep(&mut self) -> bool {
        let mut best = Step {
            gain: 0.0,
            delta: 0.0,
        };
        let mut best_pair = None;
        for i in 0..self.n() {
            for j in (i + 1)..self.n() {
                let step = self.best_step(i, j);
                if step.gain > best.gain {
                    best = step;
                    best_pair = Some((i, j));
                }
            }
        }
        match best_pair {
            Some((i, j)) => {
                self.apply(i, j, best.delta);
                true
            }
            None => false,
        }
    }
}

#[inline]
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub(crate) fn solve(config: &TrainConfig, xs: &[Vec<f64>], ys: &[f64]) -> SmoOutcome {
    solve_with_cache_limit(config, xs, ys, KERNEL_CACHE_LIMIT)
}

pub(crate) fn solve_with_cache_limit(
    config: &TrainConfig,
    xs: &[Vec<f64>],
    ys: &[f64],
    cache_limit: usize,
) -> SmoOutcome {
    let n = xs.len();
    let mut solver = Solver {
        kernel: KernelTable::new(config.kernel, xs, cache_limit),
        ys,
        c: config.c,
        eps: config.epsilon,
        tol: config.kkt_tolerance,
        beta: vec![0.0; n],
        f: vec![0.0; n],
    };

    let mut epoch_objectives = Vec::new();
    let mut done = false;
    'epochs: while epoch_objectives.len() < config.max_epochs && !done {
        for _ in 0..n {
            let Some((i, j, gap)) = solver.max_violating_pair() else {
                done = true;
                break;
            };
            if gap <= solver.tol {
                done = true;
                break;
            }
            // Both maximal violators look for their best exact partner step;
            // the plain (i, j) step is among the candidates.
            let (pi, step_i) = solver.best_partner_step(i);
            let (pj, step_j) = solver.best_partner_step(j);
            let (a, b, step) = if step_i.gain >= step_j.gain {
                (i, pi, step_i)
            } else {
                (j, pj, step_j)
            };
            if step.gain > 0.0 {
                solver.apply(a, b, step.delta);
            } else if !solver.full_pair_sweep() {
                // No pair can improve the objective at fp resolution.
                done = true;
                break;
            }
        }
        let objective = solver.objective();
        if epoch_objectives.last().is_some_and(|&prev| objective == prev) && !done {
            // A whole epoch without measurable gain cannot recur productively.
            epoch_objectives.push(objective);
            break 'epochs;
        }
        epoch_objectives.push(objective);
    }

    let bias = solver.bias();
    let stats = SolveStats {
        epochs_run: epoch_objectives.len(),
        dual_objective: solver.objective(),
        kkt_violations_remaining: solver.count_violations(),
        epoch_objectives,
    };
    SmoOutcome {
        betas: solver.beta,
        bias,
        stats,
    }
}
