//! Penalty-level selection by k-fold cross-validation.
//!
//! The grid is geometric from `lambda_max = max_j |X_j'y|` down to
//! `grid_min_ratio * lambda_max`, so the all-zero model is always on the
//! path. Fits walk the grid in descending order with warm starts. Each
//! candidate is scored by the held-out MSE of the least-squares refit on
//! its selected support, so the criterion tracks the model a lambda
//! picks rather than how hard it shrinks; the argmin wins, ties broken
//! toward the larger (sparser) lambda.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::solvers::{self, CdState};

/// Cross-validation parameters.
#[derive(Debug, Clone)]
pub struct CvSpec {
    pub n_folds: usize,
    pub grid_size: usize,
    /// Ratio of the smallest to the largest grid point, in (0, 1).
    pub grid_min_ratio: f64,
    /// Seed for the fold assignment.
    pub seed: u64,
    /// Number of independent fold assignments averaged per lambda;
    /// repeat r uses `seed + r`. More repeats damp the noise in
    /// model-to-model comparisons.
    pub repeats: usize,
}

impl Default for CvSpec {
    fn default() -> Self {
        CvSpec {
            n_folds: 5,
            grid_size: 50,
            grid_min_ratio: 1e-3,
            seed: 0,
            repeats: 1,
        }
    }
}

impl CvSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_folds < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_folds = {} below 2",
                self.n_folds
            )));
        }
        if self.grid_size < 1 {
            return Err(Error::InvalidConfig("grid_size must be >= 1".into()));
        }
        if !(self.grid_min_ratio > 0.0 && self.grid_min_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "grid_min_ratio = {} not in (0,1)",
                self.grid_min_ratio
            )));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidConfig("repeats must be >= 1".into()));
        }
        Ok(())
    }
}

/// Which solver cross-validation tunes.
#[derive(Debug, Clone)]
pub enum SolverKind {
    Lasso,
    Bridge { gamma: f64 },
    /// Weighted LASSO with fixed weights (adaptive LASSO after the
    /// initializer has been computed).
    WeightedLasso { weights: DVector<f64> },
}

/// One point of the cross-validation curve.
#[derive(Debug, Clone)]
pub struct CvPoint {
    pub lambda: f64,
    pub cv_mse: f64,
    pub n_folds_used: usize,
}

/// Splits 0..n into `n_folds` disjoint (train, test) index pairs whose
/// test sizes differ by at most one. Deterministic in the seed.
pub fn kfold_split(n: usize, spec: &CvSpec) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    spec.validate()?;
    if n < spec.n_folds {
        return Err(Error::TooFewObservations {
            n,
            n_folds: spec.n_folds,
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    perm.shuffle(&mut rng);
    let base = n / spec.n_folds;
    let remainder = n % spec.n_folds;
    let mut folds = Vec::with_capacity(spec.n_folds);
    let mut start = 0usize;
    for f in 0..spec.n_folds {
        let size = base + usize::from(f < remainder);
        let mut test: Vec<usize> = perm[start..start + size].to_vec();
        test.sort_unstable();
        let mut train: Vec<usize> =
            Vec::from_iter(perm[..start].iter().chain(&perm[start + size..]).copied());
        train.sort_unstable();
        folds.push((train, test));
        start += size;
    }
    Ok(folds)
}

/// Geometric lambda grid from `max_j |X_j'y|` down to
/// `grid_min_ratio * lambda_max`, descending. A response orthogonal to
/// every column yields the singleton `{0}`.
pub fn lambda_grid(x: &DMatrix<f64>, y: &DVector<f64>, spec: &CvSpec) -> Vec<f64> {
    let lambda_max = (x.transpose() * y).amax();
    if lambda_max == 0.0 {
        return vec![0.0];
    }
    if spec.grid_size == 1 {
        return vec![lambda_max];
    }
    let log_max = lambda_max.ln();
    let log_min = (lambda_max * spec.grid_min_ratio).ln();
    (0..spec.grid_size)
        .map(|i| {
            let t = i as f64 / (spec.grid_size - 1) as f64;
            (log_max + t * (log_min - log_max)).exp()
        })
        .collect()
}

fn rows(x: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(idx.len(), x.ncols());
    for (r, &i) in idx.iter().enumerate() {
        out.row_mut(r).copy_from(&x.row(i));
    }
    out
}

fn elems(y: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| y[i]))
}

/// Held-out MSE of a coefficient vector, computed through the nonzero
/// coordinates only.
fn test_mse(x_test: &DMatrix<f64>, y_test: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let n = x_test.nrows();
    let mut sse = 0.0;
    let active: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
    for i in 0..n {
        let mut pred = 0.0;
        for &j in &active {
            pred += x_test[(i, j)] * beta[j];
        }
        let r = y_test[i] - pred;
        sse += r * r;
    }
    sse / n as f64
}

/// Replaces the penalized coefficients by the least-squares refit on
/// their support, solved from the training Gram matrix. The held-out
/// error of this post-selection predictor scores the selected model
/// rather than the shrinkage level, so the CV argmin tracks support
/// quality. Falls back to the penalized coefficients when the refit
/// system is unsolvable (support larger than the training sample or a
/// collinear selection).
fn refit_on_support(
    gram: &DMatrix<f64>,
    xty: &DVector<f64>,
    n_train: usize,
    beta: &DVector<f64>,
) -> DVector<f64> {
    let support: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
    if support.is_empty() || support.len() >= n_train {
        return beta.clone();
    }
    let k = support.len();
    let mut sub = DMatrix::zeros(k, k);
    let mut rhs = DVector::zeros(k);
    for (a, &ja) in support.iter().enumerate() {
        rhs[a] = xty[ja];
        for (b, &jb) in support.iter().enumerate() {
            sub[(a, b)] = gram[(ja, jb)];
        }
    }
    let solved = nalgebra::Cholesky::new(sub.clone())
        .map(|ch| ch.solve(&rhs))
        .or_else(|| sub.lu().solve(&rhs));
    match solved {
        Some(coefs) => {
            let mut refit = DVector::zeros(beta.len());
            for (a, &ja) in support.iter().enumerate() {
                refit[ja] = coefs[a];
            }
            refit
        }
        None => beta.clone(),
    }
}

/// Selects lambda by k-fold cross-validation over the default grid.
pub fn cv_select(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    kind: &SolverKind,
    spec: &CvSpec,
) -> Result<(f64, Vec<CvPoint>)> {
    let grid = lambda_grid(x, y, spec);
    cv_select_with_grid(x, y, &grid, kind, spec)
}

/// [`cv_select`] over a caller-supplied grid. Fold fits that fail to
/// converge are skipped and recorded; a lambda with more than half its
/// folds failed is excluded from the argmin. Held-out error is the plain
/// MSE of the support-refitted predictor from each training fold.
pub fn cv_select_with_grid(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    grid: &[f64],
    kind: &SolverKind,
    spec: &CvSpec,
) -> Result<(f64, Vec<CvPoint>)> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty lambda grid".into()));
    }
    let n = y.len();
    let tol = solvers::DEFAULT_TOL;
    let mut sums = vec![0.0f64; grid.len()];
    let mut used = vec![0usize; grid.len()];
    let mut folds = Vec::new();
    for r in 0..spec.repeats as u64 {
        let assignment = CvSpec {
            seed: spec.seed + r,
            ..spec.clone()
        };
        folds.extend(kfold_split(n, &assignment)?);
    }
    for (train, test) in &folds {
        let x_tr = rows(x, train);
        let y_tr = elems(y, train);
        let x_te = rows(x, test);
        let y_te = elems(y, test);
        let gram = x_tr.transpose() * &x_tr;
        let xty = x_tr.transpose() * &y_tr;
        let half_yty = 0.5 * y_tr.norm_squared();
        // warm-started walk down the grid; for the bridge the warm state
        // tracks the lasso path that initializes each bridge fit
        let mut warm = CdState::zeros(&xty);
        for (gi, &lambda) in grid.iter().enumerate() {
            let (beta, converged) = match kind {
                SolverKind::Lasso => {
                    let ok = solvers::lasso_gram(
                        &gram,
                        &xty,
                        lambda,
                        None,
                        tol,
                        solvers::MAX_SWEEPS,
                        &mut warm,
                    );
                    (warm.beta.clone(), ok)
                }
                SolverKind::WeightedLasso { weights } => {
                    let ok = solvers::lasso_gram(
                        &gram,
                        &xty,
                        lambda,
                        Some(weights),
                        tol,
                        solvers::MAX_SWEEPS,
                        &mut warm,
                    );
                    (warm.beta.clone(), ok)
                }
                SolverKind::Bridge { gamma } => {
                    let lasso_ok = solvers::lasso_gram(
                        &gram,
                        &xty,
                        lambda,
                        None,
                        tol,
                        solvers::MAX_SWEEPS,
                        &mut warm,
                    );
                    let (beta, ok) = solvers::bridge_gram(
                        &gram, &xty, half_yty, &warm.beta, lambda, *gamma, tol,
                    );
                    (beta, lasso_ok && ok)
                }
            };
            if converged {
                let refit = refit_on_support(&gram, &xty, train.len(), &beta);
                sums[gi] += test_mse(&x_te, &y_te, &refit);
                used[gi] += 1;
            }
        }
    }
    let k = folds.len();
    let curve: Vec<CvPoint> = grid
        .iter()
        .zip(sums.iter().zip(used.iter()))
        .map(|(&lambda, (&s, &u))| CvPoint {
            lambda,
            cv_mse: if u > 0 { s / u as f64 } else { f64::NAN },
            n_folds_used: u,
        })
        .collect();
    // exclude lambdas where more than half the folds failed; ties go to
    // the earlier (larger) lambda
    let mut best: Option<usize> = None;
    for (gi, point) in curve.iter().enumerate() {
        if k - point.n_folds_used > k / 2 {
            continue;
        }
        match best {
            None => best = Some(gi),
            Some(b) if point.cv_mse < curve[b].cv_mse => best = Some(gi),
            _ => {}
        }
    }
    let best = best.ok_or(Error::CvExhausted)?;
    Ok((grid[best], curve))
}

/// Renders a CV curve in the `lambda,cv_mse,n_folds_used` emission format.
pub fn cv_curve_csv(curve: &[CvPoint]) -> String {
    let mut out = String::from("lambda,cv_mse,n_folds_used\n");
    for p in curve {
        let _ = writeln!(out, "{},{},{}", p.lambda, p.cv_mse, p.n_folds_used);
    }
    out
}
