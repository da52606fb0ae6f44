//! Single-stage penalized least-squares solvers.
//!
//! All solvers minimize `0.5 * ||y - X b||^2 + penalty(b)`:
//!
//! * [`ols_fit`] — exact or minimum-norm least squares (no penalty),
//! * [`lasso_cd`] — (weighted) l1 penalty by cyclic coordinate descent,
//! * [`bridge_fit`] — the non-convex `lambda * sum |b_j|^gamma` penalty,
//!   0 < gamma < 1, solved by iterative reweighting with an auxiliary
//!   variable per coordinate,
//! * [`adaptive_lasso_fit`] — l1 with data-driven weights from an initial
//!   estimator.
//!
//! Coordinate descent writes literal zeros, so the reported support is
//! exactly the set of nonzero coefficients.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default tolerance on the maximum coefficient change per sweep.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default cap on coordinate-descent sweeps.
pub const MAX_SWEEPS: usize = 10_000;
/// Default cap on outer reweighting iterations for the bridge penalty.
pub const MAX_OUTER: usize = 200;

/// A fitted coefficient vector with its exact-zero support.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub beta: DVector<f64>,
    /// Indices j with beta_j != 0 exactly (all indices for OLS, which
    /// never selects).
    pub support: Vec<usize>,
    /// Final value of the solver's own objective.
    pub objective: f64,
    /// Sweeps (coordinate descent) or outer iterations (bridge).
    pub outer_iterations: usize,
    pub converged: bool,
}

impl FitResult {
    fn exact_support(beta: &DVector<f64>) -> Vec<usize> {
        beta.iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// sign(z) * max(|z| - t, 0).
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Coordinate-descent state in Gram form. `corr` caches
/// `X'y - X'X beta`, the negative gradient of the smooth part.
pub(crate) struct CdState {
    pub beta: DVector<f64>,
    pub corr: DVector<f64>,
}

impl CdState {
    pub fn zeros(xty: &DVector<f64>) -> Self {
        CdState {
            beta: DVector::zeros(xty.len()),
            corr: xty.clone(),
        }
    }

    pub fn from_beta(gram: &DMatrix<f64>, xty: &DVector<f64>, beta: DVector<f64>) -> Self {
        let corr = xty - gram * &beta;
        CdState { beta, corr }
    }
}

/// One cyclic pass over the coordinates; returns the largest coefficient
/// change. Coordinates with an infinite threshold or a zero diagonal are
/// skipped (they stay at their current value, which the callers keep at
/// zero). `active_only` restricts the pass to currently nonzero
/// coordinates.
fn cd_pass(
    gram: &DMatrix<f64>,
    state: &mut CdState,
    thresholds: &DVector<f64>,
    active_only: bool,
) -> f64 {
    let p = state.beta.len();
    let mut max_delta = 0.0f64;
    for j in 0..p {
        let b_old = state.beta[j];
        if active_only && b_old == 0.0 {
            continue;
        }
        let t = thresholds[j];
        let g_jj = gram[(j, j)];
        if !t.is_finite() || g_jj <= 0.0 {
            continue;
        }
        let rho = state.corr[j] + g_jj * b_old;
        let b_new = soft_threshold(rho, t) / g_jj;
        let delta = b_new - b_old;
        if delta != 0.0 {
            state.corr.axpy(-delta, &gram.column(j), 1.0);
            state.beta[j] = b_new;
            max_delta = max_delta.max(delta.abs());
        }
    }
    max_delta
}

/// Runs cyclic coordinate descent until a full pass moves every
/// coefficient by less than `tol`. Between full passes the active set is
/// iterated to convergence. Returns (sweeps used, converged).
pub(crate) fn cd_run(
    gram: &DMatrix<f64>,
    state: &mut CdState,
    thresholds: &DVector<f64>,
    tol: f64,
    max_sweeps: usize,
) -> (usize, bool) {
    // Pin any warm-start coordinate that the caller has since excluded.
    for j in 0..state.beta.len() {
        if !thresholds[j].is_finite() && state.beta[j] != 0.0 {
            let b = state.beta[j];
            state.corr.axpy(b, &gram.column(j), 1.0);
            state.beta[j] = 0.0;
        }
    }
    let mut sweeps = 0usize;
    while sweeps < max_sweeps {
        let full_move = cd_pass(gram, state, thresholds, false);
        sweeps += 1;
        if full_move < tol {
            return (sweeps, true);
        }
        while sweeps < max_sweeps {
            let active_move = cd_pass(gram, state, thresholds, true);
            sweeps += 1;
            if active_move < tol {
                break;
            }
        }
    }
    (sweeps, false)
}

fn check_weights(weights: &DVector<f64>, p: usize) -> Result<()> {
    if weights.len() != p {
        return Err(Error::InvalidConfig(format!(
            "weight vector length {} does not match p = {}",
            weights.len(),
            p
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidConfig(
            "penalty weights must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

/// Least squares; minimum-norm via SVD when the design is rank
/// deficient. OLS never selects, so the support is all of 0..p.
pub fn ols_fit(x: &DMatrix<f64>, y: &DVector<f64>) -> FitResult {
    let svd = x.clone().svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let eps = max_sv * f64::EPSILON * x.nrows().max(x.ncols()) as f64;
    let beta: DVector<f64> = svd
        .solve(y, eps)
        .expect("SVD factors were requested")
        .column(0)
        .into_owned();
    let resid = y - x * &beta;
    FitResult {
        support: (0..x.ncols()).collect(),
        objective: 0.5 * resid.norm_squared(),
        outer_iterations: 1,
        converged: true,
        beta,
    }
}

/// Weighted LASSO by cyclic coordinate descent:
/// `0.5 ||y - Xb||^2 + lambda * sum_j w_j |b_j|` with unit weights when
/// `weights` is absent. At convergence the KKT conditions hold up to the
/// sweep tolerance; zeros are exact.
pub fn lasso_cd(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    weights: Option<&DVector<f64>>,
    tol: f64,
    max_iter: usize,
) -> Result<FitResult> {
    if lambda < 0.0 {
        return Err(Error::InvalidConfig(format!("lambda = {lambda} negative")));
    }
    let p = x.ncols();
    if let Some(w) = weights {
        check_weights(w, p)?;
    }
    let gram = x.transpose() * x;
    let xty = x.transpose() * y;
    let thresholds = match weights {
        Some(w) => w * lambda,
        None => DVector::from_element(p, lambda),
    };
    let mut state = CdState::zeros(&xty);
    let (sweeps, converged) = cd_run(&gram, &mut state, &thresholds, tol, max_iter);
    let resid = y - x * &state.beta;
    let penalty: f64 = (0..p).map(|j| thresholds[j] * state.beta[j].abs()).sum();
    Ok(FitResult {
        support: FitResult::exact_support(&state.beta),
        objective: 0.5 * resid.norm_squared() + penalty,
        outer_iterations: sweeps,
        converged,
        beta: state.beta,
    })
}

/// Inverts the tuning-parameter relation
/// `lambda = tau^(1-gamma) * gamma^gamma * (1-gamma)^(gamma-1)`:
/// returns `tau = (lambda * gamma^(-gamma) * (1-gamma)^(1-gamma))^(1/(1-gamma))`.
pub fn lambda_to_tau(lambda: f64, gamma: f64) -> f64 {
    (lambda * gamma.powf(-gamma) * (1.0 - gamma).powf(1.0 - gamma)).powf(1.0 / (1.0 - gamma))
}

/// Penalty parameter of the augmented objective for which the profiled
/// auxiliary variables reproduce `lambda * sum |b_j|^gamma` exactly:
/// `tau = (lambda * gamma^gamma * (1-gamma)^(1-gamma))^(1/(1-gamma))`.
/// Profiling theta_j out of
/// `theta_j^(1-1/gamma) |b_j| + tau * theta_j` leaves
/// `tau^(1-gamma) * gamma^(-gamma) * (1-gamma)^(gamma-1) * |b_j|^gamma`.
pub fn variational_tau(lambda: f64, gamma: f64) -> f64 {
    (lambda * gamma.powf(gamma) * (1.0 - gamma).powf(1.0 - gamma)).powf(1.0 / (1.0 - gamma))
}

/// Auxiliary state of the bridge reweighting algorithm.
#[derive(Debug, Clone)]
pub struct BridgeState {
    /// Per-coordinate auxiliary variable, theta_j >= 0.
    pub theta: DVector<f64>,
    /// Penalty parameter of the augmented objective.
    pub tau: f64,
    /// Coordinates pinned at zero for all remaining iterations.
    pub frozen: Vec<usize>,
}

impl BridgeState {
    fn new(p: usize, tau: f64) -> Self {
        BridgeState {
            theta: DVector::zeros(p),
            tau,
            frozen: Vec::new(),
        }
    }

    /// theta_j = ((1-gamma)/(tau*gamma))^gamma * |b_j|^gamma; zero stays
    /// zero, which makes the implied l1 weight infinite.
    fn update_theta(&mut self, beta: &DVector<f64>, gamma: f64) {
        let scale = ((1.0 - gamma) / (self.tau * gamma)).powf(gamma);
        for j in 0..beta.len() {
            self.theta[j] = scale * beta[j].abs().powf(gamma);
        }
    }

    /// Per-coordinate l1 threshold theta_j^(1 - 1/gamma); infinite for
    /// frozen coordinates.
    fn thresholds(&self, gamma: f64) -> DVector<f64> {
        let expo = 1.0 - 1.0 / gamma;
        DVector::from_iterator(
            self.theta.len(),
            self.theta.iter().map(|&th| {
                if th == 0.0 {
                    f64::INFINITY
                } else {
                    th.powf(expo)
                }
            }),
        )
    }
}

/// Per-iteration trace of the bridge solver, for monotonicity checks.
#[derive(Debug, Clone, Default)]
pub struct BridgeTrace {
    /// Augmented objective S(beta, theta) after each outer iteration.
    pub s_n: Vec<f64>,
    /// Bridge objective, first entry at the LASSO initializer.
    pub objective: Vec<f64>,
}

struct GramProblem<'a> {
    gram: &'a DMatrix<f64>,
    xty: &'a DVector<f64>,
    /// 0.5 * y'y, so objectives can be formed without the raw data.
    half_yty: f64,
}

impl GramProblem<'_> {
    fn half_rss(&self, beta: &DVector<f64>) -> f64 {
        // 0.5 (y'y - 2 b'X'y + b'Gb)
        let bg = beta.dot(&(self.gram * beta));
        self.half_yty - beta.dot(self.xty) + 0.5 * bg
    }
}

fn bridge_objective(half_rss: f64, beta: &DVector<f64>, lambda: f64, gamma: f64) -> f64 {
    half_rss + lambda * beta.iter().map(|b| b.abs().powf(gamma)).sum::<f64>()
}

/// Core bridge iteration over a Gram-form problem, starting from the
/// LASSO solution at the same lambda. Coordinates that hit zero are
/// frozen there. Returns the state so callers can reuse it along a
/// lambda path.
fn bridge_iterate(
    prob: &GramProblem<'_>,
    init: DVector<f64>,
    lambda: f64,
    gamma: f64,
    tol: f64,
    max_outer: usize,
    max_sweeps: usize,
    mut trace: Option<&mut BridgeTrace>,
) -> (CdState, BridgeState, usize, bool) {
    let p = init.len();
    let tau = variational_tau(lambda, gamma);
    let mut bridge = BridgeState::new(p, tau);
    if let Some(tr) = trace.as_deref_mut() {
        tr.objective
            .push(bridge_objective(prob.half_rss(&init), &init, lambda, gamma));
    }
    let mut state = CdState::from_beta(prob.gram, prob.xty, init);
    let mut outer = 0usize;
    let mut converged = false;
    let mut prev = state.beta.clone();
    while outer < max_outer {
        outer += 1;
        bridge.update_theta(&state.beta, gamma);
        let thresholds = bridge.thresholds(gamma);
        if thresholds.iter().all(|t| !t.is_finite()) {
            // every coordinate frozen: the zero vector is the fit
            state.beta.fill(0.0);
            state.corr.copy_from(prob.xty);
            converged = true;
            if let Some(tr) = trace.as_deref_mut() {
                tr.s_n.push(prob.half_yty);
                tr.objective.push(prob.half_yty);
            }
            break;
        }
        let (_, inner_ok) = cd_run(prob.gram, &mut state, &thresholds, tol, max_sweeps);
        if let Some(tr) = trace.as_deref_mut() {
            let half_rss = prob.half_rss(&state.beta);
            let lin: f64 = (0..p)
                .filter(|&j| state.beta[j] != 0.0)
                .map(|j| thresholds[j] * state.beta[j].abs())
                .sum();
            tr.s_n.push(half_rss + lin + tau * bridge.theta.sum());
            tr.objective
                .push(bridge_objective(half_rss, &state.beta, lambda, gamma));
        }
        let max_change = (&state.beta - &prev).amax();
        prev.copy_from(&state.beta);
        if max_change < tol {
            converged = inner_ok;
            break;
        }
    }
    bridge.frozen = (0..p).filter(|&j| state.beta[j] == 0.0).collect();
    (state, bridge, outer, converged)
}

/// BRIDGE estimator: `0.5 ||y - Xb||^2 + lambda * sum_j |b_j|^gamma`
/// with 0 < gamma < 1, computed by iterative reweighting initialized at
/// the LASSO solution for the same lambda. `lambda = 0` falls back to
/// (minimum-norm) least squares, since the reweighting update is
/// undefined there.
pub fn bridge_fit(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    gamma: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FitResult> {
    let (fit, _) = bridge_fit_traced(x, y, lambda, gamma, tol, max_iter)?;
    Ok(fit)
}

/// [`bridge_fit`] variant that also reports the per-iteration augmented
/// and bridge objectives.
pub fn bridge_fit_traced(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    gamma: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(FitResult, BridgeTrace)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidConfig(format!("gamma = {gamma} not in (0,1)")));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidConfig(format!("lambda = {lambda} negative")));
    }
    if lambda == 0.0 {
        let mut fit = ols_fit(x, y);
        fit.support = FitResult::exact_support(&fit.beta);
        return Ok((fit, BridgeTrace::default()));
    }
    let gram = x.transpose() * x;
    let xty = x.transpose() * y;
    let prob = GramProblem {
        gram: &gram,
        xty: &xty,
        half_yty: 0.5 * y.norm_squared(),
    };
    let init = lasso_cd(x, y, lambda, None, tol, MAX_SWEEPS)?;
    let mut trace = BridgeTrace::default();
    let (state, _, outer, converged) = bridge_iterate(
        &prob,
        init.beta,
        lambda,
        gamma,
        tol,
        max_iter,
        MAX_SWEEPS,
        Some(&mut trace),
    );
    let resid = y - x * &state.beta;
    let objective = bridge_objective(0.5 * resid.norm_squared(), &state.beta, lambda, gamma);
    Ok((
        FitResult {
            support: FitResult::exact_support(&state.beta),
            objective,
            outer_iterations: outer,
            converged,
            beta: state.beta,
        },
        trace,
    ))
}

/// Adaptive LASSO: weights `w_j = 1 / max(|initial_beta_j|, weight_floor)`
/// fed into the weighted LASSO. Coordinates whose initial estimate sits
/// below the floor carry weight `1/weight_floor`, which excludes them for
/// any practical lambda.
pub fn adaptive_lasso_fit(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    initial_beta: &DVector<f64>,
    weight_floor: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FitResult> {
    if initial_beta.len() != x.ncols() {
        return Err(Error::InvalidConfig(format!(
            "initial estimator length {} does not match p = {}",
            initial_beta.len(),
            x.ncols()
        )));
    }
    if !(weight_floor > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "weight_floor = {weight_floor} must be positive"
        )));
    }
    let weights = adaptive_weights(initial_beta, weight_floor);
    lasso_cd(x, y, lambda, Some(&weights), tol, max_iter)
}

/// w_j = 1 / max(|initial_beta_j|, weight_floor).
pub fn adaptive_weights(initial_beta: &DVector<f64>, weight_floor: f64) -> DVector<f64> {
    initial_beta.map(|b| 1.0 / b.abs().max(weight_floor))
}

// ---- Gram-form entry points used by cross-validation ------------------

/// Weighted-lasso fit on a precomputed Gram problem, warm-started from
/// `state`.
pub(crate) fn lasso_gram(
    gram: &DMatrix<f64>,
    xty: &DVector<f64>,
    lambda: f64,
    weights: Option<&DVector<f64>>,
    tol: f64,
    max_sweeps: usize,
    state: &mut CdState,
) -> bool {
    let p = xty.len();
    let thresholds = match weights {
        Some(w) => w * lambda,
        None => DVector::from_element(p, lambda),
    };
    let (_, converged) = cd_run(gram, state, &thresholds, tol, max_sweeps);
    converged
}

/// Bridge fit on a precomputed Gram problem, initialized at the supplied
/// LASSO solution for the same lambda.
pub(crate) fn bridge_gram(
    gram: &DMatrix<f64>,
    xty: &DVector<f64>,
    half_yty: f64,
    lasso_init: &DVector<f64>,
    lambda: f64,
    gamma: f64,
    tol: f64,
) -> (DVector<f64>, bool) {
    let prob = GramProblem {
        gram,
        xty,
        half_yty,
    };
    let (state, _, _, converged) = bridge_iterate(
        &prob,
        lasso_init.clone(),
        lambda,
        gamma,
        tol,
        MAX_OUTER,
        MAX_SWEEPS,
        None,
    );
    (state.beta, converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_problem(
        seed: u64,
        n: usize,
        p: usize,
        sparsity: usize,
    ) -> (DMatrix<f64>, DVector<f64>, DVector<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut beta = DVector::zeros(p);
        for j in 0..sparsity.min(p) {
            beta[j] = rng.gen_range(0.5..2.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        }
        let noise = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal) * 0.1);
        let y = &x * &beta + noise;
        (x, y, beta)
    }

    fn orthonormal_design(seed: u64, n: usize, p: usize) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = a.qr();
        qr.q()
    }

    #[test]
    fn soft_threshold_basics() {
        assert_eq!(soft_threshold(5.0, 0.0), 5.0);
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(0.5, f64::INFINITY), 0.0);
    }

    #[test]
    fn ols_identity_design() {
        let x = DMatrix::identity(4, 4);
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let fit = ols_fit(&x, &y);
        for i in 0..4 {
            assert_abs_diff_eq!(fit.beta[i], y[i], epsilon = 1e-12);
        }
        assert_eq!(fit.support, vec![0, 1, 2, 3]);
    }

    #[test]
    fn ols_noiseless_recovery() {
        let (x, _, beta) = random_problem(21, 40, 8, 8);
        let y = &x * &beta;
        let fit = ols_fit(&x, &y);
        assert!((fit.beta - beta).amax() < 1e-8);
    }

    #[test]
    fn ols_min_norm_when_underdetermined() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let (n, p) = (6, 12);
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let fit = ols_fit(&x, &y);
        // residual orthogonal to the column space
        let grad = x.transpose() * (&y - &x * &fit.beta);
        assert!(grad.amax() < 1e-8, "gradient {}", grad.amax());
        // minimum norm: beta lies in the row space of X, checked by
        // projecting onto the right singular vectors of an independent
        // SVD of the design
        let svd = x.clone().svd(true, true);
        let v_t = svd.v_t.unwrap();
        let projected = v_t.transpose() * (&v_t * &fit.beta);
        assert!((projected - &fit.beta).amax() < 1e-8);
    }

    #[test]
    fn lasso_zero_lambda_matches_ols() {
        let (x, y, _) = random_problem(23, 50, 10, 4);
        let ols = ols_fit(&x, &y);
        let lasso = lasso_cd(&x, &y, 0.0, None, 1e-10, MAX_SWEEPS).unwrap();
        assert!(lasso.converged);
        assert!((lasso.beta - ols.beta).amax() < 1e-6);
    }

    #[test]
    fn lasso_at_lambda_max_is_zero() {
        let (x, y, _) = random_problem(24, 30, 8, 3);
        let lambda_max = (x.transpose() * &y).amax();
        let fit = lasso_cd(&x, &y, lambda_max, None, 1e-8, MAX_SWEEPS).unwrap();
        assert!(fit.beta.iter().all(|b| *b == 0.0));
        assert!(fit.support.is_empty());
        let fit2 = lasso_cd(&x, &y, lambda_max * 1.1, None, 1e-8, MAX_SWEEPS).unwrap();
        assert!(fit2.beta.iter().all(|b| *b == 0.0));
    }

    #[test]
    fn lasso_orthonormal_closed_form() {
        let q = orthonormal_design(25, 40, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let y = DVector::from_fn(40, |_, _| rng.sample::<f64, _>(StandardNormal) * 2.0);
        let lambda = 0.3;
        let fit = lasso_cd(&q, &y, lambda, None, 1e-12, MAX_SWEEPS).unwrap();
        let qty = q.transpose() * &y;
        for j in 0..6 {
            assert_abs_diff_eq!(fit.beta[j], soft_threshold(qty[j], lambda), epsilon = 1e-10);
        }
    }

    /// Largest KKT violation of a (weighted) lasso fit.
    fn kkt_violation(
        x: &DMatrix<f64>,
        y: &DVector<f64>,
        beta: &DVector<f64>,
        lambda: f64,
        weights: Option<&DVector<f64>>,
    ) -> f64 {
        let grad = x.transpose() * (y - x * beta);
        let mut worst = 0.0f64;
        for j in 0..beta.len() {
            let w = weights.map_or(1.0, |w| w[j]);
            let t = lambda * w;
            let v = if beta[j] == 0.0 {
                (grad[j].abs() - t).max(0.0)
            } else {
                (grad[j] - t * beta[j].signum()).abs()
            };
            worst = worst.max(v);
        }
        worst
    }

    #[test]
    fn lasso_kkt_holds_on_random_instances() {
        for seed in 0..10u64 {
            let (n, p) = if seed % 2 == 0 { (40, 12) } else { (12, 30) };
            let (x, y, _) = random_problem(100 + seed, n, p, 4);
            let lambda_max = (x.transpose() * &y).amax();
            let lambda = 0.1 * lambda_max;
            let tol = 1e-8;
            let fit = lasso_cd(&x, &y, lambda, None, tol, MAX_SWEEPS).unwrap();
            assert!(fit.converged);
            let scale = (0..p).map(|j| x.column(j).norm_squared()).fold(0.0, f64::max);
            let slack = tol * scale * p as f64;
            let viol = kkt_violation(&x, &y, &fit.beta, lambda, None);
            assert!(viol <= slack, "seed {seed}: violation {viol} > {slack}");
        }
    }

    #[test]
    fn lambda_tau_relation() {
        assert_abs_diff_eq!(lambda_to_tau(1.0, 0.5), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lambda_to_tau(2.0, 0.5), 4.0, epsilon = 1e-12);
        // Round trip through the forward relation on a gamma x lambda grid.
        for &gamma in &[0.1, 0.2, 0.5, 0.8, 0.95] {
            for &lambda in &[1e-3, 0.1, 1.0, 7.5, 250.0] {
                let tau = lambda_to_tau(lambda, gamma);
                let back = tau.powf(1.0 - gamma)
                    * gamma.powf(gamma)
                    * (1.0 - gamma).powf(gamma - 1.0);
                assert!(
                    (back - lambda).abs() <= 1e-12 * lambda,
                    "gamma {gamma} lambda {lambda}: {back}"
                );
            }
        }
    }

    // Oracle: invert the forward relation by bisection instead of algebra.
    #[test]
    fn lambda_to_tau_matches_bisection() {
        let gamma: f64 = 0.2;
        let lambda = 1.0;
        let forward = |tau: f64| tau.powf(0.8) * gamma.powf(gamma) * (0.8f64).powf(gamma - 1.0);
        let (mut lo, mut hi) = (1e-12f64, 1e12f64);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if forward(mid) < lambda {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = (lo * hi).sqrt();
        assert_abs_diff_eq!(lambda_to_tau(lambda, gamma), oracle, epsilon = 1e-9);
    }

    /// 1-D bridge oracle: dense grid plus golden-section refinement of
    /// 0.5 * sum (y - x b)^2 + lambda |b|^gamma, with b = 0 always
    /// considered (the penalty is singular there).
    fn bridge_1d_oracle(x: &DVector<f64>, y: &DVector<f64>, lambda: f64, gamma: f64) -> f64 {
        let a = x.norm_squared();
        let c = x.dot(y);
        let ss = y.norm_squared();
        let f = |b: f64| 0.5 * (ss - 2.0 * c * b + a * b * b) + lambda * b.abs().powf(gamma);
        let bound = (c / a).abs() * 1.5 + 1.0;
        let m = 8000;
        let mut best_b = 0.0;
        let mut best_f = f(0.0);
        for i in 0..=m {
            let b = -bound + 2.0 * bound * (i as f64) / (m as f64);
            let fb = f(b);
            if fb < best_f {
                best_f = fb;
                best_b = b;
            }
        }
        if best_b != 0.0 {
            let h = 2.0 * bound / m as f64;
            let (mut lo, mut hi) = (best_b - h, best_b + h);
            let phi = 0.5 * (5.0f64.sqrt() - 1.0);
            let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
            let (mut f1, mut f2) = (f(x1), f(x2));
            for _ in 0..200 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = f(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = f(x2);
                }
            }
            let refined = 0.5 * (lo + hi);
            if f(refined) < best_f {
                best_b = refined;
            }
        }
        if f(0.0) <= f(best_b) {
            0.0
        } else {
            best_b
        }
    }

    #[test]
    fn bridge_matches_one_dimensional_oracle() {
        for seed in 0..6u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
            let n = 25;
            let x = DMatrix::from_fn(n, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
            let b_true: f64 = rng.gen_range(-2.0..2.0);
            let y = DVector::from_fn(n, |i, _| {
                x[(i, 0)] * b_true + rng.sample::<f64, _>(StandardNormal) * 0.3
            });
            let gamma = [0.2, 0.5, 0.8][seed as usize % 3];
            let lambda = rng.gen_range(0.1..3.0);
            let xv = x.column(0).into_owned();
            let oracle = bridge_1d_oracle(&xv, &y, lambda, gamma);
            let fit = bridge_fit(&x, &y, lambda, gamma, 1e-10, MAX_OUTER).unwrap();
            assert!(
                (fit.beta[0] - oracle).abs() < 1e-4,
                "seed {seed}: fit {} oracle {oracle}",
                fit.beta[0]
            );
        }
    }

    #[test]
    fn bridge_zero_lambda_is_least_squares() {
        let (x, y, _) = random_problem(31, 30, 6, 3);
        let fit = bridge_fit(&x, &y, 0.0, 0.5, 1e-8, MAX_OUTER).unwrap();
        let ols = ols_fit(&x, &y);
        assert_eq!(fit.beta, ols.beta);
    }

    #[test]
    fn bridge_augmented_objective_is_monotone() {
        for seed in 0..5u64 {
            let (x, y, _) = random_problem(400 + seed, 40, 10, 4);
            let lambda = 0.2 * (x.transpose() * &y).amax();
            let (_, trace) = bridge_fit_traced(&x, &y, lambda, 0.3, 1e-8, MAX_OUTER).unwrap();
            for w in trace.s_n.windows(2) {
                assert!(w[1] <= w[0] + 1e-10, "S_n increased: {} -> {}", w[0], w[1]);
            }
            // bridge objective at the fit no worse than at the initializer
            let first = trace.objective.first().unwrap();
            let last = trace.objective.last().unwrap();
            assert!(*last <= first + 1e-10);
        }
    }

    #[test]
    fn bridge_near_one_gamma_tracks_lasso_support() {
        let (x, y, _) = random_problem(32, 60, 12, 4);
        let lambda = 0.15 * (x.transpose() * &y).amax();
        let lasso = lasso_cd(&x, &y, lambda, None, 1e-10, MAX_SWEEPS).unwrap();
        let bridge = bridge_fit(&x, &y, lambda, 0.99, 1e-10, MAX_OUTER).unwrap();
        assert_eq!(bridge.support, lasso.support);
    }

    #[test]
    fn bridge_all_frozen_returns_zero() {
        let (x, y, _) = random_problem(33, 20, 5, 2);
        let lambda = (x.transpose() * &y).amax() * 2.0;
        let fit = bridge_fit(&x, &y, lambda, 0.5, 1e-8, MAX_OUTER).unwrap();
        assert!(fit.beta.iter().all(|b| *b == 0.0));
        assert!(fit.converged);
    }

    #[test]
    fn adaptive_unit_weights_reduce_to_lasso() {
        let (x, y, _) = random_problem(34, 30, 8, 3);
        let lambda = 0.2 * (x.transpose() * &y).amax();
        let ones = DVector::from_element(8, 1.0);
        let ada = adaptive_lasso_fit(&x, &y, lambda, &ones, 1e-6, 1e-8, MAX_SWEEPS).unwrap();
        let plain = lasso_cd(&x, &y, lambda, None, 1e-8, MAX_SWEEPS).unwrap();
        assert_eq!(ada.beta, plain.beta);
    }

    #[test]
    fn adaptive_floor_excludes_zero_initialized_coordinates() {
        let (x, y, _) = random_problem(35, 40, 6, 3);
        let mut init = DVector::from_element(6, 1.0);
        init[4] = 0.0;
        init[5] = 0.0;
        let lambda = 1e-4_f64.max(0.05 * (x.transpose() * &y).amax());
        let fit = adaptive_lasso_fit(&x, &y, lambda, &init, 1e-6, 1e-8, MAX_SWEEPS).unwrap();
        assert_eq!(fit.beta[4], 0.0);
        assert_eq!(fit.beta[5], 0.0);
        // KKT: the excluded coordinates satisfy |X_j'r| < lambda * 1e6
        let grad = x.transpose() * (&y - &x * &fit.beta);
        assert!(grad[4].abs() < lambda * 1e6);
        assert!(grad[5].abs() < lambda * 1e6);
    }

    #[test]
    fn adaptive_orthonormal_closed_form() {
        let q = orthonormal_design(36, 50, 5);
        let beta = DVector::from_vec(vec![2.0, -1.5, 0.0, 3.0, 0.0]);
        let y = &q * &beta;
        let init = beta.clone();
        let lambda = 0.4;
        let fit = adaptive_lasso_fit(&q, &y, lambda, &init, 1e-6, 1e-12, MAX_SWEEPS).unwrap();
        let qty = q.transpose() * &y;
        let w = adaptive_weights(&init, 1e-6);
        for j in 0..5 {
            let expect = soft_threshold(qty[j], lambda * w[j]);
            assert_abs_diff_eq!(fit.beta[j], expect, epsilon = 1e-8);
        }
    }

    #[test]
    fn scaling_response_scales_unpenalized_solution() {
        let (x, y, _) = random_problem(37, 25, 6, 3);
        let c = 3.7;
        let base = ols_fit(&x, &y);
        let scaled = ols_fit(&x, &(&y * c));
        for j in 0..6 {
            assert_abs_diff_eq!(scaled.beta[j], c * base.beta[j], epsilon = 1e-10);
        }
    }

    #[test]
    fn solvers_are_permutation_equivariant() {
        let (x, y, _) = random_problem(38, 40, 7, 3);
        let perm: Vec<usize> = vec![3, 0, 6, 1, 5, 2, 4];
        let mut xp = DMatrix::zeros(40, 7);
        for (new_j, &old_j) in perm.iter().enumerate() {
            xp.set_column(new_j, &x.column(old_j));
        }
        let lambda = 0.2 * (x.transpose() * &y).amax();
        let check = |a: &DVector<f64>, b: &DVector<f64>| {
            for (new_j, &old_j) in perm.iter().enumerate() {
                assert_abs_diff_eq!(b[new_j], a[old_j], epsilon = 1e-6);
            }
        };
        check(&ols_fit(&x, &y).beta, &ols_fit(&xp, &y).beta);
        check(
            &lasso_cd(&x, &y, lambda, None, 1e-10, MAX_SWEEPS).unwrap().beta,
            &lasso_cd(&xp, &y, lambda, None, 1e-10, MAX_SWEEPS).unwrap().beta,
        );
        check(
            &bridge_fit(&x, &y, lambda, 0.5, 1e-10, MAX_OUTER).unwrap().beta,
            &bridge_fit(&xp, &y, lambda, 0.5, 1e-10, MAX_OUTER).unwrap().beta,
        );
    }

    #[test]
    fn support_is_exact_nonzero_set() {
        let (x, y, _) = random_problem(39, 30, 10, 3);
        let lambda = 0.3 * (x.transpose() * &y).amax();
        for fit in [
            lasso_cd(&x, &y, lambda, None, 1e-8, MAX_SWEEPS).unwrap(),
            bridge_fit(&x, &y, lambda, 0.4, 1e-8, MAX_OUTER).unwrap(),
        ] {
            let expect: Vec<usize> = (0..10).filter(|&j| fit.beta[j] != 0.0).collect();
            assert_eq!(fit.support, expect);
        }
    }
}
