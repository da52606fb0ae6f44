//! The composed estimation pipeline: per-equation penalized first-stage
//! fits, predicted conditional means, a penalized second stage, and
//! standard errors for the selected coefficients.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::dgp::Dataset;
use crate::error::{Error, Result};
use crate::solvers::{self, FitResult};
use crate::tuning::{self, CvSpec, SolverKind};

/// Condition-number threshold above which the selected Gram matrix is
/// declared singular.
pub const GRAM_CONDITION_CAP: f64 = 1e12;
/// Floor applied to initial estimates when forming adaptive-LASSO
/// weights.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// First-stage estimator choice, applied independently per equation.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage1Method {
    /// Unpenalized (minimum-norm) least squares.
    MinNorm,
    Lasso,
    Bridge { gamma: f64 },
}

/// Second-stage estimator choice.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage2Method {
    Ols,
    Lasso,
    Bridge { gamma: f64 },
    /// Adaptive LASSO initialized at the CV-tuned LASSO fit.
    AdaptiveLasso,
}

/// A full method descriptor: how to fit each stage.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub stage1: Stage1Method,
    pub stage2: Stage2Method,
}

/// Cross-validation settings per stage. The stages are tuned separately,
/// one CV per first-stage equation and one for the second stage, and may
/// use different grids.
#[derive(Debug, Clone, Default)]
pub struct CvPlan {
    pub stage1: CvSpec,
    pub stage2: CvSpec,
}

impl CvPlan {
    pub fn shared(spec: CvSpec) -> Self {
        CvPlan {
            stage1: spec.clone(),
            stage2: spec,
        }
    }
}

/// First-stage output: coefficient matrix plus per-equation tuning.
#[derive(Debug, Clone)]
pub struct FirstStageFit {
    /// p_z x p_x coefficient matrix, one column per equation.
    pub alpha_hat: DMatrix<f64>,
    /// Cross-validated lambda per equation (0 for the min-norm stage).
    pub lambdas: Vec<f64>,
    /// Equations whose final fit did not converge.
    pub nonconverged: Vec<usize>,
}

/// Output of the full pipeline.
#[derive(Debug, Clone)]
pub struct TwoStageFit {
    pub alpha_hat: DMatrix<f64>,
    pub d_hat: DMatrix<f64>,
    pub beta_hat: DVector<f64>,
    /// Exact nonzeros of `beta_hat`; all indices for OLS.
    pub support_beta: Vec<usize>,
    /// Residual-based error scale; absent when degrees of freedom run
    /// out.
    pub sigma_eps_hat: Option<f64>,
    /// One standard error per entry of `support_beta`; absent when the
    /// selected Gram matrix is singular or sigma could not be estimated.
    pub std_errors: Option<Vec<f64>>,
    pub lambda_stage1: Vec<f64>,
    pub lambda_stage2: f64,
    /// Why inference output is missing, when it is.
    pub inference_failure: Option<String>,
}

/// Fits every first-stage equation independently: regresses each column
/// of X on Z with the chosen penalty, lambda tuned by cross-validation,
/// followed by a least-squares refit on the selected instruments.
pub fn fit_first_stage(
    z: &DMatrix<f64>,
    x: &DMatrix<f64>,
    method: &Stage1Method,
    cv: &CvSpec,
) -> Result<FirstStageFit> {
    let (p_z, p_x) = (z.ncols(), x.ncols());
    let mut alpha_hat = DMatrix::zeros(p_z, p_x);
    let mut lambdas = vec![0.0; p_x];
    let mut nonconverged = Vec::new();
    let tol = solvers::DEFAULT_TOL;
    for j in 0..p_x {
        let target = x.column(j).into_owned();
        let fit = match method {
            Stage1Method::MinNorm => solvers::ols_fit(z, &target),
            Stage1Method::Lasso => {
                let (lambda, _) = tuning::cv_select(z, &target, &SolverKind::Lasso, cv)?;
                lambdas[j] = lambda;
                let sel = solvers::lasso_cd(z, &target, lambda, None, tol, solvers::MAX_SWEEPS)?;
                refit_on_support(z, &target, sel)
            }
            Stage1Method::Bridge { gamma } => {
                let (lambda, _) =
                    tuning::cv_select(z, &target, &SolverKind::Bridge { gamma: *gamma }, cv)?;
                lambdas[j] = lambda;
                let sel = solvers::bridge_fit(z, &target, lambda, *gamma, tol, solvers::MAX_OUTER)?;
                refit_on_support(z, &target, sel)
            }
        };
        if !fit.converged {
            nonconverged.push(j);
        }
        alpha_hat.set_column(j, &fit.beta);
    }
    Ok(FirstStageFit {
        alpha_hat,
        lambdas,
        nonconverged,
    })
}

/// d_hat = Z * alpha_hat.
pub fn predict_conditional_means(z: &DMatrix<f64>, alpha_hat: &DMatrix<f64>) -> DMatrix<f64> {
    z * alpha_hat
}

/// Fits the second stage on the predicted conditional means: the
/// penalized solver selects the support at the cross-validated lambda
/// and the coefficients are refitted by least squares on that support.
/// Returns the fit and the lambda (0 for OLS).
pub fn fit_second_stage(
    d_hat: &DMatrix<f64>,
    y: &DVector<f64>,
    method: &Stage2Method,
    cv: &CvSpec,
) -> Result<(FitResult, f64)> {
    let tol = solvers::DEFAULT_TOL;
    match method {
        Stage2Method::Ols => Ok((solvers::ols_fit(d_hat, y), 0.0)),
        Stage2Method::Lasso => {
            let (lambda, _) = tuning::cv_select(d_hat, y, &SolverKind::Lasso, cv)?;
            let fit = solvers::lasso_cd(d_hat, y, lambda, None, tol, solvers::MAX_SWEEPS)?;
            Ok((refit_on_support(d_hat, y, fit), lambda))
        }
        Stage2Method::Bridge { gamma } => {
            let (lambda, _) =
                tuning::cv_select(d_hat, y, &SolverKind::Bridge { gamma: *gamma }, cv)?;
            let fit = solvers::bridge_fit(d_hat, y, lambda, *gamma, tol, solvers::MAX_OUTER)?;
            Ok((refit_on_support(d_hat, y, fit), lambda))
        }
        Stage2Method::AdaptiveLasso => {
            // initializer: the CV-tuned LASSO fit on the same design
            let (l0, _) = tuning::cv_select(d_hat, y, &SolverKind::Lasso, cv)?;
            let init = solvers::lasso_cd(d_hat, y, l0, None, tol, solvers::MAX_SWEEPS)?;
            let weights = solvers::adaptive_weights(&init.beta, WEIGHT_FLOOR);
            let kind = SolverKind::WeightedLasso { weights };
            let (lambda, _) = tuning::cv_select(d_hat, y, &kind, cv)?;
            let fit = solvers::adaptive_lasso_fit(
                d_hat,
                y,
                lambda,
                &init.beta,
                WEIGHT_FLOOR,
                tol,
                solvers::MAX_SWEEPS,
            )?;
            Ok((refit_on_support(d_hat, y, fit), lambda))
        }
    }
}

/// sigma_eps_hat from second-stage residuals with an n - |support|
/// degrees-of-freedom correction.
pub fn estimate_sigma_eps(
    y: &DVector<f64>,
    d_hat: &DMatrix<f64>,
    beta_hat: &DVector<f64>,
    support_size: usize,
) -> Result<f64> {
    let n = y.len();
    if support_size >= n {
        return Err(Error::DegenerateDof {
            selected: support_size,
            n,
        });
    }
    let resid = y - d_hat * beta_hat;
    Ok((resid.norm_squared() / (n - support_size) as f64).sqrt())
}

/// Standard errors of the selected coefficients:
/// `SE_j = sigma_eps * sqrt([inv((1/n) D1'D1)]_jj / n)` where D1 is
/// `d_hat` restricted to the selected support.
pub fn standard_errors(d_selected: &DMatrix<f64>, sigma_eps: f64, n: usize) -> Result<Vec<f64>> {
    let k = d_selected.ncols();
    if k == 0 {
        return Ok(Vec::new());
    }
    let gram = (d_selected.transpose() * d_selected) / n as f64;
    let eig = gram.symmetric_eigen();
    let max_eig = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_eig > 0.0) || max_eig / min_eig > GRAM_CONDITION_CAP {
        let cond = if min_eig > 0.0 {
            max_eig / min_eig
        } else {
            f64::INFINITY
        };
        return Err(Error::SingularGram(cond));
    }
    // [inv(Gram)]_jj = sum_m V_jm^2 / eig_m
    let v = &eig.eigenvectors;
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let inv_jj: f64 = (0..k)
            .map(|m| v[(j, m)] * v[(j, m)] / eig.eigenvalues[m])
            .sum();
        out.push(sigma_eps * (inv_jj / n as f64).sqrt());
    }
    Ok(out)
}

pub(crate) fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), cols.len());
    for (c, &j) in cols.iter().enumerate() {
        out.set_column(c, &m.column(j));
    }
    out
}

/// Post-selection refit: replaces the penalized coefficients by the
/// least-squares fit on their support. The penalty does the selection,
/// the refit does the estimation, which is the estimator the oracle
/// theory describes and what the standard-error construction assumes.
/// The support is kept from the selection fit; the refit is skipped when
/// it would be underdetermined.
pub fn refit_on_support(x: &DMatrix<f64>, y: &DVector<f64>, fit: FitResult) -> FitResult {
    let k = fit.support.len();
    if k == 0 || k >= y.len() {
        return fit;
    }
    let x_sel = select_columns(x, &fit.support);
    let gram = x_sel.transpose() * &x_sel;
    let rhs = x_sel.transpose() * y;
    let solved = nalgebra::Cholesky::new(gram.clone())
        .map(|ch| ch.solve(&rhs))
        .or_else(|| gram.lu().solve(&rhs));
    let Some(coefs) = solved else {
        return fit;
    };
    let mut beta = DVector::zeros(fit.beta.len());
    for (pos, &j) in fit.support.iter().enumerate() {
        beta[j] = coefs[pos];
    }
    let resid = y - x * &beta;
    FitResult {
        objective: 0.5 * resid.norm_squared(),
        beta,
        ..fit
    }
}

/// Runs the full pipeline on a standardized dataset. Standard-error
/// construction that fails (degenerate degrees of freedom or a singular
/// selected Gram matrix) is reported in `inference_failure` rather than
/// aborting: the point estimates and selection are still valid output.
pub fn run_two_stage(data: &Dataset, method: &MethodSpec, cv: &CvPlan) -> Result<TwoStageFit> {
    if !data.standardized {
        return Err(Error::InvalidConfig(
            "dataset must be standardized before fitting".into(),
        ));
    }
    let first = fit_first_stage(&data.z, &data.x, &method.stage1, &cv.stage1)
        .map_err(|e| e.in_stage("first"))?;
    let d_hat = predict_conditional_means(&data.z, &first.alpha_hat);
    let (fit, lambda2) = fit_second_stage(&d_hat, &data.y, &method.stage2, &cv.stage2)
        .map_err(|e| e.in_stage("second"))?;
    let support = fit.support.clone();
    let mut sigma_eps_hat = None;
    let mut std_errors = None;
    let mut inference_failure = None;
    match estimate_sigma_eps(&data.y, &d_hat, &fit.beta, support.len()) {
        Ok(sigma) => {
            sigma_eps_hat = Some(sigma);
            let d_sel = select_columns(&d_hat, &support);
            match standard_errors(&d_sel, sigma, data.y.len()) {
                Ok(se) => std_errors = Some(se),
                Err(e) => inference_failure = Some(e.to_string()),
            }
        }
        Err(e) => inference_failure = Some(e.to_string()),
    }
    Ok(TwoStageFit {
        alpha_hat: first.alpha_hat,
        d_hat,
        beta_hat: fit.beta,
        support_beta: support,
        sigma_eps_hat,
        std_errors,
        lambda_stage1: first.lambdas,
        lambda_stage2: lambda2,
        inference_failure,
    })
}

/// Renders the fit report: `index,estimate,std_error,z_stat,selected`
/// with one row per coefficient (1-based index). Standard-error cells
/// are blank for unselected coefficients or when inference failed.
pub fn fit_report_csv(fit: &TwoStageFit) -> String {
    let mut out = String::from("index,estimate,std_error,z_stat,selected\n");
    let p = fit.beta_hat.len();
    for j in 0..p {
        let sel_pos = fit.support_beta.binary_search(&j).ok();
        let (se_cell, z_cell) = match (&fit.std_errors, sel_pos) {
            (Some(se), Some(pos)) => {
                let se_j = se[pos];
                let z = fit.beta_hat[j] / se_j;
                (format!("{se_j}"), format!("{z}"))
            }
            _ => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            j + 1,
            fit.beta_hat[j],
            se_cell,
            z_cell,
            u8::from(sel_pos.is_some())
        );
    }
    out
}
