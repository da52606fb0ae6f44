//! Scoring of fitted models against a known ground truth.

use nalgebra::DVector;

use crate::dgp::GroundTruth;
use crate::error::{Error, Result};
use crate::two_stage::TwoStageFit;

/// Per-replication performance record.
#[derive(Debug, Clone, Copy)]
pub struct ReplicationScore {
    pub rmse: f64,
    pub n_selected: usize,
    /// Whether the true support is contained in the selected one.
    pub contains_truth: bool,
    /// Whether the selected support equals the true one exactly.
    pub equals_truth: bool,
}

/// Aggregated Monte Carlo summary.
#[derive(Debug, Clone, Copy)]
pub struct ScoreSummary {
    pub mean_rmse: f64,
    /// Lower median: element ceil(m/2) of the sorted list.
    pub median_rmse: f64,
    pub mean_selected: f64,
    pub p_contains: f64,
    pub p_equals: f64,
    pub n_scores: usize,
}

/// sqrt((1/p) * sum_j (beta_hat_j - beta0_j)^2) over all p coefficients,
/// zeros included.
pub fn coefficient_rmse(beta_hat: &DVector<f64>, beta0: &DVector<f64>) -> f64 {
    assert_eq!(beta_hat.len(), beta0.len(), "coefficient length mismatch");
    let p = beta_hat.len();
    ((beta_hat - beta0).norm_squared() / p as f64).sqrt()
}

/// Scores one fit against the truth using the fit's declared support
/// (all indices for OLS, exact nonzeros otherwise).
pub fn score_replication(fit: &TwoStageFit, truth: &GroundTruth) -> ReplicationScore {
    let selected = &fit.support_beta;
    let contains_truth = truth
        .support_beta
        .iter()
        .all(|j| selected.binary_search(j).is_ok());
    let equals_truth = contains_truth && selected.len() == truth.support_beta.len();
    ReplicationScore {
        rmse: coefficient_rmse(&fit.beta_hat, &truth.beta0),
        n_selected: selected.len(),
        contains_truth,
        equals_truth,
    }
}

/// Mean and lower-median RMSE, mean model size, and the two selection
/// frequencies.
pub fn aggregate(scores: &[ReplicationScore]) -> Result<ScoreSummary> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let m = scores.len() as f64;
    let mut rmses: Vec<f64> = scores.iter().map(|s| s.rmse).collect();
    rmses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_rmse = rmses[(rmses.len() - 1) / 2];
    Ok(ScoreSummary {
        mean_rmse: rmses.iter().sum::<f64>() / m,
        median_rmse,
        mean_selected: scores.iter().map(|s| s.n_selected as f64).sum::<f64>() / m,
        p_contains: scores.iter().filter(|s| s.contains_truth).count() as f64 / m,
        p_equals: scores.iter().filter(|s| s.equals_truth).count() as f64 / m,
        n_scores: scores.len(),
    })
}
