//! Computable checks of the assumptions behind the estimator: partial
//! orthogonality between relevant and irrelevant conditional-mean
//! columns, zero-consistency of an adaptive-LASSO initializer, and
//! eigenvalue bounds of the (selected) Gram matrix.
//!
//! Everything here is advisory measurement: the underlying conditions
//! are asymptotic and carry no finite-sample thresholds, so nothing is
//! enforced.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::two_stage::select_columns;

/// Full Gram eigensolves are skipped above this column count.
pub const FULL_GRAM_CAP: usize = 2000;
/// Default constant for the zero-consistency lower bound.
pub const DEFAULT_XI_B: f64 = 0.1;

/// Measured diagnostic quantities for one fitted dataset.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    /// max over irrelevant j, relevant k of |n^(-1/2) sum_i d_ij d_ik|.
    pub c0_hat: f64,
    /// min over relevant k of |n^(-1) sum_i (d_1i' beta_1) d_ik|.
    pub xi_min: f64,
    pub max_irrelevant_init: f64,
    pub min_relevant_init: f64,
    /// Whether min_relevant_init >= xi_b * b1.
    pub zero_consistent: bool,
    /// Extreme eigenvalues of (1/n) D'D; absent when p exceeds
    /// [`FULL_GRAM_CAP`].
    pub eig_full: Option<(f64, f64)>,
    /// Extreme eigenvalues of the selected principal submatrix.
    pub eig_sel: (f64, f64),
    /// Set when the quantities were computed from estimated conditional
    /// means and an estimated support rather than the truth.
    pub plug_in: bool,
}

impl fmt::Display for DiagnosticsReport {
    /// Flat key-value block for appending to experiment logs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "plug_in = {}", self.plug_in)?;
        writeln!(f, "c0_hat = {}", self.c0_hat)?;
        writeln!(f, "xi_min = {}", self.xi_min)?;
        writeln!(f, "max_irrelevant_init = {}", self.max_irrelevant_init)?;
        writeln!(f, "min_relevant_init = {}", self.min_relevant_init)?;
        writeln!(f, "zero_consistent = {}", self.zero_consistent)?;
        match self.eig_full {
            Some((lo, hi)) => {
                writeln!(f, "eig_min_full = {lo}")?;
                writeln!(f, "eig_max_full = {hi}")?;
            }
            None => writeln!(f, "eig_full = skipped")?,
        }
        writeln!(f, "eig_min_sel = {}", self.eig_sel.0)?;
        write!(f, "eig_max_sel = {}", self.eig_sel.1)
    }
}

/// Partial-orthogonality measurements on a conditional-mean matrix:
/// returns (c0_hat, xi_min). `c0_hat` is 0 by convention when every
/// column is relevant.
pub fn check_partial_orthogonality(
    d: &DMatrix<f64>,
    beta0: &DVector<f64>,
    support: &[usize],
) -> (f64, f64) {
    assert!(!support.is_empty(), "support must be nonempty");
    let n = d.nrows() as f64;
    let p = d.ncols();
    let in_support = |j: usize| support.binary_search(&j).is_ok();
    let mut c0_hat = 0.0f64;
    for j in 0..p {
        if in_support(j) {
            continue;
        }
        let col_j = d.column(j);
        for &k in support {
            let dot = col_j.dot(&d.column(k));
            c0_hat = c0_hat.max((dot / n.sqrt()).abs());
        }
    }
    // signal vector d_1i' beta_1 over the relevant columns only
    let mut signal = DVector::zeros(d.nrows());
    for &k in support {
        signal.axpy(beta0[k], &d.column(k), 1.0);
    }
    let mut xi_min = f64::INFINITY;
    for &k in support {
        let xi = signal.dot(&d.column(k)) / n;
        xi_min = xi_min.min(xi.abs());
    }
    (c0_hat, xi_min)
}

/// Zero-consistency fields for an initial estimator.
#[derive(Debug, Clone, Copy)]
pub struct ZeroConsistency {
    pub max_irrelevant: f64,
    pub min_relevant: f64,
    /// min_relevant >= xi_b * b1.
    pub holds: bool,
}

/// Measures how well an initial estimator separates the true support:
/// its largest irrelevant magnitude, smallest relevant magnitude, and
/// whether the latter clears `xi_b * b1`.
pub fn check_zero_consistency(
    initial_beta: &DVector<f64>,
    truth_support: &[usize],
    b1: f64,
    xi_b: f64,
) -> ZeroConsistency {
    let in_support = |j: usize| truth_support.binary_search(&j).is_ok();
    let mut max_irrelevant: f64 = 0.0;
    let mut min_relevant = f64::INFINITY;
    for j in 0..initial_beta.len() {
        let mag = initial_beta[j].abs();
        if in_support(j) {
            min_relevant = min_relevant.min(mag);
        } else {
            max_irrelevant = max_irrelevant.max(mag);
        }
    }
    if truth_support.is_empty() {
        min_relevant = 0.0;
    }
    ZeroConsistency {
        max_irrelevant,
        min_relevant,
        holds: min_relevant >= xi_b * b1,
    }
}

/// Eigenvalue extremes of the Gram matrices.
#[derive(Debug, Clone, Copy)]
pub struct GramEigenBounds {
    /// (min, max) of (1/n) D'D, or None when p > [`FULL_GRAM_CAP`].
    pub full: Option<(f64, f64)>,
    /// (min, max) of the selected principal submatrix; (0, 0) for an
    /// empty support.
    pub selected: (f64, f64),
}

fn eigen_extremes(gram: &DMatrix<f64>) -> (f64, f64) {
    if gram.ncols() == 0 {
        return (0.0, 0.0);
    }
    let eig = gram.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in eig.eigenvalues.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Extreme eigenvalues of (1/n) D'D and of its selected-support
/// principal submatrix. The full solve is skipped above the size cap;
/// the selected solve always runs.
pub fn gram_eigen_bounds(d_hat: &DMatrix<f64>, support: &[usize]) -> GramEigenBounds {
    let n = d_hat.nrows() as f64;
    let full = if d_hat.ncols() <= FULL_GRAM_CAP {
        let gram = (d_hat.transpose() * d_hat) / n;
        Some(eigen_extremes(&gram))
    } else {
        None
    };
    let d_sel = select_columns(d_hat, support);
    let gram_sel = (d_sel.transpose() * &d_sel) / n;
    GramEigenBounds {
        full,
        selected: eigen_extremes(&gram_sel),
    }
}

/// Assembles the full report from its parts.
pub fn build_report(
    d: &DMatrix<f64>,
    beta: &DVector<f64>,
    support: &[usize],
    initial_beta: Option<&DVector<f64>>,
    b1: f64,
    plug_in: bool,
) -> DiagnosticsReport {
    let (c0_hat, xi_min) = if support.is_empty() {
        (0.0, 0.0)
    } else {
        check_partial_orthogonality(d, beta, support)
    };
    let zc = initial_beta.map(|init| check_zero_consistency(init, support, b1, DEFAULT_XI_B));
    let eig = gram_eigen_bounds(d, support);
    DiagnosticsReport {
        c0_hat,
        xi_min,
        max_irrelevant_init: zc.map_or(f64::NAN, |z| z.max_irrelevant),
        min_relevant_init: zc.map_or(f64::NAN, |z| z.min_relevant),
        zero_consistent: zc.is_some_and(|z| z.holds),
        eig_full: eig.full,
        eig_sel: eig.selected,
        plug_in,
    }
}
