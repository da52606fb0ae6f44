//! Simulated two-stage data generation and dataset normalization.
//!
//! The design draws instruments from a multivariate normal whose relevant
//! block is Toeplitz, builds first-stage covariates through a sparse
//! coefficient matrix with one relevant instrument per covariate, and adds
//! jointly normal errors with a controlled cross-covariance between the
//! stages. Every sampler takes an explicit RNG so replications are
//! reproducible and schedule-independent.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Full parameterization of one simulation scenario.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Sample size.
    pub n: usize,
    /// Number of second-stage covariates.
    pub p_x: usize,
    /// Number of instruments.
    pub p_z: usize,
    /// Number of relevant second-stage covariates.
    pub k_x: usize,
    /// Toeplitz correlation of the relevant instrument block.
    pub rho: f64,
    /// Second-stage error standard deviation.
    pub sigma_u: f64,
    /// First-stage error standard deviation (shared across equations).
    pub sigma_v: f64,
    /// Larger cross-covariance between u and one first-stage error.
    pub sigma_uv_high: f64,
    /// Smaller cross-covariance between u and one first-stage error.
    pub sigma_uv_low: f64,
    /// BRIDGE exponent used in the first stage.
    pub gamma1: f64,
    /// BRIDGE exponent used in the second stage.
    pub gamma2: f64,
    /// Lower bound on nonzero second-stage coefficient magnitudes.
    pub coef_low: f64,
    /// Upper bound on nonzero second-stage coefficient magnitudes.
    pub coef_high: f64,
    /// Lower bound on nonzero first-stage coefficient magnitudes.
    pub alpha_low: f64,
    /// Upper bound on nonzero first-stage coefficient magnitudes.
    pub alpha_high: f64,
    /// Replication count for Monte Carlo runs.
    pub n_sims: usize,
    /// Base RNG seed; replication r uses `base_seed + r`.
    pub base_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 120,
            p_x: 30,
            p_z: 30,
            k_x: 6,
            rho: 0.7,
            sigma_u: 0.5f64.sqrt(),
            sigma_v: 0.5f64.sqrt(),
            sigma_uv_high: 0.4,
            sigma_uv_low: 0.15,
            gamma1: 0.1,
            gamma2: 0.5,
            coef_low: 0.5,
            coef_high: 1.0,
            alpha_low: 4.0,
            alpha_high: 5.0,
            n_sims: 200,
            base_seed: 20240,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!("n = {} below 2", self.n)));
        }
        if self.k_x == 0 || self.k_x > self.p_x {
            return Err(Error::InvalidConfig(format!(
                "k_x = {} must lie in 1..=p_x = {}",
                self.k_x, self.p_x
            )));
        }
        if self.k_x > self.p_z {
            return Err(Error::InsufficientInstruments {
                k_x: self.k_x,
                p_z: self.p_z,
            });
        }
        if !(self.rho.abs() < 1.0) {
            return Err(Error::InvalidConfig(format!("|rho| = {} not < 1", self.rho)));
        }
        for (name, g) in [("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::InvalidConfig(format!("{name} = {g} not in (0,1)")));
            }
        }
        for (name, lo, hi) in [
            ("coef", self.coef_low, self.coef_high),
            ("alpha", self.alpha_low, self.alpha_high),
        ] {
            if !(lo > 0.0 && lo <= hi) {
                return Err(Error::InvalidConfig(format!(
                    "{name} bounds [{lo}, {hi}] invalid"
                )));
            }
        }
        if !(self.sigma_u > 0.0 && self.sigma_v > 0.0) {
            return Err(Error::InvalidConfig("sigma_u, sigma_v must be > 0".into()));
        }
        Ok(())
    }
}

/// Ground-truth coefficients for a simulated scenario.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// First-stage coefficients, p_z x p_x.
    pub alpha: DMatrix<f64>,
    /// Second-stage coefficients, length p_x.
    pub beta0: DVector<f64>,
    /// Indices of the nonzero entries of `beta0`.
    pub support_beta: Vec<usize>,
    /// Per-column indices of the nonzero entries of `alpha`.
    pub support_alpha: Vec<Vec<usize>>,
}

/// One realized sample, optionally carrying its ground truth.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub z: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub truth: Option<GroundTruth>,
    pub standardized: bool,
}

/// Draws one value uniformly from `[-hi, -lo] U [lo, hi]`.
fn draw_signed_magnitude<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let mag = if lo == hi { lo } else { rng.gen_range(lo..hi) };
    if rng.gen::<bool>() {
        mag
    } else {
        -mag
    }
}

/// Draws the sparse true coefficients for both stages.
///
/// Columns 1..=min(p_x, p_z) of alpha get their single nonzero on the
/// diagonal, so instrument j instruments covariate j; covariates beyond
/// p_z are left uninstrumented (zero column). Nonzero alpha entries carry
/// a small N(0, 0.01^2) perturbation; beta entries do not, so the exact
/// sparse truth is preserved for selection scoring.
pub fn build_ground_truth<R: Rng>(cfg: &SimConfig, rng: &mut R) -> Result<GroundTruth> {
    cfg.validate()?;
    let mut alpha = DMatrix::zeros(cfg.p_z, cfg.p_x);
    let mut support_alpha = vec![Vec::new(); cfg.p_x];
    let instrumented = cfg.p_x.min(cfg.p_z);
    for j in 0..instrumented {
        let base = draw_signed_magnitude(rng, cfg.alpha_low, cfg.alpha_high);
        let noise: f64 = rng.sample::<f64, _>(StandardNormal) * 0.01;
        alpha[(j, j)] = base + noise;
        support_alpha[j].push(j);
    }
    let mut beta0 = DVector::zeros(cfg.p_x);
    let mut support_beta = Vec::with_capacity(cfg.k_x);
    for j in 0..cfg.k_x {
        beta0[j] = draw_signed_magnitude(rng, cfg.coef_low, cfg.coef_high);
        support_beta.push(j);
    }
    Ok(GroundTruth {
        alpha,
        beta0,
        support_beta,
        support_alpha,
    })
}

/// Instrument covariance: Toeplitz rho^|j-k| on the leading k_x block,
/// identity elsewhere. Positive definite for |rho| < 1.
pub fn build_instrument_covariance(cfg: &SimConfig) -> DMatrix<f64> {
    let mut sigma = DMatrix::identity(cfg.p_z, cfg.p_z);
    for j in 0..cfg.k_x.min(cfg.p_z) {
        for k in 0..cfg.k_x.min(cfg.p_z) {
            sigma[(j, k)] = cfg.rho.powi((j as i32 - k as i32).abs());
        }
    }
    sigma
}

/// Joint error covariance of (u, v_1..v_{p_x}).
///
/// Block form [[sigma_u^2, c'], [c, sigma_v^2 I]] where c places
/// `sigma_uv_high` on the first relevant covariate and `sigma_uv_low` on
/// the second; all other entries are zero. Positive definiteness is
/// verified by Cholesky and requires
/// sigma_uv_high^2 + sigma_uv_low^2 < sigma_u^2 * sigma_v^2.
pub fn build_error_covariance(cfg: &SimConfig, truth: &GroundTruth) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    let p = cfg.p_x;
    let mut sigma = DMatrix::zeros(1 + p, 1 + p);
    sigma[(0, 0)] = cfg.sigma_u * cfg.sigma_u;
    for j in 0..p {
        sigma[(1 + j, 1 + j)] = cfg.sigma_v * cfg.sigma_v;
    }
    let mut cross = vec![0.0; p];
    if let Some(&first) = truth.support_beta.first() {
        cross[first] = cfg.sigma_uv_high;
    }
    if let Some(&second) = truth.support_beta.get(1) {
        cross[second] = cfg.sigma_uv_low;
    }
    for j in 0..p {
        sigma[(0, 1 + j)] = cross[j];
        sigma[(1 + j, 0)] = cross[j];
    }
    if nalgebra::Cholesky::new(sigma.clone()).is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(sigma)
}

/// Draws the raw (unstandardized) instrument matrix, rows i.i.d.
/// N(0, Sigma_z).
pub fn sample_instruments<R: Rng>(cfg: &SimConfig, rng: &mut R) -> DMatrix<f64> {
    let sigma_z = build_instrument_covariance(cfg);
    let chol = nalgebra::Cholesky::new(sigma_z).expect("Toeplitz block is PD for |rho| < 1");
    let l = chol.l();
    let mut z = DMatrix::zeros(cfg.n, cfg.p_z);
    let mut g = DVector::zeros(cfg.p_z);
    for i in 0..cfg.n {
        for h in 0..cfg.p_z {
            g[h] = rng.sample::<f64, _>(StandardNormal);
        }
        let row = &l * &g;
        for h in 0..cfg.p_z {
            z[(i, h)] = row[h];
        }
    }
    z
}

/// Draws the error matrix: returns (u, V) with rows of (u_i, v_i) jointly
/// N(0, Sigma_uv).
pub fn sample_errors<R: Rng>(
    cfg: &SimConfig,
    truth: &GroundTruth,
    rng: &mut R,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let sigma_uv = build_error_covariance(cfg, truth)?;
    let chol = nalgebra::Cholesky::new(sigma_uv).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let dim = 1 + cfg.p_x;
    let mut u = DVector::zeros(cfg.n);
    let mut v = DMatrix::zeros(cfg.n, cfg.p_x);
    let mut g = DVector::zeros(dim);
    for i in 0..cfg.n {
        for h in 0..dim {
            g[h] = rng.sample::<f64, _>(StandardNormal);
        }
        let row = &l * &g;
        u[i] = row[0];
        for j in 0..cfg.p_x {
            v[(i, j)] = row[1 + j];
        }
    }
    Ok((u, v))
}

/// Draws one full dataset: Z ~ N(0, Sigma_z), X = Z alpha + V,
/// Y = X beta0 + u, then standardizes and attaches the truth.
pub fn sample_dataset<R: Rng>(
    cfg: &SimConfig,
    truth: &GroundTruth,
    rng: &mut R,
) -> Result<Dataset> {
    let z = sample_instruments(cfg, rng);
    let (u, v) = sample_errors(cfg, truth, rng)?;
    let x = &z * &truth.alpha + v;
    let y = &x * &truth.beta0 + u;
    standardize(Dataset {
        z,
        x,
        y,
        truth: Some(truth.clone()),
        standardized: false,
    })
}

/// Centers Y and centers/scales each instrument column so that
/// (1/n) sum Z_ih^2 = 1. X is left untouched: the pipeline regresses on
/// conditional means built from the standardized instruments.
///
/// Columns already standardized to within 1e-12 are left bit-identical,
/// which makes the operation exactly idempotent and keeps CSV round
/// trips lossless.
pub fn standardize(mut data: Dataset) -> Result<Dataset> {
    let n = data.y.len();
    if n < 2 {
        return Err(Error::InvalidConfig(format!("n = {n} below 2")));
    }
    let nf = n as f64;
    let y_mean = data.y.mean();
    let y_rms = (data.y.norm_squared() / nf).sqrt();
    if y_mean.abs() > 1e-12 * (1.0 + y_rms) {
        for i in 0..n {
            data.y[i] -= y_mean;
        }
    }
    for h in 0..data.z.ncols() {
        let mut col = data.z.column_mut(h);
        let mean = col.iter().sum::<f64>() / nf;
        let msq = col.iter().map(|v| v * v).sum::<f64>() / nf;
        if msq - mean * mean <= 0.0 {
            return Err(Error::DegenerateInstrument(h));
        }
        if mean.abs() <= 1e-12 * (1.0 + msq.sqrt()) && (msq - 1.0).abs() <= 1e-12 {
            continue;
        }
        col.iter_mut().for_each(|v| *v -= mean);
        let scale = (col.iter().map(|v| v * v).sum::<f64>() / nf).sqrt();
        if scale == 0.0 {
            return Err(Error::DegenerateInstrument(h));
        }
        col.iter_mut().for_each(|v| *v /= scale);
    }
    data.standardized = true;
    Ok(data)
}

impl Dataset {
    /// Reads a dataset from CSV with header `y,x1..x{p_x},z1..z{p_z}`.
    /// Ingested data carries no ground truth and is standardized on load.
    pub fn from_csv(path: &Path) -> Result<Dataset> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    pub fn from_csv_str(text: &str, origin: &str) -> Result<Dataset> {
        let schema_err = |detail: String| Error::Schema {
            path: origin.to_string(),
            detail,
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| schema_err("empty file".into()))?;
        let names: Vec<&str> = header.split(',').map(str::trim).collect();
        if names.first() != Some(&"y") {
            return Err(schema_err(format!(
                "first column must be 'y', found '{}'",
                names.first().copied().unwrap_or("")
            )));
        }
        let mut p_x = 0usize;
        let mut idx = 1usize;
        while idx < names.len() && names[idx] == format!("x{}", p_x + 1) {
            p_x += 1;
            idx += 1;
        }
        let mut p_z = 0usize;
        while idx < names.len() && names[idx] == format!("z{}", p_z + 1) {
            p_z += 1;
            idx += 1;
        }
        if idx != names.len() || p_x == 0 || p_z == 0 {
            let offender = names.get(idx).copied().unwrap_or("<missing>");
            return Err(schema_err(format!(
                "header must read y,x1..x{{p_x}},z1..z{{p_z}}; unexpected column '{offender}'"
            )));
        }
        let mut y = Vec::new();
        let mut x_rows = Vec::new();
        let mut z_rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != names.len() {
                return Err(schema_err(format!(
                    "row {} has {} cells, expected {}",
                    lineno + 2,
                    cells.len(),
                    names.len()
                )));
            }
            let parse = |cell: &str, col: &str| -> Result<f64> {
                cell.parse::<f64>().map_err(|_| Error::Schema {
                    path: origin.to_string(),
                    detail: format!("non-numeric cell '{}' in column {} row {}", cell, col, lineno + 2),
                })
            };
            y.push(parse(cells[0], "y")?);
            for j in 0..p_x {
                x_rows.push(parse(cells[1 + j], names[1 + j])?);
            }
            for h in 0..p_z {
                z_rows.push(parse(cells[1 + p_x + h], names[1 + p_x + h])?);
            }
        }
        let n = y.len();
        if n < 2 {
            return Err(schema_err(format!("needs at least 2 observations, found {n}")));
        }
        let x = DMatrix::from_row_slice(n, p_x, &x_rows);
        let z = DMatrix::from_row_slice(n, p_z, &z_rows);
        standardize(Dataset {
            z,
            x,
            y: DVector::from_vec(y),
            truth: None,
            standardized: false,
        })
    }

    /// Writes the dataset in the ingestion schema with lossless float
    /// formatting.
    pub fn to_csv_string(&self) -> String {
        let (n, p_x, p_z) = (self.y.len(), self.x.ncols(), self.z.ncols());
        let mut out = String::new();
        out.push('y');
        for j in 0..p_x {
            let _ = write!(out, ",x{}", j + 1);
        }
        for h in 0..p_z {
            let _ = write!(out, ",z{}", h + 1);
        }
        out.push('\n');
        for i in 0..n {
            let _ = write!(out, "{}", self.y[i]);
            for j in 0..p_x {
                let _ = write!(out, ",{}", self.x[(i, j)]);
            }
            for h in 0..p_z {
                let _ = write!(out, ",{}", self.z[(i, h)]);
            }
            out.push('\n');
        }
        out
    }
}
