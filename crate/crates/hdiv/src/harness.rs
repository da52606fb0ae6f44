//! Experiment runner behind the `hdiv` CLI: scenario configuration,
//! Monte Carlo execution across methods, result-table emission, and the
//! single-dataset fit command.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dgp::{self, Dataset, SimConfig};
use crate::diagnostics;
use crate::error::{Error, Result};
use crate::metrics::{self, ReplicationScore, ScoreSummary};
use crate::tuning::CvSpec;
use crate::two_stage::{self, CvPlan, MethodSpec, Stage1Method, Stage2Method};

/// Header of every emitted result-table CSV.
pub const TABLE_HEADER: &str =
    "scenario,method,gamma,mean_rmse,median_rmse,mean_selected,p_contains,p_equals,n_completed";

/// One scenario: a simulation setup plus the methods to run on it.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario_id: String,
    pub sim: SimConfig,
    /// (label, method) pairs, run on every replication.
    pub methods: Vec<(String, MethodSpec)>,
    pub cv: CvPlan,
    pub output_path: PathBuf,
    pub parallelism: usize,
}

/// One aggregated row of the output table.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub scenario: String,
    pub method: String,
    pub gamma: Option<f64>,
    pub summary: ScoreSummary,
    pub n_sims_completed: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

/// Parses a method descriptor: `ols`, `lasso`, `adalasso`, or
/// `bridge:<gamma>`, optionally suffixed with `@<stage1>` to override
/// the first-stage penalty (the same grammar without `adalasso`).
/// Defaults: OLS uses a min-norm first stage, LASSO and ADALASSO a LASSO
/// first stage, BRIDGE a BRIDGE first stage with the configured gamma1.
pub fn parse_method(token: &str, gamma1: f64) -> Result<(String, MethodSpec)> {
    let bad = |t: &str| Error::InvalidConfig(format!("unknown method '{t}'"));
    let (main, stage1_override) = match token.split_once('@') {
        Some((m, s)) => (m.trim(), Some(s.trim())),
        None => (token.trim(), None),
    };
    let parse_stage1 = |t: &str| -> Result<Stage1Method> {
        if t == "ols" {
            Ok(Stage1Method::MinNorm)
        } else if t == "lasso" {
            Ok(Stage1Method::Lasso)
        } else if let Some(g) = t.strip_prefix("bridge:") {
            let gamma: f64 = g
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad gamma in '{t}'")))?;
            Ok(Stage1Method::Bridge { gamma })
        } else {
            Err(bad(t))
        }
    };
    let (stage2, default_stage1) = if main == "ols" {
        (Stage2Method::Ols, Stage1Method::MinNorm)
    } else if main == "lasso" {
        (Stage2Method::Lasso, Stage1Method::Lasso)
    } else if main == "adalasso" {
        (Stage2Method::AdaptiveLasso, Stage1Method::Lasso)
    } else if let Some(g) = main.strip_prefix("bridge:") {
        let gamma: f64 = g
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad gamma in '{main}'")))?;
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "bridge gamma {gamma} not in (0,1)"
            )));
        }
        (
            Stage2Method::Bridge { gamma },
            Stage1Method::Bridge { gamma: gamma1 },
        )
    } else {
        return Err(bad(main));
    };
    let stage1 = match stage1_override {
        Some(t) => parse_stage1(t)?,
        None => default_stage1,
    };
    Ok((
        token.trim().to_string(),
        MethodSpec { stage1, stage2 },
    ))
}

fn method_gamma(m: &MethodSpec) -> Option<f64> {
    match m.stage2 {
        Stage2Method::Bridge { gamma } => Some(gamma),
        _ => None,
    }
}

/// Parses the flat `key = value` scenario config format. Lines starting
/// with `#` and blank lines are ignored. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut sim = SimConfig::default();
    let mut scenario_id = String::from("custom");
    let mut methods_spec = String::from("ols,lasso,bridge:0.5");
    let mut cv1 = CvSpec::default();
    let mut cv2 = CvSpec::default();
    let mut output_path = PathBuf::from("results.csv");
    let mut parallelism = 1usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_usize = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad integer '{v}' for {key}")))
        };
        let parse_f64 = |v: &str| -> Result<f64> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad number '{v}' for {key}")))
        };
        let parse_u64 = |v: &str| -> Result<u64> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad seed '{v}' for {key}")))
        };
        match key {
            "scenario" => scenario_id = value.to_string(),
            "n" => sim.n = parse_usize(value)?,
            "p_x" => sim.p_x = parse_usize(value)?,
            "p_z" => sim.p_z = parse_usize(value)?,
            "k_x" => sim.k_x = parse_usize(value)?,
            "rho" => sim.rho = parse_f64(value)?,
            "sigma_u" => sim.sigma_u = parse_f64(value)?,
            "sigma_v" => sim.sigma_v = parse_f64(value)?,
            "sigma_uv_high" => sim.sigma_uv_high = parse_f64(value)?,
            "sigma_uv_low" => sim.sigma_uv_low = parse_f64(value)?,
            "gamma1" => sim.gamma1 = parse_f64(value)?,
            "gamma2" => sim.gamma2 = parse_f64(value)?,
            "coef_low" => sim.coef_low = parse_f64(value)?,
            "coef_high" => sim.coef_high = parse_f64(value)?,
            "alpha_low" => sim.alpha_low = parse_f64(value)?,
            "alpha_high" => sim.alpha_high = parse_f64(value)?,
            "n_sims" => sim.n_sims = parse_usize(value)?,
            "base_seed" => sim.base_seed = parse_u64(value)?,
            "methods" => methods_spec = value.to_string(),
            "cv_folds" => {
                cv1.n_folds = parse_usize(value)?;
                cv2.n_folds = cv1.n_folds;
            }
            "cv_grid_size" => {
                cv1.grid_size = parse_usize(value)?;
                cv2.grid_size = cv1.grid_size;
            }
            "cv_grid_min_ratio" => {
                cv1.grid_min_ratio = parse_f64(value)?;
                cv2.grid_min_ratio = cv1.grid_min_ratio;
            }
            "cv_seed" => {
                cv1.seed = parse_u64(value)?;
                cv2.seed = cv1.seed;
            }
            "cv_repeats" => {
                cv1.repeats = parse_usize(value)?;
                cv2.repeats = cv1.repeats;
            }
            "cv2_grid_min_ratio" => cv2.grid_min_ratio = parse_f64(value)?,
            "cv2_repeats" => cv2.repeats = parse_usize(value)?,
            "output_path" => output_path = PathBuf::from(value),
            "parallelism" => parallelism = parse_usize(value)?.max(1),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    sim.validate()?;
    cv1.validate()?;
    cv2.validate()?;
    let mut methods = Vec::new();
    for token in methods_spec.split(',') {
        if token.trim().is_empty() {
            continue;
        }
        methods.push(parse_method(token, sim.gamma1)?);
    }
    if methods.is_empty() {
        return Err(Error::InvalidConfig("methods list is empty".into()));
    }
    if sim.n_sims == 0 {
        return Err(Error::InvalidConfig("n_sims must be >= 1".into()));
    }
    Ok(ScenarioConfig {
        scenario_id,
        sim,
        methods,
        cv: CvPlan {
            stage1: cv1,
            stage2: cv2,
        },
        output_path,
        parallelism,
    })
}

/// Effective worker count: the `HDIV_THREADS` environment variable
/// overrides the configured parallelism.
pub fn effective_parallelism(configured: usize) -> usize {
    std::env::var("HDIV_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(configured)
        .max(1)
}

/// Runs one replication: draws truth and data from `base_seed + rep`,
/// fits every method (reusing the first stage across methods that share
/// a first-stage spec), and scores against the truth.
fn run_replication(
    cfg: &ScenarioConfig,
    rep: usize,
) -> Result<Vec<ReplicationScore>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.sim.base_seed + rep as u64);
    let truth = dgp::build_ground_truth(&cfg.sim, &mut rng)?;
    let data = dgp::sample_dataset(&cfg.sim, &truth, &mut rng)?;
    let mut scores = Vec::with_capacity(cfg.methods.len());
    let mut stage1_cache: Vec<(Stage1Method, nalgebra::DMatrix<f64>, Vec<f64>)> = Vec::new();
    for (_, method) in &cfg.methods {
        let cached = stage1_cache.iter().find(|(m, _, _)| *m == method.stage1);
        let (alpha_hat, lambdas) = match cached {
            Some((_, alpha, lambdas)) => (alpha.clone(), lambdas.clone()),
            None => {
                let first =
                    two_stage::fit_first_stage(&data.z, &data.x, &method.stage1, &cfg.cv.stage1)
                        .map_err(|e| e.in_stage("first"))?;
                stage1_cache.push((
                    method.stage1.clone(),
                    first.alpha_hat.clone(),
                    first.lambdas.clone(),
                ));
                (first.alpha_hat, first.lambdas)
            }
        };
        let d_hat = two_stage::predict_conditional_means(&data.z, &alpha_hat);
        let (fit, lambda2) =
            two_stage::fit_second_stage(&d_hat, &data.y, &method.stage2, &cfg.cv.stage2)
                .map_err(|e| e.in_stage("second"))?;
        let two = two_stage::TwoStageFit {
            alpha_hat,
            d_hat,
            support_beta: fit.support.clone(),
            beta_hat: fit.beta,
            sigma_eps_hat: None,
            std_errors: None,
            lambda_stage1: lambdas,
            lambda_stage2: lambda2,
            inference_failure: None,
        };
        scores.push(metrics::score_replication(&two, &truth));
    }
    Ok(scores)
}

/// Runs all replications of a scenario and returns the per-method score
/// lists. Replication failures are logged and excluded; only
/// configuration errors abort.
pub fn run_scenario_scores(cfg: &ScenarioConfig) -> Result<Vec<(String, Vec<ReplicationScore>)>> {
    cfg.sim.validate()?;
    if cfg.methods.is_empty() {
        return Err(Error::InvalidConfig("methods list is empty".into()));
    }
    let workers = effective_parallelism(cfg.parallelism);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let results: Vec<Result<Vec<ReplicationScore>>> = pool.install(|| {
        (1..=cfg.sim.n_sims)
            .into_par_iter()
            .map(|rep| run_replication(cfg, rep))
            .collect()
    });
    let mut per_method = Vec::with_capacity(cfg.methods.len());
    for (mi, (label, _)) in cfg.methods.iter().enumerate() {
        let mut scores = Vec::new();
        for (rep, outcome) in results.iter().enumerate() {
            match outcome {
                Ok(row) => scores.push(row[mi]),
                Err(e) => {
                    if mi == 0 {
                        eprintln!(
                            "warning: scenario {} replication {} failed: {e}",
                            cfg.scenario_id,
                            rep + 1
                        );
                    }
                }
            }
        }
        per_method.push((label.clone(), scores));
    }
    Ok(per_method)
}

/// Runs all replications of a scenario and aggregates per method.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let per_method = run_scenario_scores(cfg)?;
    let mut table = ResultTable::default();
    for ((label, scores), (_, method)) in per_method.iter().zip(&cfg.methods) {
        let summary = metrics::aggregate(scores)?;
        table.rows.push(ResultRow {
            scenario: cfg.scenario_id.clone(),
            method: label.clone(),
            gamma: method_gamma(method),
            summary,
            n_sims_completed: scores.len(),
        });
    }
    Ok(table)
}

/// Renders the table as CSV with 4-decimal floats.
pub fn table_to_csv(table: &ResultTable) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in &table.rows {
        let gamma = r.gamma.map_or(String::new(), |g| format!("{g:.4}"));
        let _ = writeln!(
            out,
            "{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{}",
            r.scenario,
            r.method,
            gamma,
            r.summary.mean_rmse,
            r.summary.median_rmse,
            r.summary.mean_selected,
            r.summary.p_contains,
            r.summary.p_equals,
            r.n_sims_completed
        );
    }
    out
}

/// Renders the table as a Markdown table mirroring the published layout.
pub fn table_to_markdown(table: &ResultTable) -> String {
    let mut out = String::from(
        "| Scenario | Method | Mean RMSE | Median RMSE | # Variables | P(True in S) | P(S = True) |\n\
         |---|---|---|---|---|---|---|\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {:.4} | {:.4} | {:.2} | {:.2} | {:.2} |",
            r.scenario,
            r.method,
            r.summary.mean_rmse,
            r.summary.median_rmse,
            r.summary.mean_selected,
            r.summary.p_contains,
            r.summary.p_equals
        );
    }
    out
}

/// Output format for [`emit_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// Writes the table to `path`.
pub fn emit_table(table: &ResultTable, format: TableFormat, path: &Path) -> Result<()> {
    let text = match format {
        TableFormat::Csv => table_to_csv(table),
        TableFormat::Markdown => table_to_markdown(table),
    };
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Parses an emitted CSV back into a table (used for round-trip checks).
pub fn parse_table_csv(text: &str) -> Result<ResultTable> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != TABLE_HEADER {
        return Err(Error::Schema {
            path: "<table csv>".into(),
            detail: format!("unexpected header '{header}'"),
        });
    }
    let mut table = ResultTable::default();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 9 {
            return Err(Error::Schema {
                path: "<table csv>".into(),
                detail: format!("expected 9 cells, got {}", cells.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Schema {
                path: "<table csv>".into(),
                detail: format!("bad number '{s}'"),
            })
        };
        table.rows.push(ResultRow {
            scenario: cells[0].to_string(),
            method: cells[1].to_string(),
            gamma: if cells[2].is_empty() {
                None
            } else {
                Some(num(cells[2])?)
            },
            summary: ScoreSummary {
                mean_rmse: num(cells[3])?,
                median_rmse: num(cells[4])?,
                mean_selected: num(cells[5])?,
                p_contains: num(cells[6])?,
                p_equals: num(cells[7])?,
                n_scores: cells[8].parse().unwrap_or(0),
            },
            n_sims_completed: cells[8].parse().map_err(|_| Error::Schema {
                path: "<table csv>".into(),
                detail: format!("bad count '{}'", cells[8]),
            })?,
        });
    }
    Ok(table)
}

/// Cross-validation plan used by the published-scenario presets: default
/// spec for the first stage; the second stage restricts the grid to the
/// top two decades and averages five fold assignments, which stabilizes
/// support selection at the published scales.
pub fn preset_cv_plan() -> CvPlan {
    CvPlan {
        stage1: CvSpec::default(),
        stage2: CvSpec {
            grid_min_ratio: 1e-2,
            repeats: 5,
            ..CvSpec::default()
        },
    }
}

/// Builds the scenario list for a named preset table.
pub fn preset(name: &str) -> Result<Vec<ScenarioConfig>> {
    let all_small = "ols,lasso,bridge:0.2,bridge:0.5,bridge:0.8";
    let mk = |id: &str, n: usize, p_x: usize, p_z: usize, n_sims: usize, methods: &str,
              out: &str|
     -> Result<ScenarioConfig> {
        let sim = SimConfig {
            n,
            p_x,
            p_z,
            n_sims,
            ..SimConfig::default()
        };
        let methods = methods
            .split(',')
            .map(|t| parse_method(t, sim.gamma1))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioConfig {
            scenario_id: id.to_string(),
            sim,
            methods,
            cv: preset_cv_plan(),
            output_path: PathBuf::from(out),
            parallelism: 1,
        })
    };
    match name {
        // Tables 1 and 2 are the same runs: RMSE/model-size metrics and
        // the selection probabilities of one scenario family.
        "table1" | "table2" => Ok(vec![
            mk("n30", 30, 30, 30, 200, all_small, &format!("{name}.csv"))?,
            mk("n60", 60, 30, 30, 200, all_small, &format!("{name}.csv"))?,
            mk("n120", 120, 30, 30, 200, all_small, &format!("{name}.csv"))?,
        ]),
        "table3" => {
            let gammas = [
                0.01, 0.10, 0.20, 0.25, 0.30, 0.40, 0.50, 0.60, 0.70, 0.75, 0.80, 0.90, 0.99,
            ];
            let methods = gammas
                .iter()
                .map(|g| format!("bridge:{g}"))
                .collect::<Vec<_>>()
                .join(",");
            Ok(vec![mk("gamma_sweep_n60", 60, 30, 30, 100, &methods, "table3.csv")?])
        }
        "table4" | "table5" => Ok(vec![
            mk("px100", 1000, 100, 100, 200, "ols,lasso,bridge:0.5", &format!("{name}.csv"))?,
            mk("px500", 1000, 500, 100, 200, "ols,lasso,bridge:0.5", &format!("{name}.csv"))?,
            mk("px1000", 1000, 1000, 100, 200, "ols,lasso,bridge:0.5", &format!("{name}.csv"))?,
        ]),
        other => Err(Error::InvalidConfig(format!("unknown preset '{other}'"))),
    }
}

/// Runs every scenario of a preset and concatenates the rows.
pub fn run_preset(name: &str) -> Result<ResultTable> {
    let mut table = ResultTable::default();
    for cfg in preset(name)? {
        let part = run_scenario(&cfg)?;
        table.rows.extend(part.rows);
    }
    Ok(table)
}

/// Fits one ingested CSV dataset and writes the coefficient/SE report
/// with the diagnostics block appended. Returns the report text.
pub fn fit_command(
    data_path: &Path,
    method: &MethodSpec,
    cv: &CvPlan,
    out_path: &Path,
) -> Result<String> {
    let data = Dataset::from_csv(data_path)?;
    let n = data.y.len();
    if n < cv.stage1.n_folds || n < cv.stage2.n_folds {
        return Err(Error::TooFewObservations {
            n,
            n_folds: cv.stage1.n_folds.max(cv.stage2.n_folds),
        });
    }
    let fit = two_stage::run_two_stage(&data, method, cv)?;
    let mut text = two_stage::fit_report_csv(&fit);
    // ingested data has no ground truth: diagnostics run in plug-in mode
    // on the estimated conditional means and the estimated support
    let b1 = fit
        .support_beta
        .iter()
        .map(|&j| fit.beta_hat[j].abs())
        .fold(0.0f64, f64::max);
    let report = diagnostics::build_report(
        &fit.d_hat,
        &fit.beta_hat,
        &fit.support_beta,
        None,
        b1,
        true,
    );
    text.push_str("# diagnostics (plug-in estimates; no ground truth)\n");
    for line in report.to_string().lines() {
        text.push_str("# ");
        text.push_str(line);
        text.push('\n');
    }
    std::fs::write(out_path, &text).map_err(|e| Error::Io {
        path: out_path.display().to_string(),
        source: e,
    })?;
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_parsing() {
        let (label, m) = parse_method("bridge:0.2", 0.1).unwrap();
        assert_eq!(label, "bridge:0.2");
        assert_eq!(m.stage1, Stage1Method::Bridge { gamma: 0.1 });
        assert_eq!(m.stage2, Stage2Method::Bridge { gamma: 0.2 });
        let (_, m) = parse_method("adalasso", 0.1).unwrap();
        assert_eq!(m.stage1, Stage1Method::Lasso);
        let (_, m) = parse_method("lasso@bridge:0.3", 0.1).unwrap();
        assert_eq!(m.stage1, Stage1Method::Bridge { gamma: 0.3 });
        assert_eq!(m.stage2, Stage2Method::Lasso);
        assert!(parse_method("ridge", 0.1).is_err());
        assert!(parse_method("bridge:1.5", 0.1).is_err());
    }

    #[test]
    fn config_parsing_round_trip() {
        let text = "\
# comment
scenario = demo
n = 40
p_x = 8
p_z = 8
k_x = 2
n_sims = 3
base_seed = 9
methods = ols, lasso
cv_grid_size = 10
cv2_repeats = 2
parallelism = 2
output_path = out.csv
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.scenario_id, "demo");
        assert_eq!(cfg.sim.n, 40);
        assert_eq!(cfg.sim.n_sims, 3);
        assert_eq!(cfg.methods.len(), 2);
        assert_eq!(cfg.cv.stage1.grid_size, 10);
        assert_eq!(cfg.cv.stage1.repeats, 1);
        assert_eq!(cfg.cv.stage2.repeats, 2);
        assert_eq!(cfg.output_path, PathBuf::from("out.csv"));
    }

    #[test]
    fn config_rejects_unknown_key() {
        let err = parse_config("nonsense = 4\n").unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn empty_table_emits_header_only() {
        let csv = table_to_csv(&ResultTable::default());
        assert_eq!(csv, format!("{TABLE_HEADER}\n"));
    }

    #[test]
    fn table_csv_round_trip() {
        let table = ResultTable {
            rows: vec![ResultRow {
                scenario: "s".into(),
                method: "bridge:0.5".into(),
                gamma: Some(0.5),
                summary: ScoreSummary {
                    mean_rmse: 0.12345,
                    median_rmse: 0.1,
                    mean_selected: 6.0,
                    p_contains: 1.0,
                    p_equals: 0.73,
                    n_scores: 100,
                },
                n_sims_completed: 100,
            }],
        };
        let csv = table_to_csv(&table);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[1],
            "s,bridge:0.5,0.5000,0.1235,0.1000,6.0000,1.0000,0.7300,100"
        );
        let back = parse_table_csv(&csv).unwrap();
        assert_eq!(back.rows.len(), 1);
        // 4-decimal round trip
        assert_eq!(back.rows[0].summary.mean_rmse, 0.1235);
        assert_eq!(back.rows[0].summary.p_equals, 0.73);
        assert_eq!(back.rows[0].n_sims_completed, 100);
    }

    #[test]
    fn smoke_scenario_run_is_exact_in_noiseless_override() {
        let text = "\
scenario = smoke
n = 50
p_x = 6
p_z = 6
k_x = 2
sigma_u = 1e-8
sigma_v = 1e-8
sigma_uv_high = 0
sigma_uv_low = 0
n_sims = 1
base_seed = 5
methods = bridge:0.5
cv_grid_size = 12
";
        let cfg = parse_config(text).unwrap();
        let table = run_scenario(&cfg).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        assert_eq!(row.n_sims_completed, 1);
        assert!(row.summary.mean_rmse < 1e-4, "rmse {}", row.summary.mean_rmse);
        assert_eq!(row.summary.p_equals, 1.0);
    }

    #[test]
    fn preset_names() {
        assert_eq!(preset("table1").unwrap().len(), 3);
        assert_eq!(preset("table3").unwrap()[0].methods.len(), 13);
        assert_eq!(preset("table5").unwrap().len(), 3);
        assert!(preset("table9").is_err());
    }
}
