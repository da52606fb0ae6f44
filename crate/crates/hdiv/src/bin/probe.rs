// Temporary calibration probe for the Monte Carlo scenarios.
use std::time::Instant;

use hdiv::dgp::{self, SimConfig};
use hdiv::metrics;
use hdiv::tuning::CvSpec;
use hdiv::two_stage::{self, CvPlan, MethodSpec, Stage1Method, Stage2Method};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn base_methods() -> Vec<(String, MethodSpec)> {
    [
        (
            "OLS",
            MethodSpec {
                stage1: Stage1Method::MinNorm,
                stage2: Stage2Method::Ols,
            },
        ),
        (
            "LASSO",
            MethodSpec {
                stage1: Stage1Method::Lasso,
                stage2: Stage2Method::Lasso,
            },
        ),
        (
            "BRIDGE02",
            MethodSpec {
                stage1: Stage1Method::Bridge { gamma: 0.1 },
                stage2: Stage2Method::Bridge { gamma: 0.2 },
            },
        ),
        (
            "BRIDGE08",
            MethodSpec {
                stage1: Stage1Method::Bridge { gamma: 0.1 },
                stage2: Stage2Method::Bridge { gamma: 0.8 },
            },
        ),
        (
            "ADALASSO",
            MethodSpec {
                stage1: Stage1Method::Lasso,
                stage2: Stage2Method::AdaptiveLasso,
            },
        ),
    ]
    .into_iter()
    .map(|(n, m)| (n.to_string(), m))
    .collect()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(120);
    let reps: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(20);
    let p: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(30);
    let mut cfg = SimConfig {
        n,
        p_x: p,
        p_z: p.min(100),
        k_x: 6,
        n_sims: reps,
        base_seed: 1000,
        ..SimConfig::default()
    };
    if let Some(v) = args.get(6) {
        cfg.coef_low = v.parse().unwrap();
    }
    if let Some(v) = args.get(7) {
        cfg.coef_high = v.parse().unwrap();
    }
    if let Some(v) = args.get(8) {
        cfg.alpha_low = v.parse().unwrap();
    }
    if let Some(v) = args.get(9) {
        cfg.alpha_high = v.parse().unwrap();
    }
    let sweep = std::env::var("PROBE_GAMMAS").ok();
    let methods: Vec<(String, MethodSpec)> = if let Some(gs) = sweep {
        gs.split(',')
            .map(|g| {
                let gamma: f64 = g.parse().unwrap();
                (
                    format!("BRIDGE{g}"),
                    MethodSpec {
                        stage1: Stage1Method::Bridge { gamma: 0.1 },
                        stage2: Stage2Method::Bridge { gamma },
                    },
                )
            })
            .collect()
    } else {
        base_methods()
    };


    let mut cv2 = CvSpec::default();
    if let Some(r) = args.get(4) {
        cv2.grid_min_ratio = r.parse().unwrap();
    }
    if let Some(g) = args.get(5) {
        cv2.grid_size = g.parse().unwrap();
    }
    if let Some(v) = args.get(10) {
        cv2.repeats = v.parse().unwrap();
    }
    let plan = CvPlan {
        stage1: CvSpec::default(),
        stage2: cv2,
    };
    let t0 = Instant::now();
    let all: Vec<Vec<metrics::ReplicationScore>> = (1..=reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed + r as u64);
            let truth = dgp::build_ground_truth(&cfg, &mut rng).unwrap();
            let data = dgp::sample_dataset(&cfg, &truth, &mut rng).unwrap();
            let mut scores = Vec::new();
            let mut cached: Option<(Stage1Method, nalgebra::DMatrix<f64>)> = None;
            for (_, m) in &methods {
                let fit = {
                    let reuse = cached.as_ref().filter(|(s1, _)| *s1 == m.stage1);
                    if let Some((_, alpha)) = reuse {
                        let d_hat = two_stage::predict_conditional_means(&data.z, alpha);
                        let (f, l2) =
                            two_stage::fit_second_stage(&d_hat, &data.y, &m.stage2, &plan.stage2)
                                .unwrap();
                        two_stage::TwoStageFit {
                            alpha_hat: alpha.clone(),
                            d_hat,
                            support_beta: f.support.clone(),
                            beta_hat: f.beta,
                            sigma_eps_hat: None,
                            std_errors: None,
                            lambda_stage1: vec![],
                            lambda_stage2: l2,
                            inference_failure: None,
                        }
                    } else {
                        let f = two_stage::run_two_stage(&data, m, &plan).unwrap();
                        cached = Some((m.stage1.clone(), f.alpha_hat.clone()));
                        f
                    }
                };
                scores.push(metrics::score_replication(&fit, &truth));
            }
            scores
        })
        .collect();
    println!("elapsed {:.1}s for {} reps at n={} p={}", t0.elapsed().as_secs_f64(), reps, n, p);
    for (mi, (name, _)) in methods.iter().enumerate() {
        let col: Vec<metrics::ReplicationScore> = all.iter().map(|row| row[mi]).collect();
        let s = metrics::aggregate(&col).unwrap();
        println!(
            "{:<9} P(contains)={:.3} P(equals)={:.3} mean_sel={:>6.2} medRMSE={:.4} meanRMSE={:.4}",
            name, s.p_contains, s.p_equals, s.mean_selected, s.median_rmse, s.mean_rmse
        );
    }
}
