// Temporary: distribution of studentized coefficients for the bridge
// pipeline at n = 500 (oracle-normality check).
use hdiv::dgp::{self, SimConfig};
use hdiv::two_stage::{self, CvPlan, MethodSpec, Stage1Method, Stage2Method};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

fn erf(x: f64) -> f64 {
    // Abramowitz-Stegun 7.1.26
    let s = x.signum();
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    s * y
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let reps: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(100);
    let gamma: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let ratio: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.01);
    let cfg = SimConfig {
        n: 500,
        n_sims: reps,
        base_seed: 7000,
        ..SimConfig::default()
    };
    let mut cv = hdiv::tuning::CvSpec::default();
    cv.grid_min_ratio = ratio;
    let plan = CvPlan {
        stage1: hdiv::tuning::CvSpec::default(),
        stage2: cv,
    };
    let method = MethodSpec {
        stage1: Stage1Method::Bridge { gamma: 0.1 },
        stage2: Stage2Method::Bridge { gamma },
    };
    let zs: Vec<Vec<(f64, f64, f64, f64, usize)>> = (1..=reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed + r as u64);
            let truth = dgp::build_ground_truth(&cfg, &mut rng).unwrap();
            let data = dgp::sample_dataset(&cfg, &truth, &mut rng).unwrap();
            let fit = two_stage::run_two_stage(&data, &method, &plan).unwrap();
            let mut out = Vec::new();
            if let Some(se) = &fit.std_errors {
                for (pos, &j) in fit.support_beta.iter().enumerate() {
                    if truth.support_beta.contains(&j) {
                        out.push((
                            (fit.beta_hat[j] - truth.beta0[j]) / se[pos],
                            fit.beta_hat[j] - truth.beta0[j],
                            se[pos],
                            truth.beta0[j].abs(),
                            fit.support_beta.len(),
                        ));
                    }
                }
            }
            out
        })
        .collect();
    let rows: Vec<(f64, f64, f64, f64, usize)> = zs.into_iter().flatten().collect();
    let mean_err = rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64;
    let mean_abs_err = rows.iter().map(|r| r.1.abs()).sum::<f64>() / rows.len() as f64;
    let mean_se = rows.iter().map(|r| r.2).sum::<f64>() / rows.len() as f64;
    let mean_sel = rows.iter().map(|r| r.4 as f64).sum::<f64>() / rows.len() as f64;
    let mut worst: Vec<(f64, f64, f64, f64, usize)> = rows.clone();
    worst.sort_by(|a, b| b.0.abs().partial_cmp(&a.0.abs()).unwrap());
    println!("mean_err={mean_err:.4} mean|err|={mean_abs_err:.4} mean_se={mean_se:.4} mean_sel={mean_sel:.2}");
    for w in worst.iter().take(5) {
        println!("  outlier z={:.2} err={:.4} se={:.4} |beta0|={:.3} nsel={}", w.0, w.1, w.2, w.3, w.4);
    }
    let mut all: Vec<f64> = rows.iter().map(|r| r.0).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = all.len();
    let mean = all.iter().sum::<f64>() / m as f64;
    let var = all.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / (m - 1) as f64;
    let mut d = 0.0f64;
    for (i, &z) in all.iter().enumerate() {
        let f = normal_cdf(z);
        d = d.max((f - i as f64 / m as f64).abs());
        d = d.max(((i + 1) as f64 / m as f64 - f).abs());
    }
    let crit = 1.6276 / (m as f64).sqrt();
    println!(
        "gamma={gamma} ratio={ratio}: m={m} mean={mean:.4} sd={:.4} KS D={d:.4} crit01={crit:.4} pass={}",
        var.sqrt(),
        d <= crit
    );
}
