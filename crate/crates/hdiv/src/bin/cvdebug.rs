// Temporary: dump the stage-2 CV curve and the exact-selection window.
use hdiv::dgp::{self, SimConfig};
use hdiv::solvers;
use hdiv::tuning::{self, CvSpec, SolverKind};
use hdiv::two_stage::{self, Stage1Method};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(120);
    let seed: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1001);
    let cfg = SimConfig {
        n,
        base_seed: 0,
        ..SimConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = dgp::build_ground_truth(&cfg, &mut rng).unwrap();
    let data = dgp::sample_dataset(&cfg, &truth, &mut rng).unwrap();
    let mut cv = CvSpec::default();
    cv.repeats = 5;
    cv.grid_min_ratio = 0.01;
    let first =
        two_stage::fit_first_stage(&data.z, &data.x, &Stage1Method::Bridge { gamma: 0.1 }, &cv)
            .unwrap();
    let d_hat = two_stage::predict_conditional_means(&data.z, &first.alpha_hat);
    let grid = tuning::lambda_grid(&d_hat, &data.y, &cv);
    let truth_set: Vec<usize> = truth.support_beta.clone();
    for (name, kind) in [
        ("LASSO", SolverKind::Lasso),
        ("BRIDGE02", SolverKind::Bridge { gamma: 0.2 }),
    ] {
        let (best, curve) = tuning::cv_select_with_grid(&d_hat, &data.y, &grid, &kind, &cv).unwrap();
        println!("== {name}: chosen lambda index {} of {} (ratio {:.4})",
            grid.iter().position(|&l| l == best).unwrap(), grid.len(), best / grid[0]);
        for (gi, pt) in curve.iter().enumerate() {
            if gi % 2 != 0 { continue; }
            let fit = match &kind {
                SolverKind::Lasso => solvers::lasso_cd(&d_hat, &data.y, pt.lambda, None, 1e-6, 10_000).unwrap(),
                SolverKind::Bridge { gamma } => solvers::bridge_fit(&d_hat, &data.y, pt.lambda, *gamma, 1e-6, 200).unwrap(),
                _ => unreachable!(),
            };
            let contains = truth_set.iter().all(|j| fit.support.contains(j));
            let exact = contains && fit.support.len() == truth_set.len();
            println!(
                "  gi={gi:>2} l/lmax={:<8.5} cv_mse={:<9.4} nsel={:>2} contains={} exact={} sup={:?}",
                pt.lambda / grid[0], pt.cv_mse, fit.support.len(), u8::from(contains), u8::from(exact),
                fit.support
            );
        }
    }
}
