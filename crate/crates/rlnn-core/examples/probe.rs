use rlnn_core::*;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let patience: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(6);
    let seeds: Vec<u64> = args.get(2).map(|s| s.split(',').map(|x| x.parse().unwrap()).collect()).unwrap_or(vec![0, 1, 2]);
    let set = sets::bermudan_put_single_asset();
    let cfg = TrainConfig { patience, ..TrainConfig::default() };
    for &seed in &seeds {
        let t0 = Instant::now();
        let result = rlnn_backward(
            &set.model, &set.schedule, &set.payoff, 50_000, 32, &cfg, seed,
        ).unwrap();
        let report = bound_report(&result, &set.model, &set.schedule, &set.payoff, 200_000, seed).unwrap();
        let worst_mse = result.nets.iter().map(|f| f.report.validation_mse).fold(0.0f64, f64::max);
        println!(
            "patience {patience} seed {seed}: direct {:.4} lower {:.4}(se {:.4}) upper {:.4}(se {:.5}) gap {:.5} brackets229 {} worst_mse {:.2e} | {:.0}s",
            result.direct_estimate, report.lower, report.lower_se, report.upper, report.upper_se,
            report.gap(), report.brackets(2.2929), worst_mse, t0.elapsed().as_secs_f64()
        );
    }
}
