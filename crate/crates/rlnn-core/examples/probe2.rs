use rlnn_core::*;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).cloned().unwrap_or_else(|| "set2".into());
    let seeds: Vec<u64> = args.get(2).map(|s| s.split(',').map(|x| x.parse().unwrap()).collect()).unwrap_or(vec![0]);
    let dim: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(2);
    let patience: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(6);
    let s0: Option<f64> = args.get(5).map(|s| s.parse().unwrap());
    let cfg = TrainConfig { patience, ..TrainConfig::default() };
    let (mut set, refv): (ParameterSet, f64) = match which.as_str() {
        "set2" => (sets::basket_put_five_assets(), 0.1803),
        "set3" => (sets::max_call(dim).unwrap(), if dim == 2 { 13.902 } else if dim == 3 { 18.69 } else { 26.1395 }),
        _ => panic!("unknown"),
    };
    if let Some(s0) = s0 { set = set.with_spot(s0); }
    let p = set.default_hidden;
    for &seed in &seeds {
        let t0 = Instant::now();
        let result = rlnn_backward(&set.model, &set.schedule, &set.payoff, 50_000, p, &cfg, seed).unwrap();
        let t_train = t0.elapsed().as_secs_f64();
        let report = bound_report(&result, &set.model, &set.schedule, &set.payoff, 200_000, seed).unwrap();
        let worst_mse = result.nets.iter().map(|f| f.report.validation_mse).fold(0.0f64, f64::max);
        println!(
            "{which} d{} p{p} pat{patience} seed {seed}: direct {:.4} lower {:.4}(se {:.5}) upper {:.4}(se {:.6}) gap {:.5} ref {refv} brackets {} worst_mse {:.2e} | train {:.0}s total {:.0}s",
            set.model.dim, result.direct_estimate, report.lower, report.lower_se, report.upper, report.upper_se,
            report.gap(), report.brackets(refv), worst_mse, t_train, t0.elapsed().as_secs_f64()
        );
    }
}
