use rlnn_core::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let patience: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(6);
    let set = sets::european_put_hedging();
    let horizon = 1.0 / 12.0;
    let target = HedgeTarget::EuropeanPut { strike: 1.0, maturity: 1.0 };
    let cfg = TrainConfig { patience, ..TrainConfig::default() };
    for seed in [1u64, 2, 3, 4, 5] {
        let mut stds = Vec::new();
        for legs in [10usize, 25, 50] {
            let (net, _rep) = fit_european_put_hedge(
                &set.model, 1.0, 1.0, horizon, 50_000, legs, &cfg, seed,
            ).unwrap();
            let port = extract_portfolio(&net, horizon);
            let stats = static_backtest(&target, &port, horizon, &set.model, 50_000, 99).unwrap();
            stds.push((legs, stats.mean, stats.std));
        }
        let ok = stds[1].2 < stds[0].2 * 1.2 && stds[2].2 < stds[1].2 * 1.2;
        println!(
            "pat{patience} seed {seed}: std10 {:.2e} std25 {:.2e} std50 {:.2e} means {:+.1e}/{:+.1e}/{:+.1e} monotone(20%) {ok}",
            stds[0].2, stds[1].2, stds[2].2, stds[0].1, stds[1].1, stds[2].1
        );
    }
}
