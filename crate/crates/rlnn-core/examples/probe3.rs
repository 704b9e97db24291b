use rlnn_core::*;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    // European put hedge (Set IV): writer shorts a 1y put, holds 1 month
    let set = sets::european_put_hedging();
    let horizon = 1.0 / 12.0;
    let target = HedgeTarget::EuropeanPut { strike: 1.0, maturity: 1.0 };
    for legs in [10usize, 25, 50] {
        let (net, rep) = fit_european_put_hedge(
            &set.model, 1.0, 1.0, horizon, 50_000, legs, &TrainConfig::default(), 7,
        ).unwrap();
        let port = extract_portfolio(&net, horizon);
        let stats = static_backtest(&target, &port, horizon, &set.model, 50_000, 99).unwrap();
        println!(
            "static p={legs}: mean {:+.2e} std {:.2e} var95 {:.2e} cvar95 {:.2e} (fit mse {:.1e}, {} epochs)",
            stats.mean, stats.std, stats.var95, stats.cvar95, rep.validation_mse, rep.epochs
        );
    }
    let dstats = delta_backtest(&target, horizon, 25, &set.model, 50_000, 99).unwrap();
    println!(
        "dynamic 25 reb: mean {:+.2e} std {:.2e} var95 {:.2e} cvar95 {:.2e}",
        dstats.mean, dstats.std, dstats.var95, dstats.cvar95
    );
    println!("set4 done in {:.0}s", t0.elapsed().as_secs_f64());

    // Barrier hedge (Set V): 60-day down-and-out call, hold 12 days
    let t1 = Instant::now();
    for barrier in [0.91f64, 0.97] {
        let set = sets::barrier_call_hedging().with_barrier(barrier);
        let result = rlnn_backward(
            &set.model, &set.schedule, &set.payoff, 50_000, 20, &TrainConfig::default(), 11,
        ).unwrap();
        let t1g = set.schedule.times()[1];
        let port = extract_portfolio(result.net_at(1), t1g);
        let target = HedgeTarget::BarrierClaim { result: &result };
        let stats = static_backtest(&target, &port, t1g, &set.model, 50_000, 55).unwrap();
        let dstats = delta_backtest(&target, t1g, 12, &set.model, 50_000, 55).unwrap();
        println!(
            "barrier {barrier}: static p=20 mean {:+.2e} std {:.2e} var95 {:.2e} cvar95 {:.2e} | dynamic(12) mean {:+.2e} std {:.2e} var95 {:.2e} cvar95 {:.2e} | direct {:.4}",
            stats.mean, stats.std, stats.var95, stats.cvar95,
            dstats.mean, dstats.std, dstats.var95, dstats.cvar95, result.direct_estimate
        );
    }
    println!("set5 done in {:.0}s", t1.elapsed().as_secs_f64());
}
