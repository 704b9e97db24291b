//! Fast deterministic self-checks: oracle equivalences and the library's
//! structural identities, one pass/fail line each.

use rlnn_core::*;

struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn check(name: &'static str, ok: bool, detail: String) -> Check {
    Check { name, ok, detail }
}

fn run_checks() -> Vec<Check> {
    let mut out = Vec::new();

    // correlation factorization round trip
    let basket = sets::basket_put_five_assets();
    let l = cholesky(&basket.model.corr).expect("factorizable");
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let mut s = 0.0;
            for k in 0..5 {
                s += l[i][k] * l[j][k];
            }
            worst = worst.max((s - basket.model.corr[i][j]).abs());
        }
    }
    out.push(check(
        "cholesky reproduces the basket correlation",
        worst < 1e-12,
        format!("max |LL' - rho| = {worst:.2e}"),
    ));

    // normal distribution accuracy
    let phi_err = (math::normal_cdf(1.0) - 0.8413447460685429485852f64)
        .abs()
        .max((math::normal_cdf(-1.7) - 0.04456546275854304366405).abs());
    out.push(check(
        "normal cdf at reference points",
        phi_err < 1e-15,
        format!("max error {phi_err:.2e}"),
    ));

    // hockey-stick expectation against quadrature-exact value
    let relu_err = (relu_expectation_normal(0.0, 1.0) - 0.3989422804014326779399f64).abs();
    out.push(check(
        "closed-form hockey-stick expectation",
        relu_err < 1e-15,
        format!("error {relu_err:.2e}"),
    ));

    // binomial european mode vs closed form
    let set1 = sets::bermudan_put_single_asset();
    let tree = binomial_bermudan_1d(
        40.0, 40.0, 0.06, 0.0, 0.2, &set1.schedule, 5000, ExerciseStyle::European, true,
    )
    .expect("tree");
    let bs = bs_price(40.0, 40.0, 0.06, 0.0, 0.2, 1.0, false);
    out.push(check(
        "binomial european mode matches closed form",
        (tree - bs).abs() < 1e-3,
        format!("tree {tree:.6} vs {bs:.6}"),
    ));

    // gradient vs central finite differences on small random instances
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
    let mut worst_rel = 0.0f64;
    for _ in 0..20 {
        let net = ShallowNet::random(3, 2, InputSpace::Price, &mut rng);
        let xs: Vec<f64> = (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ys: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = gradient(&net, &xs, &ys).expect("gradient");
        // spot-check a couple of coordinates by bumping
        let h = 1e-6;
        for (idx, analytic) in [(0usize, g.w1[0]), (5, g.b1[2])] {
            let mut up = net.clone();
            let mut dn = net.clone();
            if idx == 0 {
                up.w1[0] += h;
                dn.w1[0] -= h;
            } else {
                up.b1[2] += h;
                dn.b1[2] -= h;
            }
            let fd = (mse(&up, &xs, &ys).unwrap() - mse(&dn, &xs, &ys).unwrap()) / (2.0 * h);
            let denom = fd.abs().max(analytic.abs()).max(1e-3);
            worst_rel = worst_rel.max((fd - analytic).abs() / denom);
        }
    }
    out.push(check(
        "backpropagation matches finite differences",
        worst_rel < 1e-5,
        format!("max relative error {worst_rel:.2e}"),
    ));

    // quick end-to-end: small run, identities and bound ordering
    let result = rlnn_backward(
        &set1.model,
        &set1.schedule,
        &set1.payoff,
        4000,
        8,
        &TrainConfig::default(),
        5,
    )
    .expect("small run");
    let net1 = result.net_at(1);
    let port = extract_portfolio(net1, result.schedule.times()[1]);
    let mut identity = true;
    let mut probe_rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let x = [probe_rng.gen_range(-1.0f64..1.0)];
        if port.payoff(&x).unwrap() != net1.forward(&x).unwrap() {
            identity = false;
            break;
        }
    }
    out.push(check(
        "portfolio payoff reproduces the network exactly",
        identity,
        "1000 random points, bitwise".into(),
    ));

    let dt = result.schedule.dt(1);
    let q_direct = continuation_value(net1, &[1.0], &result.model, dt).unwrap();
    let q_port = port.value(&[1.0], 0.0, &result.model).unwrap();
    out.push(check(
        "portfolio value equals the continuation value bitwise",
        q_direct == q_port,
        format!("{q_direct:.17} vs {q_port:.17}"),
    ));

    let report = bound_report(
        &result,
        &set1.model,
        &set1.schedule,
        &set1.payoff,
        20_000,
        5,
    )
    .expect("bounds");
    out.push(check(
        "lower bound below upper bound within noise",
        report.lower - 2.0 * report.lower_se <= report.upper + 2.0 * report.upper_se,
        format!(
            "lower {:.4} (se {:.4}) vs upper {:.4} (se {:.5})",
            report.lower, report.lower_se, report.upper, report.upper_se
        ),
    ));

    // martingale increments on fresh paths
    let engine = DualMartingale::new(&result).expect("engine");
    let paths = simulate_paths(&result.model, &result.schedule, 50_000, 777).expect("paths");
    let mut all_zero = true;
    let mut detail = String::new();
    for i in 0..result.schedule.monitoring_dates() {
        let incs: Vec<f64> = (0..50_000)
            .map(|p| {
                let m = engine.martingale(&paths, p);
                m[i + 1] - m[i]
            })
            .collect();
        let (mean, se) = math::mean_and_se(&incs);
        if mean.abs() >= 3.0 * se {
            all_zero = false;
            detail = format!("interval {i}: mean {mean:.2e} vs se {se:.2e}");
            break;
        }
    }
    out.push(check(
        "dual martingale increments have zero mean",
        all_zero,
        if detail.is_empty() {
            "all intervals within 3 s.e.".into()
        } else {
            detail
        },
    ));

    // loss quantiles on a hand-checkable ladder
    let ladder: Vec<f64> = (1..=100).map(|i| i as f64).collect();
    let (var, cvar) = var_cvar(&ladder, 0.95);
    out.push(check(
        "empirical var/cvar on the integer ladder",
        (var - 95.05).abs() < 1e-12 && (cvar - 98.0).abs() < 1e-12,
        format!("var {var}, cvar {cvar}"),
    ));

    out
}

/// Runs every check, prints one line per check, and returns the exit code.
pub fn run() -> i32 {
    let checks = run_checks();
    let mut failed = 0;
    for c in &checks {
        if c.ok {
            println!("ok   - {} ({})", c.name, c.detail);
        } else {
            println!("FAIL - {} ({})", c.name, c.detail);
            failed += 1;
        }
    }
    if failed == 0 {
        println!("selftest: {} checks passed", checks.len());
        0
    } else {
        println!("selftest: {failed} of {} checks failed", checks.len());
        1
    }
}
