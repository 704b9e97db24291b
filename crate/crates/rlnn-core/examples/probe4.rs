use rlnn_core::*;

fn main() {
    // independent MC price of the 60-day down-and-out call, 5 monitoring dates
    for barrier in [0.91f64, 0.93, 0.95, 0.97] {
        let set = sets::barrier_call_hedging().with_barrier(barrier);
        let n = 4_000_000;
        let paths = simulate_paths(&set.model, &set.schedule, n, 2027).unwrap();
        let disc = (-set.model.rate * 0.2f64).exp();
        let vals: Vec<f64> = (0..n)
            .map(|p| {
                let alive = (1..=5).all(|m| paths.state(p, m)[0] > barrier);
                if alive {
                    disc * (paths.state(p, 5)[0] - 1.0).max(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        let (mean, se) = math::mean_and_se(&vals);
        println!("B={barrier}: MC price {mean:.5} (se {se:.5})");
    }
}
