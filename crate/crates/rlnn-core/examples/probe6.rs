use rlnn_core::*;

fn main() {
    let set = sets::bermudan_put_single_asset();
    let schedule = ExerciseSchedule::equally_spaced(1.0, 2).unwrap();
    let run = || rlnn_backward(&set.model, &schedule, &set.payoff, 3000, 4, &TrainConfig::default(), 9).unwrap();
    let a = run();
    let b = run();
    for (x, y) in a.nets.iter().zip(&b.nets) {
        println!("date {}: nets equal {} epochs {} vs {}", x.date_index, x.net == y.net, x.report.epochs, y.report.epochs);
        if x.net != y.net {
            for i in 0..x.net.w1.len() {
                if x.net.w1[i] != y.net.w1[i] {
                    println!("  w1[{i}] {:.20e} vs {:.20e}", x.net.w1[i], y.net.w1[i]);
                }
            }
        }
    }
    println!("direct equal: {}", a.direct_estimate == b.direct_estimate);
}
