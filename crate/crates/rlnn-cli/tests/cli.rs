//! End-to-end checks of the `rlnn` binary: output determinism, config
//! diagnostics and the save/load round trip.

use std::path::PathBuf;
use std::process::{Command, Output};

fn rlnn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rlnn"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("rlnn-cli-test-{}-{name}", std::process::id()));
    p
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn same_config_and_seed_give_byte_identical_output_files() {
    let out1 = tmp("a.csv");
    let out2 = tmp("b.csv");
    for out in [&out1, &out2] {
        let o = run(rlnn()
            .args(["price", "--set", "set1", "--hidden", "4"])
            .args(["--n-train", "2000", "--n-eval", "5000", "--seeds", "9"])
            .arg("--out")
            .arg(out));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "output files must be byte-identical");
    assert!(String::from_utf8_lossy(&a).starts_with("instrument,s0,p,seed,direct,lower"));
    std::fs::remove_file(out1).ok();
    std::fs::remove_file(out2).ok();
}

#[test]
fn malformed_config_exits_nonzero_and_names_the_field() {
    let cfg = tmp("bad.toml");
    std::fs::write(&cfg, "[experiment]\nmisspelled_field = 1\n").unwrap();
    let o = run(rlnn().args(["price", "--config"]).arg(&cfg));
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("misspelled_field"),
        "diagnostic should name the field, got: {err}"
    );
    std::fs::remove_file(cfg).ok();
}

#[test]
fn unknown_flag_is_rejected() {
    let o = run(rlnn().args(["price", "--set", "set1", "--frobnicate", "3"]));
    assert!(!o.status.success());
}

#[test]
fn bad_thread_env_is_rejected() {
    let o = run(rlnn().env("RLNN_THREADS", "zero").args(["selftest"]));
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("RLNN_THREADS"));
}

#[test]
fn saved_model_feeds_bounds_and_portfolio_export() {
    let model = tmp("model.json");
    let o = run(rlnn()
        .args(["price", "--set", "set1", "--hidden", "4"])
        .args(["--n-train", "2000", "--n-eval", "2000", "--seeds", "3"])
        .args(["--out", "-"])
        .arg("--save-model")
        .arg(&model));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(rlnn()
        .args(["bounds", "--n-eval", "2000", "--seeds", "1", "--model"])
        .arg(&model));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("saved:vanilla_put"), "{text}");

    let o = run(rlnn().args(["export-portfolio", "--date", "1", "--model"]).arg(&model));
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(
        text.starts_with("leg_index,maturity,quantity,bias,w_1,classification"),
        "{text}"
    );
    // 4 hidden units -> 4 legs + header + cash row
    assert_eq!(text.trim_end().lines().count(), 6);

    // out-of-range date index fails loudly
    let o = run(rlnn().args(["export-portfolio", "--date", "99", "--model"]).arg(&model));
    assert!(!o.status.success());
    std::fs::remove_file(model).ok();
}

#[test]
fn selftest_exits_zero() {
    let o = run(rlnn().arg("selftest"));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "selftest failed:\n{stdout}");
    assert!(stdout.contains("checks passed"), "{stdout}");
}

#[test]
fn json_format_carries_full_precision() {
    let o = run(rlnn()
        .args(["price", "--set", "set1", "--hidden", "4"])
        .args(["--n-train", "2000", "--n-eval", "2000", "--seeds", "1,2"])
        .args(["--format", "json", "--out", "-"]));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    let parsed: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    let runs = parsed["runs"].as_array().expect("runs array");
    assert_eq!(runs.len(), 2);
    assert!(runs[0]["direct"].is_f64());
    assert!(parsed["summary"]["n_runs"].as_u64() == Some(2));
    // 17 significant digits in the raw text
    assert!(text.contains("e0") || text.contains("e-"), "{text}");
}
