//! Benchmark-only crate; the targets live in `benches/engine.rs`.
//!
//! Run with `cargo bench -p rlnn-bench`.
