//! Criterion benchmarks for kinu-core live in `benches/`; run them with
//! `cargo bench -p kinu-bench`.
