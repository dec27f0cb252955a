//! Criterion benchmarks for the sawtm crate; see `benches/`.
