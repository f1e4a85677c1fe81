//! Criterion benchmarks for the decomposition pipeline; see `benches/decompose.rs`.
