//! Criterion benchmarks for the `ascension` kernels; see `benches/`.
