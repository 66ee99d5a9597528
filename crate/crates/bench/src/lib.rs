//! Benchmarks for bplt-core; see `benches/`.
