//! Benchmarks for `cycpres-core`; see `benches/algorithms.rs`.
