//! Criterion benchmarks for the readout toolkit live in `benches/`.
