//! Criterion benchmarks for the hot paths of `geoflow-core`; see `benches/`.
