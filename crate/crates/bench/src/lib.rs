//! Criterion benchmarks for the eigensolver, band sweeps and the finite-difference oracle live in `benches/`.
