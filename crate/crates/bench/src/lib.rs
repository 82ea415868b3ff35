//! Criterion benchmarks for the DSP, planning and statistics kernels; see
//! `benches/kernels.rs`.
