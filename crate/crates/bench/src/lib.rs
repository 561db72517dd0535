//! Benchmark-only crate; see `benches/decoders.rs`.
