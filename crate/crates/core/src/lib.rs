//! Soft-decision decoding toolkit for binary linear block codes.
//!
//! The crate provides ordered-statistics decoding (OSD) and a
//! segmentation-discarding decoder (SDD) that prunes the test-error-pattern
//! search, together with eBCH code construction, bit-packed GF(2) linear
//! algebra, a BPSK/AWGN channel model, and a seeded Monte-Carlo
//! frame-error-rate harness.
//!
//! Typical use:
//!
//! ```
//! use osdkit::codes::{ebch_generator, CodeSpec};
//! use osdkit::channel::{bpsk_modulate, transmit};
//! use osdkit::sdd::{sdd_decode, SddParams};
//! use osdkit::gf2::BinaryVector;
//! use rand::SeedableRng;
//!
//! let g = ebch_generator(&CodeSpec::ebch(64, 16)).unwrap();
//! let msg = BinaryVector::zeros(16);
//! let codeword = g.encode(&msg).unwrap();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let received = transmit(&bpsk_modulate(&codeword), 0.7, &mut rng);
//! let params = SddParams::new(2, 16, 13.0, 5.5);
//! let outcome = sdd_decode(&received, &g, &params).unwrap();
//! assert_eq!(outcome.codeword, codeword);
//! ```

pub mod channel;
pub mod codes;
pub mod config;
pub mod gf2;
pub mod osd;
pub mod sdd;
pub mod sim;

pub use channel::{ChannelParams, SnrConvention};
pub use codes::{CodeFamily, CodeSpec};
pub use gf2::{BinaryMatrix, BinaryVector, Permutation};
pub use osd::{DecodeCounters, DecodeOutcome, OrderedContext, Termination, TestErrorPattern};
pub use sdd::{PruneMode, SddParams, SegmentBoundaries, SegmentStats};
pub use sim::{ExperimentConfig, PointStats, SimulationStats};
