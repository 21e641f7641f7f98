//! Erasure decoding for CSS quantum codes.
//!
//! The crate provides GF(2) linear algebra, code constructors (planar
//! surface codes and hypergraph products), an erasure channel sampler,
//! peeling, hard-guess and inactivation decoders, the stabilizer-assisted
//! dual-peeling preprocessor, a union-find ML decoder for surface codes,
//! exact ML reference oracles, and a Monte Carlo sweep engine.

pub mod channel;
pub mod codes;
pub mod decoders;
pub mod dual_peeling;
pub mod gf2;
pub mod oracle;
pub mod sim;
pub mod surface_fast;

pub use channel::{ErasureInstance, TrialSeed};
pub use codes::{CssCode, ErrorType};
pub use decoders::{DecodeResult, DecodeStats, DecodeStatus, Outcome};
pub use gf2::{BitVector, SparseBitMatrix};
