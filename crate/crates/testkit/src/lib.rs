//! Test support: brute-force oracles, seeded generators and hand-built
//! scenarios.
//!
//! The oracles work on plain node lists and edge lists and share no code
//! with `ged-core`, so agreement between the two is meaningful.

pub mod gen;
pub mod oracle;
pub mod scenario;
