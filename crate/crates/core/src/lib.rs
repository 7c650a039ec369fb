//! Simulation of multiqubit two-component states
//! `√p |i₁…iₙ⟩ + e^{iφ} √(1−p) |ī₁…īₙ⟩`, their classical-mixture
//! counterparts, and a single-basis protocol that recovers φ and separates
//! entangled from mixed preparations using only local Hadamards, one local
//! phase shift and z-basis measurements.

pub mod basis;
pub mod bootstrap;
pub mod error;
pub mod gates;
pub mod measurement;
pub mod oracle;
pub mod protocol;
pub mod rng;
pub mod states;
pub mod stats;

pub use basis::BasisString;
pub use error::{Error, Result};
pub use gates::ParityDistribution;
pub use measurement::{MeasurementRecord, ParityStatistics, PatternStatistics, Sampler};
pub use protocol::{Backend, Decision, PhaseEstimate, Preparation, ProtocolConfig, Verdict};
pub use states::{ClassicalTwoMixture, OutcomeDistribution, StateVector, TwoComponentState, DENSE_CAP};
