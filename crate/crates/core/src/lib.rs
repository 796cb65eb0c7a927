//! Optimal controlled teleportation of a qubit through an arbitrary
//! three-qubit pure channel.
//!
//! Particle 1 is the controller (Charlie), particle 2 the sender (Alice) and
//! particle 3 the receiver (Bob). Every channel is first brought to its
//! five-term generalized Schmidt form ([`canonical`]); the per-basis branch
//! quantities live in [`channel`]; [`optimizer`] maximizes the success
//! probability over the controller's measurement basis, cross-checked by the
//! analytic stationary-point system in [`stationary`]. [`le`] computes the
//! concurrence-based localizable entanglement, and [`simulator`] runs the whole
//! protocol branch by branch as an independent check of the closed forms.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the type aliases
//! at the crate root fix the scalar to `f64`.

pub mod canonical;
pub mod channel;
mod error;
pub mod le;
pub mod optimizer;
pub mod qcore;
mod scalar;
pub mod simulator;
pub mod stationary;

pub use error::{Error, Result};
pub use scalar::Real;

pub use canonical::{canonical_state, canonicalize, reconstruct};
pub use channel::{classify, max_entanglement_residual, p_zero_points, pqr, split};
pub use le::{le_analytic, le_numeric, le_report};
pub use optimizer::{boundary_candidate, optimize, r_grid_min, refine};
pub use simulator::{build_filter, run_exact, run_sampled};
pub use stationary::{derived_coefficients, stationary_candidates};

/// Complex amplitude with `f64` parts.
pub type Complex = num_complex::Complex<f64>;
pub type PureState = qcore::PureState<f64>;
pub type LocalUnitary = qcore::LocalUnitary<f64>;
pub type SchmidtPair = qcore::SchmidtPair<f64>;
pub type CanonicalCoefficients = canonical::CanonicalCoefficients<f64>;
pub type CanonicalForm = canonical::CanonicalForm<f64>;
pub type MeasurementBasis = channel::MeasurementBasis<f64>;
pub type ChannelSplit = channel::ChannelSplit<f64>;
pub type ChannelClassification = channel::ChannelClassification<f64>;
pub type DerivedCoefficients = stationary::DerivedCoefficients<f64>;
pub type VPolynomial = stationary::VPolynomial<f64>;
pub type StationaryCandidate = stationary::StationaryCandidate<f64>;
pub type OptimizerConfig = optimizer::OptimizerConfig<f64>;
pub type Candidate = optimizer::Candidate<f64>;
pub type OptimizationReport = optimizer::OptimizationReport<f64>;
pub type LeReport = le::LeReport<f64>;
pub type MessageQubit = simulator::MessageQubit<f64>;
pub type Branch = simulator::Branch<f64>;
pub type ProtocolReport = simulator::ProtocolReport<f64>;
