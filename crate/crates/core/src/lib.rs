//! Energy-beamforming toolkit for wireless power transfer with a
//! dynamic-metasurface-antenna (DMA) transmitter.
//!
//! The crate models the physical system (near-field channels, microstrip
//! feed lines, Lorentzian-constrained element weights), solves the
//! minimum-transmit-power beamforming design by alternating semidefinite
//! programs, and ships fully-digital, maximum-ratio and particle-swarm
//! baselines plus an experiment harness with CSV and SVG output.
//!
//! All numerical modules are generic over the scalar type through
//! [`scalar::Real`]; the `*64` aliases at the crate root fix `f64`, which is
//! what the harness and CLI use.

pub mod baselines;
pub mod beamform;
pub mod channel;
pub mod config;
pub mod harness;
pub mod lorentzian;
pub mod microstrip;
pub mod scalar;
pub mod sdp;

pub use scalar::Real;

/// `f64` instantiations of the main public types.
pub type SystemConfig64 = config::SystemConfig<f64>;
pub type ArrayGeometry64 = config::ArrayGeometry<f64>;
pub type FieldRegion64 = config::FieldRegion<f64>;
pub type ChannelVector64 = channel::ChannelVector<f64>;
pub type MaterialSpec64 = microstrip::MaterialSpec<f64>;
pub type MicrostripModel64 = microstrip::MicrostripModel<f64>;
pub type PropagationMatrix64 = microstrip::PropagationMatrix<f64>;
pub type MaterialDb64 = microstrip::MaterialDb<f64>;
pub type DmaConfiguration64 = lorentzian::DmaConfiguration<f64>;
pub type PrecoderSet64 = beamform::PrecoderSet<f64>;
pub type BeamformingSolution64 = beamform::BeamformingSolution<f64>;
pub type Scenario64 = beamform::Scenario<f64>;
pub type AlgorithmOptions64 = beamform::AlgorithmOptions<f64>;
pub type FdGeometry64 = baselines::FdGeometry<f64>;
pub type PsoOptions64 = baselines::PsoOptions<f64>;
pub type HermitianMatrix64 = sdp::HermitianMatrix<f64>;
pub type SdpProblem64 = sdp::SdpProblem<f64>;
pub type SdpSolution64 = sdp::SdpSolution<f64>;
pub type SolveOptions64 = sdp::SolveOptions<f64>;
