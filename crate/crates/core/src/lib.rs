//! Heralded distributed CNOT gates between dual-species stationary qubits.
//!
//! An entangled photon pair is the bus between two remote nodes. Each photon
//! scatters off a cavity-coupled emitter (a controlled polarization flip for
//! color centers, a controlled phase for superconducting qubits), and the
//! detector record heralds which of four CNOT-equivalent gates was applied.
//! Time-bin multiplexing lets one pair drive two gates in parallel.
//!
//! Modules, bottom-up:
//!
//! - [`hilbert`]: dense labeled state vectors, operators, projection, overlaps
//! - [`scattering`]: cavity reflection coefficients and the photon–qubit interfaces
//! - [`routing`]: wave plates, time delays and the polarization/time-bin exchange gates
//! - [`protocol`]: the single, parallel and superconducting-hybrid pipelines
//! - [`metrics`]: closed-form branch metrics, amplitude averages and source purification
//! - [`quadrature`]: Gauss–Legendre rules
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
extern crate alloc;

pub mod error;
pub mod hilbert;
pub mod metrics;
pub mod protocol;
pub mod quadrature;
pub mod routing;
pub mod scattering;

pub use error::{Error, Result};
pub use hilbert::{overlap2, LabeledState, LinearOperator, Probability, Subsystem};
pub use metrics::{
    average_parallel, average_sc_parallel, average_single, branch_metrics, purified_fidelity, sweep_surface, Averages,
    BranchMetrics, FidelityWeighting, ParallelMode, QuadratureSpec, SourceFidelity,
};
pub use protocol::{
    run_parallel_cnot, run_sc_parallel_cnot, run_single_cnot, Branch, NodeConfig, ProtocolOutcome,
    QubitInit,
};
pub use scattering::{CavityEmitterParams, ReflectionPair, SpinBranch};
