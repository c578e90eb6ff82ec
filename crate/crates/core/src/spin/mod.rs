//! Single-excitation dynamics of controlled spin rings.

pub mod evolution;
pub mod full_space;
pub mod hamiltonian;
pub mod metrics;
pub mod ring;

pub use evolution::{evolve, QuantumState, Spectrum};
pub use full_space::{full_hamiltonian_oracle, FullSpaceModel};
pub use hamiltonian::{build_single_excitation_hamiltonian, parameter_derivative};
pub use metrics::{
    analytic_gradient, log_sensitivity, transfer_metrics, windowed_fidelity,
    windowed_fidelity_with_nodes, TransferKernel, TransferMetrics,
};
pub use ring::{BiasController, Coupling, Parameter, Site, SpinRingSpec};
