//! Simulation of driven-dissipative Kerr resonators with two-photon drive and
//! loss, the cat states they stabilize, and their phase-space signatures.
//!
//! Modules build on each other in order: [`fock`] operators and states,
//! [`models`] Hamiltonians and jump operators, [`dynamics`] Lindblad evolution
//! and steady states, then the [`observables`] and [`phasespace`] diagnostics.
//! [`scenario`] drives all of them from a JSON config.

pub mod dynamics;
pub mod error;
pub mod fock;
pub mod models;
pub mod observables;
pub mod phasespace;
pub mod scenario;

mod complex_serde;

pub use dynamics::{
    evolve, lindblad_rhs, liouvillian_matrix, steady_state, EvolveOptions, IntegratorOptions,
    LiouvillianMatrix, SteadyStateMethod, SteadyStateOptions, Trajectory,
};
pub use error::{Error, Result};
pub use fock::{
    displacement, ladder_operators, partial_trace, partial_transpose, tensor_product, DensityMatrix,
    Dims, FockSpace, Operator, StateVector, Subsystem, C64,
};
pub use models::{
    build_one_mode, build_two_mode, cat_state, steady_alpha, CatParity, CouplingKind, CouplingSpec,
    ModeParams, SystemModel,
};
pub use observables::{
    dominant_eigencomponents, expectation, fidelity_pure, mutual_information, negativity, purity,
    von_neumann_entropy, EigenComponent,
};
pub use phasespace::{
    joint_quadrature_distribution, quadrature_distribution, wigner, wigner_cat_analytic,
    PhaseSpaceGrid, QuadratureDistribution,
};
