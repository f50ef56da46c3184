//! Numerical toolkit for the Hamiltonian Mean Field model with Poisson
//! interaction on the circle.
//!
//! The crate covers phase-space discretization ([`grid`]), the self-consistent
//! potential ([`interaction`]), Casimir generators ([`casimir`]), conserved and
//! variational functionals ([`functionals`]), ground-state construction
//! ([`steady_states`]), rearrangement with respect to the microscopic energy
//! ([`rearrangement`]), a semi-Lagrangian kinetic solver ([`vlasov`]) and the
//! config-driven experiments behind the `hmfp` binary ([`experiment`]).

pub mod casimir;
pub mod error;
pub mod experiment;
pub mod functionals;
pub mod grid;
pub mod interaction;
pub mod rearrangement;
pub mod snapshot;
mod spectral;
pub mod steady_states;
pub mod vlasov;

pub use casimir::{CasimirFamily, CasimirSpec};
pub use error::{HmfError, Result};
pub use functionals::DiagnosticsRecord;
pub use grid::{integrate, make_grid, weighted_l1_distance, DistributionField, PhaseGrid, Potential};
pub use interaction::{density, solve_potential, Density};
pub use rearrangement::{MonotoneProfile, StepRule};
pub use snapshot::Snapshot;
pub use steady_states::{ConstraintSet, Multipliers, SolverOptions, SteadyStateResult, VelocityQuadrature};
pub use vlasov::{Interpolation, SolverConfig};
