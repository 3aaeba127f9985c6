//! Time evolution: dissipation parameters, integrating-factor steppers, and
//! per-step diagnostics records.

pub mod diagnostics;
pub mod params;
pub mod solver;

pub use diagnostics::{energy_budget, DiagnosticsRecord, SplitNorms};
pub use params::{classify_region, Branch, DissipationParams, RegionClass};
pub use solver::{
    linear_propagator, run_simulation, Integrator, SimulationState, Solver, SolverConfig,
};
