//! Nonlinear nonreciprocal SSH lattice with saturable intracell
//! nonreciprocity: end-breather dynamics, the effective linear defect model,
//! the Creutz-ladder image and a Hermitian comparison chain.
//!
//! Units: `hbar = 1`; energies in units of the intercell hopping `nu`,
//! times in `1 / nu`, intensities in units of `I_s`.

pub mod config;
pub mod creutz;
mod error;
pub mod evolve;
pub mod experiment;
pub mod figures;
pub mod hermitian;
pub mod lattice;
pub mod output;
pub mod spectral;
pub mod svg;

pub use config::{parse_config, ExperimentConfig, ModelKind, OutputKind, SweepAxis};
pub use error::{Error, Result};
pub use evolve::{
    averaged_observables, extract_period, integrate, phase_heatmap, AveragedObservables, Dynamics,
    PhaseMap, Trajectory,
};
pub use lattice::{
    apply_hamiltonian, cell_intensities, chiral_apply, gamma_of_intensity, CellIntensities,
    GammaProfile, LatticeParams, StateVector,
};
pub use num_complex::Complex64;
