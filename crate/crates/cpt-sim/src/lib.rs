//! Steady-state simulator of coherent-population-trapping resonances in
//! alkali atoms driven by a bichromatic laser field.
//!
//! The crate builds the hyperfine-Zeeman level structure of a D1 line,
//! assembles the rotating-frame Hamiltonian and Lindblad dissipator for a
//! two-component optical field, solves for the steady-state density matrix,
//! and scans the two-photon detuning or the magnetic field to produce
//! resonance lineshapes and their summary metrics.

pub mod angmom;
pub mod cli;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod spectroscopy;
pub mod structure;

pub use angmom::{clebsch_gordan, dipole_weight, wigner_3j, wigner_6j, HalfInt};
pub use coupling::{
    build_coupling, construct_dark_pm, raman_amplitude, rwa_hamiltonian, stationary_dark_states,
    trap_states, CouplingOperator, DarkState, DarkStateQuery, PairCensus, RwaHamiltonian,
    SchemeReport,
};
pub use dynamics::{
    absorption_rate, build_lindblad, doppler_average, gauss_hermite_shifts, steady_state,
    DensityMatrix, LindbladGenerator, RateSet,
};
pub use error::{Error, Result};
pub use field::{BichromaticField, FieldComponent, Polarization, Scheme};
pub use spectroscopy::{
    bfield_family, compare_schemes, extract_metrics, scan, scan_serial, CompareRow, Lineshape,
    ResonanceMetrics, ScanConfig,
};
pub use structure::{
    breit_rabi_energy, build_level_set, lande_g, pair_resonance_frequency, AtomSpec,
    GroundBranch, Level, LevelSet, Manifold, BOHR_MAGNETON_HZ_PER_G,
};
