//! Lineshape production: steady-state absorption scanned over the two-photon
//! detuning, magnetic-field families of scans, and side-by-side scheme
//! comparisons.
//!
//! Scan points are independent steady-state solves, so the detuning loop is
//! data parallel. With the `parallel` feature (default) [`scan`] fans the
//! grid out over a rayon thread pool; [`scan_serial`] always runs the same
//! computation sequentially and is the reference implementation the parallel
//! path must match bit for bit.

pub mod metrics;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::angmom::HalfInt;
use crate::coupling::{build_coupling, rwa_hamiltonian_with, CouplingOperator};
use crate::dynamics::{
    absorption_rate, assemble_generator, dissipator, gauss_hermite_shifts, steady_state, RateSet,
};
use crate::error::{Error, Result};
use crate::field::{BichromaticField, Polarization, Scheme};
use crate::structure::{build_level_set, AtomSpec, LevelSet, TAU};

pub use metrics::{extract_metrics, ResonanceMetrics};

/// Everything needed to produce one absorption lineshape.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub atom: AtomSpec,
    /// Excited hyperfine manifold addressed by both field components.
    pub excited_f: HalfInt,
    pub scheme: Scheme,
    /// Explicit polarization overrides; `None` uses the scheme's standard
    /// arrangement.
    pub pol_upper: Option<Polarization>,
    pub pol_lower: Option<Polarization>,
    /// Rabi scale of the component driving the upper ground manifold, rad/s.
    pub rabi_upper: f64,
    /// Rabi scale of the component driving the lower ground manifold, rad/s.
    pub rabi_lower: f64,
    /// Common one-photon detuning, Hz.
    pub detuning_hz: f64,
    pub b_gauss: f64,
    pub delta_start_hz: f64,
    pub delta_stop_hz: f64,
    pub delta_step_hz: f64,
    /// Average each point over the thermal velocity distribution.
    pub doppler: bool,
    /// Doppler FWHM override, Hz; `None` uses the atom's default.
    pub doppler_fwhm_hz: Option<f64>,
    pub doppler_points: usize,
    pub rates: RateSet,
}

impl ScanConfig {
    /// Canonical working point: lin-parallel-lin drive on the lower excited
    /// manifold, equal Rabi scales of 2 pi x 0.25 MHz, strongly dephased
    /// optics, slow transit relaxation, 0.15 G bias field, and a
    /// +-50 kHz two-photon window in 100 Hz steps.
    pub fn new(atom: AtomSpec) -> ScanConfig {
        let excited_f = atom.excited_f_range().0;
        let rates = RateSet {
            gamma_natural: atom.natural_linewidth,
            optical_dephasing: TAU * 1.0e8,
            ground_relaxation: TAU * 500.0,
            excited_quench: 0.0,
        };
        ScanConfig {
            atom,
            excited_f,
            scheme: Scheme::LinParLin,
            pol_upper: None,
            pol_lower: None,
            rabi_upper: TAU * 0.25e6,
            rabi_lower: TAU * 0.25e6,
            detuning_hz: 0.0,
            b_gauss: 0.15,
            delta_start_hz: -50.0e3,
            delta_stop_hz: 50.0e3,
            delta_step_hz: 100.0,
            doppler: false,
            doppler_fwhm_hz: None,
            doppler_points: 21,
            rates,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.atom.validate()?;
        self.rates.validate()?;
        if self.b_gauss < 0.0 {
            return Err(Error::invalid("magnetic field must be non-negative"));
        }
        if self.rabi_upper < 0.0 || self.rabi_lower < 0.0 {
            return Err(Error::invalid("Rabi frequencies must be non-negative"));
        }
        if self.doppler && self.doppler_points == 0 {
            return Err(Error::invalid("Doppler averaging needs at least one point"));
        }
        Ok(())
    }

    /// The drive field at Raman detuning zero.
    pub fn base_field(&self) -> Result<BichromaticField> {
        let mut field = BichromaticField::preset(
            self.scheme,
            &self.atom,
            self.rabi_upper,
            self.rabi_lower,
            self.detuning_hz,
            0.0,
        )?;
        if let Some(p) = self.pol_upper {
            field.upper.polarization = p;
        }
        if let Some(p) = self.pol_lower {
            field.lower.polarization = p;
        }
        Ok(field)
    }

    pub fn level_set(&self) -> Result<LevelSet> {
        build_level_set(&self.atom, self.excited_f, self.b_gauss)
    }

    /// The two-photon detuning grid, inclusive of both ends.
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.delta_step_hz > 0.0) {
            return Err(Error::invalid("detuning step must be positive"));
        }
        if self.delta_stop_hz < self.delta_start_hz {
            return Err(Error::invalid("detuning stop must not precede start"));
        }
        let span = self.delta_stop_hz - self.delta_start_hz;
        let n = (span / self.delta_step_hz + 1e-9).floor() as usize + 1;
        Ok((0..n)
            .map(|i| self.delta_start_hz + i as f64 * self.delta_step_hz)
            .collect())
    }
}

/// One absorption lineshape: the scattering rate (rad/s per atom) sampled on
/// the two-photon detuning grid.
#[derive(Clone, Debug)]
pub struct Lineshape {
    pub delta_hz: Vec<f64>,
    pub absorption: Vec<f64>,
}

impl Lineshape {
    pub fn metrics(&self) -> Result<ResonanceMetrics> {
        extract_metrics(&self.delta_hz, &self.absorption)
    }
}

/// Reusable state for evaluating absorption at arbitrary detunings: level
/// basis, coupling matrix, dissipator, and Doppler nodes are all detuning
/// independent.
struct ScanEngine {
    levels: LevelSet,
    base_field: BichromaticField,
    coupling: CouplingOperator,
    diss: DMatrix<Complex64>,
    rates: RateSet,
    doppler_nodes: Vec<(f64, f64)>,
}

impl ScanEngine {
    fn build(config: &ScanConfig) -> Result<ScanEngine> {
        config.validate()?;
        let levels = config.level_set()?;
        let base_field = config.base_field()?;
        let coupling = build_coupling(&levels, &base_field)?;
        let diss = dissipator(&levels, &config.rates)?;
        let doppler_nodes = if config.doppler {
            let fwhm = config
                .doppler_fwhm_hz
                .unwrap_or(config.atom.doppler_fwhm_hz);
            gauss_hermite_shifts(fwhm, config.doppler_points)?
        } else {
            vec![(0.0, 1.0)]
        };
        Ok(ScanEngine {
            levels,
            base_field,
            coupling,
            diss,
            rates: config.rates,
            doppler_nodes,
        })
    }

    /// Doppler-averaged steady-state absorption at one two-photon detuning.
    fn absorption_at(&self, delta_hz: f64) -> Result<f64> {
        let field = self.base_field.with_raman_detuning(delta_hz);
        let mut acc = 0.0;
        for &(shift, weight) in &self.doppler_nodes {
            let shifted = field.with_velocity_shift(shift);
            let h = rwa_hamiltonian_with(&self.levels, &shifted, &self.coupling);
            let gen = assemble_generator(&self.diss, &h, self.rates.ground_relaxation);
            let rho = steady_state(&gen)?;
            acc += weight
                * absorption_rate(&rho, self.levels.n_ground(), self.rates.gamma_natural);
        }
        Ok(acc)
    }
}

fn first_error(grid: Vec<f64>, values: Vec<Result<f64>>) -> Result<Lineshape> {
    let mut absorption = Vec::with_capacity(values.len());
    for (delta, value) in grid.iter().zip(values) {
        match value {
            Ok(v) => absorption.push(v),
            Err(e) => {
                return Err(Error::ScanFailed {
                    delta_hz: *delta,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(Lineshape {
        delta_hz: grid,
        absorption,
    })
}

/// Scans the two-photon detuning grid; data parallel when the `parallel`
/// feature is enabled, otherwise identical to [`scan_serial`].
pub fn scan(config: &ScanConfig) -> Result<Lineshape> {
    let engine = ScanEngine::build(config)?;
    let grid = config.grid()?;
    #[cfg(feature = "parallel")]
    let values: Vec<Result<f64>> = grid
        .par_iter()
        .map(|&delta| engine.absorption_at(delta))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let values: Vec<Result<f64>> = grid
        .iter()
        .map(|&delta| engine.absorption_at(delta))
        .collect();
    first_error(grid, values)
}

/// Sequential reference scan, available regardless of features.
pub fn scan_serial(config: &ScanConfig) -> Result<Lineshape> {
    let engine = ScanEngine::build(config)?;
    let grid = config.grid()?;
    let values: Vec<Result<f64>> = grid
        .iter()
        .map(|&delta| engine.absorption_at(delta))
        .collect();
    first_error(grid, values)
}

/// One lineshape per magnetic field value, preserving input order.
pub fn bfield_family(config: &ScanConfig, b_list: &[f64]) -> Result<Vec<(f64, Lineshape)>> {
    let mut out = Vec::with_capacity(b_list.len());
    for &b in b_list {
        let mut c = config.clone();
        c.b_gauss = b;
        out.push((b, scan(&c)?));
    }
    Ok(out)
}

/// One row of a scheme comparison table.
#[derive(Clone, Debug)]
pub struct CompareRow {
    pub scheme: Scheme,
    pub excited_f: HalfInt,
    /// Rabi frequency of both components, Hz (angular rate / 2 pi).
    pub rabi_hz: f64,
    pub metrics: ResonanceMetrics,
}

/// Runs the scan for every (scheme, excited manifold) case at every Rabi
/// frequency and summarizes each lineshape. Explicit polarization overrides
/// in `config` are ignored here; each scheme uses its standard arrangement.
pub fn compare_schemes(
    config: &ScanConfig,
    cases: &[(Scheme, HalfInt)],
    rabi_hz_list: &[f64],
) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for &(scheme, excited_f) in cases {
        for &rabi_hz in rabi_hz_list {
            let mut c = config.clone();
            c.scheme = scheme;
            c.excited_f = excited_f;
            c.pol_upper = None;
            c.pol_lower = None;
            c.rabi_upper = TAU * rabi_hz;
            c.rabi_lower = TAU * rabi_hz;
            let shape = scan(&c)?;
            rows.push(CompareRow {
                scheme,
                excited_f,
                rabi_hz,
                metrics: shape.metrics()?,
            });
        }
    }
    Ok(rows)
}
