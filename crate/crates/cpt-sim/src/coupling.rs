//! Atom-field coupling in the rotating frame: the coupling operator between
//! ground and excited sublevels, the rotating-wave Hamiltonian, and the
//! algebra of dark, bright, and trap states.
//!
//! Basis order everywhere follows [`LevelSet`]: ground levels first (lower F,
//! then m ascending; upper F, then m ascending), then the excited sublevels
//! by ascending m.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::angmom::{dipole_weight, HalfInt};
use crate::error::{Error, Result};
use crate::field::BichromaticField;
use crate::structure::{LevelSet, TAU};

/// Description of the rotating frame used by [`rwa_hamiltonian`].
///
/// Each ground manifold co-rotates with the field component that addresses
/// it, referenced to the B = 0 manifold energies. Upper-manifold sublevels
/// then carry only their Zeeman shift; lower-manifold sublevels carry their
/// Zeeman shift plus the Raman detuning; excited sublevels carry their Zeeman
/// shift minus the one-photon detuning of the upper component. A Lambda pair
/// is two-photon resonant exactly when its two ground diagonals coincide.
pub const FRAME_NOTE: &str = "ground(upper F): zeeman; ground(lower F): zeeman + raman_detuning; \
     excited: zeeman - optical_detuning(upper component); all in rad/s";

/// Coupling operator C between ground and excited sublevels, in rad/s.
///
/// `matrix[(e, g)]` is the full Rabi frequency of the transition from ground
/// column g to excited row e: minus the Rabi scale of the field component
/// addressing g's manifold, times the spherical polarization amplitude for
/// q = m_e - m_g, times the dimensionless dipole weight. The rotating-wave
/// Hamiltonian carries half of this entry on each off-diagonal block.
#[derive(Clone, Debug)]
pub struct CouplingOperator {
    pub matrix: DMatrix<Complex64>,
}

impl CouplingOperator {
    pub fn n_excited(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_ground(&self) -> usize {
        self.matrix.ncols()
    }

    /// Frobenius norm, the natural scale for null-space tolerances.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }
}

/// Builds the coupling operator for a level basis and drive field.
pub fn build_coupling(levels: &LevelSet, field: &BichromaticField) -> Result<CouplingOperator> {
    let i = levels.atom.nuclear_spin;
    let j_half = HalfInt::HALF;
    let mut matrix = DMatrix::zeros(levels.n_excited(), levels.n_ground());

    for (g, glvl) in levels.ground.iter().enumerate() {
        let comp = field.component_for(glvl.f).ok_or_else(|| {
            Error::invalid(format!(
                "no field component addresses ground manifold F = {}",
                glvl.f
            ))
        })?;
        if comp.rabi_scale == 0.0 {
            continue;
        }
        for q in [-1i32, 1i32] {
            let me = glvl.m + HalfInt::from_int(q);
            let Some(e) = levels.excited_index(me) else {
                continue;
            };
            let w = dipole_weight(glvl.f, glvl.m, levels.excited_f, me, q, i, j_half, j_half)?;
            matrix[(e, g)] += -comp.rabi_scale * comp.polarization.amp(q) * w;
        }
    }

    Ok(CouplingOperator { matrix })
}

/// Rotating-wave Hamiltonian over the full level basis, rad/s.
#[derive(Clone, Debug)]
pub struct RwaHamiltonian {
    pub matrix: DMatrix<Complex64>,
}

impl RwaHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Diagonal of the rotating frame in Hz, ground levels then excited levels.
/// See [`FRAME_NOTE`] for the frame convention.
fn frame_diagonal_hz(levels: &LevelSet, field: &BichromaticField) -> Vec<f64> {
    let lower_f = levels.atom.lower_ground_f();
    let mut diag = Vec::with_capacity(levels.dim());
    for (g, glvl) in levels.ground.iter().enumerate() {
        let mut d = levels.ground_zeeman_hz(g);
        if glvl.f == lower_f {
            d += field.raman_detuning_hz;
        }
        diag.push(d);
    }
    for elvl in &levels.excited {
        diag.push(levels.excited_zeeman_hz(elvl.m) - field.upper.optical_detuning_hz);
    }
    diag
}

/// Assembles the rotating-wave Hamiltonian: the frame diagonal plus half the
/// coupling operator on the ground-excited blocks.
pub fn rwa_hamiltonian(levels: &LevelSet, field: &BichromaticField) -> Result<RwaHamiltonian> {
    let coupling = build_coupling(levels, field)?;
    Ok(rwa_hamiltonian_with(levels, field, &coupling))
}

/// Same as [`rwa_hamiltonian`] but reuses a prebuilt coupling operator.
///
/// The coupling entries depend only on polarizations, Rabi scales, and the
/// level layout, so detuning and magnetic-field scans can cache them and
/// rebuild just the frame diagonal per point.
pub fn rwa_hamiltonian_with(
    levels: &LevelSet,
    field: &BichromaticField,
    coupling: &CouplingOperator,
) -> RwaHamiltonian {
    let n_g = levels.n_ground();
    let dim = levels.dim();
    let mut h = DMatrix::zeros(dim, dim);

    for (idx, d_hz) in frame_diagonal_hz(levels, field).into_iter().enumerate() {
        h[(idx, idx)] = Complex64::new(TAU * d_hz, 0.0);
    }
    for e in 0..levels.n_excited() {
        for g in 0..n_g {
            let half = 0.5 * coupling.matrix[(e, g)];
            h[(n_g + e, g)] = half;
            h[(g, n_g + e)] = half.conj();
        }
    }

    RwaHamiltonian { matrix: h }
}

/// Which Lambda pairs to examine for stationary dark states.
#[derive(Clone, Copy, Debug)]
pub enum DarkStateQuery {
    /// One pair: m in the lower ground manifold, m in the upper one.
    Pair { m_lower: HalfInt, m_upper: HalfInt },
    /// Census over every (m_lower, m_upper) combination.
    Auto,
}

/// A normalized superposition of ground sublevels annihilated by the
/// coupling operator while being stationary in the rotating frame.
#[derive(Clone, Debug)]
pub struct DarkState {
    /// Amplitudes over the ground basis, unit norm, largest component real
    /// and positive.
    pub amplitudes: DVector<Complex64>,
    /// ||C v|| / ||C||, the direct verification of darkness.
    pub residual: f64,
}

/// Dark-state findings for one Lambda pair at its own two-photon resonance.
#[derive(Clone, Debug)]
pub struct PairCensus {
    pub m_lower: HalfInt,
    pub m_upper: HalfInt,
    /// Raman detuning that makes this pair degenerate in the rotating frame.
    pub raman_detuning_hz: f64,
    pub dark_states: Vec<DarkState>,
}

/// Full dark/trap census of a scheme at fixed field and magnetic field.
#[derive(Clone, Debug)]
pub struct SchemeReport {
    /// (F, m) of ground sublevels the field does not couple at all.
    pub trap_states: Vec<(HalfInt, HalfInt)>,
    pub pairs: Vec<PairCensus>,
}

/// Ground sublevels whose coupling column vanishes: population parked there
/// never scatters, regardless of detuning.
pub fn trap_states(levels: &LevelSet, coupling: &CouplingOperator) -> Vec<(HalfInt, HalfInt)> {
    let scale = coupling.norm();
    let mut traps = Vec::new();
    for (g, glvl) in levels.ground.iter().enumerate() {
        let col_norm = coupling.matrix.column(g).norm();
        if col_norm <= 1e-12 * scale || scale == 0.0 {
            traps.push((glvl.f, glvl.m));
        }
    }
    traps
}

/// Orthonormal null-space basis of the coupling operator restricted to the
/// ground columns in `cols`, verified against the full operator.
fn null_space_of_columns(
    coupling: &CouplingOperator,
    cols: &[usize],
) -> Vec<(DVector<Complex64>, f64)> {
    let scale = coupling.norm();
    if scale == 0.0 {
        return Vec::new();
    }
    let k = cols.len();
    let sub = DMatrix::from_fn(coupling.n_excited(), k, |r, c| coupling.matrix[(r, cols[c])]);
    let gram = sub.adjoint() * &sub;
    let eig = gram.symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);

    let mut out = Vec::new();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        // Null eigenvalues of the Gram matrix surface at the eigensolver's
        // absolute noise floor, eps * lambda_max; physical bright directions
        // sit many orders above it.
        if lambda > 1e-12 * lambda_max {
            continue;
        }
        let v_sub = eig.eigenvectors.column(idx);
        let mut v = DVector::zeros(coupling.n_ground());
        for (c, &col) in cols.iter().enumerate() {
            v[col] = v_sub[c];
        }
        // Gram-based null vectors carry residuals of order sqrt(eps) times
        // the coupling scale; anything near that floor scatters at a rate
        // suppressed by 14 orders of magnitude and is dark for any purpose.
        let residual = (&coupling.matrix * &v).norm() / scale;
        if residual <= 1e-6 {
            out.push((v, residual));
        }
    }
    out
}

/// Fixes the overall phase so the largest-magnitude amplitude is real and
/// positive.
fn canonicalize_phase(v: &mut DVector<Complex64>) {
    let mut best = 0usize;
    for i in 0..v.len() {
        if v[i].norm() > v[best].norm() {
            best = i;
        }
    }
    let mag = v[best].norm();
    if mag > 0.0 {
        let phase = v[best] / mag;
        for i in 0..v.len() {
            v[i] /= phase;
        }
    }
}

/// Finds stationary dark states.
///
/// For each requested pair the Raman detuning is retuned to that pair's own
/// two-photon resonance, the ground sublevels degenerate with the pair in
/// the rotating frame are collected (tolerance 1e-6 of the natural linewidth),
/// and the null space of the coupling operator over those columns is
/// extracted. Single-sublevel null vectors are trap states and are reported
/// separately rather than per pair.
pub fn stationary_dark_states(
    levels: &LevelSet,
    field: &BichromaticField,
    query: DarkStateQuery,
) -> Result<SchemeReport> {
    let coupling = build_coupling(levels, field)?;
    let lower_f = levels.atom.lower_ground_f();
    let upper_f = levels.atom.upper_ground_f();

    let pairs: Vec<(HalfInt, HalfInt)> = match query {
        DarkStateQuery::Pair { m_lower, m_upper } => {
            if !lower_f.is_projection(m_lower) {
                return Err(Error::invalid(format!(
                    "m_lower = {m_lower} is not a sublevel of F = {lower_f}"
                )));
            }
            if !upper_f.is_projection(m_upper) {
                return Err(Error::invalid(format!(
                    "m_upper = {m_upper} is not a sublevel of F = {upper_f}"
                )));
            }
            vec![(m_lower, m_upper)]
        }
        DarkStateQuery::Auto => {
            let mut all = Vec::new();
            for m_lower in lower_f.projections() {
                for m_upper in upper_f.projections() {
                    all.push((m_lower, m_upper));
                }
            }
            all
        }
    };

    let tol_hz = 1e-6 * levels.atom.natural_linewidth / TAU;
    let mut report = SchemeReport {
        trap_states: trap_states(levels, &coupling),
        pairs: Vec::new(),
    };

    for (m_lower, m_upper) in pairs {
        let g_lo = levels
            .ground_index(lower_f, m_lower)
            .expect("projection checked above");
        let g_up = levels
            .ground_index(upper_f, m_upper)
            .expect("projection checked above");

        // Retune so this pair is degenerate in the frame.
        let raman_hz = levels.ground_zeeman_hz(g_up) - levels.ground_zeeman_hz(g_lo);
        let retuned = field.with_raman_detuning(raman_hz);
        let diag = frame_diagonal_hz(levels, &retuned);

        let anchor = diag[g_up];
        let cols: Vec<usize> = (0..levels.n_ground())
            .filter(|&g| (diag[g] - anchor).abs() <= tol_hz)
            .collect();

        let mut dark_states = Vec::new();
        for (mut v, residual) in null_space_of_columns(&coupling, &cols) {
            let significant = v.iter().filter(|a| a.norm() > 1e-8).count();
            if significant < 2 {
                continue; // single-level null vectors are trap states
            }
            canonicalize_phase(&mut v);
            dark_states.push(DarkState {
                amplitudes: v,
                residual,
            });
        }
        report.pairs.push(PairCensus {
            m_lower,
            m_upper,
            raman_detuning_hz: raman_hz,
            dark_states,
        });
    }

    Ok(report)
}

/// Closed-form dark state of the magneto-insensitive Lambda pair
/// (m_lower, m_upper) = (-sign, +sign) for an I = 3/2 atom driven on the
/// F_e = 1 manifold: both legs share the single excited sublevel m_e = 0.
///
/// `sign` must be +1 or -1. Fails with [`Error::DegenerateInput`] when the
/// upper leg of the Lambda is uncoupled, since no two-level superposition can
/// cancel a one-sided drive.
pub fn construct_dark_pm(
    levels: &LevelSet,
    field: &BichromaticField,
    sign: i32,
) -> Result<DarkState> {
    if sign != 1 && sign != -1 {
        return Err(Error::invalid("sign must be +1 or -1"));
    }
    if levels.atom.nuclear_spin != HalfInt::from_twice(3) {
        return Err(Error::invalid(
            "closed-form pair dark state requires nuclear spin 3/2",
        ));
    }
    if levels.excited_f != HalfInt::ONE {
        return Err(Error::invalid(
            "closed-form pair dark state requires the F_e = 1 excited manifold",
        ));
    }

    let m_lower = HalfInt::from_int(-sign);
    let m_upper = HalfInt::from_int(sign);
    let g_lo = levels
        .ground_index(levels.atom.lower_ground_f(), m_lower)
        .expect("I = 3/2 lower manifold holds |m| <= 1");
    let g_up = levels
        .ground_index(levels.atom.upper_ground_f(), m_upper)
        .expect("I = 3/2 upper manifold holds |m| <= 2");
    let e0 = levels
        .excited_index(HalfInt::ZERO)
        .expect("F_e = 1 holds m_e = 0");

    let coupling = build_coupling(levels, field)?;
    let c_lo = coupling.matrix[(e0, g_lo)];
    let c_up = coupling.matrix[(e0, g_up)];
    if c_up == Complex64::ZERO {
        return Err(Error::DegenerateInput(format!(
            "upper Lambda leg (F = {}, m = {m_upper}) is uncoupled; \
             the pair has no two-level dark superposition",
            levels.atom.upper_ground_f()
        )));
    }

    let ratio = -c_lo / c_up;
    let norm = (1.0 + ratio.norm_sqr()).sqrt();
    let mut amplitudes = DVector::zeros(levels.n_ground());
    amplitudes[g_lo] = Complex64::new(1.0 / norm, 0.0);
    amplitudes[g_up] = ratio / norm;

    let scale = coupling.norm();
    let residual = if scale > 0.0 {
        (&coupling.matrix * &amplitudes).norm() / scale
    } else {
        0.0
    };
    Ok(DarkState {
        amplitudes,
        residual,
    })
}

/// Effective two-photon (Raman) amplitude between a lower-manifold and an
/// upper-manifold ground sublevel, from second-order elimination of the
/// excited state, in rad/s:
/// sum over e of conj(C[e, g_upper]) C[e, g_lower] / (4 * 2 pi Delta_e),
/// with Delta_e the upper component's one-photon detuning from the
/// Zeeman-shifted excited sublevel.
pub fn raman_amplitude(
    levels: &LevelSet,
    field: &BichromaticField,
    m_lower: HalfInt,
    m_upper: HalfInt,
) -> Result<Complex64> {
    let g_lo = levels
        .ground_index(levels.atom.lower_ground_f(), m_lower)
        .ok_or_else(|| Error::invalid(format!("no lower-manifold sublevel m = {m_lower}")))?;
    let g_up = levels
        .ground_index(levels.atom.upper_ground_f(), m_upper)
        .ok_or_else(|| Error::invalid(format!("no upper-manifold sublevel m = {m_upper}")))?;

    let coupling = build_coupling(levels, field)?;
    let mut total = Complex64::ZERO;
    for (e, elvl) in levels.excited.iter().enumerate() {
        let term = coupling.matrix[(e, g_up)].conj() * coupling.matrix[(e, g_lo)];
        if term == Complex64::ZERO {
            continue;
        }
        let delta_hz = field.upper.optical_detuning_hz - levels.excited_zeeman_hz(elvl.m);
        if delta_hz == 0.0 {
            return Err(Error::SingularDetuning(format!(
                "excited sublevel m = {} sits exactly at one-photon resonance",
                elvl.m
            )));
        }
        total += term / Complex64::new(4.0 * TAU * delta_hz, 0.0);
    }
    Ok(total)
}

impl std::fmt::Display for SchemeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.trap_states.is_empty() {
            writeln!(f, "trap states: none")?;
        } else {
            write!(f, "trap states:")?;
            for (ff, m) in &self.trap_states {
                write!(f, " (F={ff}, m={m})")?;
            }
            writeln!(f)?;
        }
        for pair in &self.pairs {
            writeln!(
                f,
                "pair m_lower={} m_upper={}: raman_detuning_hz={:.6} dark_states={}",
                pair.m_lower,
                pair.m_upper,
                pair.raman_detuning_hz,
                pair.dark_states.len()
            )?;
            for ds in &pair.dark_states {
                write!(f, "  |dark> =")?;
                for (g, amp) in ds.amplitudes.iter().enumerate() {
                    if amp.norm() > 1e-8 {
                        write!(
                            f,
                            " ({:+.6}{:+.6}i)|g{}>",
                            amp.re, amp.im, g
                        )?;
                    }
                }
                writeln!(f, "  residual={:.3e}", ds.residual)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Scheme;
    use crate::structure::{build_level_set, AtomSpec};
    use approx::assert_relative_eq;

    fn i(n: i32) -> HalfInt {
        HalfInt::from_int(n)
    }

    fn rb_setup(scheme: Scheme, excited_f: i32, b: f64) -> (LevelSet, BichromaticField) {
        let atom = AtomSpec::rb87();
        let levels = build_level_set(&atom, i(excited_f), b).unwrap();
        let field = BichromaticField::preset(
            scheme,
            &atom,
            TAU * 0.25e6,
            TAU * 0.25e6,
            0.0,
            0.0,
        )
        .unwrap();
        (levels, field)
    }

    #[test]
    fn coupling_respects_polarization_selection_rules() {
        let (levels, field) = rb_setup(Scheme::SigmaSigma, 1, 0.1);
        let c = build_coupling(&levels, &field).unwrap();
        // sigma+ light: every nonzero entry has m_e = m_g + 1
        for g in 0..c.n_ground() {
            for e in 0..c.n_excited() {
                let dm = levels.excited[e].m - levels.ground[g].m;
                if dm != HalfInt::ONE {
                    assert_eq!(c.matrix[(e, g)], Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_with_expected_frame_diagonal() {
        let (levels, field) = rb_setup(Scheme::LinParLin, 1, 0.2);
        let field = field.with_raman_detuning(1234.0);
        let h = rwa_hamiltonian(&levels, &field).unwrap().matrix;
        let herm = (&h - h.adjoint()).norm();
        assert!(herm < 1e-12 * h.norm());

        // lower-manifold diagonal carries the raman detuning
        let g10 = levels.ground_index(i(1), i(0)).unwrap();
        let g20 = levels.ground_index(i(2), i(0)).unwrap();
        let gap = (h[(g10, g10)] - h[(g20, g20)]).re / TAU;
        let zeeman_gap = levels.ground_zeeman_hz(g10) - levels.ground_zeeman_hz(g20);
        // Zeeman shifts are differences of ~GHz hyperfine energies, so they
        // carry about a microhertz of cancellation noise.
        assert_relative_eq!(gap, zeeman_gap + 1234.0, epsilon = 1e-5);

        // two-photon resonance condition: retuning to the pair difference
        // makes the pair degenerate
        let g1m = levels.ground_index(i(1), i(-1)).unwrap();
        let g2p = levels.ground_index(i(2), i(1)).unwrap();
        let res = levels.ground_zeeman_hz(g2p) - levels.ground_zeeman_hz(g1m);
        let h2 = rwa_hamiltonian(&levels, &field.with_raman_detuning(res))
            .unwrap()
            .matrix;
        assert!((h2[(g1m, g1m)] - h2[(g2p, g2p)]).norm() < TAU * 1e-9);
    }

    #[test]
    fn sigma_sigma_on_upper_excited_manifold_traps_only_the_stretched_state() {
        let (levels, field) = rb_setup(Scheme::SigmaSigma, 2, 0.1);
        let c = build_coupling(&levels, &field).unwrap();
        assert_eq!(trap_states(&levels, &c), vec![(i(2), i(2))]);
    }

    #[test]
    fn sigma_sigma_on_lower_excited_manifold_traps_high_m_states() {
        let (levels, field) = rb_setup(Scheme::SigmaSigma, 1, 0.1);
        let c = build_coupling(&levels, &field).unwrap();
        assert_eq!(
            trap_states(&levels, &c),
            vec![(i(1), i(1)), (i(2), i(1)), (i(2), i(2))]
        );
    }

    #[test]
    fn lin_par_lin_has_no_trap_states() {
        let (levels, field) = rb_setup(Scheme::LinParLin, 1, 0.1);
        let c = build_coupling(&levels, &field).unwrap();
        assert!(trap_states(&levels, &c).is_empty());
    }

    #[test]
    fn lin_par_lin_census_finds_the_four_pair_dark_states() {
        // At 1 G the quadratic Zeeman cleanly separates all pair resonances.
        let (levels, field) = rb_setup(Scheme::LinParLin, 1, 1.0);
        let report = stationary_dark_states(&levels, &field, DarkStateQuery::Auto).unwrap();
        assert!(report.trap_states.is_empty());

        let count = |ml: i32, mu: i32| -> usize {
            report
                .pairs
                .iter()
                .find(|p| p.m_lower == i(ml) && p.m_upper == i(mu))
                .unwrap()
                .dark_states
                .len()
        };
        // Lambda pairs sharing one excited sublevel are dark...
        assert_eq!(count(-1, 1), 1);
        assert_eq!(count(1, -1), 1);
        assert_eq!(count(-1, -1), 1);
        assert_eq!(count(1, 1), 1);
        // ...the clock pair 0-0 is not: its two pathways interfere away the
        // coupling but leave independent constraints from both excited
        // sublevels.
        assert_eq!(count(0, 0), 0);
        // pairs with |m_upper - m_lower| > 2 share no excited sublevel
        assert_eq!(count(-1, 2), 0);
        assert_eq!(count(0, 2), 0);
    }

    #[test]
    fn sigma_sigma_census_has_dark_zero_zero_but_not_clock_pairs() {
        let (levels, field) = rb_setup(Scheme::SigmaSigma, 1, 1.0);
        let report = stationary_dark_states(&levels, &field, DarkStateQuery::Auto).unwrap();
        let count = |ml: i32, mu: i32| -> usize {
            report
                .pairs
                .iter()
                .find(|p| p.m_lower == i(ml) && p.m_upper == i(mu))
                .unwrap()
                .dark_states
                .len()
        };
        assert_eq!(count(0, 0), 1);
        assert_eq!(count(-1, -1), 1);
        assert_eq!(count(-1, 1), 0);
        assert_eq!(count(1, -1), 0);
    }

    #[test]
    fn lin_perp_lin_supports_the_zero_zero_dark_state() {
        let (levels, field) = rb_setup(Scheme::LinPerpLin, 1, 1.0);
        let report = stationary_dark_states(
            &levels,
            &field,
            DarkStateQuery::Pair {
                m_lower: i(0),
                m_upper: i(0),
            },
        )
        .unwrap();
        assert_eq!(report.pairs.len(), 1);
        assert_eq!(report.pairs[0].dark_states.len(), 1);
    }

    #[test]
    fn constructed_pair_dark_state_matches_the_census() {
        let (levels, field) = rb_setup(Scheme::LinParLin, 1, 0.5);
        for sign in [1, -1] {
            let ds = construct_dark_pm(&levels, &field, sign).unwrap();
            assert!(ds.residual < 1e-12);
            assert_relative_eq!(ds.amplitudes.norm(), 1.0, max_relative = 1e-12);

            let report = stationary_dark_states(
                &levels,
                &field,
                DarkStateQuery::Pair {
                    m_lower: i(-sign),
                    m_upper: i(sign),
                },
            )
            .unwrap();
            let found = &report.pairs[0].dark_states[0];
            // same ray: overlap magnitude 1
            let overlap: Complex64 = found
                .amplitudes
                .iter()
                .zip(ds.amplitudes.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert_relative_eq!(overlap.norm(), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn constructed_dark_state_amplitude_ratio_is_inverse_sqrt3() {
        // Equal Rabi scales on both legs: the amplitude ratio between the
        // upper and lower components is the dipole-weight ratio 1/sqrt(3).
        let (levels, field) = rb_setup(Scheme::LinParLin, 1, 0.15);
        let ds = construct_dark_pm(&levels, &field, 1).unwrap();
        let g_lo = levels.ground_index(i(1), i(-1)).unwrap();
        let g_up = levels.ground_index(i(2), i(1)).unwrap();
        let ratio = ds.amplitudes[g_up].norm() / ds.amplitudes[g_lo].norm();
        assert_relative_eq!(ratio, 1.0 / 3.0f64.sqrt(), max_relative = 1e-12);
        assert!(ds.amplitudes[g_lo].im.abs() < 1e-15);
        assert!(ds.amplitudes[g_lo].re > 0.0);
    }

    #[test]
    fn construct_dark_pm_rejects_uncoupled_upper_leg() {
        // sigma+ light: (F = 2, m = +1) only couples upward to m_e = +2,
        // which F_e = 1 does not hold, so its leg of the (-1, +1) Lambda is
        // dark on its own and no two-level cancellation exists.
        let atom = AtomSpec::rb87();
        let levels = build_level_set(&atom, i(1), 0.1).unwrap();
        let field =
            BichromaticField::preset(Scheme::SigmaSigma, &atom, TAU * 1e5, TAU * 1e5, 0.0, 0.0)
                .unwrap();
        match construct_dark_pm(&levels, &field, 1) {
            Err(Error::DegenerateInput(_)) => {}
            other => panic!("expected DegenerateInput, got {other:?}"),
        }
        // and the preconditions are enforced
        let lev2 = build_level_set(&atom, i(2), 0.1).unwrap();
        assert!(construct_dark_pm(&lev2, &field, 1).is_err());
        assert!(construct_dark_pm(&levels, &field, 2).is_err());
    }

    #[test]
    fn clock_pair_raman_amplitude_cancels_for_lin_par_lin() {
        let atom = AtomSpec::rb87();
        let levels = build_level_set(&atom, i(1), 0.0).unwrap();
        let field = BichromaticField::preset(
            Scheme::LinParLin,
            &atom,
            TAU * 0.3e6,
            TAU * 0.3e6,
            -500.0e6,
            0.0,
        )
        .unwrap();
        let w00 = raman_amplitude(&levels, &field, i(0), i(0)).unwrap();
        assert!(w00.norm() < 1e-12);

        // the magneto-insensitive pair couples through a single pathway and
        // survives
        let w_pm = raman_amplitude(&levels, &field, i(-1), i(1)).unwrap();
        assert!(w_pm.norm() > 1.0);
    }

    #[test]
    fn clock_pair_raman_amplitude_survives_for_sigma_sigma() {
        let atom = AtomSpec::rb87();
        let levels = build_level_set(&atom, i(1), 0.0).unwrap();
        let field = BichromaticField::preset(
            Scheme::SigmaSigma,
            &atom,
            TAU * 0.3e6,
            TAU * 0.3e6,
            -500.0e6,
            0.0,
        )
        .unwrap();
        let w00 = raman_amplitude(&levels, &field, i(0), i(0)).unwrap();
        assert!(w00.norm() > 1.0);
    }

    #[test]
    fn raman_amplitude_reports_singular_detuning() {
        let atom = AtomSpec::rb87();
        let levels = build_level_set(&atom, i(1), 0.0).unwrap();
        let field = BichromaticField::preset(
            Scheme::SigmaSigma,
            &atom,
            TAU * 0.3e6,
            TAU * 0.3e6,
            0.0,
            0.0,
        )
        .unwrap();
        match raman_amplitude(&levels, &field, i(0), i(0)) {
            Err(Error::SingularDetuning(_)) => {}
            other => panic!("expected SingularDetuning, got {other:?}"),
        }
    }

    #[test]
    fn zero_field_null_space_has_dimension_five() {
        // 8 ground columns, 3 excited rows, full rank coupling: 5 dark
        // directions when every ground level is degenerate.
        let (levels, field) = rb_setup(Scheme::LinParLin, 1, 0.0);
        let report = stationary_dark_states(
            &levels,
            &field,
            DarkStateQuery::Pair {
                m_lower: i(0),
                m_upper: i(0),
            },
        )
        .unwrap();
        let c = build_coupling(&levels, &field).unwrap();
        let n_traps = trap_states(&levels, &c).len();
        assert_eq!(n_traps, 0);
        assert_eq!(report.pairs[0].dark_states.len(), 5);
    }
}
