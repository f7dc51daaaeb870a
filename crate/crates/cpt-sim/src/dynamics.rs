//! Open-system dynamics: the Lindblad generator for the driven atom and its
//! steady state.
//!
//! Density matrices are vectorized column-major, vec(A rho B) =
//! (B^T kron A) vec(rho). The dissipator collects spontaneous emission split
//! per polarization and destination ground manifold (coherences between decay
//! paths into different hyperfine manifolds beat at the ground splitting and
//! average away), laser-linewidth dephasing of the optical coherences,
//! transit-style ground relaxation toward the unpolarized ground mixture,
//! and optional nonradiative quenching of the excited state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::angmom::dipole_weight;
use crate::coupling::RwaHamiltonian;
use crate::error::{Error, Result};
use crate::structure::LevelSet;

/// Relaxation rates, all in rad/s.
#[derive(Clone, Copy, Debug)]
pub struct RateSet {
    /// Radiative decay rate of the excited state.
    pub gamma_natural: f64,
    /// Extra decay of optical coherences from finite laser linewidth.
    pub optical_dephasing: f64,
    /// Transit relaxation toward the unpolarized ground mixture.
    pub ground_relaxation: f64,
    /// Nonradiative excited-state quenching into a uniform ground mixture.
    pub excited_quench: f64,
}

impl RateSet {
    pub fn new(
        gamma_natural: f64,
        optical_dephasing: f64,
        ground_relaxation: f64,
        excited_quench: f64,
    ) -> Result<RateSet> {
        let r = RateSet {
            gamma_natural,
            optical_dephasing,
            ground_relaxation,
            excited_quench,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_natural > 0.0) || !self.gamma_natural.is_finite() {
            return Err(Error::invalid("natural linewidth must be positive"));
        }
        for (name, v) in [
            ("optical dephasing", self.optical_dephasing),
            ("ground relaxation", self.ground_relaxation),
            ("excited quench", self.excited_quench),
        ] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::invalid(format!("{name} rate must be non-negative")));
            }
        }
        Ok(())
    }

    /// Physically suspicious but not invalid parameter choices.
    pub fn sanity_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if self.ground_relaxation >= self.gamma_natural {
            warnings.push(format!(
                "ground relaxation ({:.3e} rad/s) is at or above the natural linewidth \
                 ({:.3e} rad/s); resonances will be washed out",
                self.ground_relaxation, self.gamma_natural
            ));
        }
        if self.excited_quench > 10.0 * self.gamma_natural {
            warnings.push(format!(
                "excited quench ({:.3e} rad/s) dominates radiative decay; absorption \
                 contrast scales down accordingly",
                self.excited_quench
            ));
        }
        warnings
    }
}

/// A density matrix over the working level basis.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diagonal().sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Total population in the excited manifold; ground levels occupy the
    /// first `n_ground` basis slots.
    pub fn excited_population(&self, n_ground: usize) -> f64 {
        (n_ground..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Numerical(format!(
                "density matrix trace {tr} deviates from one"
            )));
        }
        if self.hermiticity_error() > tol {
            return Err(Error::Numerical(
                "density matrix is not Hermitian".to_owned(),
            ));
        }
        if self.min_eigenvalue() < -tol {
            return Err(Error::Numerical(format!(
                "density matrix has negative eigenvalue {:.3e}",
                self.min_eigenvalue()
            )));
        }
        Ok(())
    }
}

/// The Lindblad generator as a dense superoperator over vectorized density
/// matrices.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    pub superoperator: DMatrix<Complex64>,
    pub dim: usize,
    /// Kept for steady-state diagnostics: a vanishing ground relaxation can
    /// leave the steady state non-unique (dark subspaces and trap states).
    pub gamma_ground: f64,
}

/// Adds the dissipator of jump operator `l` to `target`:
/// conj(L) kron L - (I kron L^H L + (L^H L)^T kron I) / 2.
fn add_dissipator_of(target: &mut DMatrix<Complex64>, l: &DMatrix<Complex64>) {
    let d = l.nrows();
    let id = DMatrix::<Complex64>::identity(d, d);
    let ldl = l.adjoint() * l;
    let half = Complex64::new(0.5, 0.0);
    *target += l.map(|z| z.conj()).kronecker(l);
    *target -= (id.kronecker(&ldl) + ldl.transpose().kronecker(&id)) * half;
}

/// Dissipative part of the generator. Independent of the drive field, the
/// Raman detuning, and the magnetic field, so scans assemble it once.
pub fn dissipator(levels: &LevelSet, rates: &RateSet) -> Result<DMatrix<Complex64>> {
    rates.validate()?;
    let n_g = levels.n_ground();
    let n_e = levels.n_excited();
    let d = levels.dim();
    let mut lind = DMatrix::<Complex64>::zeros(d * d, d * d);
    let i_nuc = levels.atom.nuclear_spin;
    let j_half = crate::angmom::HalfInt::HALF;

    // Radiative decay: branching weights per excited sublevel, polarization,
    // and destination sublevel. The per-level weight sum is manifold
    // independent; normalize so each excited sublevel decays at exactly
    // gamma_natural.
    let mut weight: Vec<DMatrix<f64>> = Vec::new(); // one n_g x n_e block per q
    for q in [-1i32, 0, 1] {
        let mut w = DMatrix::<f64>::zeros(n_g, n_e);
        for (e, elvl) in levels.excited.iter().enumerate() {
            for (g, glvl) in levels.ground.iter().enumerate() {
                if glvl.m + crate::angmom::HalfInt::from_int(q) != elvl.m {
                    continue;
                }
                w[(g, e)] =
                    dipole_weight(glvl.f, glvl.m, levels.excited_f, elvl.m, q, i_nuc, j_half, j_half)?;
            }
        }
        weight.push(w);
    }
    let rate_sum = |e: usize| -> f64 {
        weight
            .iter()
            .map(|w| w.column(e).iter().map(|x| x * x).sum::<f64>())
            .sum()
    };
    let norm = rate_sum(0);
    for e in 1..n_e {
        let s = rate_sum(e);
        if (s - norm).abs() > 1e-10 * norm {
            return Err(Error::Numerical(format!(
                "branching weight sum varies across excited sublevels ({s} vs {norm})"
            )));
        }
    }
    if norm <= 0.0 {
        return Err(Error::Numerical(
            "vanishing decay branching weights".to_owned(),
        ));
    }

    let amp = (rates.gamma_natural / norm).sqrt();
    let lower_f = levels.atom.lower_ground_f();
    for w in &weight {
        // split per destination manifold: decay coherences between the two
        // hyperfine manifolds beat at the ground splitting and drop out
        for target_lower in [true, false] {
            let mut l = DMatrix::<Complex64>::zeros(d, d);
            let mut nonzero = false;
            for g in 0..n_g {
                if (levels.ground[g].f == lower_f) != target_lower {
                    continue;
                }
                for e in 0..n_e {
                    if w[(g, e)] != 0.0 {
                        l[(g, n_g + e)] = Complex64::new(amp * w[(g, e)], 0.0);
                        nonzero = true;
                    }
                }
            }
            if nonzero {
                add_dissipator_of(&mut lind, &l);
            }
        }
    }

    // Laser-linewidth dephasing: projector jump operator damps optical
    // coherences at optical_dephasing / 2 and touches nothing else.
    if rates.optical_dephasing > 0.0 {
        let mut p = DMatrix::<Complex64>::zeros(d, d);
        for e in 0..n_e {
            p[(n_g + e, n_g + e)] = Complex64::ONE;
        }
        let scale = Complex64::new(rates.optical_dephasing.sqrt(), 0.0);
        add_dissipator_of(&mut lind, &(p * scale));
    }

    // Nonradiative quenching into a uniform ground mixture.
    if rates.excited_quench > 0.0 {
        let a = (rates.excited_quench / n_g as f64).sqrt();
        for g in 0..n_g {
            for e in 0..n_e {
                let mut l = DMatrix::<Complex64>::zeros(d, d);
                l[(g, n_g + e)] = Complex64::new(a, 0.0);
                add_dissipator_of(&mut lind, &l);
            }
        }
    }

    // Transit relaxation: rho -> gamma (sigma_g Tr rho - rho), the generator
    // of exponential replacement by unpolarized ground-state atoms.
    if rates.ground_relaxation > 0.0 {
        let g_rate = Complex64::new(rates.ground_relaxation, 0.0);
        let sigma = Complex64::new(1.0 / n_g as f64, 0.0);
        for col in 0..d {
            let col_idx = col * d + col; // vec index of rho[(col, col)]
            for g in 0..n_g {
                lind[(g * d + g, col_idx)] += g_rate * sigma;
            }
        }
        for idx in 0..d * d {
            lind[(idx, idx)] -= g_rate;
        }
    }

    Ok(lind)
}

/// Coherent part of the generator, -i (I kron H - H^T kron I).
pub fn hamiltonian_superop(h: &RwaHamiltonian) -> DMatrix<Complex64> {
    let d = h.dim();
    let id = DMatrix::<Complex64>::identity(d, d);
    let minus_i = Complex64::new(0.0, -1.0);
    (id.kronecker(&h.matrix) - h.matrix.transpose().kronecker(&id)) * minus_i
}

/// Assembles the full generator from a cached dissipator and a Hamiltonian.
pub fn assemble_generator(
    dissipator: &DMatrix<Complex64>,
    h: &RwaHamiltonian,
    gamma_ground: f64,
) -> LindbladGenerator {
    LindbladGenerator {
        superoperator: dissipator + hamiltonian_superop(h),
        dim: h.dim(),
        gamma_ground,
    }
}

/// Builds the complete Lindblad generator for a level basis, drive field,
/// and rate set.
pub fn build_lindblad(
    levels: &LevelSet,
    field: &crate::field::BichromaticField,
    rates: &RateSet,
) -> Result<LindbladGenerator> {
    let diss = dissipator(levels, rates)?;
    let h = crate::coupling::rwa_hamiltonian(levels, field)?;
    Ok(assemble_generator(&diss, &h, rates.ground_relaxation))
}

/// Solves L rho = 0 with Tr rho = 1 by replacing one row of the generator
/// with the trace constraint, then polishing with one step of iterative
/// refinement. The result is hermitized, renormalized, and verified against
/// the original generator.
pub fn steady_state(generator: &LindbladGenerator) -> Result<DensityMatrix> {
    let d = generator.dim;
    let n2 = d * d;
    debug_assert_eq!(generator.superoperator.nrows(), n2);

    let mut m = generator.superoperator.clone();
    for col in 0..n2 {
        m[(0, col)] = Complex64::ZERO;
    }
    for i in 0..d {
        m[(0, i * d + i)] = Complex64::ONE;
    }
    let mut b = DVector::<Complex64>::zeros(n2);
    b[0] = Complex64::ONE;

    let lu = m.clone().lu();
    let Some(mut x) = lu.solve(&b) else {
        return Err(if generator.gamma_ground <= 0.0 {
            Error::NonUniqueSteadyState(
                "generator is singular; without ground relaxation dark or trap states \
                 make the steady state non-unique"
                    .to_owned(),
            )
        } else {
            Error::Numerical("steady-state system is numerically singular".to_owned())
        });
    };

    // one refinement step: r = b - M x, x += M \ r
    let r = &b - &m * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }

    let mut rho = DMatrix::<Complex64>::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            rho[(i, j)] = x[j * d + i];
        }
    }
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = rho.diagonal().sum();
    if tr.norm() < 1e-8 {
        return Err(Error::Numerical(
            "steady-state solution has vanishing trace".to_owned(),
        ));
    }
    let rho = rho / tr;

    // verify against the original generator
    let mut v = DVector::<Complex64>::zeros(n2);
    for j in 0..d {
        for i in 0..d {
            v[j * d + i] = rho[(i, j)];
        }
    }
    let residual = (&generator.superoperator * &v).norm();
    let scale = generator.superoperator.norm();
    if residual > 1e-10 * scale {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds tolerance ({:.3e})",
            1e-10 * scale
        )));
    }

    let dm = DensityMatrix { matrix: rho };
    dm.validate(1e-7)?;
    Ok(dm)
}

/// Photon scattering rate of the steady state, rad/s: the natural decay rate
/// times the total excited population. This is the absorption observable all
/// lineshapes report.
pub fn absorption_rate(rho: &DensityMatrix, n_ground: usize, gamma_natural: f64) -> f64 {
    gamma_natural * rho.excited_population(n_ground)
}

/// Gauss-Hermite nodes and weights for averaging over the thermal velocity
/// distribution, expressed as Doppler shifts of the optical frequency.
///
/// Returns `points` pairs (shift_hz, weight) with weights summing to one.
/// The nodes come from the Golub-Welsch eigenvalue method: the shift values
/// are sqrt(2) sigma t_i with t_i the roots of the Hermite polynomial, and
/// sigma the Gaussian standard deviation of the `fwhm_hz`-wide profile.
pub fn gauss_hermite_shifts(fwhm_hz: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    if points == 0 {
        return Err(Error::invalid("quadrature needs at least one point"));
    }
    if fwhm_hz < 0.0 {
        return Err(Error::invalid("Doppler width must be non-negative"));
    }
    if fwhm_hz == 0.0 || points == 1 {
        return Ok(vec![(0.0, 1.0)]);
    }

    let n = points;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let beta = (k as f64 / 2.0).sqrt();
        jac[(k - 1, k)] = beta;
        jac[(k, k - 1)] = beta;
    }
    let eig = jac.symmetric_eigen();

    let sigma = fwhm_hz / (8.0 * std::f64::consts::LN_2).sqrt();
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let w = eig.eigenvectors[(0, i)].powi(2); // already normalized to sum 1
            (std::f64::consts::SQRT_2 * sigma * node, w)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Weighted average of `f` over the Doppler profile.
pub fn doppler_average<F>(fwhm_hz: f64, points: usize, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let nodes = gauss_hermite_shifts(fwhm_hz, points)?;
    let mut acc = 0.0;
    for (shift, w) in nodes {
        acc += w * f(shift)?;
    }
    Ok(acc)
}
