//! Hyperfine-Zeeman level structure of alkali atoms with a J = 1/2 ground
//! state and a J = 1/2 excited state (D1 line).
//!
//! Ground-manifold energies come from the exact Breit-Rabi diagonalization of
//! the hyperfine-plus-Zeeman Hamiltonian; excited sublevels use the linear
//! Zeeman shift on top of their hyperfine offset. All energies are in Hz and
//! referenced to the B = 0 centroid of their own fine-structure manifold.

use crate::angmom::HalfInt;
use crate::error::{Error, Result};

/// Bohr magneton over Planck's constant, in Hz per gauss.
pub const BOHR_MAGNETON_HZ_PER_G: f64 = 1.399_625e6;

pub const TAU: f64 = std::f64::consts::TAU;

/// Static parameters of one alkali species on its D1 line.
///
/// Every value can be overridden through the CLI configuration layer; the
/// presets below provide the defaults.
#[derive(Clone, Debug)]
pub struct AtomSpec {
    pub name: String,
    pub nuclear_spin: HalfInt,
    pub g_j_ground: f64,
    pub g_j_excited: f64,
    pub g_i: f64,
    /// Ground-state hyperfine splitting, Hz.
    pub ground_hfs_hz: f64,
    /// Excited-state hyperfine splitting, Hz.
    pub excited_hfs_hz: f64,
    /// Natural linewidth of the excited state, rad/s.
    pub natural_linewidth: f64,
    /// Doppler width (FWHM) of the optical transition, Hz.
    pub doppler_fwhm_hz: f64,
}

impl AtomSpec {
    /// 87Rb D1 preset.
    ///
    /// The electronic g-factors are the idealized values 2 and 2/3, which
    /// make the ground Landé factors exactly +-1/2 at g_i = 0. The nuclear
    /// term is calibrated so the magneto-insensitive resonance pair
    /// (-1)-(+1) / (+1)-(-1) splits at 2.8 kHz/G; substitute the
    /// spectroscopic value -9.951414e-4 through the configuration layer if
    /// the literature nuclear moment is wanted instead.
    pub fn rb87() -> AtomSpec {
        AtomSpec {
            name: "rb87".to_owned(),
            nuclear_spin: HalfInt::from_twice(3),
            g_j_ground: 2.0,
            g_j_excited: 2.0 / 3.0,
            g_i: -5.0013397e-4,
            ground_hfs_hz: 6.834_682_610_904_290e9,
            excited_hfs_hz: 812.0e6,
            natural_linewidth: TAU * 5.75e6,
            doppler_fwhm_hz: 400.0e6,
        }
    }

    /// 133Cs D1 preset, same idealized electronic g-factors.
    pub fn cs133() -> AtomSpec {
        AtomSpec {
            name: "cs133".to_owned(),
            nuclear_spin: HalfInt::from_twice(7),
            g_j_ground: 2.0,
            g_j_excited: 2.0 / 3.0,
            g_i: -3.9885395e-4,
            ground_hfs_hz: 9.192_631_770e9,
            excited_hfs_hz: 1.16768e9,
            natural_linewidth: TAU * 4.575e6,
            doppler_fwhm_hz: 375.0e6,
        }
    }

    pub fn preset(name: &str) -> Result<AtomSpec> {
        match name {
            "rb87" => Ok(AtomSpec::rb87()),
            "cs133" => Ok(AtomSpec::cs133()),
            other => Err(Error::invalid(format!(
                "unknown atom preset `{other}` (available: rb87, cs133)"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nuclear_spin.twice() <= 0 {
            return Err(Error::invalid(
                "nuclear spin must be positive for a hyperfine-split alkali",
            ));
        }
        if !(self.ground_hfs_hz > 0.0) || !(self.excited_hfs_hz > 0.0) {
            return Err(Error::invalid("hyperfine splittings must be positive"));
        }
        if !(self.natural_linewidth > 0.0) {
            return Err(Error::invalid("natural linewidth must be positive"));
        }
        if self.doppler_fwhm_hz < 0.0 {
            return Err(Error::invalid("Doppler width must be non-negative"));
        }
        Ok(())
    }

    /// F of the lower ground hyperfine manifold, I - 1/2.
    pub fn lower_ground_f(&self) -> HalfInt {
        self.nuclear_spin - HalfInt::HALF
    }

    /// F of the upper ground hyperfine manifold, I + 1/2.
    pub fn upper_ground_f(&self) -> HalfInt {
        self.nuclear_spin + HalfInt::HALF
    }

    /// Valid excited-state hyperfine numbers for the D1 line, (I-1/2, I+1/2).
    pub fn excited_f_range(&self) -> (HalfInt, HalfInt) {
        (
            self.nuclear_spin - HalfInt::HALF,
            self.nuclear_spin + HalfInt::HALF,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Manifold {
    Ground,
    Excited,
}

impl std::fmt::Display for Manifold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Manifold::Ground => write!(f, "ground"),
            Manifold::Excited => write!(f, "excited"),
        }
    }
}

/// Which Breit-Rabi branch a ground sublevel belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroundBranch {
    /// F = I - 1/2
    LowerF,
    /// F = I + 1/2
    UpperF,
}

/// One Zeeman sublevel. `energy_hz` is relative to the B = 0 centroid of the
/// level's own manifold (the ground centroid for ground levels; the selected
/// excited manifold carries its hyperfine offset explicitly).
#[derive(Clone, Copy, Debug)]
pub struct Level {
    pub manifold: Manifold,
    pub f: HalfInt,
    pub m: HalfInt,
    pub energy_hz: f64,
}

/// The working basis: both ground hyperfine manifolds plus one selected
/// excited hyperfine manifold, at a fixed magnetic field.
///
/// Ground levels are ordered lower F first, then by increasing m; excited
/// levels by increasing m. That ordering fixes every matrix index downstream.
#[derive(Clone, Debug)]
pub struct LevelSet {
    pub atom: AtomSpec,
    pub b_gauss: f64,
    pub excited_f: HalfInt,
    pub ground: Vec<Level>,
    pub excited: Vec<Level>,
}

impl LevelSet {
    pub fn n_ground(&self) -> usize {
        self.ground.len()
    }

    pub fn n_excited(&self) -> usize {
        self.excited.len()
    }

    /// Total dimension of the one-atom Hilbert space.
    pub fn dim(&self) -> usize {
        self.ground.len() + self.excited.len()
    }

    pub fn ground_index(&self, f: HalfInt, m: HalfInt) -> Option<usize> {
        self.ground
            .iter()
            .position(|lvl| lvl.f == f && lvl.m == m)
    }

    pub fn excited_index(&self, m: HalfInt) -> Option<usize> {
        self.excited.iter().position(|lvl| lvl.m == m)
    }

    /// Zeeman part of a ground level's energy: E(B) - E(0), Hz.
    pub fn ground_zeeman_hz(&self, idx: usize) -> f64 {
        let lvl = &self.ground[idx];
        let branch = if lvl.f == self.atom.upper_ground_f() {
            GroundBranch::UpperF
        } else {
            GroundBranch::LowerF
        };
        let at_zero = breit_rabi_energy(&self.atom, lvl.m, branch, 0.0)
            .expect("level came from build_level_set");
        lvl.energy_hz - at_zero
    }

    /// Zeeman shift of an excited sublevel, Hz.
    pub fn excited_zeeman_hz(&self, m: HalfInt) -> f64 {
        let g = lande_g(self.excited_f, Manifold::Excited, &self.atom)
            .expect("level came from build_level_set");
        g * m.to_f64() * BOHR_MAGNETON_HZ_PER_G * self.b_gauss
    }
}

/// Landé g-factor of a hyperfine level, two-term formula including the
/// nuclear contribution.
pub fn lande_g(f: HalfInt, manifold: Manifold, atom: &AtomSpec) -> Result<f64> {
    let i = atom.nuclear_spin;
    let j = HalfInt::HALF;
    if (i - j).abs() > f || f > i + j {
        return Err(Error::invalid(format!(
            "F = {f} is not a hyperfine level of I = {i}, J = {j}"
        )));
    }
    let g_j = match manifold {
        Manifold::Ground => atom.g_j_ground,
        Manifold::Excited => atom.g_j_excited,
    };
    let ff = f.to_f64() * (f.to_f64() + 1.0);
    let jj = j.to_f64() * (j.to_f64() + 1.0);
    let ii = i.to_f64() * (i.to_f64() + 1.0);
    Ok(g_j * (ff + jj - ii) / (2.0 * ff) + atom.g_i * (ff + ii - jj) / (2.0 * ff))
}

/// Exact ground-manifold energy E(F = I +- 1/2, m) at field `b_gauss`, in Hz
/// relative to the B = 0 centroid of the ground manifold.
///
/// The stretched sublevels m = +-(I + 1/2) are evaluated with their closed
/// linear form; every other sublevel uses the Breit-Rabi square root.
pub fn breit_rabi_energy(
    atom: &AtomSpec,
    m: HalfInt,
    branch: GroundBranch,
    b_gauss: f64,
) -> Result<f64> {
    if b_gauss < 0.0 {
        return Err(Error::invalid("magnetic field must be non-negative"));
    }
    let f = match branch {
        GroundBranch::LowerF => atom.lower_ground_f(),
        GroundBranch::UpperF => atom.upper_ground_f(),
    };
    if !f.is_projection(m) {
        return Err(Error::invalid(format!(
            "m = {m} is not a sublevel of F = {f}"
        )));
    }

    let delta = atom.ground_hfs_hz;
    let two_i_plus_1 = (atom.nuclear_spin.twice() + 1) as f64;
    let x = (atom.g_j_ground - atom.g_i) * BOHR_MAGNETON_HZ_PER_G * b_gauss / delta;
    let base = -delta / (2.0 * two_i_plus_1)
        + atom.g_i * BOHR_MAGNETON_HZ_PER_G * m.to_f64() * b_gauss;

    if m.abs() == atom.upper_ground_f() {
        // stretched states: the square root collapses to |1 +- x|, linear in B
        let sign = if m.twice() > 0 { 1.0 } else { -1.0 };
        return Ok(base + 0.5 * delta * (1.0 + sign * x));
    }

    let arg = 1.0 + 4.0 * m.to_f64() * x / two_i_plus_1 + x * x;
    let root = arg.sqrt();
    Ok(match branch {
        GroundBranch::UpperF => base + 0.5 * delta * root,
        GroundBranch::LowerF => base - 0.5 * delta * root,
    })
}

/// Hyperfine offset of an excited manifold relative to the excited-state
/// B = 0 centroid, Hz.
fn excited_hfs_offset(atom: &AtomSpec, f: HalfInt) -> f64 {
    let i = atom.nuclear_spin.to_f64();
    let delta = atom.excited_hfs_hz;
    if f == atom.nuclear_spin + HalfInt::HALF {
        delta * i / (2.0 * i + 1.0)
    } else {
        -delta * (i + 1.0) / (2.0 * i + 1.0)
    }
}

/// Builds the working level basis at the given field.
pub fn build_level_set(atom: &AtomSpec, excited_f: HalfInt, b_gauss: f64) -> Result<LevelSet> {
    atom.validate()?;
    let (lo, hi) = atom.excited_f_range();
    if excited_f != lo && excited_f != hi {
        return Err(Error::invalid(format!(
            "excited F = {excited_f} must be {lo} or {hi} for I = {}",
            atom.nuclear_spin
        )));
    }

    let mut ground = Vec::new();
    for (f, branch) in [
        (atom.lower_ground_f(), GroundBranch::LowerF),
        (atom.upper_ground_f(), GroundBranch::UpperF),
    ] {
        for m in f.projections() {
            ground.push(Level {
                manifold: Manifold::Ground,
                f,
                m,
                energy_hz: breit_rabi_energy(atom, m, branch, b_gauss)?,
            });
        }
    }

    let g_e = lande_g(excited_f, Manifold::Excited, atom)?;
    let offset = excited_hfs_offset(atom, excited_f);
    let excited = excited_f
        .projections()
        .map(|m| Level {
            manifold: Manifold::Excited,
            f: excited_f,
            m,
            energy_hz: offset + g_e * m.to_f64() * BOHR_MAGNETON_HZ_PER_G * b_gauss,
        })
        .collect();

    Ok(LevelSet {
        atom: atom.clone(),
        b_gauss,
        excited_f,
        ground,
        excited,
    })
}

/// Two-photon resonance frequency of the Lambda pair
/// (lower-F m_lower, upper-F m_upper):
/// E(upper F, m_upper) - E(lower F, m_lower), in Hz.
pub fn pair_resonance_frequency(
    atom: &AtomSpec,
    m_lower: HalfInt,
    m_upper: HalfInt,
    b_gauss: f64,
) -> Result<f64> {
    let up = breit_rabi_energy(atom, m_upper, GroundBranch::UpperF, b_gauss)?;
    let lo = breit_rabi_energy(atom, m_lower, GroundBranch::LowerF, b_gauss)?;
    Ok(up - lo)
}
