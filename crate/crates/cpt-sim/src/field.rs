//! Bichromatic optical field: polarization states and the two phase-locked
//! frequency components that drive the two ground hyperfine manifolds.
//!
//! The beam propagates along the quantization axis, so each component carries
//! only sigma+ and sigma- spherical amplitudes; the pi amplitude is zero.
//! Spherical unit vectors follow e_{+-1} = -+(e_x +- i e_y)/sqrt(2), which for
//! a transverse Jones vector (E_x, E_y) gives
//! a_+ = -(E_x - i E_y)/sqrt(2) and a_- = +(E_x + i E_y)/sqrt(2).

use num_complex::Complex64;

use crate::angmom::HalfInt;
use crate::error::{Error, Result};
use crate::structure::AtomSpec;

/// Transverse polarization resolved into spherical components.
#[derive(Clone, Copy, Debug)]
pub struct Polarization {
    /// Amplitude multiplying the sigma- (q = -1) coupling.
    pub amp_minus: Complex64,
    /// Amplitude multiplying the sigma+ (q = +1) coupling.
    pub amp_plus: Complex64,
}

impl Polarization {
    /// Polarization ellipse with major axis at `axis_angle_rad` from x and
    /// ellipticity angle `eps_rad` (0 = linear, +-pi/4 = circular).
    ///
    /// The Jones vector is
    /// E = cos(eps) (cos th, sin th) + i sin(eps) (-sin th, cos th),
    /// normalized to unit intensity.
    pub fn from_ellipse(axis_angle_rad: f64, eps_rad: f64) -> Polarization {
        let (st, ct) = axis_angle_rad.sin_cos();
        let (se, ce) = eps_rad.sin_cos();
        let ex = Complex64::new(ce * ct, -se * st);
        let ey = Complex64::new(ce * st, se * ct);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        Polarization {
            amp_minus: (ex + Complex64::i() * ey) * inv_sqrt2,
            amp_plus: -(ex - Complex64::i() * ey) * inv_sqrt2,
        }
    }

    /// Linear polarization at `axis_angle_rad` from the x axis.
    pub fn linear(axis_angle_rad: f64) -> Polarization {
        Polarization::from_ellipse(axis_angle_rad, 0.0)
    }

    /// Pure circular polarization: `sign` +1 for sigma+, -1 for sigma-.
    pub fn circular(sign: i32) -> Result<Polarization> {
        match sign {
            1 => Ok(Polarization {
                amp_minus: Complex64::ZERO,
                amp_plus: -Complex64::ONE,
            }),
            -1 => Ok(Polarization {
                amp_minus: Complex64::ONE,
                amp_plus: Complex64::ZERO,
            }),
            _ => Err(Error::invalid("circular polarization sign must be +-1")),
        }
    }

    /// Spherical amplitude for polarization index q in {-1, 0, +1}.
    /// q = 0 is identically zero for a beam along the quantization axis.
    pub fn amp(&self, q: i32) -> Complex64 {
        match q {
            -1 => self.amp_minus,
            0 => Complex64::ZERO,
            1 => self.amp_plus,
            _ => Complex64::ZERO,
        }
    }

    /// Total intensity |a_-|^2 + |a_+|^2; 1 for any ellipse parameters.
    pub fn intensity(&self) -> f64 {
        self.amp_minus.norm_sqr() + self.amp_plus.norm_sqr()
    }
}

/// One frequency component of the bichromatic field.
#[derive(Clone, Copy, Debug)]
pub struct FieldComponent {
    /// Reduced Rabi frequency in rad/s; multiplies the dimensionless dipole
    /// weight of each transition.
    pub rabi_scale: f64,
    /// One-photon detuning from this component's own ground manifold to the
    /// selected excited manifold, Hz.
    pub optical_detuning_hz: f64,
    pub polarization: Polarization,
    /// Ground hyperfine manifold this component addresses.
    pub target_ground_f: HalfInt,
}

/// Relative polarization arrangement of the two components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Both components linear along the same axis.
    LinParLin,
    /// Both components circular with the same handedness.
    SigmaSigma,
    /// Components linear along orthogonal axes.
    LinPerpLin,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scheme> {
        match s {
            "lin_par_lin" => Ok(Scheme::LinParLin),
            "sigma_sigma" => Ok(Scheme::SigmaSigma),
            "lin_perp_lin" => Ok(Scheme::LinPerpLin),
            other => Err(Error::invalid(format!(
                "unknown scheme `{other}` (available: lin_par_lin, sigma_sigma, lin_perp_lin)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::LinParLin => write!(f, "lin_par_lin"),
            Scheme::SigmaSigma => write!(f, "sigma_sigma"),
            Scheme::LinPerpLin => write!(f, "lin_perp_lin"),
        }
    }
}

/// The full two-component drive.
///
/// `upper` addresses the F = I + 1/2 ground manifold, `lower` the
/// F = I - 1/2 one. The two one-photon detunings are not independent: the
/// lower component sits at
/// `lower.optical_detuning_hz = upper.optical_detuning_hz + raman_detuning_hz`,
/// where the Raman (two-photon) detuning is measured from the B = 0 ground
/// hyperfine splitting.
#[derive(Clone, Debug)]
pub struct BichromaticField {
    pub upper: FieldComponent,
    pub lower: FieldComponent,
    pub raman_detuning_hz: f64,
}

impl BichromaticField {
    pub fn new(
        upper: FieldComponent,
        lower: FieldComponent,
        raman_detuning_hz: f64,
    ) -> Result<BichromaticField> {
        if upper.target_ground_f != lower.target_ground_f + HalfInt::ONE {
            return Err(Error::invalid(
                "upper component must target F = I + 1/2 and lower F = I - 1/2",
            ));
        }
        if upper.rabi_scale < 0.0 || lower.rabi_scale < 0.0 {
            return Err(Error::invalid("Rabi frequencies must be non-negative"));
        }
        let expected = upper.optical_detuning_hz + raman_detuning_hz;
        let scale = expected.abs().max(lower.optical_detuning_hz.abs()).max(1.0);
        if (lower.optical_detuning_hz - expected).abs() > 1e-9 * scale {
            return Err(Error::invalid(
                "lower optical detuning inconsistent with upper detuning plus Raman detuning",
            ));
        }
        Ok(BichromaticField {
            upper,
            lower,
            raman_detuning_hz,
        })
    }

    /// Standard drive for a named scheme: common one-photon detuning
    /// `detuning_hz`, Raman detuning `raman_detuning_hz`, and the given Rabi
    /// scales on the two components.
    pub fn preset(
        scheme: Scheme,
        atom: &AtomSpec,
        rabi_upper: f64,
        rabi_lower: f64,
        detuning_hz: f64,
        raman_detuning_hz: f64,
    ) -> Result<BichromaticField> {
        let (pol_upper, pol_lower) = match scheme {
            Scheme::LinParLin => (Polarization::linear(0.0), Polarization::linear(0.0)),
            Scheme::SigmaSigma => (Polarization::circular(1)?, Polarization::circular(1)?),
            Scheme::LinPerpLin => (
                Polarization::linear(0.0),
                Polarization::linear(std::f64::consts::FRAC_PI_2),
            ),
        };
        BichromaticField::new(
            FieldComponent {
                rabi_scale: rabi_upper,
                optical_detuning_hz: detuning_hz,
                polarization: pol_upper,
                target_ground_f: atom.upper_ground_f(),
            },
            FieldComponent {
                rabi_scale: rabi_lower,
                optical_detuning_hz: detuning_hz + raman_detuning_hz,
                polarization: pol_lower,
                target_ground_f: atom.lower_ground_f(),
            },
            raman_detuning_hz,
        )
    }

    /// Same field with the Raman detuning replaced; the lower component's
    /// optical detuning follows.
    pub fn with_raman_detuning(&self, raman_detuning_hz: f64) -> BichromaticField {
        let mut f = self.clone();
        f.raman_detuning_hz = raman_detuning_hz;
        f.lower.optical_detuning_hz = f.upper.optical_detuning_hz + raman_detuning_hz;
        f
    }

    /// Same field with the common one-photon detuning replaced.
    pub fn with_optical_detuning(&self, detuning_hz: f64) -> BichromaticField {
        let mut f = self.clone();
        f.upper.optical_detuning_hz = detuning_hz;
        f.lower.optical_detuning_hz = detuning_hz + f.raman_detuning_hz;
        f
    }

    /// Same field as seen by an atom whose motion Doppler-shifts both optical
    /// frequencies by `shift_hz`. The Raman detuning is untouched: both
    /// components ride on the same beam, so the two-photon frequency
    /// difference is first order Doppler free.
    pub fn with_velocity_shift(&self, shift_hz: f64) -> BichromaticField {
        let mut f = self.clone();
        f.upper.optical_detuning_hz += shift_hz;
        f.lower.optical_detuning_hz += shift_hz;
        f
    }

    /// The component that addresses ground manifold `f`, if any.
    pub fn component_for(&self, f: HalfInt) -> Option<&FieldComponent> {
        if f == self.upper.target_ground_f {
            Some(&self.upper)
        } else if f == self.lower.target_ground_f {
            Some(&self.lower)
        } else {
            None
        }
    }
}
