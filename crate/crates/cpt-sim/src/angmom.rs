//! Angular-momentum algebra: Wigner 3j and 6j symbols, Clebsch-Gordan
//! coefficients, and dipole transition weights between hyperfine sublevels.
//!
//! Symbols are evaluated with the Racah factorial sums carried out in exact
//! big-integer rational arithmetic; the only rounding happens in the final
//! conversion to `f64`. Phases follow the Condon-Shortley convention, and the
//! reduced electronic dipole matrix element is normalized to one, so weights
//! are dimensionless numbers of order unity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Half-integer angular momentum quantum number, stored as twice its value.
///
/// The representation is exact for every physical j and m, so equality and
/// ordering are free of floating-point hazards.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    /// Builds from twice the value: `from_twice(3)` is 3/2.
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    /// Parses a decimal like `1.5` or `2`; the doubled value must be within
    /// one part in 1e-9 of an integer.
    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        let rounded = twice.round();
        if (twice - rounded).abs() > 1e-9 || rounded.abs() > i32::MAX as f64 {
            return Err(Error::invalid(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt {
            twice: rounded as i32,
        })
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn is_negative(self) -> bool {
        self.twice < 0
    }

    pub const fn abs(self) -> Self {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    /// Number of projections, 2j + 1. Meaningful for magnitudes only.
    pub const fn multiplicity(self) -> usize {
        (self.twice + 1) as usize
    }

    /// Iterates m = -j, -j+1, ..., +j.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        (-self.twice..=self.twice)
            .step_by(2)
            .map(HalfInt::from_twice)
    }

    /// True when m is a valid projection of this magnitude: same parity and
    /// |m| <= j.
    pub fn is_projection(self, m: HalfInt) -> bool {
        (self.twice - m.twice) % 2 == 0 && m.twice.abs() <= self.twice
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

fn require_magnitude(j: HalfInt, name: &str) -> Result<()> {
    if j.is_negative() {
        return Err(Error::invalid(format!("{name} = {j} must be non-negative")));
    }
    Ok(())
}

fn require_pair(j: HalfInt, m: HalfInt, name: &str) -> Result<()> {
    require_magnitude(j, name)?;
    if (j.twice() - m.twice()) % 2 != 0 {
        return Err(Error::invalid(format!(
            "projection m = {m} has different parity than {name} = {j}"
        )));
    }
    Ok(())
}

fn factorial(n: i32) -> BigInt {
    debug_assert!(n >= 0);
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// (j1 j2 j3) must close a triangle with integer perimeter. Returns the
/// squared triangle coefficient Delta^2 as an exact rational, or None when
/// the triad is forbidden.
fn triangle_delta_sq(j1: HalfInt, j2: HalfInt, j3: HalfInt) -> Option<BigRational> {
    let a = j1.twice() + j2.twice() - j3.twice();
    let b = j1.twice() - j2.twice() + j3.twice();
    let c = -j1.twice() + j2.twice() + j3.twice();
    let p = j1.twice() + j2.twice() + j3.twice();
    if a < 0 || b < 0 || c < 0 || p % 2 != 0 {
        return None;
    }
    let num = factorial(a / 2) * factorial(b / 2) * factorial(c / 2);
    let den = factorial(p / 2 + 1);
    Some(BigRational::new(num, den))
}

/// Sign (-1)^k for an exponent given as twice its value; the exponent must be
/// an integer (even doubled value).
fn phase_from_twice(twice: i32) -> f64 {
    debug_assert!(twice % 2 == 0, "phase exponent must be an integer");
    if (twice / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Converts an exact rational to f64 through a big-float-free route that is
/// accurate for the moderate magnitudes appearing here.
fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational within f64 range")
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
///
/// Returns exactly 0.0 when the triangle rule, the projection sum rule, or a
/// projection range is violated. Malformed inputs (negative magnitude, or a
/// projection whose parity differs from its magnitude) are errors.
pub fn wigner_3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64> {
    require_pair(j1, m1, "j1")?;
    require_pair(j2, m2, "j2")?;
    require_pair(j3, m3, "j3")?;

    if m1.twice() + m2.twice() + m3.twice() != 0 {
        return Ok(0.0);
    }
    if m1.abs() > j1 || m2.abs() > j2 || m3.abs() > j3 {
        return Ok(0.0);
    }
    let delta_sq = match triangle_delta_sq(j1, j2, j3) {
        Some(d) => d,
        None => return Ok(0.0),
    };

    // Racah sum limits, all guaranteed integers at this point.
    let t123 = (j1.twice() + j2.twice() - j3.twice()) / 2;
    let t1m = (j1.twice() - m1.twice()) / 2;
    let t2p = (j2.twice() + m2.twice()) / 2;
    let u1 = (j3.twice() - j2.twice() + m1.twice()) / 2;
    let u2 = (j3.twice() - j1.twice() - m2.twice()) / 2;

    let k_min = 0.max(-u1).max(-u2);
    let k_max = t123.min(t1m).min(t2p);

    let mut series = BigRational::zero();
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(t123 - k)
            * factorial(t1m - k)
            * factorial(t2p - k)
            * factorial(u1 + k)
            * factorial(u2 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            series += term;
        } else {
            series -= term;
        }
    }
    if series.is_zero() {
        return Ok(0.0);
    }

    let mut radicand = delta_sq;
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        radicand *= BigRational::from(
            factorial((j.twice() + m.twice()) / 2) * factorial((j.twice() - m.twice()) / 2),
        );
    }

    let phase = phase_from_twice(j1.twice() - j2.twice() - m3.twice());
    Ok(phase * rational_to_f64(&series) * rational_to_f64(&radicand).sqrt())
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
///
/// Returns exactly 0.0 when any of the four triads (j1 j2 j3), (j1 j5 j6),
/// (j4 j2 j6), (j4 j5 j3) violates the triangle rule.
pub fn wigner_6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> Result<f64> {
    for (j, name) in [
        (j1, "j1"),
        (j2, "j2"),
        (j3, "j3"),
        (j4, "j4"),
        (j5, "j5"),
        (j6, "j6"),
    ] {
        require_magnitude(j, name)?;
    }

    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    let mut radicand = BigRational::one();
    for (a, b, c) in triads {
        match triangle_delta_sq(a, b, c) {
            Some(d) => radicand *= d,
            None => return Ok(0.0),
        }
    }

    // Triad sums a_i and opposite-pair sums b_i, integers after the triangle
    // checks above.
    let a: Vec<i32> = triads
        .iter()
        .map(|(x, y, z)| (x.twice() + y.twice() + z.twice()) / 2)
        .collect();
    let b1 = (j1.twice() + j2.twice() + j4.twice() + j5.twice()) / 2;
    let b2 = (j1.twice() + j3.twice() + j4.twice() + j6.twice()) / 2;
    let b3 = (j2.twice() + j3.twice() + j5.twice() + j6.twice()) / 2;

    let k_min = *a.iter().max().unwrap();
    let k_max = b1.min(b2).min(b3);

    let mut series = BigRational::zero();
    for k in k_min..=k_max {
        let num = factorial(k + 1);
        let den = a.iter().map(|ai| factorial(k - ai)).product::<BigInt>()
            * factorial(b1 - k)
            * factorial(b2 - k)
            * factorial(b3 - k);
        let term = BigRational::new(num, den);
        if k % 2 == 0 {
            series += term;
        } else {
            series -= term;
        }
    }
    if series.is_zero() {
        return Ok(0.0);
    }

    Ok(rational_to_f64(&series) * rational_to_f64(&radicand).sqrt())
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m>.
///
/// Condon-Shortley phases; returns exactly 0.0 whenever m != m1 + m2 or the
/// triangle rule fails.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> Result<f64> {
    require_pair(j1, m1, "j1")?;
    require_pair(j2, m2, "j2")?;
    require_pair(j, m, "j")?;
    if m1.twice() + m2.twice() != m.twice() {
        return Ok(0.0);
    }
    let w = wigner_3j(j1, j2, j, m1, m2, -m)?;
    if w == 0.0 {
        return Ok(0.0);
    }
    let phase = phase_from_twice(j1.twice() - j2.twice() + m.twice());
    Ok(phase * ((j.twice() + 1) as f64).sqrt() * w)
}

/// Dipole transition weight <Fe me| d_q |Fg mg> for a hyperfine transition in
/// an alkali atom, with the reduced electronic matrix element <Je||d||Jg> set
/// to one.
///
/// Combines the Wigner-Eckart theorem with the standard hyperfine reduction:
///
/// weight = <Fg mg; 1 q | Fe me> (-1)^(Je+I+Fg+1) sqrt(2Fg+1) {Je Fe I; Fg Jg 1}
///
/// Out-of-range projections give 0.0; q must be -1, 0 or +1.
pub fn dipole_weight(
    f_g: HalfInt,
    m_g: HalfInt,
    f_e: HalfInt,
    m_e: HalfInt,
    q: i32,
    nuclear_spin: HalfInt,
    j_g: HalfInt,
    j_e: HalfInt,
) -> Result<f64> {
    if !(-1..=1).contains(&q) {
        return Err(Error::invalid(format!(
            "polarization index q = {q} must be -1, 0 or +1"
        )));
    }
    for (f, j, name) in [(f_g, j_g, "Fg"), (f_e, j_e, "Fe")] {
        require_magnitude(f, name)?;
        if (nuclear_spin - j).abs() > f || f > nuclear_spin + j {
            return Err(Error::invalid(format!(
                "{name} = {f} incompatible with I = {nuclear_spin}, J = {j}"
            )));
        }
    }
    require_pair(f_g, m_g, "Fg")?;
    require_pair(f_e, m_e, "Fe")?;
    if !f_g.is_projection(m_g) || !f_e.is_projection(m_e) {
        return Ok(0.0);
    }
    if m_e.twice() != m_g.twice() + 2 * q {
        return Ok(0.0);
    }

    let cg = clebsch_gordan(f_g, m_g, HalfInt::ONE, HalfInt::from_int(q), f_e, m_e)?;
    if cg == 0.0 {
        return Ok(0.0);
    }
    let six = wigner_6j(j_e, f_e, nuclear_spin, f_g, j_g, HalfInt::ONE)?;
    let phase = phase_from_twice(j_e.twice() + nuclear_spin.twice() + f_g.twice() + 2);
    Ok(phase * ((f_g.twice() + 1) as f64).sqrt() * cg * six)
}
