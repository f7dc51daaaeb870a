//! Summary metrics of a resonance lineshape: background, dip amplitude,
//! width, contrast, and the positions of resolved dips.
//!
//! All routines treat the resonance as a *dip* below a flat background, the
//! natural shape of a transparency resonance in an absorption scan.

use crate::error::{Error, Result};

/// Scalar summary of one lineshape.
#[derive(Clone, Debug)]
pub struct ResonanceMetrics {
    /// Baseline absorption, the median of the outer ten percent of samples.
    pub background: f64,
    /// Depth of the deepest dip below the background.
    pub amplitude: f64,
    /// Full width at half maximum of the deepest dip, Hz; NaN when a half
    /// crossing falls outside the scanned window.
    pub fwhm_hz: f64,
    /// amplitude / background.
    pub contrast: f64,
    /// amplitude / fwhm, the figure of merit of a clock resonance.
    pub amp_to_width: f64,
    /// Parabola-refined position of the deepest dip, Hz.
    pub center_hz: f64,
    /// Number of resolved dips (prominence at least 5% of the amplitude).
    pub n_peaks: usize,
    /// True when the scan is flat to within numerical noise.
    pub no_resonance: bool,
    /// Refined positions of all resolved dips, ascending.
    pub peak_positions_hz: Vec<f64>,
    /// Prominence of each entry of `peak_positions_hz`.
    pub peak_prominences: Vec<f64>,
}

impl ResonanceMetrics {
    /// Distance between the two most prominent dips, if at least two exist.
    pub fn peak_separation_hz(&self) -> Option<f64> {
        if self.n_peaks < 2 {
            return None;
        }
        let mut order: Vec<usize> = (0..self.n_peaks).collect();
        order.sort_by(|&a, &b| {
            self.peak_prominences[b].total_cmp(&self.peak_prominences[a])
        });
        Some((self.peak_positions_hz[order[0]] - self.peak_positions_hz[order[1]]).abs())
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Parabolic vertex through three points; falls back to the middle abscissa
/// for degenerate (collinear or flat) triples.
fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d21 = (y[1] - y[0]) / (x[1] - x[0]);
    let d32 = (y[2] - y[1]) / (x[2] - x[1]);
    let curv = (d32 - d21) / (x[2] - x[0]);
    if curv == 0.0 || !curv.is_finite() {
        return x[1];
    }
    0.5 * (x[0] + x[1] - d21 / curv)
}

/// Prominence of the depth maximum at `i`: its height above the higher of
/// the two saddles separating it from taller terrain (or from the window
/// edges).
fn prominence(depth: &[f64], i: usize) -> f64 {
    let mut left_saddle = depth[i];
    for j in (0..i).rev() {
        left_saddle = left_saddle.min(depth[j]);
        if depth[j] > depth[i] {
            break;
        }
    }
    let mut right_saddle = depth[i];
    for &d in depth.iter().skip(i + 1) {
        right_saddle = right_saddle.min(d);
        if d > depth[i] {
            break;
        }
    }
    depth[i] - left_saddle.max(right_saddle)
}

/// Extracts [`ResonanceMetrics`] from a sampled lineshape.
///
/// `delta_hz` must be strictly increasing and hold at least 20 samples so
/// the outer-margin background estimate is meaningful.
pub fn extract_metrics(delta_hz: &[f64], absorption: &[f64]) -> Result<ResonanceMetrics> {
    let n = delta_hz.len();
    if n != absorption.len() {
        return Err(Error::invalid("detuning and absorption lengths differ"));
    }
    if n < 20 {
        return Err(Error::invalid(
            "need at least 20 samples to separate background from resonance",
        ));
    }
    for w in delta_hz.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::invalid("detuning grid must be strictly increasing"));
        }
    }
    if absorption.iter().any(|a| !a.is_finite()) {
        return Err(Error::invalid("absorption samples must be finite"));
    }

    let margin = (n / 20).max(1);
    let mut outer: Vec<f64> = absorption[..margin]
        .iter()
        .chain(&absorption[n - margin..])
        .cloned()
        .collect();
    let background = median(&mut outer);

    let depth: Vec<f64> = absorption.iter().map(|&a| background - a).collect();
    let (i_max, &d_max) = depth
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("n >= 20");
    let amplitude = d_max;

    let noise_floor = 1e-12 * background.abs().max(f64::MIN_POSITIVE);
    if amplitude <= noise_floor {
        return Ok(ResonanceMetrics {
            background,
            amplitude: amplitude.max(0.0),
            fwhm_hz: f64::NAN,
            contrast: 0.0,
            amp_to_width: 0.0,
            center_hz: f64::NAN,
            n_peaks: 0,
            no_resonance: true,
            peak_positions_hz: Vec::new(),
            peak_prominences: Vec::new(),
        });
    }

    // resolved dips: interior local maxima of depth with enough prominence
    let mut peak_positions = Vec::new();
    let mut peak_prominences = Vec::new();
    for i in 1..n - 1 {
        if depth[i] < depth[i - 1] || depth[i] < depth[i + 1] {
            continue;
        }
        // plateau handling: take the leftmost sample of a flat top
        if depth[i] == depth[i - 1] {
            continue;
        }
        let prom = prominence(&depth, i);
        if prom >= 0.05 * amplitude {
            peak_positions.push(parabolic_vertex(
                [delta_hz[i - 1], delta_hz[i], delta_hz[i + 1]],
                [depth[i - 1], depth[i], depth[i + 1]],
            ));
            peak_prominences.push(prom);
        }
    }

    let center_hz = if i_max > 0 && i_max < n - 1 {
        parabolic_vertex(
            [delta_hz[i_max - 1], delta_hz[i_max], delta_hz[i_max + 1]],
            [depth[i_max - 1], depth[i_max], depth[i_max + 1]],
        )
    } else {
        delta_hz[i_max]
    };

    // FWHM of the deepest dip: walk outward to the half-depth crossings
    let half = 0.5 * amplitude;
    let mut left = f64::NAN;
    for j in (0..i_max).rev() {
        if depth[j] <= half {
            let t = (depth[j + 1] - half) / (depth[j + 1] - depth[j]);
            left = delta_hz[j + 1] + t * (delta_hz[j] - delta_hz[j + 1]);
            break;
        }
    }
    let mut right = f64::NAN;
    for j in i_max + 1..n {
        if depth[j] <= half {
            let t = (depth[j - 1] - half) / (depth[j - 1] - depth[j]);
            right = delta_hz[j - 1] + t * (delta_hz[j] - delta_hz[j - 1]);
            break;
        }
    }
    let fwhm_hz = right - left; // NaN when either side never crosses

    let contrast = if background > 0.0 {
        amplitude / background
    } else {
        f64::NAN
    };
    let amp_to_width = amplitude / fwhm_hz;

    Ok(ResonanceMetrics {
        background,
        amplitude,
        fwhm_hz,
        contrast,
        amp_to_width,
        center_hz,
        n_peaks: peak_positions.len(),
        no_resonance: false,
        peak_positions_hz: peak_positions,
        peak_prominences,
    })
}
