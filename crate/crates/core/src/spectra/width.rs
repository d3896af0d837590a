use super::spectrum::Spectrum;
use crate::error::{Error, Result, Side, WidthError};

/// Full width at half maximum of a spectrum, in its axis units.
pub fn fwhm(spectrum: &Spectrum) -> Result<f64> {
    fwhm_of(spectrum.axis(), spectrum.intensity())
}

/// FWHM of samples `y` on increasing `x`.
///
/// The main lobe is the contiguous run around the global maximum staying
/// above a quarter of the peak. The width is measured between the outermost
/// half-maximum crossings inside that lobe, each located by linear
/// interpolation between the bracketing samples. Any sample outside the lobe
/// at or above half maximum makes the width ambiguous.
pub fn fwhm_of(x: &[f64], y: &[f64]) -> Result<f64> {
    let degenerate = || Error::Width(WidthError::Degenerate);
    if x.len() != y.len() || x.len() < 3 || y.iter().any(|v| !v.is_finite()) {
        return Err(degenerate());
    }
    let (peak_i, peak) = y
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    if !(peak > 0.0) {
        return Err(degenerate());
    }
    let half = 0.5 * peak;
    let floor = 0.25 * peak;

    let mut lo = peak_i;
    while lo > 0 && y[lo - 1] > floor {
        lo -= 1;
    }
    let mut hi = peak_i;
    while hi + 1 < y.len() && y[hi + 1] > floor {
        hi += 1;
    }

    let outside = y[..lo].iter().chain(&y[hi + 1..]).any(|&v| v >= half);
    if outside {
        return Err(Error::Width(WidthError::Ambiguous { crossings: crossings(x, y, half) }));
    }

    // outermost crossing on each side of the lobe
    let n = y.len();
    let left = if y[lo] >= half {
        if lo == 0 {
            return Err(Error::Width(WidthError::IncompleteSupport { side: Side::Left }));
        }
        interpolate(x, y, lo - 1, half)
    } else {
        let i = (lo..peak_i).find(|&i| y[i + 1] >= half).unwrap_or(lo);
        interpolate(x, y, i, half)
    };
    let right = if y[hi] >= half {
        if hi + 1 == n {
            return Err(Error::Width(WidthError::IncompleteSupport { side: Side::Right }));
        }
        interpolate(x, y, hi, half)
    } else {
        let i = (peak_i..hi).rev().find(|&i| y[i] >= half).unwrap_or(hi - 1);
        interpolate(x, y, i, half)
    };
    Ok(right - left)
}

/// Position where the segment `i..i+1` crosses `level`.
fn interpolate(x: &[f64], y: &[f64], i: usize, level: f64) -> f64 {
    let (y0, y1) = (y[i], y[i + 1]);
    if y1 == y0 {
        return 0.5 * (x[i] + x[i + 1]);
    }
    x[i] + (level - y0) / (y1 - y0) * (x[i + 1] - x[i])
}

fn crossings(x: &[f64], y: &[f64], level: f64) -> Vec<f64> {
    (0..y.len() - 1)
        .filter(|&i| (y[i] >= level) != (y[i + 1] >= level))
        .map(|i| interpolate(x, y, i, level))
        .collect()
}
