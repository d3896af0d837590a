use super::spectrum::Spectrum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseShape {
    Gaussian,
    Rectangular,
}

impl std::str::FromStr for ResponseShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(ResponseShape::Gaussian),
            "rectangular" => Ok(ResponseShape::Rectangular),
            _ => Err(Error::invalid(format!("unknown response shape `{s}` (gaussian | rectangular)"))),
        }
    }
}

/// Discrete unit-area kernel for a response of FWHM `width` on step `h`;
/// element `k` sits at offset `(k - half) * h`.
fn kernel(width: f64, h: f64, shape: ResponseShape) -> Vec<f64> {
    let taps: Vec<f64> = match shape {
        ResponseShape::Gaussian => {
            let sigma = width / (8.0 * std::f64::consts::LN_2).sqrt();
            let half = (6.0 * sigma / h).ceil() as i64;
            (-half..=half)
                .map(|k| (-0.5 * (k as f64 * h / sigma).powi(2)).exp())
                .collect()
        }
        ResponseShape::Rectangular => {
            // overlap of each sample cell with the box [-width/2, width/2]
            let half = (0.5 * width / h + 0.5).ceil() as i64;
            (-half..=half)
                .map(|k| {
                    let (a, b) = ((k as f64 - 0.5) * h, (k as f64 + 0.5) * h);
                    (b.min(0.5 * width) - a.max(-0.5 * width)).max(0.0)
                })
                .collect()
        }
    };
    let total: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / total).collect()
}

/// Convolves with an instrument response of full width at half maximum
/// `resolution` (axis units).
///
/// The axis is extended by the kernel half-width on both sides so no
/// intensity is lost; the result is peak-normalised again, with the
/// pre-normalisation integral preserved.
pub fn convolve_response(spectrum: &Spectrum, resolution: f64, shape: ResponseShape) -> Result<Spectrum> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::invalid(format!("resolution {resolution} must be positive")));
    }
    let h = spectrum
        .uniform_step()
        .ok_or_else(|| Error::invalid("instrument response needs a uniform axis"))?;
    let span = spectrum.axis()[spectrum.len() - 1] - spectrum.axis()[0];
    if resolution > span {
        return Err(Error::invalid(format!(
            "response width {resolution} exceeds the axis span {span}"
        )));
    }
    let k = kernel(resolution, h, shape);
    let pad = k.len() / 2;
    let n = spectrum.len();
    let mut out = vec![0.0; n + 2 * pad];
    for (i, &y) in spectrum.intensity().iter().enumerate() {
        let y = y * spectrum.scale();
        for (t, &w) in k.iter().enumerate() {
            out[i + t] += y * w;
        }
    }
    let x0 = spectrum.axis()[0];
    let axis = (0..out.len()).map(|i| x0 + (i as f64 - pad as f64) * h).collect();
    Spectrum::new(axis, out, spectrum.unit(), spectrum.kind())
}
