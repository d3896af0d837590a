//! One-dimensional spectra derived from a joint spectral amplitude, their
//! widths, instrument response and Gaussian fits of measured data.

mod extract;
mod fit;
mod response;
mod spectrum;
mod width;

pub use extract::{coincidence_spectrum, coincidence_spectrum_windowed, idler_spectrum, single_spectrum};
pub use fit::{fit_gaussian, gaussian_profile, FitModel, FitResult, FIT_MAX_ITERATIONS};
pub use response::{convolve_response, ResponseShape};
pub use spectrum::{read_spectrum_csv, AxisUnit, MeasuredSpectrum, Spectrum, SpectrumKind};
pub use width::{fwhm, fwhm_of};
pub use crate::units::{width_to_angular, width_to_wavelength};
