//! Physical constants and unit conversions.
//!
//! Everything internal is SI (m, s, rad/s). Interfaces take nanometres and
//! femtoseconds; the conversions live here and nowhere else.

use std::f64::consts::PI;

/// Speed of light in vacuum (m/s), exact by definition of the metre.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub const LN_2: f64 = std::f64::consts::LN_2;

pub fn nm_to_m(nm: f64) -> f64 {
    nm * 1e-9
}

pub fn m_to_nm(m: f64) -> f64 {
    m * 1e9
}

pub fn mm_to_m(mm: f64) -> f64 {
    mm * 1e-3
}

pub fn fs_to_s(fs: f64) -> f64 {
    fs * 1e-15
}

pub fn s_to_fs(s: f64) -> f64 {
    s * 1e15
}

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda_nm`.
pub fn angular_frequency(lambda_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / nm_to_m(lambda_nm)
}

/// Vacuum wavelength (nm) of light with angular frequency `omega`.
pub fn wavelength_nm(omega: f64) -> f64 {
    m_to_nm(2.0 * PI * SPEED_OF_LIGHT / omega)
}

/// Linearised width conversion `dl = l^2 dw / (2 pi c)` around `lambda_center_nm`.
pub fn width_to_wavelength(delta_omega: f64, lambda_center_nm: f64) -> f64 {
    let l = nm_to_m(lambda_center_nm);
    m_to_nm(l * l * delta_omega / (2.0 * PI * SPEED_OF_LIGHT))
}

/// Inverse of [`width_to_wavelength`].
pub fn width_to_angular(delta_lambda_nm: f64, lambda_center_nm: f64) -> f64 {
    let l = nm_to_m(lambda_center_nm);
    2.0 * PI * SPEED_OF_LIGHT * nm_to_m(delta_lambda_nm) / (l * l)
}

/// FWHM of the intensity spectrum of a transform-limited Gaussian pulse
/// whose intensity FWHM is `tau` (s): `dw * tau = 4 ln 2`.
pub fn transform_limited_bandwidth(tau: f64) -> f64 {
    4.0 * LN_2 / tau
}
