use rayon::prelude::*;

use super::spectrum::{AxisUnit, Spectrum, SpectrumKind};
use crate::error::{Error, Result};
use crate::jsa::{AmplitudeRows, FrequencyAxis};

/// `|Psi(v1, v2_fixed)|^2` along `v1`: the signal spectrum with the idler
/// filter fixed at `nu2_fixed`. Between grid columns the amplitude is
/// interpolated linearly.
pub fn coincidence_spectrum(src: &impl AmplitudeRows, nu2_fixed: f64) -> Result<Spectrum> {
    let grid = src.grid();
    let amp = column_at(src, nu2_fixed)?;
    let values = amp.iter().map(|a| a * a).collect();
    Spectrum::new(grid.nu1.values(), values, AxisUnit::RadPerSecond, SpectrumKind::Coincidence)
}

/// Coincidence spectrum for an idler filter of finite width: `|Psi|^2`
/// integrated over `|v2 - nu2_fixed| <= window / 2` (trapezoid over the grid
/// columns inside the window). A window narrower than one grid step falls
/// back to the pure slice.
pub fn coincidence_spectrum_windowed(src: &impl AmplitudeRows, nu2_fixed: f64, window: f64) -> Result<Spectrum> {
    if !(window >= 0.0 && window.is_finite()) {
        return Err(Error::invalid(format!("idler window {window} must be nonnegative")));
    }
    let grid = src.grid();
    let ax = grid.nu2;
    let lo = ax.position(nu2_fixed - window / 2.0).ceil();
    let hi = ax.position(nu2_fixed + window / 2.0).floor();
    if lo < 0.0 || hi > (ax.len() - 1) as f64 {
        return Err(out_of_span(nu2_fixed + window.copysign(nu2_fixed) / 2.0, &ax));
    }
    if hi <= lo {
        return coincidence_spectrum(src, nu2_fixed);
    }
    let (lo, hi) = (lo as usize, hi as usize);
    let n = grid.nu1.len();
    let mut acc = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in lo..=hi {
        let w = if j == lo || j == hi { 0.5 } else { 1.0 } * ax.step();
        src.fill_column(j, &mut col);
        acc.iter_mut().zip(&col).for_each(|(a, c)| *a += w * c * c);
    }
    Spectrum::new(grid.nu1.values(), acc, AxisUnit::RadPerSecond, SpectrumKind::Coincidence)
}

/// Signal single-count spectrum `int |Psi(v1, v2)|^2 dv2` (trapezoid rule).
pub fn single_spectrum(src: &impl AmplitudeRows) -> Result<Spectrum> {
    let grid = src.grid();
    let values = marginal(grid.nu1.len(), &grid.nu2, |i, out| src.fill_row(i, out));
    Spectrum::new(grid.nu1.values(), values, AxisUnit::RadPerSecond, SpectrumKind::Single)
}

/// Idler single-count spectrum `int |Psi(v1, v2)|^2 dv1`, on the `v2` axis.
/// Identical to [`single_spectrum`] for exchange-symmetric amplitudes on a
/// square grid.
pub fn idler_spectrum(src: &impl AmplitudeRows) -> Result<Spectrum> {
    let grid = src.grid();
    let values = marginal(grid.nu2.len(), &grid.nu1, |j, out| src.fill_column(j, out));
    Spectrum::new(grid.nu2.values(), values, AxisUnit::RadPerSecond, SpectrumKind::Single)
}

fn marginal<F>(lines: usize, along: &FrequencyAxis, fill: F) -> Vec<f64>
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    (0..lines)
        .into_par_iter()
        .map_init(
            || vec![0.0; along.len()],
            |buf, i| {
                fill(i, buf);
                buf.iter()
                    .enumerate()
                    .map(|(k, a)| along.trapezoid_weight(k) * a * a)
                    .sum()
            },
        )
        .collect()
}

fn column_at(src: &impl AmplitudeRows, nu2: f64) -> Result<Vec<f64>> {
    let grid = src.grid();
    let ax = grid.nu2;
    let p = ax.position(nu2);
    if !(p >= 0.0 && p <= (ax.len() - 1) as f64) {
        return Err(out_of_span(nu2, &ax));
    }
    let j = (p.floor() as usize).min(ax.len() - 2);
    let t = p - j as f64;
    let n = grid.nu1.len();
    let mut a = vec![0.0; n];
    src.fill_column(j, &mut a);
    if t > 0.0 {
        let mut b = vec![0.0; n];
        src.fill_column(j + 1, &mut b);
        a.iter_mut().zip(&b).for_each(|(x, y)| *x += t * (y - *x));
    }
    Ok(a)
}

fn out_of_span(nu2: f64, ax: &FrequencyAxis) -> Error {
    Error::invalid(format!(
        "idler detuning {nu2:.4e} rad/s outside the grid span +-{:.4e} rad/s",
        ax.half_span()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsa::{build_grid, sample_jsa, FrequencyGrid, GridPolicy, ImplicitJsa, JointSpectralAmplitude};
    use crate::spectra::fwhm;
    use crate::units::LN_2;

    fn small_jsa() -> JointSpectralAmplitude {
        let bp = crate::jsa::tests::small();
        sample_jsa(&bp, &build_grid(&bp, &GridPolicy::spectral()).unwrap()).unwrap()
    }

    #[test]
    fn photon_exchange_symmetry_is_exact() {
        let jsa = small_jsa();
        assert_eq!(single_spectrum(&jsa).unwrap(), idler_spectrum(&jsa).unwrap());
        let bp = crate::jsa::tests::small();
        let imp = ImplicitJsa::new(bp, *jsa.grid()).unwrap();
        assert_eq!(single_spectrum(&imp).unwrap(), idler_spectrum(&imp).unwrap());
    }

    #[test]
    fn implicit_and_dense_spectra_agree() {
        let jsa = small_jsa();
        let imp = ImplicitJsa::new(crate::jsa::tests::small(), *jsa.grid()).unwrap();
        let (a, b) = (single_spectrum(&jsa).unwrap(), single_spectrum(&imp).unwrap());
        for (x, y) in a.intensity().iter().zip(b.intensity()) {
            assert!((x - y).abs() < 1e-12);
        }
        let (a, b) = (coincidence_spectrum(&jsa, 0.0).unwrap(), coincidence_spectrum(&imp, 0.0).unwrap());
        for (x, y) in a.intensity().iter().zip(b.intensity()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_marginal_is_the_factor() {
        let ax = FrequencyAxis::with_points(5.0, 201).unwrap();
        let f = |x: f64| (-(x - 0.3).powi(2)).exp();
        let jsa = JointSpectralAmplitude::from_fn(FrequencyGrid::square(ax), |a, b| f(a) * f(b)).unwrap();
        let s = single_spectrum(&jsa).unwrap();
        let peak = ax.values().iter().map(|&x| f(x) * f(x)).fold(0.0, f64::max);
        for (x, y) in ax.values().iter().zip(s.intensity()) {
            assert!((y - f(*x).powi(2) / peak).abs() < 1e-12);
        }
    }

    #[test]
    fn pump_limited_slice_is_gaussian() {
        // B = 0 and a vanishing crystal leave the pump envelope alone.
        let tau = 1e-12;
        let bp = crate::jsa::Biphoton { a: 1e-12, b: 0.0, length_m: 1e-6, tau_s: tau, omega_p: 4.7e15 };
        let expect = 4.0 * LN_2 / tau;
        let ax = FrequencyAxis::with_points(3.0 * expect, 601).unwrap();
        let jsa = JointSpectralAmplitude::from_fn(FrequencyGrid::square(ax), |a, b| bp.amplitude_raw(a, b)).unwrap();
        let w = fwhm(&coincidence_spectrum(&jsa, 0.0).unwrap()).unwrap();
        assert!((w - expect).abs() < ax.step(), "{w} {expect}");
    }

    #[test]
    fn slice_interpolates_and_bounds() {
        let jsa = small_jsa();
        let ax = jsa.grid().nu2;
        let mid = 0.5 * (ax.value(10) + ax.value(11));
        let s = coincidence_spectrum(&jsa, mid).unwrap();
        assert_eq!(s.len(), jsa.grid().nu1.len());
        assert!(coincidence_spectrum(&jsa, 1.01 * ax.half_span()).is_err());
        assert!(coincidence_spectrum(&jsa, ax.half_span()).is_ok());
        // a zero-width window is the pure slice
        assert_eq!(coincidence_spectrum_windowed(&jsa, 0.0, 0.0).unwrap(), coincidence_spectrum(&jsa, 0.0).unwrap());
        let wide = coincidence_spectrum_windowed(&jsa, 0.0, 10.0 * ax.step()).unwrap();
        assert!(fwhm(&wide).unwrap() >= fwhm(&coincidence_spectrum(&jsa, 0.0).unwrap()).unwrap());
    }
}
