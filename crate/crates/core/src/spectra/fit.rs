use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::units::LN_2;

/// Iteration bound of the Levenberg-Marquardt loop.
pub const FIT_MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `amplitude * exp(-4 ln2 (x - center)^2 / fwhm^2) + baseline`
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: FitModel,
    pub center: f64,
    pub sigma_center: f64,
    pub fwhm: f64,
    pub sigma_fwhm: f64,
    pub amplitude: f64,
    pub sigma_amplitude: f64,
    pub baseline: f64,
    pub sigma_baseline: f64,
    /// Sum of (weighted) squared residuals at the optimum.
    pub chi2: f64,
    pub dof: usize,
    /// Root-mean-square of the unweighted residuals.
    pub rms_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    /// Width with a Gaussian instrument response of FWHM `resolution`
    /// removed in quadrature, with its propagated uncertainty. `None` when
    /// the fitted width does not exceed the resolution.
    pub fn deconvolved_fwhm(&self, resolution: f64) -> Option<(f64, f64)> {
        let d2 = self.fwhm * self.fwhm - resolution * resolution;
        (d2 > 0.0).then(|| {
            let d = d2.sqrt();
            (d, self.fwhm / d * self.sigma_fwhm)
        })
    }
}

pub fn gaussian_profile(x: f64, amplitude: f64, center: f64, fwhm: f64, baseline: f64) -> f64 {
    amplitude * (-4.0 * LN_2 * (x - center).powi(2) / (fwhm * fwhm)).exp() + baseline
}

/// Model value and gradient with respect to `(amplitude, center, fwhm,
/// baseline)`.
fn model(x: f64, p: &Vector4<f64>) -> (f64, Vector4<f64>) {
    let (a, c, w) = (p[0], p[1], p[2]);
    let u = (x - c) / w;
    let e = (-4.0 * LN_2 * u * u).exp();
    let da = e;
    let dc = a * e * 8.0 * LN_2 * u / w;
    let dw = a * e * 8.0 * LN_2 * u * u / w;
    (a * e + p[3], Vector4::new(da, dc, dw, 1.0))
}

/// Least-squares Gaussian-plus-baseline fit (Levenberg-Marquardt).
///
/// Uncertainties are 1-sigma from the curvature of the objective at the
/// optimum: `(J^T W J)^-1` when per-point `sigma` is given, otherwise
/// `s^2 (J^T J)^-1` with `s^2 = chi2 / (n - 4)`.
pub fn fit_gaussian(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> Result<FitResult> {
    let n = x.len();
    if y.len() != n || sigma.is_some_and(|s| s.len() != n) {
        return Err(Error::invalid("fit inputs must have equal lengths"));
    }
    if n < 5 {
        return Err(Error::invalid(format!("fit needs at least 5 points, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("fit data must be finite"));
    }
    let weights: Vec<f64> = match sigma {
        Some(s) => {
            if s.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::invalid("sigma values must be positive"));
            }
            s.iter().map(|v| 1.0 / (v * v)).collect()
        }
        None => vec![1.0; n],
    };
    let (ymin, ymax) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (xmin, xmax) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if ymax - ymin <= 0.0 || xmax - xmin <= 0.0 {
        return Err(Error::invalid("degenerate fit data (zero variance)"));
    }

    let mut p = initial_guess(x, y, ymin, ymax, xmax - xmin);
    let chi2_of = |p: &Vector4<f64>| -> f64 {
        x.iter()
            .zip(y)
            .zip(&weights)
            .map(|((&xi, &yi), &wi)| wi * (yi - model(xi, p).0).powi(2))
            .sum()
    };
    let normal = |p: &Vector4<f64>| -> (Matrix4<f64>, Vector4<f64>) {
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for ((&xi, &yi), &wi) in x.iter().zip(y).zip(&weights) {
            let (f, g) = model(xi, p);
            jtj += wi * g * g.transpose();
            jtr += wi * (yi - f) * g;
        }
        (jtj, jtr)
    };

    let mut chi2 = chi2_of(&p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < FIT_MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = normal(&p);
        if chi2 == 0.0 {
            converged = true;
            break;
        }
        let mut damped = jtj;
        for i in 0..4 {
            damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
        }
        let Some(step) = damped.cholesky().map(|c| c.solve(&jtr)) else {
            lambda *= 10.0;
            continue;
        };
        let trial = p + step;
        let trial_chi2 = chi2_of(&trial);
        if trial_chi2.is_finite() && trial_chi2 <= chi2 {
            let small = (0..4).all(|i| step[i].abs() <= 1e-12 * (p[i].abs() + scale_floor(i, &p)));
            let flat = chi2 - trial_chi2 <= 1e-15 * chi2;
            p = trial;
            chi2 = trial_chi2;
            lambda = (lambda / 10.0).max(1e-15);
            if small || flat {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e15 {
                // no damped step decreases the objective: a minimum to
                // working precision
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            what: "gaussian fit",
            iterations,
            best: p.iter().copied().collect(),
        });
    }

    let (jtj, _) = normal(&p);
    let dof = n - 4;
    let cov = jtj
        .try_inverse()
        .ok_or_else(|| Error::Numerical("fit curvature matrix is singular".into()))?;
    let cov = if sigma.is_some() { cov } else { cov * (chi2 / dof as f64) };
    let sd = |i: usize| cov[(i, i)].max(0.0).sqrt();
    let rms = (x.iter().zip(y).map(|(&xi, &yi)| (yi - model(xi, &p).0).powi(2)).sum::<f64>() / n as f64).sqrt();
    Ok(FitResult {
        model: FitModel::Gaussian,
        amplitude: p[0],
        sigma_amplitude: sd(0),
        center: p[1],
        sigma_center: sd(1),
        fwhm: p[2].abs(),
        sigma_fwhm: sd(2),
        baseline: p[3],
        sigma_baseline: sd(3),
        chi2,
        dof,
        rms_residual: rms,
        iterations,
        converged,
    })
}

fn scale_floor(i: usize, p: &Vector4<f64>) -> f64 {
    // absolute floors for parameters that may sit at zero
    match i {
        1 => p[2].abs(),
        3 => p[0].abs(),
        _ => 0.0,
    }
}

fn initial_guess(x: &[f64], y: &[f64], ymin: f64, ymax: f64, span: f64) -> Vector4<f64> {
    let imax = y.iter().enumerate().fold(0, |b, (i, &v)| if v > y[b] { i } else { b });
    let half = ymin + 0.5 * (ymax - ymin);
    let above: Vec<f64> = x.iter().zip(y).filter(|(_, &v)| v >= half).map(|(&xi, _)| xi).collect();
    let lo = above.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = above.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut w = hi - lo;
    if !(w > 0.0) {
        w = span / (x.len() as f64);
    }
    Vector4::new(ymax - ymin, x[imax], w, ymin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn grid(center: f64, fwhm: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| center - 2.0 * fwhm + 4.0 * fwhm * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn noiseless_recovery_is_exact() {
        let x = grid(795.0, 0.29, 41);
        let y: Vec<f64> = x.iter().map(|&v| gaussian_profile(v, 1.0, 795.0, 0.29, 0.0)).collect();
        let f = fit_gaussian(&x, &y, None).unwrap();
        assert!(f.converged);
        assert!((f.center - 795.0).abs() < 1e-9, "{}", f.center);
        assert!((f.fwhm - 0.29).abs() < 1e-9, "{}", f.fwhm);
        assert!((f.amplitude - 1.0).abs() < 1e-9);
        assert!(f.baseline.abs() < 1e-9);
    }

    #[test]
    fn recovers_baseline_and_offset_peak() {
        let x = grid(-3.0, 2.0, 61);
        let y: Vec<f64> = x.iter().map(|&v| gaussian_profile(v, 5.0, -2.5, 1.7, 0.3)).collect();
        let f = fit_gaussian(&x, &y, None).unwrap();
        assert!((f.center + 2.5).abs() < 1e-9 && (f.fwhm - 1.7).abs() < 1e-9 && (f.baseline - 0.3).abs() < 1e-9);
    }

    #[test]
    fn monte_carlo_coverage() {
        let truth = 0.29;
        let x = grid(795.0, truth, 41);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let mut hits = 0;
        for seed in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y: Vec<f64> = x
                .iter()
                .map(|&v| gaussian_profile(v, 1.0, 795.0, truth, 0.0) + noise.sample(&mut rng))
                .collect();
            let f = fit_gaussian(&x, &y, None).unwrap();
            if (f.fwhm - truth).abs() <= 2.0 * f.sigma_fwhm {
                hits += 1;
            }
        }
        assert!(hits >= 180, "{hits}/200");
    }

    #[test]
    fn weighted_fit_uses_sigma() {
        let x = grid(0.0, 1.0, 21);
        let y: Vec<f64> = x.iter().map(|&v| gaussian_profile(v, 1.0, 0.0, 1.0, 0.0)).collect();
        let s1 = vec![0.01; x.len()];
        let s2 = vec![0.02; x.len()];
        let a = fit_gaussian(&x, &y, Some(&s1)).unwrap();
        let b = fit_gaussian(&x, &y, Some(&s2)).unwrap();
        assert!((b.sigma_fwhm / a.sigma_fwhm - 2.0).abs() < 1e-6);
    }

    #[test]
    fn deconvolution() {
        let f = FitResult {
            model: FitModel::Gaussian,
            center: 0.0,
            sigma_center: 0.0,
            fwhm: 0.5,
            sigma_fwhm: 0.05,
            amplitude: 1.0,
            sigma_amplitude: 0.0,
            baseline: 0.0,
            sigma_baseline: 0.0,
            chi2: 0.0,
            dof: 1,
            rms_residual: 0.0,
            iterations: 1,
            converged: true,
        };
        let (d, s) = f.deconvolved_fwhm(0.3).unwrap();
        assert!((d - 0.4).abs() < 1e-12 && (s - 0.0625).abs() < 1e-12);
        assert!(f.deconvolved_fwhm(0.6).is_none());
    }

    #[test]
    fn rejects_degenerate_data() {
        let x: Vec<f64> = (0..6).map(f64::from).collect();
        assert!(fit_gaussian(&x, &[1.0; 6], None).is_err());
        assert!(fit_gaussian(&x[..4], &[0.0, 1.0, 1.0, 0.0], None).is_err());
    }
}
