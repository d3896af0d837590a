//! Wave-vector derivatives `k'(w)`, `k''(w)` with `k = n(w) w / c`.

use std::f64::consts::PI;

use super::model::IndexJet;
use crate::error::{Error, Result};
use crate::units::{wavelength_nm, SPEED_OF_LIGHT};

/// Relative step (in angular frequency) for the first derivative.
pub const FIRST_DERIVATIVE_STEP: f64 = 1e-5;
/// Relative step for the second derivative. A 1e-5 step leaves round-off at
/// the 1e-6 level for `k''`, so the curvature uses a wider base step; with
/// Richardson extrapolation the truncation error is O(h^4) either way.
pub const SECOND_DERIVATIVE_STEP: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavevectorDerivatives {
    /// Inverse group velocity, s/m.
    pub k1: f64,
    /// Group-velocity dispersion, s^2/m.
    pub k2: f64,
}

impl WavevectorDerivatives {
    pub fn group_velocity(&self) -> f64 {
        1.0 / self.k1
    }
}

/// How to obtain the derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMethod {
    Analytic,
    FiniteDifference,
}

/// Something with a wavelength-dependent index: a single model, or the
/// extraordinary wave at a fixed propagation angle.
pub trait Dispersive {
    fn jet(&self, lambda_nm: f64) -> Result<IndexJet>;

    fn index(&self, lambda_nm: f64) -> Result<f64> {
        Ok(self.jet(lambda_nm)?.n)
    }
}

impl Dispersive for super::model::IndexModel {
    fn jet(&self, lambda_nm: f64) -> Result<IndexJet> {
        super::model::IndexModel::jet(self, lambda_nm)
    }
}

pub fn wavevector_derivatives(
    medium: &impl Dispersive,
    omega: f64,
    method: DerivativeMethod,
) -> Result<WavevectorDerivatives> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid(format!("angular frequency {omega} must be positive")));
    }
    match method {
        DerivativeMethod::Analytic => analytic(medium, omega),
        DerivativeMethod::FiniteDifference => finite_difference(medium, omega),
    }
}

fn analytic(medium: &impl Dispersive, omega: f64) -> Result<WavevectorDerivatives> {
    let lambda_nm = wavelength_nm(omega);
    let IndexJet { n, dn, d2n } = medium.jet(lambda_nm)?;
    let l = lambda_nm * 1e-9;
    let c = SPEED_OF_LIGHT;
    Ok(WavevectorDerivatives {
        k1: (n - l * dn) / c,
        k2: l * l * l * d2n / (2.0 * PI * c * c),
    })
}

fn finite_difference(medium: &impl Dispersive, omega: f64) -> Result<WavevectorDerivatives> {
    let k = |w: f64| -> Result<f64> { Ok(medium.index(wavelength_nm(w))? * w / SPEED_OF_LIGHT) };
    let margin = |h: f64| -> Result<()> {
        for w in [omega - h, omega + h] {
            if let Err(Error::Domain { min, max, .. }) = medium.index(wavelength_nm(w)) {
                return Err(Error::Domain {
                    what: "differentiation stencil wavelength",
                    value: wavelength_nm(w),
                    min,
                    max,
                    unit: "nm",
                });
            }
        }
        Ok(())
    };

    let h1 = FIRST_DERIVATIVE_STEP * omega;
    margin(h1)?;
    let d1 = |h: f64| -> Result<f64> { Ok((k(omega + h)? - k(omega - h)?) / (2.0 * h)) };
    let k1 = (4.0 * d1(h1 / 2.0)? - d1(h1)?) / 3.0;

    let h2 = SECOND_DERIVATIVE_STEP * omega;
    margin(h2)?;
    let k0 = k(omega)?;
    let d2 = |h: f64| -> Result<f64> { Ok((k(omega + h)? - 2.0 * k0 + k(omega - h)?) / (h * h)) };
    let k2 = (4.0 * d2(h2 / 2.0)? - d2(h2)?) / 3.0;

    Ok(WavevectorDerivatives { k1, k2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::model::{Form, IndexModel};
    use crate::units::angular_frequency;

    const C: f64 = SPEED_OF_LIGHT;

    #[test]
    fn vacuum_is_light_cone() {
        let w = angular_frequency(795.0);
        for m in [DerivativeMethod::Analytic, DerivativeMethod::FiniteDifference] {
            let d = wavevector_derivatives(&IndexModel::vacuum(), w, m).unwrap();
            let tol = if m == DerivativeMethod::Analytic { 1e-15 } else { 1e-9 };
            assert!((d.k1 * C - 1.0).abs() < tol, "{m:?} {}", d.k1 * C);
            assert!(d.k2.abs() < 1e-30, "{m:?} {}", d.k2);
        }
        let d = wavevector_derivatives(&IndexModel::vacuum(), w, DerivativeMethod::Analytic).unwrap();
        assert_eq!(d.k1, 1.0 / C);
        assert_eq!(d.k2, 0.0);
    }

    /// n = 1 + a l^2 (l in um) written in terms of w:
    /// l = 2 pi c / w, so k(w) = w/c + a (2 pi)^2 c / w * 1e12, and
    /// k' = 1/c - a (2 pi)^2 c 1e12 / w^2, k'' = 2 a (2 pi)^2 c 1e12 / w^3.
    #[test]
    fn quadratic_model_matches_hand_derivatives() {
        let alpha = 0.01;
        let m = IndexModel::new(Form::Quadratic { n0: 1.0, alpha }, (200.0, 3000.0)).unwrap();
        let g = alpha * (2.0 * PI).powi(2) * C * 1e12;
        for lambda in [400.0, 795.0, 1500.0] {
            let w = angular_frequency(lambda);
            let k1 = 1.0 / C - g / (w * w);
            let k2 = 2.0 * g / (w * w * w);
            let d = wavevector_derivatives(&m, w, DerivativeMethod::Analytic).unwrap();
            assert!(((d.k1 - k1) / k1).abs() < 1e-9, "{} {}", d.k1, k1);
            assert!(((d.k2 - k2) / k2).abs() < 1e-9, "{} {}", d.k2, k2);
        }
    }

    #[test]
    fn finite_differences_agree_with_analytic() {
        let models = [
            IndexModel::new(Form::Quadratic { n0: 1.0, alpha: 0.01 }, (200.0, 3000.0)).unwrap(),
            IndexModel::new(
                Form::Handbook { a: 3.415716, b: 0.047031, c: 0.035306, d: 0.008801 },
                (300.0, 5500.0),
            )
            .unwrap(),
            IndexModel::new(
                Form::Sellmeier(vec![(1.03961212, 0.00600069867), (0.231792344, 0.0200179144), (1.01046945, 103.560653)]),
                (300.0, 2500.0),
            )
            .unwrap(),
        ];
        for m in &models {
            for lambda in [397.5, 795.0, 1200.0] {
                let w = angular_frequency(lambda);
                let a = wavevector_derivatives(m, w, DerivativeMethod::Analytic).unwrap();
                let f = wavevector_derivatives(m, w, DerivativeMethod::FiniteDifference).unwrap();
                assert!(((a.k1 - f.k1) / a.k1).abs() < 1e-6, "k1 {lambda}: {} {}", a.k1, f.k1);
                assert!(((a.k2 - f.k2) / a.k2).abs() < 1e-6, "k2 {lambda}: {} {}", a.k2, f.k2);
            }
        }
    }

    #[test]
    fn stencil_outside_window_is_refused() {
        let m = IndexModel::new(Form::Constant(1.5), (790.0, 800.0)).unwrap();
        let w = angular_frequency(799.9);
        let err = wavevector_derivatives(&m, w, DerivativeMethod::FiniteDifference).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }), "{err}");
    }
}
