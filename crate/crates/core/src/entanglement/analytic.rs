use std::fmt;

use crate::dispersion::{control_parameter, PhaseMatchConstants, PumpSpec, SHORT_PULSE_ETA};
use crate::error::{Error, Result};
use crate::jsa::short_pulse_widths;
use crate::spectra::AxisUnit;
use crate::units::width_to_wavelength;

/// The short-pulse width formulas are refused at and beyond this `eta`.
pub const SHORT_PULSE_VALIDITY_ETA: f64 = 1.0;

/// Short-pulse coincidence and single-count widths (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortPulseWidths {
    pub delta_omega_c: f64,
    pub delta_omega_s: f64,
    pub eta: f64,
}

impl ShortPulseWidths {
    pub fn r(&self) -> f64 {
        self.delta_omega_s / self.delta_omega_c
    }

    /// `(delta_lambda_c, delta_lambda_s)` in nm around `center_nm`.
    pub fn in_wavelength(&self, center_nm: f64) -> (f64, f64) {
        (
            width_to_wavelength(self.delta_omega_c, center_nm),
            width_to_wavelength(self.delta_omega_s, center_nm),
        )
    }
}

/// `delta_omega_c = 5.56 c / (A L)`, `delta_omega_s = sqrt(2 A ln2 w_p / (B tau))`.
///
/// Valid for short pulses only: refused when `eta >= 1`, with a warning for
/// `0.2 < eta < 1`.
pub fn analytic_widths_short_pulse(
    constants: &PhaseMatchConstants,
    length_m: f64,
    pump: &PumpSpec,
) -> Result<ShortPulseWidths> {
    let (a, b) = (constants.a, constants.b);
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Regime(format!(
            "short-pulse widths need A > 0 and B > 0 (A = {a}, B = {b})"
        )));
    }
    let (eta, _) = control_parameter(a, length_m, pump.tau_s())?;
    if eta >= SHORT_PULSE_VALIDITY_ETA {
        return Err(Error::Regime(format!(
            "eta = {eta:.4} >= {SHORT_PULSE_VALIDITY_ETA}: short-pulse width formulas do not apply"
        )));
    }
    if eta > SHORT_PULSE_ETA {
        log::warn!("eta = {eta:.3} is outside the short-pulse regime; analytic widths are approximate");
    }
    let (dwc, dws) = short_pulse_widths(a, b, length_m, pump.tau_s(), pump.omega_p());
    Ok(ShortPulseWidths { delta_omega_c: dwc, delta_omega_s: dws, eta })
}

/// A width with its 1-sigma uncertainty and unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthMeasurement {
    pub value: f64,
    pub sigma: f64,
    pub unit: AxisUnit,
}

impl WidthMeasurement {
    pub fn nm(value: f64, sigma: f64) -> Self {
        Self { value, sigma, unit: AxisUnit::Nanometre }
    }

    pub fn rad_s(value: f64, sigma: f64) -> Self {
        Self { value, sigma, unit: AxisUnit::RadPerSecond }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub value: f64,
    pub sigma: f64,
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1} +- {:.1}", self.value, self.sigma)
    }
}

/// `R = delta_s / delta_c` with first-order error propagation.
pub fn r_from_widths(single: WidthMeasurement, coincidence: WidthMeasurement) -> Result<Ratio> {
    if single.unit != coincidence.unit {
        return Err(Error::invalid(format!(
            "widths have different units ({} and {})",
            single.unit.tag(),
            coincidence.unit.tag()
        )));
    }
    for w in [single, coincidence] {
        if !(w.value > 0.0 && w.value.is_finite()) || !(w.sigma >= 0.0 && w.sigma.is_finite()) {
            return Err(Error::invalid(format!(
                "width {} +- {} must be positive with a nonnegative uncertainty",
                w.value, w.sigma
            )));
        }
    }
    let r = single.value / coincidence.value;
    let sigma = r * (single.sigma / single.value).hypot(coincidence.sigma / coincidence.value);
    Ok(Ratio { value: r, sigma })
}

/// Upper bound on the total number of entangled modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalBound {
    pub r_tot: f64,
}

impl fmt::Display for TotalBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R_tot <= {} (upper bound)", self.r_tot)
    }
}

/// `R_tot = 2 R_angle R_omega`, the product over polarisation, angle and
/// frequency; an upper bound, not an estimate.
pub fn total_entanglement_bound(r_angle: f64, r_omega: f64) -> Result<TotalBound> {
    for (name, v) in [("R_angle", r_angle), ("R_omega", r_omega)] {
        if !(v >= 1.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} = {v} must be >= 1")));
        }
    }
    Ok(TotalBound { r_tot: 2.0 * r_angle * r_omega })
}
