//! The biphoton joint spectral amplitude
//!
//! ```text
//! Psi(v1, v2) ~ exp(-(v1+v2)^2 tau^2 / (8 ln 2))
//!             * sinc{ L/(2c) [ A (v1+v2) - B (v1-v2)^2 / w_p ] }
//! ```
//!
//! with `sinc(x) = sin(x)/x`, detunings `v1`, `v2` measured from `w_p/2`.

mod grid;
mod io;
mod sample;
mod sheared;

pub use grid::{build_grid, FrequencyAxis, FrequencyGrid, GridPolicy};
pub use io::{read_jsa_csv, read_jsa_matrix, write_jsa_csv, write_jsa_matrix, JsaDump};
pub use sample::{
    sample_jsa, sample_jsa_with_budget, AmplitudeRows, ImplicitJsa, JointSpectralAmplitude,
    NormConvention, DENSE_POINT_BUDGET,
};
pub use sheared::ShearedJsa;

use crate::dispersion::{PhaseMatchConstants, PumpSpec};
use crate::error::{Error, Result};
use crate::units::{LN_2, SPEED_OF_LIGHT};

/// Detunings beyond this fraction of `w_p` violate the `|v| << w_p`
/// assumption behind the amplitude; sampling there logs a warning.
pub const VALIDITY_FRACTION: f64 = 0.3;

/// Half-maximum point of `(sin x / x)^2`.
pub const SINC2_HALF_MAX: f64 = 1.391_557_378_251_51;

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Everything the amplitude depends on, flattened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biphoton {
    pub a: f64,
    pub b: f64,
    pub length_m: f64,
    pub tau_s: f64,
    pub omega_p: f64,
}

/// Characteristic widths (rad/s) used to size grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthEstimates {
    /// Short-pulse coincidence width `5.56 c / (A L)`.
    pub coincidence_short: f64,
    /// Short-pulse single-count width `sqrt(2 A ln2 w_p / (B tau))`.
    pub single_short: f64,
    /// Coincidence width including the pump cut-off, valid in all regimes:
    /// `(coincidence_short^-2 + (4 ln2/tau)^-2)^-1/2`.
    pub coincidence: f64,
    /// Single-count width including the long-pulse limit
    /// `sqrt(2 x1 c w_p / (L B))` (x1 the sinc^2 half-maximum point),
    /// combined in quadrature with `single_short`.
    pub single: f64,
}

/// `(Delta w_c, Delta w_s)` of the short-pulse analysis, rad/s.
pub fn short_pulse_widths(a: f64, b: f64, length_m: f64, tau_s: f64, omega_p: f64) -> (f64, f64) {
    let dwc = 5.56 * SPEED_OF_LIGHT / (a * length_m);
    let dws = (2.0 * a * LN_2 * omega_p / (b * tau_s)).sqrt();
    (dwc, dws)
}

impl Biphoton {
    pub fn new(constants: &PhaseMatchConstants, pump: &PumpSpec, length_m: f64) -> Result<Self> {
        let s = Self {
            a: constants.a,
            b: constants.b,
            length_m,
            tau_s: pump.tau_s(),
            omega_p: pump.omega_p(),
        };
        if ![s.a, s.b, s.length_m, s.tau_s, s.omega_p].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("biphoton parameters must be finite"));
        }
        if !(length_m > 0.0) {
            return Err(Error::invalid("crystal length must be positive"));
        }
        Ok(s)
    }

    pub fn with_tau(self, tau_s: f64) -> Self {
        Self { tau_s, ..self }
    }

    pub fn with_length(self, length_m: f64) -> Self {
        Self { length_m, ..self }
    }

    pub fn sinc_argument(&self, nu1: f64, nu2: f64) -> f64 {
        let p = nu1 + nu2;
        let m = nu1 - nu2;
        self.length_m / (2.0 * SPEED_OF_LIGHT) * (self.a * p - self.b * m * m / self.omega_p)
    }

    /// Pump envelope as a function of `v+ = v1 + v2`.
    pub fn envelope(&self, nu_plus: f64) -> f64 {
        (-nu_plus * nu_plus * self.tau_s * self.tau_s / (8.0 * LN_2)).exp()
    }

    /// `|v+|` beyond which the envelope is below `level`.
    pub fn envelope_cutoff(&self, level: f64) -> f64 {
        (8.0 * LN_2 * (-level.ln())).sqrt() / self.tau_s
    }

    /// Pointwise amplitude without input checks.
    #[inline]
    pub fn amplitude_raw(&self, nu1: f64, nu2: f64) -> f64 {
        self.envelope(nu1 + nu2) * sinc(self.sinc_argument(nu1, nu2))
    }

    /// Un-normalised amplitude; 1 at the origin, negative on odd sinc lobes.
    pub fn amplitude(&self, nu1: f64, nu2: f64) -> Result<f64> {
        if !(nu1.is_finite() && nu2.is_finite()) {
            return Err(Error::invalid(format!("non-finite detuning ({nu1}, {nu2})")));
        }
        Ok(self.amplitude_raw(nu1, nu2))
    }

    pub fn validity_limit(&self) -> f64 {
        VALIDITY_FRACTION * self.omega_p
    }

    pub fn width_estimates(&self) -> Result<WidthEstimates> {
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(Error::Regime(format!(
                "width estimates need A > 0 and B > 0 (A = {}, B = {})",
                self.a, self.b
            )));
        }
        let (dwc, dws) = short_pulse_widths(self.a, self.b, self.length_m, self.tau_s, self.omega_p);
        let pump = 4.0 * LN_2 / self.tau_s;
        let long = (2.0 * SINC2_HALF_MAX * SPEED_OF_LIGHT * self.omega_p / (self.length_m * self.b)).sqrt();
        Ok(WidthEstimates {
            coincidence_short: dwc,
            single_short: dws,
            coincidence: (dwc.powi(-2) + pump.powi(-2)).powf(-0.5),
            single: dws.hypot(long),
        })
    }
}

/// Pointwise amplitude from the physical inputs.
pub fn evaluate_amplitude(
    constants: &PhaseMatchConstants,
    pump: &PumpSpec,
    length_m: f64,
    nu1: f64,
    nu2: f64,
) -> Result<f64> {
    let bp = Biphoton::new(constants, pump, length_m)?;
    if nu1.abs().max(nu2.abs()) > bp.validity_limit() {
        log::warn!(
            "detuning ({nu1:.3e}, {nu2:.3e}) rad/s beyond {VALIDITY_FRACTION} w_p; amplitude model is approximate there"
        );
    }
    bp.amplitude(nu1, nu2)
}
