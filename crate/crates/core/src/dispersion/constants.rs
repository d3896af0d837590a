use std::fmt;

use super::crystal::Crystal;
use super::derivative::{wavevector_derivatives, DerivativeMethod};
use crate::error::{Error, Result};
use crate::units::{
    angular_frequency, fs_to_s, transform_limited_bandwidth, width_to_wavelength, SPEED_OF_LIGHT,
};

/// Pump pulse: central wavelength and intensity-FWHM duration of a
/// transform-limited Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    lambda_nm: f64,
    tau_s: f64,
    omega_p: f64,
}

impl PumpSpec {
    pub fn new(lambda_nm: f64, tau_fs: f64) -> Result<Self> {
        Self::from_si(lambda_nm, fs_to_s(tau_fs))
    }

    pub fn from_si(lambda_nm: f64, tau_s: f64) -> Result<Self> {
        if !(lambda_nm.is_finite() && lambda_nm > 0.0) {
            return Err(Error::invalid(format!("pump wavelength {lambda_nm} nm must be positive")));
        }
        if !(tau_s.is_finite() && tau_s > 0.0) {
            return Err(Error::invalid(format!("pulse duration {tau_s} s must be positive")));
        }
        Ok(Self {
            lambda_nm,
            tau_s,
            omega_p: angular_frequency(lambda_nm),
        })
    }

    pub fn lambda_nm(&self) -> f64 {
        self.lambda_nm
    }

    pub fn tau_s(&self) -> f64 {
        self.tau_s
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    /// Degenerate signal/idler wavelength, `2 l_p`.
    pub fn degenerate_lambda_nm(&self) -> f64 {
        2.0 * self.lambda_nm
    }

    /// Intensity-FWHM bandwidth, rad/s (`dw tau = 4 ln 2`).
    pub fn bandwidth(&self) -> f64 {
        transform_limited_bandwidth(self.tau_s)
    }

    pub fn bandwidth_nm(&self) -> f64 {
        width_to_wavelength(self.bandwidth(), self.lambda_nm)
    }

    pub fn with_tau_s(&self, tau_s: f64) -> Result<Self> {
        Self::from_si(self.lambda_nm, tau_s)
    }
}

/// Short/long pulse classification by the control parameter. The band
/// edges are conventions, not physics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Short,
    Intermediate,
    Long,
    /// No walk-off (`A <= 0`): eta is undefined.
    Undefined,
}

pub const SHORT_PULSE_ETA: f64 = 0.2;
pub const LONG_PULSE_ETA: f64 = 5.0;

impl Regime {
    pub fn classify(eta: f64) -> Self {
        if eta < SHORT_PULSE_ETA {
            Regime::Short
        } else if eta > LONG_PULSE_ETA {
            Regime::Long
        } else {
            Regime::Intermediate
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Short => "short",
            Regime::Intermediate => "intermediate",
            Regime::Long => "long",
            Regime::Undefined => "undefined",
        })
    }
}

/// `eta = 2 c tau / (A L)` with its regime tag.
pub fn control_parameter(a: f64, length_m: f64, tau_s: f64) -> Result<(f64, Regime)> {
    if !(a > 0.0) {
        return Err(Error::Regime(format!(
            "walk-off constant A = {a} is not positive; the control parameter is undefined"
        )));
    }
    if !(length_m > 0.0 && tau_s > 0.0) {
        return Err(Error::invalid("crystal length and pulse duration must be positive"));
    }
    let eta = 2.0 * SPEED_OF_LIGHT * tau_s / (a * length_m);
    Ok((eta, Regime::classify(eta)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupVelocities {
    pub pump: f64,
    pub ordinary: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantsSource {
    /// Computed from the crystal's dispersion model.
    Dispersion,
    /// Supplied directly (e.g. inverted from measured widths).
    Anchored,
}

/// Walk-off constant `A`, dispersion constant `B` and the control parameter
/// for one crystal length and pulse duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatchConstants {
    pub a: f64,
    pub b: f64,
    pub group_velocities: Option<GroupVelocities>,
    /// Pump propagation angle to the optic axis, radians.
    pub pump_angle: Option<f64>,
    pub eta: Option<f64>,
    pub regime: Regime,
    pub source: ConstantsSource,
}

impl PhaseMatchConstants {
    pub fn anchored(a: f64, b: f64, length_m: f64, tau_s: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::invalid("anchored A and B must be finite"));
        }
        Self {
            a,
            b,
            group_velocities: None,
            pump_angle: None,
            eta: None,
            regime: Regime::Undefined,
            source: ConstantsSource::Anchored,
        }
        .with_pulse(length_m, tau_s)
    }

    /// Same `A`, `B`, control parameter recomputed for a new length and
    /// pulse duration.
    pub fn with_pulse(mut self, length_m: f64, tau_s: f64) -> Result<Self> {
        if !(length_m > 0.0 && tau_s > 0.0) {
            return Err(Error::invalid("crystal length and pulse duration must be positive"));
        }
        match control_parameter(self.a, length_m, tau_s) {
            Ok((eta, regime)) => {
                self.eta = Some(eta);
                self.regime = regime;
            }
            Err(_) => {
                self.eta = None;
                self.regime = Regime::Undefined;
            }
        }
        Ok(self)
    }

    pub fn has_walkoff(&self) -> bool {
        self.a > 0.0 && self.eta.is_some()
    }

    /// The control parameter, or a regime error when it is undefined.
    pub fn eta(&self) -> Result<f64> {
        self.eta.ok_or_else(|| {
            Error::Regime(format!("A = {} gives no walk-off; eta is undefined", self.a))
        })
    }
}

/// `A = c (k_p'(w_p) - k_1'(w_p/2))`, `B = (c/4) w_p k_1''(w_p/2)`.
pub fn walkoff_constants(crystal: &Crystal, pump: &PumpSpec) -> Result<PhaseMatchConstants> {
    walkoff_constants_with(crystal, pump, DerivativeMethod::Analytic)
}

pub fn walkoff_constants_with(
    crystal: &Crystal,
    pump: &PumpSpec,
    method: DerivativeMethod,
) -> Result<PhaseMatchConstants> {
    let wp = pump.omega_p();
    let (pump_medium, angle) = crystal.pump_medium(pump.lambda_nm())?;
    let kp = wavevector_derivatives(&pump_medium, wp, method)?;
    let ko = wavevector_derivatives(crystal.ordinary(), wp / 2.0, method)?;
    let c = SPEED_OF_LIGHT;
    let a = c * (kp.k1 - ko.k1);
    let b = c / 4.0 * wp * ko.k2;
    PhaseMatchConstants {
        a,
        b,
        group_velocities: Some(GroupVelocities {
            pump: kp.group_velocity(),
            ordinary: ko.group_velocity(),
        }),
        pump_angle: angle,
        eta: None,
        regime: Regime::Undefined,
        source: ConstantsSource::Dispersion,
    }
    .with_pulse(crystal.length_m(), pump.tau_s())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::crystal::Crystal;
    use crate::units::mm_to_m;
    use proptest::prelude::*;

    fn table1() -> (Crystal, PumpSpec) {
        (Crystal::lithium_iodate(mm_to_m(10.0)), PumpSpec::new(397.5, 186.0).unwrap())
    }

    // Anchors from inverting the analytic widths with the 10 mm theory
    // column (0.32 nm, 100 nm at 795 nm, 186 fs): A ~ 0.175, B ~ 0.070.
    #[test]
    fn lithium_iodate_constants_land_near_anchors() {
        let (x, p) = table1();
        let k = walkoff_constants(&x, &p).unwrap();
        assert!(((k.a - 0.175) / 0.175).abs() < 0.2, "A = {}", k.a);
        assert!(((k.b - 0.070) / 0.070).abs() < 0.2, "B = {}", k.b);
        assert_eq!(k.regime, Regime::Short);
        let gv = k.group_velocities.unwrap();
        let a_from_gv = SPEED_OF_LIGHT * (1.0 / gv.pump - 1.0 / gv.ordinary);
        assert!(((a_from_gv - k.a) / k.a).abs() < 1e-9);
    }

    #[test]
    fn analytic_and_difference_constants_agree() {
        let (x, p) = table1();
        let a = walkoff_constants_with(&x, &p, DerivativeMethod::Analytic).unwrap();
        let f = walkoff_constants_with(&x, &p, DerivativeMethod::FiniteDifference).unwrap();
        assert!(((a.a - f.a) / a.a).abs() < 1e-5, "{} {}", a.a, f.a);
        assert!(((a.b - f.b) / a.b).abs() < 1e-6, "{} {}", a.b, f.b);
    }

    #[test]
    fn vacuum_has_no_walkoff() {
        let k = walkoff_constants(&Crystal::vacuum(0.01), &PumpSpec::new(397.5, 186.0).unwrap()).unwrap();
        assert_eq!(k.a, 0.0);
        assert_eq!(k.b, 0.0);
        assert_eq!(k.regime, Regime::Undefined);
        assert!(k.eta.is_none());
        assert!(matches!(k.eta(), Err(Error::Regime(_))));
    }

    #[test]
    fn control_parameter_examples() {
        let (eta, regime) = control_parameter(0.1748, 0.01, 186e-15).unwrap();
        assert!((eta - 0.0638).abs() < 5e-4, "{eta}");
        assert_eq!(regime, Regime::Short);
        let (eta, _) = control_parameter(0.1748, 0.01, 1e-12).unwrap();
        assert!((eta - 0.343).abs() < 2e-3, "{eta}");
        // eta ~ 1 at 1 ps for A L = 6e-4 m
        let (eta, _) = control_parameter(0.06, 0.01, 1e-12).unwrap();
        assert!((eta - 1.0).abs() < 0.01, "{eta}");
        let (eta, _) = control_parameter(0.1748, 0.01, 1e-21).unwrap();
        assert!(eta < 1e-6);
        assert!(matches!(control_parameter(0.0, 0.01, 1e-12), Err(Error::Regime(_))));
        assert!(matches!(control_parameter(-0.1, 0.01, 1e-12), Err(Error::Regime(_))));
    }

    #[test]
    fn pump_spec_bandwidth() {
        let p = PumpSpec::new(397.5, 186.0).unwrap();
        assert!((p.bandwidth() * p.tau_s() - 4.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!((p.omega_p() - 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / 397.5e-9).abs() < 1.0);
        assert!(PumpSpec::new(-1.0, 186.0).is_err());
        assert!(PumpSpec::new(400.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn eta_scales_with_tau_and_length(a in 0.01f64..1.0, l in 1e-4f64..0.1, tau in 1e-15f64..1e-10) {
            let (e, _) = control_parameter(a, l, tau).unwrap();
            let (e2t, _) = control_parameter(a, l, 2.0 * tau).unwrap();
            let (e2l, _) = control_parameter(a, 2.0 * l, tau).unwrap();
            prop_assert_eq!(e2t, 2.0 * e);
            prop_assert_eq!(e2l, e / 2.0);
        }
    }
}
