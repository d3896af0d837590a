//! Crystal dispersion, phase-matching constants and the pulse-regime
//! control parameter.

mod constants;
mod crystal;
mod derivative;
mod model;

pub use constants::{
    control_parameter, walkoff_constants, walkoff_constants_with, ConstantsSource,
    GroupVelocities, PhaseMatchConstants, PumpSpec, Regime, LONG_PULSE_ETA, SHORT_PULSE_ETA,
};
pub use crystal::{
    Crystal, PumpAngle, PumpMedium, LIIO3_EXTRAORDINARY, LIIO3_ORDINARY, LIIO3_WINDOW_NM,
};
pub use derivative::{
    wavevector_derivatives, DerivativeMethod, Dispersive, WavevectorDerivatives,
    FIRST_DERIVATIVE_STEP, SECOND_DERIVATIVE_STEP,
};
pub use model::{
    angle_index_jet, parse_dispersion_model, DispersionData, Form, IndexJet, IndexModel,
    Polarization,
};
