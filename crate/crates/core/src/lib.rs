//! Spectral entanglement of biphotons from spontaneous parametric
//! down-conversion (type-I, degenerate, collinear, pulsed pump).
//!
//! The crate is organised along the data flow of an analysis:
//!
//! * [`dispersion`] turns a crystal's refractive-index model and the pump
//!   into the walk-off constant `A`, the dispersion constant `B` and the
//!   control parameter `eta`.
//! * [`jsa`] evaluates and samples the joint spectral amplitude.
//! * [`spectra`] extracts coincidence and single-count spectra, measures
//!   widths, applies instrument response and fits measured data.
//! * [`entanglement`] computes the width ratio `R`, the Schmidt number `K`,
//!   the pulse-duration sweep and the total-entanglement bound.

pub mod dispersion;
pub mod entanglement;
pub mod error;
pub mod jsa;
pub mod spectra;
pub mod units;

pub use dispersion::{
    control_parameter, walkoff_constants, Crystal, IndexModel, PhaseMatchConstants, Polarization,
    PumpSpec, Regime,
};
pub use entanglement::{
    analytic_widths_short_pulse, purity_quadrature_k, r_from_widths, schmidt_decomposition,
    sweep_quantifiers, total_entanglement_bound, EntanglementReport, SchmidtResult, SweepTable,
};
pub use error::{Error, Result};
pub use jsa::{
    build_grid, sample_jsa, Biphoton, FrequencyAxis, FrequencyGrid, GridPolicy,
    JointSpectralAmplitude,
};
pub use spectra::{
    coincidence_spectrum, convolve_response, fit_gaussian, fwhm, single_spectrum, FitResult,
    Spectrum,
};
