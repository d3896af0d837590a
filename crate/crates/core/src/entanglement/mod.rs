//! Entanglement quantifiers: the width ratio `R`, the Schmidt number `K`,
//! the pulse-duration sweep and the total-entanglement bound.

mod analytic;
mod purity;
mod report;
mod schmidt;
mod sweep;

pub use analytic::{
    analytic_widths_short_pulse, r_from_widths, total_entanglement_bound, Ratio, ShortPulseWidths, TotalBound,
    WidthMeasurement, SHORT_PULSE_VALIDITY_ETA,
};
pub use purity::{purity_quadrature_k, QuadratureConfig};
pub use report::{EntanglementReport, KMethod, ReportOptions, DISCREPANCY_THRESHOLD};
pub use schmidt::{
    schmidt_decomposition, schmidt_eigenvalues, Convergence, KSource, SchmidtResult, CONVERGENCE_TOLERANCE,
    DENSE_AXIS_CAP,
};
pub use sweep::{sweep_quantifiers, sweep_with_constants, Quantities, SweepRow, SweepTable, TauRange, SWEEP_CSV_HEADER};
