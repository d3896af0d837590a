use std::io::Write;

use rayon::prelude::*;

use super::analytic::analytic_widths_short_pulse;
use super::purity::{purity_quadrature_k, QuadratureConfig};
use crate::dispersion::{walkoff_constants, Crystal, PhaseMatchConstants, PumpSpec, Regime};
use crate::error::{Error, Result};

pub const SWEEP_CSV_HEADER: &str = "tau_fs,eta,R_analytic,K_numerical,K_converged";

/// Logarithmically spaced pulse durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauRange {
    pub min_s: f64,
    pub max_s: f64,
    pub points: usize,
}

impl TauRange {
    pub fn new(min_s: f64, max_s: f64, points: usize) -> Result<Self> {
        if !(min_s > 0.0 && max_s > min_s && max_s.is_finite()) {
            return Err(Error::invalid(format!(
                "pulse range [{min_s}, {max_s}] s must be positive and increasing"
            )));
        }
        if points < 2 {
            return Err(Error::invalid(format!("sweep needs at least 2 points, got {points}")));
        }
        Ok(Self { min_s, max_s, points })
    }

    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.min_s.ln(), self.max_s.ln());
        (0..self.points)
            .map(|i| match i {
                0 => self.min_s,
                i if i + 1 == self.points => self.max_s,
                i => (a + (b - a) * i as f64 / (self.points - 1) as f64).exp(),
            })
            .collect()
    }
}

/// Which quantities a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantities {
    pub r_analytic: bool,
    pub k: bool,
}

impl Default for Quantities {
    fn default() -> Self {
        Self { r_analytic: true, k: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau_s: f64,
    pub eta: f64,
    pub regime: Regime,
    /// Only where the short-pulse formulas apply (`eta < 1`).
    pub r_analytic: Option<f64>,
    pub k: Option<f64>,
    pub k_half_density: Option<f64>,
    pub k_converged: Option<bool>,
    /// Failures of this row; the sweep carries on.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Row with the smallest `K`.
    pub fn k_minimum(&self) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.k.is_some())
            .min_by(|a, b| a.k.unwrap().total_cmp(&b.k.unwrap()))
    }

    /// Number of strict local minima of `K` over rows where it is defined.
    pub fn k_local_minima(&self) -> usize {
        let ks: Vec<f64> = self.rows.iter().filter_map(|r| r.k).collect();
        (1..ks.len().saturating_sub(1))
            .filter(|&i| ks[i] < ks[i - 1] && ks[i] < ks[i + 1])
            .count()
    }

    /// CSV per [`SWEEP_CSV_HEADER`]; cells of quantities not evaluated or
    /// refused are empty.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{SWEEP_CSV_HEADER}")?;
        let cell = |v: Option<f64>| v.map(|v| format!("{v:.6e}")).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                out,
                "{:.6e},{:.6e},{},{},{}",
                r.tau_s * 1e15,
                r.eta,
                cell(r.r_analytic),
                cell(r.k),
                r.k_converged.map(|c| c.to_string()).unwrap_or_default()
            )?;
        }
        Ok(())
    }
}

/// `R_analytic` and `K` across pulse durations for a crystal; `A` and `B`
/// come from its dispersion at the pump wavelength.
pub fn sweep_quantifiers(
    crystal: &Crystal,
    pump: &PumpSpec,
    range: &TauRange,
    which: Quantities,
    config: &QuadratureConfig,
) -> Result<SweepTable> {
    let constants = walkoff_constants(crystal, pump)?;
    sweep_with_constants(&constants, pump, crystal.length_m(), range.values().as_slice(), which, config)
}

/// Sweep over explicit pulse durations with fixed `A`, `B`. Rows are
/// independent and evaluated in parallel; output order follows `taus`.
pub fn sweep_with_constants(
    constants: &PhaseMatchConstants,
    pump: &PumpSpec,
    length_m: f64,
    taus: &[f64],
    which: Quantities,
    config: &QuadratureConfig,
) -> Result<SweepTable> {
    if taus.len() < 2 {
        return Err(Error::invalid("sweep needs at least 2 pulse durations"));
    }
    if taus.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("pulse durations must be nondecreasing"));
    }
    if !constants.has_walkoff() {
        return Err(Error::Regime("no group-velocity walk-off (A = 0): eta is undefined".into()));
    }
    let rows = taus
        .par_iter()
        .map(|&tau| {
            let mut row = SweepRow {
                tau_s: tau,
                eta: f64::NAN,
                regime: Regime::Undefined,
                r_analytic: None,
                k: None,
                k_half_density: None,
                k_converged: None,
                errors: Vec::new(),
            };
            let p = match pump.with_tau_s(tau) {
                Ok(p) => p,
                Err(e) => {
                    row.errors.push(e.to_string());
                    return row;
                }
            };
            match (*constants).with_pulse(length_m, tau) {
                Ok(c) => {
                    row.eta = c.eta.unwrap_or(f64::NAN);
                    row.regime = c.regime;
                }
                Err(e) => row.errors.push(e.to_string()),
            }
            if which.r_analytic {
                match analytic_widths_short_pulse(constants, length_m, &p) {
                    Ok(w) => row.r_analytic = Some(w.r()),
                    Err(Error::Regime(_)) => {}
                    Err(e) => row.errors.push(e.to_string()),
                }
            }
            if which.k {
                match purity_quadrature_k(constants, &p, length_m, config) {
                    Ok(k) => {
                        row.k = Some(k.k);
                        row.k_half_density = k.convergence.map(|c| c.k_half_density);
                        row.k_converged = k.convergence.map(|c| c.converged);
                    }
                    Err(e) => row.errors.push(e.to_string()),
                }
            }
            row
        })
        .collect();
    Ok(SweepTable { rows })
}
