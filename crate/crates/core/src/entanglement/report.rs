use super::analytic::{analytic_widths_short_pulse, ShortPulseWidths};
use super::purity::{purity_quadrature_k, QuadratureConfig};
use super::schmidt::{schmidt_decomposition, SchmidtResult, DENSE_AXIS_CAP};
use crate::dispersion::{control_parameter, PhaseMatchConstants, PumpSpec, Regime, SHORT_PULSE_ETA};
use crate::error::{Error, Result};
use crate::jsa::{build_grid, sample_jsa, Biphoton, GridPolicy, ImplicitJsa};
use crate::spectra::{coincidence_spectrum_windowed, fwhm, single_spectrum, Spectrum};
use crate::units::{width_to_wavelength, LN_2};

/// Relative disagreement between numerical and analytic `R` that gets
/// flagged.
pub const DISCREPANCY_THRESHOLD: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMethod {
    /// Dense decomposition when the Schmidt grid has at most
    /// [`ReportOptions::auto_dense_cap`] points per axis, purity quadrature
    /// otherwise.
    Auto,
    Decomposition,
    Purity,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub spectral_grid: GridPolicy,
    pub schmidt_grid: GridPolicy,
    pub quadrature: QuadratureConfig,
    pub k_method: KMethod,
    pub auto_dense_cap: usize,
    /// Idler detuning of the coincidence slice, rad/s.
    pub nu2_fixed: f64,
    /// Idler filter width, rad/s; 0 is a pure slice.
    pub idler_window: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            spectral_grid: GridPolicy::spectral(),
            schmidt_grid: GridPolicy::schmidt(),
            quadrature: QuadratureConfig::default(),
            k_method: KMethod::Auto,
            auto_dense_cap: 2049,
            nu2_fixed: 0.0,
            idler_window: 0.0,
        }
    }
}

/// Theory-side quantifiers of one configuration. Field suffixes name the
/// provenance: `_analytic` from the short-pulse formulas, `_numerical`
/// from spectra of the sampled amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub lambda_p_nm: f64,
    pub tau_s: f64,
    pub length_m: f64,
    pub a: f64,
    pub b: f64,
    pub eta: f64,
    pub regime: Regime,
    pub delta_lambda_p_nm: f64,
    pub analytic: Option<ShortPulseWidths>,
    pub delta_omega_c_numerical: Option<f64>,
    pub delta_omega_s_numerical: Option<f64>,
    pub schmidt: Option<SchmidtResult>,
    /// Spectra behind the numerical widths (rad/s axes).
    pub coincidence: Option<Spectrum>,
    pub single: Option<Spectrum>,
    pub flags: Vec<String>,
}

impl EntanglementReport {
    pub fn compute(
        constants: &PhaseMatchConstants,
        pump: &PumpSpec,
        length_m: f64,
        options: &ReportOptions,
    ) -> Result<Self> {
        let (eta, regime) = control_parameter(constants.a, length_m, pump.tau_s())?;
        let mut flags = Vec::new();
        let analytic = match analytic_widths_short_pulse(constants, length_m, pump) {
            Ok(w) => Some(w),
            Err(Error::Regime(msg)) => {
                flags.push(format!("analytic widths refused: {msg}"));
                None
            }
            Err(e) => return Err(e),
        };
        if eta > SHORT_PULSE_ETA && eta < 1.0 {
            flags.push(format!("eta = {eta:.3}: analytic widths outside the short-pulse regime"));
        }

        let bp = Biphoton::new(constants, pump, length_m)?;
        let grid = build_grid(&bp, &options.spectral_grid)?;
        let src = ImplicitJsa::new(bp, grid)?;
        let coincidence = coincidence_spectrum_windowed(&src, options.nu2_fixed, options.idler_window)?;
        let single = single_spectrum(&src)?;
        let mut width = |s: &Spectrum, what: &str| match fwhm(s) {
            Ok(w) => Some(w),
            Err(e) => {
                flags.push(format!("numerical {what} width: {e}"));
                None
            }
        };
        let dwc = width(&coincidence, "coincidence");
        let dws = width(&single, "single-count");

        let schmidt = match options.k_method {
            KMethod::Skip => None,
            KMethod::Purity => Some(purity_quadrature_k(constants, pump, length_m, &options.quadrature)?),
            method => {
                let sgrid = build_grid(&bp, &options.schmidt_grid.with_max_points(usize::MAX))?;
                let cap = if method == KMethod::Auto { options.auto_dense_cap.min(DENSE_AXIS_CAP) } else { DENSE_AXIS_CAP };
                if sgrid.nu1.len() <= cap {
                    Some(schmidt_decomposition(&sample_jsa(&bp, &sgrid)?)?)
                } else if method == KMethod::Auto {
                    Some(purity_quadrature_k(constants, pump, length_m, &options.quadrature)?)
                } else {
                    return Err(Error::Sizing {
                        reason: format!(
                            "Schmidt grid needs {} points per axis, cap is {DENSE_AXIS_CAP}",
                            sgrid.nu1.len()
                        ),
                        suggestion: "use the purity quadrature".into(),
                    });
                }
            }
        };
        if let Some(c) = schmidt.as_ref().and_then(|s| s.convergence) {
            if !c.converged {
                flags.push(format!(
                    "K not converged: {:.2}% change at half grid density",
                    100.0 * c.relative_change
                ));
            }
        }

        let report = Self {
            lambda_p_nm: pump.lambda_nm(),
            tau_s: pump.tau_s(),
            length_m,
            a: constants.a,
            b: constants.b,
            eta,
            regime,
            delta_lambda_p_nm: width_to_wavelength(4.0 * LN_2 / pump.tau_s(), pump.lambda_nm()),
            analytic,
            delta_omega_c_numerical: dwc,
            delta_omega_s_numerical: dws,
            schmidt,
            coincidence: Some(coincidence),
            single: Some(single),
            flags,
        };
        let mut report = report;
        if let (Some(rn), Some(ra)) = (report.r_numerical(), report.r_analytic()) {
            let d = (rn - ra).abs() / ra;
            if d > DISCREPANCY_THRESHOLD {
                report
                    .flags
                    .push(format!("numerical R {rn:.1} differs from analytic R {ra:.1} by {:.0}%", 100.0 * d));
            }
        }
        Ok(report)
    }

    /// Degenerate signal/idler wavelength, nm.
    pub fn center_nm(&self) -> f64 {
        2.0 * self.lambda_p_nm
    }

    pub fn r_analytic(&self) -> Option<f64> {
        self.analytic.map(|w| w.r())
    }

    pub fn r_numerical(&self) -> Option<f64> {
        Some(self.delta_omega_s_numerical? / self.delta_omega_c_numerical?)
    }

    pub fn delta_lambda_c_analytic(&self) -> Option<f64> {
        self.analytic.map(|w| width_to_wavelength(w.delta_omega_c, self.center_nm()))
    }

    pub fn delta_lambda_s_analytic(&self) -> Option<f64> {
        self.analytic.map(|w| width_to_wavelength(w.delta_omega_s, self.center_nm()))
    }

    pub fn delta_lambda_c_numerical(&self) -> Option<f64> {
        self.delta_omega_c_numerical.map(|w| width_to_wavelength(w, self.center_nm()))
    }

    pub fn delta_lambda_s_numerical(&self) -> Option<f64> {
        self.delta_omega_s_numerical.map(|w| width_to_wavelength(w, self.center_nm()))
    }

    pub fn k(&self) -> Option<f64> {
        self.schmidt.as_ref().map(|s| s.k)
    }

    /// Flat `(key, value)` list; missing quantities have empty values.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        let f = |v: Option<f64>| v.map(|v| format!("{v:.6e}")).unwrap_or_default();
        let s = self.schmidt.as_ref();
        let conv = s.and_then(|s| s.convergence);
        let eigen = s
            .map(|s| {
                s.eigenvalues
                    .iter()
                    .take(10)
                    .map(|l| format!("{l:.6e}"))
                    .collect::<Vec<_>>()
                    .join(";")
            })
            .unwrap_or_default();
        vec![
            ("lambda_p_nm", f(Some(self.lambda_p_nm))),
            ("tau_fs", f(Some(self.tau_s * 1e15))),
            ("length_mm", f(Some(self.length_m * 1e3))),
            ("A", f(Some(self.a))),
            ("B", f(Some(self.b))),
            ("eta", f(Some(self.eta))),
            ("regime", self.regime.to_string()),
            ("delta_lambda_p_nm", f(Some(self.delta_lambda_p_nm))),
            ("delta_omega_c_analytic_rad_s", f(self.analytic.map(|w| w.delta_omega_c))),
            ("delta_omega_s_analytic_rad_s", f(self.analytic.map(|w| w.delta_omega_s))),
            ("delta_lambda_c_analytic_nm", f(self.delta_lambda_c_analytic())),
            ("delta_lambda_s_analytic_nm", f(self.delta_lambda_s_analytic())),
            ("R_analytic", f(self.r_analytic())),
            ("delta_omega_c_numerical_rad_s", f(self.delta_omega_c_numerical)),
            ("delta_omega_s_numerical_rad_s", f(self.delta_omega_s_numerical)),
            ("delta_lambda_c_numerical_nm", f(self.delta_lambda_c_numerical())),
            ("delta_lambda_s_numerical_nm", f(self.delta_lambda_s_numerical())),
            ("R_numerical", f(self.r_numerical())),
            ("K_numerical", f(self.k())),
            ("K_half_density", f(conv.map(|c| c.k_half_density))),
            ("K_converged", conv.map(|c| c.converged.to_string()).unwrap_or_default()),
            ("K_source", s.map(|s| s.source.tag().to_string()).unwrap_or_default()),
            ("schmidt_eigenvalues", eigen),
            ("flags", self.flags.join("; ")),
        ]
    }

    /// `key = value` lines.
    pub fn to_key_value_block(&self) -> String {
        self.key_values()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Header line and one data row.
    pub fn to_csv(&self) -> String {
        let kv = self.key_values();
        let header: Vec<&str> = kv.iter().map(|(k, _)| *k).collect();
        let row: Vec<String> = kv
            .iter()
            .map(|(_, v)| if v.contains(',') { format!("\"{v}\"") } else { v.clone() })
            .collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_state_report_is_consistent() {
        let bp = crate::jsa::tests::small();
        let pump = PumpSpec::from_si(397.5, bp.tau_s).unwrap();
        let c = PhaseMatchConstants::anchored(bp.a, bp.b, bp.length_m, bp.tau_s).unwrap();
        let r = EntanglementReport::compute(&c, &pump, bp.length_m, &ReportOptions::default()).unwrap();
        let k = r.k().unwrap();
        assert!(k >= 1.0);
        let s = r.schmidt.as_ref().unwrap();
        assert!((s.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let block = r.to_key_value_block();
        assert!(block.contains("K_numerical = "));
        let csv = r.to_csv();
        let mut lines = csv.lines();
        let (h, v) = (lines.next().unwrap(), lines.next().unwrap());
        assert_eq!(h.split(',').count(), r.key_values().len());
        assert!(v.len() > 10);
    }

    #[test]
    fn reference_report_widths() {
        let pump = PumpSpec::new(397.5, 186.0).unwrap();
        let c = PhaseMatchConstants::anchored(0.1748, 0.0695, 0.01, pump.tau_s()).unwrap();
        let opts = ReportOptions { k_method: KMethod::Skip, ..Default::default() };
        let r = EntanglementReport::compute(&c, &pump, 0.01, &opts).unwrap();
        assert!((r.delta_lambda_p_nm - 1.25).abs() < 0.01);
        let (ca, cn) = (r.delta_lambda_c_analytic().unwrap(), r.delta_lambda_c_numerical().unwrap());
        assert!((cn / ca - 1.0).abs() < 0.02, "{cn} {ca}");
        let (sa, sn) = (r.delta_lambda_s_analytic().unwrap(), r.delta_lambda_s_numerical().unwrap());
        assert!((sn / sa - 1.0).abs() < 0.05, "{sn} {sa}");
        assert!(r.flags.is_empty(), "{:?}", r.flags);
    }
}
