use super::schmidt::{Convergence, KSource, SchmidtResult};
use crate::dispersion::{PhaseMatchConstants, PumpSpec};
use crate::error::Result;
use crate::jsa::{Biphoton, FrequencyAxis, ShearedJsa};

/// Sizing of the sheared purity quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Lattice step as a fraction of the coincidence width estimate.
    pub step_fraction: f64,
    /// Half-span of the `v1` axis in units of the single-count width
    /// estimate.
    pub span_factor: f64,
    /// The `v+` band ends where the pump envelope drops below this.
    pub envelope_floor: f64,
    /// Largest number of stored samples.
    pub budget: usize,
    /// Also evaluate at half density for a convergence record.
    pub check_convergence: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            step_fraction: 1.0 / 3.0,
            span_factor: 1.5,
            envelope_floor: 1e-8,
            budget: 64 << 20,
            check_convergence: true,
        }
    }
}

impl QuadratureConfig {
    /// `v1` axis for a biphoton; the half-point count is even so the axis
    /// can be halved.
    pub fn axis(&self, biphoton: &Biphoton) -> Result<FrequencyAxis> {
        let w = biphoton.width_estimates()?;
        let step = self.step_fraction * w.coincidence;
        let m = (self.span_factor * w.single / step).ceil().max(2.0) as usize;
        FrequencyAxis::new(step, m + m % 2)
    }
}

/// `K = 1 / Tr(rho_1^2)` by quadrature in sheared coordinates; affordable
/// where the dense matrix is not.
pub fn purity_quadrature_k(
    constants: &PhaseMatchConstants,
    pump: &PumpSpec,
    length_m: f64,
    config: &QuadratureConfig,
) -> Result<SchmidtResult> {
    let bp = Biphoton::new(constants, pump, length_m)?;
    let axis = config.axis(&bp)?;
    let k = ShearedJsa::from_biphoton(&bp, axis, config.envelope_floor, config.budget)?.schmidt_number();
    let convergence = match (config.check_convergence, axis.coarsened()) {
        (true, Some(coarse)) => {
            let kc = ShearedJsa::from_biphoton(&bp, coarse, config.envelope_floor, config.budget)?.schmidt_number();
            Some(Convergence::new(k, kc))
        }
        _ => None,
    };
    Ok(SchmidtResult {
        eigenvalues: Vec::new(),
        k,
        source: KSource::PurityQuadrature,
        convergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::schmidt::tests::{double_gaussian, double_gaussian_k};
    use crate::entanglement::schmidt_decomposition;
    use crate::error::Error;
    use crate::jsa::{sample_jsa, FrequencyGrid};

    #[test]
    fn double_gaussian_closed_form() {
        let (a, b) = (1.0, 0.1);
        let dense = double_gaussian(a, b);
        let ax = dense.grid().nu1;
        let band = (8.0 * a / ax.step()).ceil() as usize;
        let f = |x: f64, y: f64| {
            let (p, m) = (x + y, x - y);
            (-p * p / (4.0 * a * a) - m * m / (4.0 * b * b)).exp()
        };
        let k = ShearedJsa::from_fn(ax, band, usize::MAX, f).unwrap().schmidt_number();
        assert!((k / double_gaussian_k(a, b) - 1.0).abs() < 0.02, "{k}");
    }

    #[test]
    fn agrees_with_decomposition_on_small_state() {
        let bp = crate::jsa::tests::small();
        let cfg = QuadratureConfig::default();
        let axis = cfg.axis(&bp).unwrap();
        let dense = sample_jsa(&bp, &FrequencyGrid::square(axis)).unwrap();
        let kd = schmidt_decomposition(&dense).unwrap().k;
        let kp = ShearedJsa::from_biphoton(&bp, axis, cfg.envelope_floor, cfg.budget).unwrap().schmidt_number();
        assert!((kp / kd - 1.0).abs() < 0.02, "{kp} {kd}");
    }

    #[test]
    fn separable_state() {
        let ax = FrequencyAxis::with_points(6.0, 101).unwrap();
        let f = |x: f64| (-x * x).exp();
        let s = ShearedJsa::from_fn(ax, 100, usize::MAX, |x, y| f(x) * f(y)).unwrap();
        assert!((s.schmidt_number() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn budget_is_enforced() {
        let pump = PumpSpec::new(397.5, 186.0).unwrap();
        let c = PhaseMatchConstants::anchored(0.1748, 0.0695, 0.01, pump.tau_s()).unwrap();
        let cfg = QuadratureConfig { budget: 1000, ..Default::default() };
        assert!(matches!(purity_quadrature_k(&c, &pump, 0.01, &cfg), Err(Error::Sizing { .. })));
    }
}
