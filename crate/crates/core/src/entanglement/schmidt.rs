use faer::Mat;

use crate::error::{Error, Result};
use crate::jsa::JointSpectralAmplitude;

/// Largest axis the dense decomposition accepts; larger problems go to the
/// purity quadrature.
pub const DENSE_AXIS_CAP: usize = 4097;

/// Relative change of `K` between full and half grid density below which
/// `K` counts as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KSource {
    Decomposition,
    PurityQuadrature,
}

impl KSource {
    /// Machine-readable name.
    pub fn tag(self) -> &'static str {
        match self {
            KSource::Decomposition => "decomposition",
            KSource::PurityQuadrature => "purity_quadrature",
        }
    }
}

impl std::fmt::Display for KSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KSource::Decomposition => "decomposition",
            KSource::PurityQuadrature => "purity quadrature",
        })
    }
}

/// `K` recomputed at half grid density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub k_half_density: f64,
    pub relative_change: f64,
    pub converged: bool,
}

impl Convergence {
    pub fn new(k: f64, k_half_density: f64) -> Self {
        let relative_change = (k - k_half_density).abs() / k;
        Self {
            k_half_density,
            relative_change,
            converged: relative_change < CONVERGENCE_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtResult {
    /// Schmidt eigenvalues, descending, summing to 1. Empty when `K` came
    /// from the purity quadrature.
    pub eigenvalues: Vec<f64>,
    pub k: f64,
    pub source: KSource,
    /// `None` when the grid cannot be halved.
    pub convergence: Option<Convergence>,
}

impl SchmidtResult {
    /// `K` with its convergence record checked: non-converged values are an
    /// error rather than a number.
    pub fn converged_k(&self) -> Result<f64> {
        match self.convergence {
            Some(c) if !c.converged => Err(Error::Numerical(format!(
                "K = {:.4} not converged: {:.2}% change at half grid density",
                self.k,
                100.0 * c.relative_change
            ))),
            _ => Ok(self.k),
        }
    }
}

/// Schmidt eigenvalues `lambda_n = s_n^2 / sum s_m^2` from the singular
/// values of the sampled amplitude, descending.
///
/// Exchange-symmetric amplitudes on square grids use the symmetric
/// eigensolver (`|eigenvalue| = singular value` for a symmetric matrix);
/// anything else uses the SVD.
pub fn schmidt_eigenvalues(jsa: &JointSpectralAmplitude) -> Result<Vec<f64>> {
    let (n1, n2) = jsa.shape();
    if n1.max(n2) > DENSE_AXIS_CAP {
        return Err(Error::Sizing {
            reason: format!("{n1} x {n2} exceeds the dense decomposition cap of {DENSE_AXIS_CAP}"),
            suggestion: "use the purity quadrature".into(),
        });
    }
    let cell = jsa.grid().cell_area().sqrt();
    let m = Mat::<f64>::from_fn(n1, n2, |i, j| jsa.get(i, j) * cell);
    let diagnostics = || {
        let max = jsa.data().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        format!("matrix {n1} x {n2}, norm {:.6e}, max |entry| {max:.6e}", jsa.norm())
    };
    let singular: Vec<f64> = if jsa.is_symmetric() {
        m.self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigensolver failed ({e:?}); {}", diagnostics())))?
            .into_iter()
            .map(f64::abs)
            .collect()
    } else {
        m.singular_values()
            .map_err(|e| Error::Numerical(format!("SVD failed ({e:?}); {}", diagnostics())))?
    };
    let mut lambda: Vec<f64> = singular.iter().map(|s| s * s).collect();
    let total: f64 = lambda.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Numerical(format!("degenerate spectrum of singular values; {}", diagnostics())));
    }
    lambda.iter_mut().for_each(|l| *l /= total);
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok(lambda)
}

fn schmidt_number(lambda: &[f64]) -> f64 {
    1.0 / lambda.iter().map(|l| l * l).sum::<f64>()
}

/// Schmidt eigenvalues and `K = 1 / sum lambda_n^2`, with `K` at half grid
/// density as convergence record.
pub fn schmidt_decomposition(jsa: &JointSpectralAmplitude) -> Result<SchmidtResult> {
    let eigenvalues = schmidt_eigenvalues(jsa)?;
    let k = schmidt_number(&eigenvalues);
    let convergence = match jsa.coarsened() {
        Some(coarse) => Some(Convergence::new(k, schmidt_number(&schmidt_eigenvalues(&coarse)?))),
        None => None,
    };
    if let Some(c) = convergence.filter(|c| !c.converged) {
        log::warn!(
            "K = {k:.4} changes by {:.2}% at half grid density",
            100.0 * c.relative_change
        );
    }
    Ok(SchmidtResult {
        eigenvalues,
        k,
        source: KSource::Decomposition,
        convergence,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::jsa::{FrequencyAxis, FrequencyGrid};
    use crate::spectra::{coincidence_spectrum, fwhm, single_spectrum};

    /// `exp(-v+^2 / (4 a^2) - v-^2 / (4 b^2))` on a grid resolving both scales.
    pub(crate) fn double_gaussian(a: f64, b: f64) -> JointSpectralAmplitude {
        let (wide, narrow) = (a.max(b), a.min(b));
        let half_span = 5.0 * wide;
        let m = ((half_span / (narrow / 5.0)).ceil() as usize).clamp(50, 1250);
        let ax = FrequencyAxis::with_points(half_span, 2 * (m + m % 2) + 1).unwrap();
        JointSpectralAmplitude::from_fn(FrequencyGrid::square(ax), |x, y| {
            let (p, m) = (x + y, x - y);
            (-p * p / (4.0 * a * a) - m * m / (4.0 * b * b)).exp()
        })
        .unwrap()
    }

    pub(crate) fn double_gaussian_k(a: f64, b: f64) -> f64 {
        (a * a + b * b) / (2.0 * a * b)
    }

    #[test]
    fn separable_state_has_unit_k() {
        let ax = FrequencyAxis::with_points(6.0, 201).unwrap();
        let jsa = JointSpectralAmplitude::from_fn(FrequencyGrid::square(ax), |x, y| {
            (-(x - 0.5).powi(2)).exp() * (-(y - 0.5).powi(2)).exp()
        })
        .unwrap();
        let r = schmidt_decomposition(&jsa).unwrap();
        assert!((r.k - 1.0).abs() < 1e-9, "{}", r.k);
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn double_gaussian_matches_closed_form() {
        for ratio in [1.0, 2.0, 10.0, 50.0] {
            let jsa = double_gaussian(1.0, 1.0 / ratio);
            let r = schmidt_decomposition(&jsa).unwrap();
            let expect = double_gaussian_k(1.0, 1.0 / ratio);
            assert!((r.k / expect - 1.0).abs() < 0.01, "a/b = {ratio}: {} vs {expect}", r.k);
            assert!(r.convergence.is_none_or(|c| c.converged));
        }
    }

    #[test]
    fn width_ratio_equals_k_for_double_gaussians() {
        for ratio in [1.0, 2.0, 10.0, 50.0] {
            let jsa = double_gaussian(1.0, 1.0 / ratio);
            let s = fwhm(&single_spectrum(&jsa).unwrap()).unwrap();
            let c = fwhm(&coincidence_spectrum(&jsa, 0.0).unwrap()).unwrap();
            let expect = double_gaussian_k(1.0, 1.0 / ratio);
            assert!((s / c / expect - 1.0).abs() < 0.01, "a/b = {ratio}: R = {}", s / c);
        }
    }

    #[test]
    fn eigenvalue_invariants() {
        let jsa = double_gaussian(1.0, 0.2);
        let r = schmidt_decomposition(&jsa).unwrap();
        let sum: f64 = r.eigenvalues.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(r.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert!(r.eigenvalues.iter().all(|&l| l >= 0.0));
        assert!((schmidt_number(&r.eigenvalues) - r.k).abs() < 1e-9 * r.k);
        assert!(r.k >= 1.0);
    }

    #[test]
    fn invariant_under_rescaling() {
        let jsa = double_gaussian(1.0, 0.3);
        let scaled = JointSpectralAmplitude::from_raw(*jsa.grid(), jsa.data().iter().map(|v| v * 1e7).collect()).unwrap();
        let (a, b) = (schmidt_decomposition(&jsa).unwrap().k, schmidt_decomposition(&scaled).unwrap().k);
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn asymmetric_amplitude_uses_svd() {
        let ax = FrequencyAxis::with_points(4.0, 81).unwrap();
        let jsa = JointSpectralAmplitude::from_fn(FrequencyGrid::square(ax), |x, y| {
            (-(x + 2.0 * y).powi(2) - 0.1 * (x - y).powi(2)).exp()
        })
        .unwrap();
        assert!(!jsa.is_symmetric());
        let r = schmidt_decomposition(&jsa).unwrap();
        assert!(r.k > 1.0 && (r.eigenvalues.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_converged_k_is_flagged() {
        let r = SchmidtResult {
            eigenvalues: vec![],
            k: 10.0,
            source: KSource::Decomposition,
            convergence: Some(Convergence::new(10.0, 9.0)),
        };
        assert!(r.converged_k().is_err());
    }
}
