use rayon::prelude::*;

use super::grid::FrequencyAxis;
use super::Biphoton;
use crate::error::{Error, Result};

/// Amplitude sampled in sheared coordinates `(v1, v+ = v1 + v2)`.
///
/// The lattice is the tensor lattice `v1 = i h`, `v2 = j h` re-indexed by
/// `k = i + j`, restricted to a band `|v+| <= band * h`. For amplitudes
/// confined along `v+` (the pump envelope) this stores only the support,
/// which is what makes purity quadratures affordable when the dense matrix
/// is not. Values are stored un-normalised.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearedJsa {
    axis: FrequencyAxis,
    band: usize,
    data: Vec<f64>,
    raw_norm: f64,
}

impl ShearedJsa {
    /// Samples `f(v1, v2)` for `v1` on `axis` and `|v1 + v2| <= band * step`.
    pub fn from_fn<F>(axis: FrequencyAxis, band: usize, budget: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let width = 2 * band + 1;
        let points = axis.len().saturating_mul(width);
        if points > budget {
            return Err(Error::Sizing {
                reason: format!(
                    "sheared lattice {} x {width} exceeds the budget of {budget} points",
                    axis.len()
                ),
                suggestion: "coarsen the step or narrow the envelope band".into(),
            });
        }
        let h = axis.step();
        let m = axis.half_points() as i64;
        let mut data = vec![0.0; points];
        data.par_chunks_mut(width).enumerate().for_each(|(i, row)| {
            let v1 = axis.value(i);
            for (k, out) in row.iter_mut().enumerate() {
                // v2 index on the tensor lattice, as an exact integer
                let j = k as i64 - band as i64 - i as i64 + m;
                *out = f(v1, j as f64 * h);
            }
        });
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("amplitude has non-finite samples".into()));
        }
        let raw_norm = data.iter().map(|v| v * v).sum::<f64>() * h * h;
        if !(raw_norm > 0.0) {
            return Err(Error::Numerical("amplitude vanishes on the sheared lattice".into()));
        }
        Ok(Self { axis, band, data, raw_norm })
    }

    /// Biphoton amplitude with the band set where the pump envelope drops
    /// below `envelope_floor`.
    pub fn from_biphoton(
        biphoton: &Biphoton,
        axis: FrequencyAxis,
        envelope_floor: f64,
        budget: usize,
    ) -> Result<Self> {
        let reach = biphoton.envelope_cutoff(envelope_floor);
        let band = (reach / axis.step()).ceil() as usize;
        Self::from_fn(axis, band, budget, |v1, v2| biphoton.amplitude_raw(v1, v2))
    }

    pub fn axis(&self) -> &FrequencyAxis {
        &self.axis
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }

    fn width(&self) -> usize {
        2 * self.band + 1
    }

    /// Raw value at `(v1_i, v+_k)` with `v+_k = (k - band) h`.
    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.width() + k]
    }

    /// Raw value at tensor-lattice point `(v1_i, v2_j)` (indices of the same
    /// axis); zero outside the band.
    pub fn at_lattice(&self, i: usize, j: usize) -> f64 {
        let m = self.axis.half_points() as i64;
        let k = i as i64 + j as i64 - 2 * m + self.band as i64;
        if k < 0 || k >= self.width() as i64 {
            0.0
        } else {
            self.get(i, k as usize)
        }
    }

    /// `Tr(rho_1^2)` of the normalised state, with
    /// `rho_1(v1, v1') = int Psi(v1, v2) Psi(v1', v2) dv2`.
    ///
    /// `rho_1(i, i + d) = h sum_k S[i][k] S[i+d][k+d]`, nonzero only for
    /// `|d| <= 2 band`; the trace sums `rho_1^2` over that band.
    pub fn purity(&self) -> f64 {
        let n = self.axis.len();
        let w = self.width();
        let h = self.axis.step();
        let per_row: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = &self.data[i * w..(i + 1) * w];
                let mut acc = 0.0;
                for d in 0..w.min(n - i) {
                    let b = &self.data[(i + d) * w..(i + d + 1) * w];
                    let r: f64 = a[..w - d].iter().zip(&b[d..]).map(|(x, y)| x * y).sum();
                    let r = r * h;
                    acc += if d == 0 { r * r } else { 2.0 * r * r };
                }
                acc
            })
            .collect();
        let p = per_row.iter().sum::<f64>() * h * h;
        p / (self.raw_norm * self.raw_norm)
    }

    /// Schmidt number from the purity, `K = 1 / Tr(rho_1^2)`.
    pub fn schmidt_number(&self) -> f64 {
        1.0 / self.purity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsa::grid::{build_grid, FrequencyGrid, GridPolicy};
    use crate::jsa::tests::small;
    use crate::jsa::sample::sample_jsa;

    #[test]
    fn agrees_with_tensor_sampler_on_lattice() {
        let bp = small();
        let g = build_grid(&bp, &GridPolicy::spectral()).unwrap();
        let dense = sample_jsa(&bp, &g).unwrap();
        let sheared = ShearedJsa::from_biphoton(&bp, g.nu1, 1e-8, usize::MAX).unwrap();
        let n = g.nu1.len();
        let mut checked = 0;
        for i in (0..n).step_by(13) {
            for j in (0..n).step_by(7) {
                let k = i as i64 + j as i64 - (n as i64 - 1) + sheared.band() as i64;
                if k < 0 || k > 2 * sheared.band() as i64 {
                    continue;
                }
                let s = sheared.at_lattice(i, j);
                assert!((s - dense.raw(i, j)).abs() < 1e-10, "{i} {j}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn separable_state_is_pure() {
        let ax = FrequencyAxis::with_points(6.0, 121).unwrap();
        let f = |x: f64| (-x * x / 2.0).exp();
        let s = ShearedJsa::from_fn(ax, 2 * ax.half_points(), usize::MAX, |a, b| f(a) * f(b)).unwrap();
        assert!((s.schmidt_number() - 1.0).abs() < 1e-6, "{}", s.schmidt_number());
    }

    #[test]
    fn purity_matches_dense_reduced_density() {
        // brute force Tr(rho^2) from the dense matrix for a correlated state
        let ax = FrequencyAxis::with_points(8.0, 81).unwrap();
        let f = |a: f64, b: f64| (-(a + b).powi(2) / 2.0 - (a - b).powi(2) / 18.0).exp();
        let s = ShearedJsa::from_fn(ax, 2 * ax.half_points(), usize::MAX, f).unwrap();
        let dense = crate::jsa::JointSpectralAmplitude::from_fn(FrequencyGrid::square(ax), f).unwrap();
        let n = ax.len();
        let h = ax.step();
        let mut tr = 0.0;
        for i in 0..n {
            for k in 0..n {
                let r: f64 = (0..n).map(|j| dense.get(i, j) * dense.get(k, j)).sum::<f64>() * h;
                tr += r * r * h * h;
            }
        }
        // the sheared band covers v+ in [-16, 16] but rows reach v2 beyond the
        // box, so agreement is to the box truncation level
        assert!((s.purity() - tr).abs() < 1e-6, "{} {tr}", s.purity());
    }
}
