use rayon::prelude::*;

use super::grid::FrequencyGrid;
use super::Biphoton;
use crate::error::{Error, Result};

/// Largest dense grid (points) `sample_jsa` will allocate: 4097^2 doubles,
/// about 128 MiB.
pub const DENSE_POINT_BUDGET: usize = 4097 * 4097;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormConvention {
    /// `sum |Psi|^2 dv1 dv2 = 1` over the grid.
    UnitL2,
}

/// Row/column access to an amplitude on a grid. Row `i` is `Psi(v1_i, .)`,
/// column `j` is `Psi(., v2_j)`.
pub trait AmplitudeRows: Sync {
    fn grid(&self) -> &FrequencyGrid;

    fn fill_row(&self, i: usize, out: &mut [f64]);

    fn fill_column(&self, j: usize, out: &mut [f64]);
}

/// Densely sampled, normalised amplitude. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectralAmplitude {
    grid: FrequencyGrid,
    /// Row-major `n1 x n2`.
    data: Vec<f64>,
    /// `sum |Psi_raw|^2 dv1 dv2` before normalisation.
    raw_norm: f64,
    convention: NormConvention,
}

impl JointSpectralAmplitude {
    /// Samples `f(v1, v2)` on the grid and normalises.
    pub fn from_fn<F>(grid: FrequencyGrid, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        Self::from_fn_with_budget(grid, f, DENSE_POINT_BUDGET)
    }

    pub fn from_fn_with_budget<F>(grid: FrequencyGrid, f: F, budget: usize) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        if grid.points() > budget {
            return Err(Error::Sizing {
                reason: format!(
                    "dense grid {} x {} exceeds the budget of {budget} points",
                    grid.nu1.len(),
                    grid.nu2.len()
                ),
                suggestion: "coarsen the grid or use the sheared purity quadrature".into(),
            });
        }
        let (n1, n2) = (grid.nu1.len(), grid.nu2.len());
        let mut data = vec![0.0; n1 * n2];
        data.par_chunks_mut(n2).enumerate().for_each(|(i, row)| {
            let v1 = grid.nu1.value(i);
            for (j, out) in row.iter_mut().enumerate() {
                *out = f(v1, grid.nu2.value(j));
            }
        });
        Self::from_raw(grid, data)
    }

    /// Normalises raw row-major samples.
    pub fn from_raw(grid: FrequencyGrid, mut data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.points() {
            return Err(Error::invalid(format!(
                "expected {} samples, got {}",
                grid.points(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("amplitude has non-finite samples".into()));
        }
        let raw_norm = data.iter().map(|v| v * v).sum::<f64>() * grid.cell_area();
        if !(raw_norm > 0.0) {
            return Err(Error::Numerical("amplitude vanishes on the grid".into()));
        }
        let scale = raw_norm.sqrt().recip();
        data.iter_mut().for_each(|v| *v *= scale);
        Ok(Self {
            grid,
            data,
            raw_norm,
            convention: NormConvention::UnitL2,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn convention(&self) -> NormConvention {
        self.convention
    }

    pub fn raw_norm(&self) -> f64 {
        self.raw_norm
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.grid.nu1.len(), self.grid.nu2.len())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.grid.nu2.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n2 = self.grid.nu2.len();
        &self.data[i * n2..(i + 1) * n2]
    }

    /// Un-normalised value at a grid point.
    pub fn raw(&self, i: usize, j: usize) -> f64 {
        self.get(i, j) * self.raw_norm.sqrt()
    }

    /// `sum |Psi|^2 dv1 dv2` (1 up to rounding).
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()
    }

    pub fn is_symmetric(&self) -> bool {
        if !self.grid.is_square() {
            return false;
        }
        let n = self.grid.nu1.len();
        (0..n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Bicubic (Catmull-Rom) interpolation, bilinear in the outermost
    /// cells; `None` outside the grid.
    pub fn interpolate(&self, nu1: f64, nu2: f64) -> Option<f64> {
        let (n1, n2) = self.shape();
        let p = self.grid.nu1.position(nu1);
        let q = self.grid.nu2.position(nu2);
        if !(p >= 0.0 && q >= 0.0 && p <= (n1 - 1) as f64 && q <= (n2 - 1) as f64) {
            return None;
        }
        let i = (p.floor() as usize).min(n1 - 2);
        let j = (q.floor() as usize).min(n2 - 2);
        let (s, t) = (p - i as f64, q - j as f64);
        let ws = cubic_weights(s, i, n1);
        let wt = cubic_weights(t, j, n2);
        let mut acc = 0.0;
        for (di, wi) in ws.iter().enumerate() {
            if *wi == 0.0 {
                continue;
            }
            let r = i + di - 1;
            for (dj, wj) in wt.iter().enumerate() {
                if *wj != 0.0 {
                    acc += wi * wj * self.get(r, j + dj - 1);
                }
            }
        }
        Some(acc)
    }

    /// The same state on every other grid point (renormalised).
    pub fn coarsened(&self) -> Option<Self> {
        let a1 = self.grid.nu1.coarsened()?;
        let a2 = self.grid.nu2.coarsened()?;
        let n2 = self.grid.nu2.len();
        let mut data = Vec::with_capacity(a1.len() * a2.len());
        for i in (0..self.grid.nu1.len()).step_by(2) {
            data.extend(self.data[i * n2..(i + 1) * n2].iter().step_by(2));
        }
        Self::from_raw(FrequencyGrid::new(a1, a2), data).ok()
    }
}

impl AmplitudeRows for JointSpectralAmplitude {
    fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    fn fill_row(&self, i: usize, out: &mut [f64]) {
        out.copy_from_slice(self.row(i));
    }

    fn fill_column(&self, j: usize, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.get(i, j);
        }
    }
}

/// Weights of points `k-1 .. k+2` for fraction `t` past point `k`.
fn cubic_weights(t: f64, k: usize, n: usize) -> [f64; 4] {
    if k == 0 || k + 2 >= n {
        return [0.0, 1.0 - t, t, 0.0];
    }
    let (t2, t3) = (t * t, t * t * t);
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Dense, normalised samples of the biphoton amplitude.
pub fn sample_jsa(biphoton: &Biphoton, grid: &FrequencyGrid) -> Result<JointSpectralAmplitude> {
    sample_jsa_with_budget(biphoton, grid, DENSE_POINT_BUDGET)
}

pub fn sample_jsa_with_budget(
    biphoton: &Biphoton,
    grid: &FrequencyGrid,
    budget: usize,
) -> Result<JointSpectralAmplitude> {
    check_inputs(biphoton, grid)?;
    JointSpectralAmplitude::from_fn_with_budget(*grid, |v1, v2| biphoton.amplitude_raw(v1, v2), budget)
}

fn check_inputs(biphoton: &Biphoton, grid: &FrequencyGrid) -> Result<()> {
    let edge = grid.nu1.half_span().max(grid.nu2.half_span());
    if !edge.is_finite() {
        return Err(Error::invalid("grid span must be finite"));
    }
    if edge > biphoton.validity_limit() {
        log::warn!(
            "grid reaches {edge:.3e} rad/s, beyond {} w_p",
            super::VALIDITY_FRACTION
        );
    }
    Ok(())
}

/// The biphoton amplitude on a grid, evaluated on demand row by row.
///
/// Used for grids too large to hold densely. Samples whose pump envelope is
/// below [`ImplicitJsa::ENVELOPE_FLOOR`] are returned as exact zeros; they
/// are below double-precision resolution relative to the peak. Values are
/// not normalised.
#[derive(Debug, Clone, Copy)]
pub struct ImplicitJsa {
    biphoton: Biphoton,
    grid: FrequencyGrid,
    band: f64,
}

impl ImplicitJsa {
    pub const ENVELOPE_FLOOR: f64 = 1e-18;

    pub fn new(biphoton: Biphoton, grid: FrequencyGrid) -> Result<Self> {
        check_inputs(&biphoton, &grid)?;
        Ok(Self {
            biphoton,
            grid,
            band: biphoton.envelope_cutoff(Self::ENVELOPE_FLOOR),
        })
    }

    pub fn biphoton(&self) -> &Biphoton {
        &self.biphoton
    }

    /// Fills `Psi(u, w_k)` for fixed `u` along `axis`, skipping the region
    /// where `|u + w|` exceeds the envelope band.
    fn fill_line(&self, u: f64, axis: &super::FrequencyAxis, out: &mut [f64], u_first: bool) {
        let lo = axis.position(-self.band - u).ceil().max(0.0) as usize;
        let hi = (axis.position(self.band - u).floor()).min((axis.len() - 1) as f64);
        out.iter_mut().for_each(|v| *v = 0.0);
        if hi < 0.0 {
            return;
        }
        for k in lo..=(hi as usize) {
            let w = axis.value(k);
            out[k] = if u_first {
                self.biphoton.amplitude_raw(u, w)
            } else {
                self.biphoton.amplitude_raw(w, u)
            };
        }
    }
}

impl AmplitudeRows for ImplicitJsa {
    fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    fn fill_row(&self, i: usize, out: &mut [f64]) {
        self.fill_line(self.grid.nu1.value(i), &self.grid.nu2, out, true);
    }

    fn fill_column(&self, j: usize, out: &mut [f64]) {
        self.fill_line(self.grid.nu2.value(j), &self.grid.nu1, out, false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsa::grid::{build_grid, FrequencyAxis, GridPolicy};
    use crate::jsa::tests::small;
    use rand::{Rng, SeedableRng};


    #[test]
    fn normalised_and_symmetric() {
        let bp = small();
        let g = build_grid(&bp, &GridPolicy::spectral()).unwrap();
        let jsa = sample_jsa(&bp, &g).unwrap();
        assert!((jsa.norm() - 1.0).abs() < 1e-12, "{}", jsa.norm());
        assert!(jsa.is_symmetric());
        // peak at the centre
        let (n, _) = jsa.shape();
        let c = n / 2;
        let peak = jsa.data().iter().fold(0.0f64, |m, v| m.max(v * v));
        assert_eq!(jsa.get(c, c).powi(2), peak);
    }

    #[test]
    fn dense_budget_refused() {
        let bp = small();
        let g = build_grid(&bp, &GridPolicy::spectral()).unwrap();
        assert!(matches!(sample_jsa_with_budget(&bp, &g, 100), Err(Error::Sizing { .. })));
    }

    #[test]
    fn refinement_converges_at_probe_points() {
        let bp = small();
        let g = build_grid(&bp, &GridPolicy::spectral()).unwrap();
        let fine = FrequencyGrid::square(
            FrequencyAxis::new(g.nu1.step() / 2.0, g.nu1.half_points() * 2).unwrap(),
        );
        let coarse_jsa = sample_jsa(&bp, &g).unwrap();
        let fine_jsa = sample_jsa(&bp, &fine).unwrap();
        assert!((coarse_jsa.raw_norm() / fine_jsa.raw_norm() - 1.0).abs() < 1e-3);

        let peak = fine_jsa.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let e = bp.width_estimates().unwrap();
        for _ in 0..100 {
            // probe near the support: along the anti-diagonal ridge
            let v1 = rng.random_range(-1.5..1.5) * e.single;
            let v2 = -v1 + rng.random_range(-2.0..2.0) * e.coincidence;
            let (Some(a), Some(b)) = (coarse_jsa.interpolate(v1, v2), fine_jsa.interpolate(v1, v2)) else {
                continue;
            };
            assert!((a - b).abs() < 1e-3 * peak, "({v1:e},{v2:e}): {a} vs {b}");
        }
    }

    #[test]
    fn implicit_rows_match_dense() {
        let bp = small();
        let g = build_grid(&bp, &GridPolicy::spectral()).unwrap();
        let dense = sample_jsa(&bp, &g).unwrap();
        let implicit = ImplicitJsa::new(bp, g).unwrap();
        let scale = dense.raw_norm().sqrt();
        let n = g.nu1.len();
        let mut row = vec![0.0; n];
        for i in (0..n).step_by(37) {
            implicit.fill_row(i, &mut row);
            for j in 0..n {
                let d = dense.get(i, j) * scale;
                assert!((row[j] - d).abs() <= 1e-15 * d.abs() + ImplicitJsa::ENVELOPE_FLOOR, "{i} {j}: {} {d}", row[j]);
            }
        }
    }

    #[test]
    fn evaluation_order_does_not_matter() {
        let bp = small();
        let g = build_grid(&bp, &GridPolicy::spectral()).unwrap();
        let a = sample_jsa(&bp, &g).unwrap();
        let b = sample_jsa(&bp, &g).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| sample_jsa(&bp, &g).unwrap());
        assert_eq!(a, c);
    }
}
