use super::Biphoton;
use crate::error::{Error, Result};

/// Uniform axis symmetric about zero: `2m + 1` points `(i - m) * step`.
///
/// Points are generated from integers, so the axis is exactly symmetric
/// and contains zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyAxis {
    step: f64,
    half_points: usize,
}

impl FrequencyAxis {
    pub fn new(step: f64, half_points: usize) -> Result<Self> {
        if half_points == 0 {
            return Err(Error::invalid("axis needs at least 3 points"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::invalid(format!("axis step {step} must be positive")));
        }
        Ok(Self { step, half_points })
    }

    /// `points` (odd, >= 3) evenly spaced points on `[-half_span, half_span]`.
    pub fn with_points(half_span: f64, points: usize) -> Result<Self> {
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "axis point count must be odd and at least 3, got {points}"
            )));
        }
        let m = (points - 1) / 2;
        Self::new(half_span / m as f64, m)
    }

    pub fn len(&self) -> usize {
        2 * self.half_points + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn half_points(&self) -> usize {
        self.half_points
    }

    pub fn half_span(&self) -> f64 {
        self.half_points as f64 * self.step
    }

    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        (i as f64 - self.half_points as f64) * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half_span()
    }

    /// Fractional index of `x` on the axis.
    pub fn position(&self, x: f64) -> f64 {
        x / self.step + self.half_points as f64
    }

    /// Every other point (same span, half the density).
    pub fn coarsened(&self) -> Option<Self> {
        if self.half_points.is_multiple_of(2) && self.half_points >= 2 {
            Some(Self {
                step: 2.0 * self.step,
                half_points: self.half_points / 2,
            })
        } else {
            None
        }
    }

    /// Trapezoidal weight of point `i`.
    #[inline]
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.len() {
            0.5 * self.step
        } else {
            self.step
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub nu1: FrequencyAxis,
    pub nu2: FrequencyAxis,
}

impl FrequencyGrid {
    pub fn new(nu1: FrequencyAxis, nu2: FrequencyAxis) -> Self {
        Self { nu1, nu2 }
    }

    pub fn square(axis: FrequencyAxis) -> Self {
        Self { nu1: axis, nu2: axis }
    }

    pub fn is_square(&self) -> bool {
        self.nu1 == self.nu2
    }

    pub fn points(&self) -> usize {
        self.nu1.len() * self.nu2.len()
    }

    /// Bytes needed to hold the grid densely as `f64`.
    pub fn dense_memory_bytes(&self) -> usize {
        self.points() * std::mem::size_of::<f64>()
    }

    pub fn cell_area(&self) -> f64 {
        self.nu1.step() * self.nu2.step()
    }
}

/// Sizing rules for a square grid derived from the amplitude's feature
/// scales: the step must resolve the coincidence width, the span must
/// cover the single-count width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPolicy {
    /// Half-span in units of the single-count width.
    pub span_factor: f64,
    /// Largest admissible step in units of the coincidence width.
    pub max_step_fraction: f64,
    /// Use exactly this many points per axis (odd). `None` picks the
    /// smallest count meeting the step rule.
    pub points_per_axis: Option<usize>,
    /// Refuse grids with more points per axis than this.
    pub max_points_per_axis: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self::spectral()
    }
}

impl GridPolicy {
    /// Spectra: step <= coincidence/8, half-span >= 3 x single width.
    pub fn spectral() -> Self {
        Self {
            span_factor: 3.0,
            max_step_fraction: 1.0 / 8.0,
            points_per_axis: None,
            max_points_per_axis: 65_537,
        }
    }

    /// Dense Schmidt decomposition: the singular spectrum converges at a
    /// much coarser step and needs less margin than width measurements do.
    pub fn schmidt() -> Self {
        Self {
            span_factor: 1.5,
            max_step_fraction: 1.0 / 3.0,
            points_per_axis: None,
            max_points_per_axis: 4097,
        }
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points_per_axis = Some(points);
        self
    }

    pub fn with_max_points(mut self, max: usize) -> Self {
        self.max_points_per_axis = max;
        self
    }
}

/// Square grid around degeneracy sized by `policy`.
pub fn build_grid(biphoton: &Biphoton, policy: &GridPolicy) -> Result<FrequencyGrid> {
    if !(policy.span_factor > 0.0 && policy.max_step_fraction > 0.0) {
        return Err(Error::invalid("grid policy factors must be positive"));
    }
    let est = biphoton.width_estimates()?;
    let half_span = policy.span_factor * est.single;
    let max_step = policy.max_step_fraction * est.coincidence;
    let m_needed = (half_span / max_step).ceil() as usize;
    let m = match policy.points_per_axis {
        Some(p) if p < 3 => {
            return Err(Error::invalid(format!("grid needs at least 3 points per axis, got {p}")))
        }
        Some(p) => (p - 1) / 2,
        // even, so the grid can be halved for convergence checks
        None => m_needed.max(2) + m_needed.max(2) % 2,
    };
    if m < m_needed {
        let step = half_span / m as f64;
        return Err(Error::Sizing {
            reason: format!(
                "{} points per axis give step {step:.3e} rad/s > required {max_step:.3e}",
                2 * m + 1
            ),
            suggestion: format!(
                "use at least {} points, or reduce the half-span to {:.3e} rad/s",
                2 * m_needed + 1,
                m as f64 * max_step
            ),
        });
    }
    let n = 2 * m + 1;
    if n > policy.max_points_per_axis {
        let cap_m = (policy.max_points_per_axis.saturating_sub(1) / 2).max(1) as f64;
        return Err(Error::Sizing {
            reason: format!(
                "{n} points per axis exceed the budget of {} ({:.1} MiB dense)",
                policy.max_points_per_axis,
                (n * n * 8) as f64 / (1 << 20) as f64
            ),
            suggestion: format!(
                "at this span the budget allows step {:.3e} rad/s ({:.2} x coincidence width); \
                 at this step it allows half-span {:.3e} rad/s ({:.2} x single width)",
                half_span / cap_m,
                half_span / cap_m / est.coincidence,
                cap_m * max_step,
                cap_m * max_step / est.single
            ),
        });
    }
    let axis = FrequencyAxis::new(half_span / m as f64, m)?;
    let grid = FrequencyGrid::square(axis);
    if half_span > biphoton.validity_limit() {
        log::warn!(
            "grid half-span {half_span:.3e} rad/s exceeds {:.1} w_p",
            super::VALIDITY_FRACTION
        );
    }
    log::debug!(
        "grid {n} x {n}, step {:.3e} rad/s, dense size {:.1} MiB",
        axis.step(),
        grid.dense_memory_bytes() as f64 / (1 << 20) as f64
    );
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsa::tests::table1;

    #[test]
    fn axis_is_symmetric_and_uniform() {
        let ax = FrequencyAxis::with_points(3.0, 7).unwrap();
        let v = ax.values();
        assert_eq!(v, vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        for i in 0..ax.len() {
            assert_eq!(ax.value(i), -ax.value(ax.len() - 1 - i));
        }
        assert!(FrequencyAxis::with_points(1.0, 1).is_err());
        assert!(FrequencyAxis::with_points(1.0, 4).is_err());
        assert_eq!(ax.coarsened(), None);
        let c = FrequencyAxis::with_points(4.0, 9).unwrap().coarsened().unwrap();
        assert_eq!(c.values(), vec![-4.0, -2.0, 0.0, 2.0, 4.0]);
    }

    #[test]
    fn table1_default_grid_meets_resolution() {
        let bp = table1();
        let g = build_grid(&bp, &GridPolicy::spectral()).unwrap();
        assert!(g.is_square());
        assert!(g.nu1.step() <= 1.19e11 * 1.001, "{}", g.nu1.step());
        assert!(g.nu1.half_span() >= 8.94e14, "{}", g.nu1.half_span());
        let e = bp.width_estimates().unwrap();
        assert!(g.nu1.step() <= e.coincidence_short / 8.0);
        assert!(g.nu1.half_span() >= 3.0 * e.single_short);
    }

    #[test]
    fn degenerate_point_count_rejected() {
        let r = build_grid(&table1(), &GridPolicy::spectral().with_points(1));
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn doubling_budget_halves_step() {
        let bp = table1();
        let base = build_grid(&bp, &GridPolicy::spectral()).unwrap();
        let p = base.nu1.len();
        let twice = build_grid(&bp, &GridPolicy::spectral().with_points(2 * p)).unwrap();
        assert_eq!(twice.nu1.half_span(), base.nu1.half_span());
        assert!((twice.nu1.step() * 2.0 - base.nu1.step()).abs() < 1e-9 * base.nu1.step());
    }

    #[test]
    fn over_budget_is_a_sizing_error_with_suggestion() {
        let err = build_grid(&table1(), &GridPolicy::spectral().with_max_points(1001)).unwrap_err();
        match err {
            Error::Sizing { suggestion, .. } => assert!(suggestion.contains("budget allows")),
            other => panic!("{other}"),
        }
        let err = build_grid(&table1(), &GridPolicy::spectral().with_points(101)).unwrap_err();
        assert!(matches!(err, Error::Sizing { .. }));
    }

    #[test]
    fn no_walkoff_cannot_be_sized() {
        let bp = Biphoton { a: 0.0, ..table1() };
        assert!(matches!(build_grid(&bp, &GridPolicy::spectral()), Err(Error::Regime(_))));
    }
}
