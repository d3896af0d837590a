use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::units::{angular_frequency, wavelength_nm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisUnit {
    /// Angular-frequency detuning, rad/s.
    RadPerSecond,
    /// Vacuum wavelength, nm.
    Nanometre,
}

impl AxisUnit {
    /// Column suffix used in CSV headers.
    pub fn tag(self) -> &'static str {
        match self {
            AxisUnit::RadPerSecond => "rad_s",
            AxisUnit::Nanometre => "nm",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "rad_s" => Some(AxisUnit::RadPerSecond),
            "nm" => Some(AxisUnit::Nanometre),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Coincidence,
    Single,
    Measured,
}

/// Peak-normalised intensity on a strictly increasing axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    axis: Vec<f64>,
    intensity: Vec<f64>,
    unit: AxisUnit,
    kind: SpectrumKind,
    center: f64,
    scale: f64,
}

impl Spectrum {
    /// Normalises `values` to peak 1, keeping the peak value as `scale`.
    pub fn new(axis: Vec<f64>, values: Vec<f64>, unit: AxisUnit, kind: SpectrumKind) -> Result<Self> {
        if axis.len() != values.len() {
            return Err(Error::invalid(format!(
                "axis has {} points but intensity has {}",
                axis.len(),
                values.len()
            )));
        }
        if axis.len() < 2 {
            return Err(Error::invalid("spectrum needs at least 2 points"));
        }
        if axis.windows(2).any(|w| !(w[1] > w[0])) || axis.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("spectrum axis must be finite and strictly increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("intensity must be finite and nonnegative"));
        }
        let (imax, &scale) = values
            .iter()
            .enumerate()
            .fold((0, &values[0]), |best, cur| if cur.1 > best.1 { cur } else { best });
        if scale <= 0.0 {
            return Err(Error::invalid("intensity is identically zero"));
        }
        let intensity = values.iter().map(|v| v / scale).collect();
        Ok(Self {
            center: axis[imax],
            axis,
            intensity,
            unit,
            kind,
            scale,
        })
    }

    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn unit(&self) -> AxisUnit {
        self.unit
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    /// Axis value at the maximum.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Peak value before normalisation.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    /// Trapezoidal integral of the un-normalised intensity.
    pub fn integral(&self) -> f64 {
        let s: f64 = self
            .axis
            .windows(2)
            .zip(self.intensity.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum();
        s * self.scale
    }

    /// Step of a uniform axis, or `None` when spacings differ by more than
    /// `1e-9` relative (plus rounding of the axis values).
    pub fn uniform_step(&self) -> Option<f64> {
        let n = self.axis.len();
        let h = (self.axis[n - 1] - self.axis[0]) / (n - 1) as f64;
        let edge = self.axis[0].abs().max(self.axis[n - 1].abs());
        let tol = 1e-9 * h + 8.0 * f64::EPSILON * edge;
        self.axis
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= tol)
            .then_some(h)
    }

    /// Maps a detuning spectrum onto wavelength around `center_nm`
    /// (`lambda = 2 pi c / (w_c + v)`) and resamples it linearly onto a
    /// uniform wavelength axis with the same number of points.
    ///
    /// Intensities are carried per sample; no spectral-density Jacobian is
    /// applied.
    pub fn to_wavelength(&self, center_nm: f64) -> Result<Spectrum> {
        if self.unit != AxisUnit::RadPerSecond {
            return Err(Error::invalid("spectrum is already on a wavelength axis"));
        }
        let wc = angular_frequency(center_nm);
        if self.axis[0] <= -wc {
            return Err(Error::invalid("detuning axis reaches zero optical frequency"));
        }
        let mut pts: Vec<(f64, f64)> = self
            .axis
            .iter()
            .zip(&self.intensity)
            .map(|(v, y)| (wavelength_nm(wc + v), *y))
            .collect();
        pts.reverse();
        let n = pts.len();
        let (lo, hi) = (pts[0].0, pts[n - 1].0);
        let axis: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect();
        let mut values = Vec::with_capacity(n);
        let mut k = 0;
        for &x in &axis {
            while k + 2 < n && pts[k + 1].0 < x {
                k += 1;
            }
            let (x0, y0) = pts[k];
            let (x1, y1) = pts[k + 1];
            let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
            values.push(y0 + t * (y1 - y0));
        }
        let mut s = Spectrum::new(axis, values, AxisUnit::Nanometre, self.kind)?;
        s.scale *= self.scale;
        Ok(s)
    }

    /// CSV with header `axis_<unit>,intensity`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "axis_{},intensity", self.unit.tag())?;
        for (x, y) in self.axis.iter().zip(&self.intensity) {
            writeln!(out, "{x:.10e},{y:.10e}")?;
        }
        Ok(())
    }
}

/// Measured samples as read from CSV; not normalised.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredSpectrum {
    pub unit: AxisUnit,
    pub axis: Vec<f64>,
    pub intensity: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
}

impl MeasuredSpectrum {
    pub fn to_spectrum(&self) -> Result<Spectrum> {
        let mut idx: Vec<usize> = (0..self.axis.len()).collect();
        idx.sort_by(|&a, &b| self.axis[a].total_cmp(&self.axis[b]));
        let axis = idx.iter().map(|&i| self.axis[i]).collect();
        let values = idx.iter().map(|&i| self.intensity[i].max(0.0)).collect();
        Spectrum::new(axis, values, self.unit, SpectrumKind::Measured)
    }
}

/// Reads `axis_<unit>,intensity[,sigma]`. Blank lines and lines starting
/// with `#` are skipped.
pub fn read_spectrum_csv(input: impl BufRead) -> Result<MeasuredSpectrum> {
    let mut rows = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty() && !l.trim_start().starts_with('#')));
    let (_, header) = rows.next().ok_or_else(|| Error::Ingestion("spectrum CSV is empty".into()))?;
    let header = header.map_err(|e| Error::Ingestion(e.to_string()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let unit = cols
        .first()
        .and_then(|c| c.strip_prefix("axis_"))
        .and_then(AxisUnit::from_tag)
        .ok_or_else(|| Error::Ingestion(format!("header must start with axis_nm or axis_rad_s, got `{header}`")))?;
    let with_sigma = match &cols[1..] {
        ["intensity"] => false,
        ["intensity", "sigma"] => true,
        _ => {
            return Err(Error::Ingestion(format!(
                "header must be `axis_<unit>,intensity[,sigma]`, got `{header}`"
            )))
        }
    };
    let width = if with_sigma { 3 } else { 2 };
    let (mut axis, mut intensity, mut sigma) = (Vec::new(), Vec::new(), Vec::new());
    for (line_no, line) in rows {
        let line = line.map_err(|e| Error::Ingestion(e.to_string()))?;
        let vals: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Ingestion(format!("line {line_no}: cannot parse `{}`", f.trim())))
            })
            .collect::<Result<_>>()?;
        if vals.len() != width {
            return Err(Error::Ingestion(format!(
                "line {line_no}: expected {width} fields, found {}",
                vals.len()
            )));
        }
        axis.push(vals[0]);
        intensity.push(vals[1]);
        if with_sigma {
            if vals[2] <= 0.0 {
                return Err(Error::Ingestion(format!("line {line_no}: sigma must be positive")));
            }
            sigma.push(vals[2]);
        }
    }
    if axis.is_empty() {
        return Err(Error::Ingestion("spectrum CSV has no data rows".into()));
    }
    Ok(MeasuredSpectrum {
        unit,
        axis,
        intensity,
        sigma: with_sigma.then_some(sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalises_to_unit_peak() {
        let s = Spectrum::new(vec![0.0, 1.0, 2.0], vec![1.0, 4.0, 2.0], AxisUnit::Nanometre, SpectrumKind::Measured)
            .unwrap();
        assert_eq!(s.intensity(), &[0.25, 1.0, 0.5]);
        assert_eq!(s.center(), 1.0);
        assert_eq!(s.scale(), 4.0);
        assert!((s.integral() - 5.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_axes() {
        let k = SpectrumKind::Measured;
        let u = AxisUnit::Nanometre;
        assert!(Spectrum::new(vec![0.0, 0.0], vec![1.0, 1.0], u, k).is_err());
        assert!(Spectrum::new(vec![0.0, 1.0], vec![0.0, 0.0], u, k).is_err());
        assert!(Spectrum::new(vec![0.0, 1.0], vec![-1.0, 1.0], u, k).is_err());
    }

    #[test]
    fn wavelength_mapping_centres_on_carrier() {
        let axis: Vec<f64> = (-50..=50).map(|i| i as f64 * 1e11).collect();
        let vals: Vec<f64> = axis.iter().map(|v| (-v * v / 1e24).exp()).collect();
        let s = Spectrum::new(axis, vals, AxisUnit::RadPerSecond, SpectrumKind::Single).unwrap();
        let w = s.to_wavelength(795.0).unwrap();
        assert_eq!(w.unit(), AxisUnit::Nanometre);
        assert!((w.center() - 795.0).abs() < 0.02, "{}", w.center());
        assert!(w.uniform_step().is_some());
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let s = Spectrum::new(vec![794.0, 795.0, 796.0], vec![0.5, 1.0, 0.25], AxisUnit::Nanometre, SpectrumKind::Coincidence)
            .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let m = read_spectrum_csv(buf.as_slice()).unwrap();
        assert_eq!(m.unit, AxisUnit::Nanometre);
        assert_eq!(m.intensity, s.intensity());
        assert!(m.sigma.is_none());

        let with_sigma = "axis_nm,intensity,sigma\n1,2,0.1\n2,3,0.1\n";
        assert_eq!(read_spectrum_csv(with_sigma.as_bytes()).unwrap().sigma, Some(vec![0.1, 0.1]));
        for bad in ["", "axis_nm,intensity\n", "x,y\n1,2\n", "axis_nm,intensity\n1,abc\n", "axis_nm,intensity\n1\n"] {
            assert!(matches!(read_spectrum_csv(bad.as_bytes()), Err(Error::Ingestion(_))), "{bad:?}");
        }
    }
}
