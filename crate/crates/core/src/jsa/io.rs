//! Joint-spectral-amplitude dumps.
//!
//! Two formats, both written with 17 significant digits so values round-trip
//! exactly:
//!
//! * CSV with header `nu1_rad_s,nu2_rad_s,amplitude`, one row per grid point,
//!   `nu1` major.
//! * Dense matrix text: `n1` lines of `n2` whitespace-separated amplitudes,
//!   plus two sidecar files holding the `nu1` and `nu2` axes, one value per
//!   line.

use std::io::{BufRead, Write};

use super::grid::{FrequencyAxis, FrequencyGrid};
use super::sample::JointSpectralAmplitude;
use crate::error::{Error, Result};

pub const JSA_CSV_HEADER: &str = "nu1_rad_s,nu2_rad_s,amplitude";

/// Parsed dump, values exactly as stored.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaDump {
    pub nu1: Vec<f64>,
    pub nu2: Vec<f64>,
    /// Row-major `nu1.len() x nu2.len()`.
    pub amplitude: Vec<f64>,
}

impl JsaDump {
    pub fn from_jsa(jsa: &JointSpectralAmplitude) -> Self {
        Self {
            nu1: jsa.grid().nu1.values(),
            nu2: jsa.grid().nu2.values(),
            amplitude: jsa.data().to_vec(),
        }
    }

    /// Rebuilds the grid (axes must be uniform and symmetric) and the
    /// normalised amplitude.
    pub fn into_jsa(self) -> Result<JointSpectralAmplitude> {
        let grid = FrequencyGrid::new(axis_from_values(&self.nu1)?, axis_from_values(&self.nu2)?);
        JointSpectralAmplitude::from_raw(grid, self.amplitude)
    }
}

fn axis_from_values(v: &[f64]) -> Result<FrequencyAxis> {
    if v.len() < 3 || v.len().is_multiple_of(2) {
        return Err(Error::Ingestion(format!("axis has {} points; expected an odd count >= 3", v.len())));
    }
    let m = (v.len() - 1) / 2;
    let step = v[v.len() - 1] / m as f64;
    let axis = FrequencyAxis::new(step, m)
        .map_err(|e| Error::Ingestion(format!("axis: {e}")))?;
    for (i, &x) in v.iter().enumerate() {
        if (x - axis.value(i)).abs() > 1e-9 * step {
            return Err(Error::Ingestion(format!(
                "axis point {i} = {x} breaks uniform symmetric spacing"
            )));
        }
    }
    Ok(axis)
}

pub fn write_jsa_csv(jsa: &JointSpectralAmplitude, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{JSA_CSV_HEADER}")?;
    let g = jsa.grid();
    for i in 0..g.nu1.len() {
        let v1 = g.nu1.value(i);
        for (j, a) in jsa.row(i).iter().enumerate() {
            writeln!(out, "{v1:.16e},{:.16e},{a:.16e}", g.nu2.value(j))?;
        }
    }
    Ok(())
}

pub fn read_jsa_csv(input: impl BufRead) -> Result<JsaDump> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Ingestion("empty JSA file".into()))?
        .map_err(|e| Error::Ingestion(e.to_string()))?;
    if header.trim() != JSA_CSV_HEADER {
        return Err(Error::Ingestion(format!("expected header `{JSA_CSV_HEADER}`, got `{header}`")));
    }
    let mut nu1 = Vec::new();
    let mut nu2 = Vec::new();
    let mut amplitude = Vec::new();
    for (ln, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Ingestion(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let vals = parse_fields(&line, ',', ln + 2)?;
        if vals.len() != 3 {
            return Err(Error::Ingestion(format!("line {}: expected 3 fields", ln + 2)));
        }
        if nu1.last() != Some(&vals[0]) {
            nu1.push(vals[0]);
        }
        if nu1.len() == 1 {
            nu2.push(vals[1]);
        }
        amplitude.push(vals[2]);
    }
    if nu1.is_empty() || amplitude.len() != nu1.len() * nu2.len() {
        return Err(Error::Ingestion("JSA CSV is not a complete rectangular grid".into()));
    }
    Ok(JsaDump { nu1, nu2, amplitude })
}

pub fn write_jsa_matrix(
    jsa: &JointSpectralAmplitude,
    mut matrix: impl Write,
    mut nu1: impl Write,
    mut nu2: impl Write,
) -> std::io::Result<()> {
    let g = jsa.grid();
    for i in 0..g.nu1.len() {
        let row: Vec<String> = jsa.row(i).iter().map(|a| format!("{a:.16e}")).collect();
        writeln!(matrix, "{}", row.join(" "))?;
    }
    for v in g.nu1.values() {
        writeln!(nu1, "{v:.16e}")?;
    }
    for v in g.nu2.values() {
        writeln!(nu2, "{v:.16e}")?;
    }
    Ok(())
}

pub fn read_jsa_matrix(matrix: impl BufRead, nu1: impl BufRead, nu2: impl BufRead) -> Result<JsaDump> {
    let column = |r: &mut dyn BufRead| -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for (ln, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Ingestion(e.to_string()))?;
            if !line.trim().is_empty() {
                out.extend(parse_fields(&line, ' ', ln + 1)?);
            }
        }
        Ok(out)
    };
    let (mut nu1, mut nu2) = (nu1, nu2);
    let nu1 = column(&mut nu1)?;
    let nu2 = column(&mut nu2)?;
    let mut amplitude = Vec::with_capacity(nu1.len() * nu2.len());
    for (ln, line) in matrix.lines().enumerate() {
        let line = line.map_err(|e| Error::Ingestion(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_fields(&line, ' ', ln + 1)?;
        if row.len() != nu2.len() {
            return Err(Error::Ingestion(format!(
                "matrix line {}: {} values, axis has {}",
                ln + 1,
                row.len(),
                nu2.len()
            )));
        }
        amplitude.extend(row);
    }
    if amplitude.len() != nu1.len() * nu2.len() {
        return Err(Error::Ingestion("matrix row count does not match the nu1 axis".into()));
    }
    Ok(JsaDump { nu1, nu2, amplitude })
}

fn parse_fields(line: &str, sep: char, line_no: usize) -> Result<Vec<f64>> {
    let fields: Box<dyn Iterator<Item = &str>> = if sep == ' ' {
        Box::new(line.split_whitespace())
    } else {
        Box::new(line.split(sep))
    };
    fields
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Error::Ingestion(format!("line {line_no}: cannot parse `{f}`")))
        })
        .collect()
}
