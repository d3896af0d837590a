//! Refractive-index models.

use serde::Deserialize;

use crate::error::{Error, Result};

/// Refractive index and its first two wavelength derivatives, with the
/// wavelength in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexJet {
    pub n: f64,
    pub dn: f64,
    pub d2n: f64,
}

/// Closed-form dispersion laws. Wavelengths inside the formulas are in
/// micrometres, as in the usual coefficient tables.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    /// `n = n0`
    Constant(f64),
    /// `n = n0 + alpha * l^2`
    Quadratic { n0: f64, alpha: f64 },
    /// `n^2 = a + b / (l^2 - c) - d * l^2`, the four-term form used by
    /// most nonlinear-crystal handbooks.
    Handbook { a: f64, b: f64, c: f64, d: f64 },
    /// `n^2 = 1 + sum_i B_i l^2 / (l^2 - C_i)`
    Sellmeier(Vec<(f64, f64)>),
}

/// A dispersion law plus the wavelength range it may be evaluated in.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexModel {
    form: Form,
    window_nm: (f64, f64),
}

impl IndexModel {
    pub fn new(form: Form, window_nm: (f64, f64)) -> Result<Self> {
        let (lo, hi) = window_nm;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::invalid(format!(
                "validity window [{lo}, {hi}] nm must be positive and increasing"
            )));
        }
        Ok(Self { form, window_nm })
    }

    pub fn constant(n: f64) -> Self {
        Self {
            form: Form::Constant(n),
            window_nm: (1.0, 1.0e6),
        }
    }

    pub fn vacuum() -> Self {
        Self::constant(1.0)
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn window_nm(&self) -> (f64, f64) {
        self.window_nm
    }

    pub fn check_window(&self, lambda_nm: f64) -> Result<()> {
        let (lo, hi) = self.window_nm;
        if lambda_nm.is_finite() && lambda_nm >= lo && lambda_nm <= hi {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "wavelength",
                value: lambda_nm,
                min: lo,
                max: hi,
                unit: "nm",
            })
        }
    }

    pub fn index(&self, lambda_nm: f64) -> Result<f64> {
        Ok(self.jet(lambda_nm)?.n)
    }

    /// Index with analytic derivatives. Every built-in form is closed-form,
    /// so this never falls back to differencing.
    pub fn jet(&self, lambda_nm: f64) -> Result<IndexJet> {
        self.check_window(lambda_nm)?;
        let l = lambda_nm * 1e-3;
        // derivatives w.r.t. micrometres first, rescaled at the end
        let (n, dn, d2n) = match &self.form {
            Form::Constant(n0) => (*n0, 0.0, 0.0),
            Form::Quadratic { n0, alpha } => (n0 + alpha * l * l, 2.0 * alpha * l, 2.0 * alpha),
            Form::Handbook { a, b, c, d } => {
                let l2 = l * l;
                let q = l2 - c;
                let s = a + b / q - d * l2;
                let ds = -2.0 * b * l / (q * q) - 2.0 * d * l;
                let d2s = -2.0 * b / (q * q) + 8.0 * b * l2 / (q * q * q) - 2.0 * d;
                from_square(s, ds, d2s)
            }
            Form::Sellmeier(terms) => {
                let l2 = l * l;
                let (mut s, mut ds, mut d2s) = (1.0, 0.0, 0.0);
                for &(bi, ci) in terms {
                    // B l^2/(l^2 - C) = B + B C/(l^2 - C)
                    let q = l2 - ci;
                    s += bi + bi * ci / q;
                    ds += -2.0 * bi * ci * l / (q * q);
                    d2s += -2.0 * bi * ci / (q * q) + 8.0 * bi * ci * l2 / (q * q * q);
                }
                from_square(s, ds, d2s)
            }
        };
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Numerical(format!(
                "index model returned n = {n} at {lambda_nm} nm"
            )));
        }
        Ok(IndexJet {
            n,
            dn: dn * 1e6,
            d2n: d2n * 1e12,
        })
    }
}

fn from_square(s: f64, ds: f64, d2s: f64) -> (f64, f64, f64) {
    let n = s.sqrt();
    let dn = ds / (2.0 * n);
    let d2n = (d2s - 2.0 * dn * dn) / (2.0 * n);
    (n, dn, d2n)
}

/// Index of the extraordinary wave propagating at `theta` (rad) to the
/// optic axis of a uniaxial crystal:
/// `1/n(theta)^2 = cos^2/n_o^2 + sin^2/n_e^2`.
pub fn angle_index_jet(o: IndexJet, e: IndexJet, theta: f64) -> IndexJet {
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    // u = c2 / n_o^2 + s2 / n_e^2, n = u^(-1/2)
    let part = |j: IndexJet, w: f64| {
        let inv2 = 1.0 / (j.n * j.n);
        let u = w * inv2;
        let du = -2.0 * w * j.dn / (j.n * j.n * j.n);
        let d2u = w * (6.0 * j.dn * j.dn / j.n.powi(4) - 2.0 * j.d2n / j.n.powi(3));
        (u, du, d2u)
    };
    let (uo, duo, d2uo) = part(o, c2);
    let (ue, due, d2ue) = part(e, s2);
    let (u, du, d2u) = (uo + ue, duo + due, d2uo + d2ue);
    let n = u.powf(-0.5);
    let dn = -0.5 * u.powf(-1.5) * du;
    let d2n = 0.75 * u.powf(-2.5) * du * du - 0.5 * u.powf(-1.5) * d2u;
    IndexJet { n, dn, d2n }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Ordinary,
    Extraordinary,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormTag {
    Constant,
    Quadratic,
    Handbook,
    Sellmeier,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexEntry {
    polarization: Polarization,
    form: FormTag,
    coefficients: Vec<f64>,
    window_nm: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    name: Option<String>,
    index: Vec<IndexEntry>,
}

/// Dispersion data for a uniaxial (or isotropic) crystal as read from a
/// model file.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionData {
    pub name: Option<String>,
    pub ordinary: IndexModel,
    pub extraordinary: Option<IndexModel>,
}

/// Parses a dispersion model file.
///
/// ```toml
/// name = "LiIO3"
///
/// [[index]]
/// polarization = "ordinary"        # or "extraordinary"
/// form = "handbook"                # constant | quadratic | handbook | sellmeier
/// coefficients = [3.415716, 0.047031, 0.035306, 0.008801]
/// window_nm = [300.0, 5500.0]
/// ```
///
/// Coefficient counts: constant 1 (`n`), quadratic 2 (`n0, alpha`),
/// handbook 4 (`a, b, c, d`), sellmeier an even number of `B_i, C_i` pairs.
/// Wavelengths inside formulas are in micrometres.
pub fn parse_dispersion_model(text: &str) -> Result<DispersionData> {
    let file: ModelFile =
        toml::from_str(text).map_err(|e| Error::Ingestion(format!("dispersion model: {e}")))?;
    let mut ordinary = None;
    let mut extraordinary = None;
    for (i, entry) in file.index.iter().enumerate() {
        let key = |k: &str| format!("index[{i}].{k}");
        let c = &entry.coefficients;
        let need = |n: usize| {
            if c.len() == n {
                Ok(())
            } else {
                Err(Error::Ingestion(format!(
                    "{}: form {:?} takes {n} values, got {}",
                    key("coefficients"),
                    entry.form,
                    c.len()
                )))
            }
        };
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Ingestion(format!("{}: non-finite value", key("coefficients"))));
        }
        let form = match entry.form {
            FormTag::Constant => {
                need(1)?;
                Form::Constant(c[0])
            }
            FormTag::Quadratic => {
                need(2)?;
                Form::Quadratic { n0: c[0], alpha: c[1] }
            }
            FormTag::Handbook => {
                need(4)?;
                Form::Handbook { a: c[0], b: c[1], c: c[2], d: c[3] }
            }
            FormTag::Sellmeier => {
                if c.is_empty() || c.len() % 2 != 0 {
                    return Err(Error::Ingestion(format!(
                        "{}: sellmeier form takes B, C pairs, got {} values",
                        key("coefficients"),
                        c.len()
                    )));
                }
                Form::Sellmeier(c.chunks(2).map(|p| (p[0], p[1])).collect())
            }
        };
        let model = IndexModel::new(form, (entry.window_nm[0], entry.window_nm[1]))
            .map_err(|e| Error::Ingestion(format!("{}: {e}", key("window_nm"))))?;
        let slot = match entry.polarization {
            Polarization::Ordinary => &mut ordinary,
            Polarization::Extraordinary => &mut extraordinary,
        };
        if slot.replace(model).is_some() {
            return Err(Error::Ingestion(format!(
                "{}: duplicate {:?} entry",
                key("polarization"),
                entry.polarization
            )));
        }
    }
    let ordinary = ordinary
        .ok_or_else(|| Error::Ingestion("index: no entry with polarization = \"ordinary\"".into()))?;
    Ok(DispersionData {
        name: file.name,
        ordinary,
        extraordinary,
    })
}
