//! Run configuration: a TOML file, optionally layered over a shipped preset.
//!
//! ```toml
//! preset = "table1"               # optional base layer
//! crystal = "LiIO3-10mm-default"  # or a [crystal] table
//!
//! [crystal]
//! model = "LiIO3"                 # LiIO3 | vacuum | file
//! dispersion_file = "model.toml"  # model = "file" only
//! length_mm = 10.0
//! pump_angle_deg = 42.9           # default: phase-matched
//! anchor_a = 0.1748               # fix A and B instead of
//! anchor_b = 0.0695               # deriving them from dispersion
//!
//! [pump]
//! lambda_nm = 397.5
//! tau_fs = 186.0
//!
//! [grid]
//! spectral_points = 20001         # default: sized from the width estimates
//! spectral_max_points = 65537
//! schmidt_points = 2001
//! dense_cap = 2049                # largest axis the report decomposes
//!
//! [analysis]
//! idler_detuning_rad_s = 0.0
//! idler_window_rad_s = 0.0
//! resolution_nm = 0.2             # coincidence monochromator
//! single_resolution_nm = 1.0      # single-count monochromator
//! response = "gaussian"           # gaussian | rectangular
//! k_method = "auto"               # auto | decomposition | purity | skip
//! measured_coincidence = "coinc.csv"
//! measured_single = "singles.csv"
//!
//! [output]
//! directory = "out"
//! jsa = "none"                    # none | csv | matrix
//! jsa_points = 401
//!
//! [sweep]
//! tau_min_fs = 50.0
//! tau_max_fs = 10000.0
//! points = 40
//! ```
//!
//! Unknown keys are errors. Validation reports every problem found, each
//! with the key and, where it can be located, the line.

use std::fmt;
use std::path::{Path, PathBuf};

use biphoton::dispersion::{parse_dispersion_model, walkoff_constants, PumpAngle};
use biphoton::entanglement::KMethod;
use biphoton::spectra::ResponseShape;
use biphoton::{Crystal, PhaseMatchConstants, PumpSpec};
use toml::{Table, Value};

/// Reference walk-off and dispersion constants of LiIO3 pumped at 397.5 nm.
pub const REFERENCE_A: f64 = 0.1748;
pub const REFERENCE_B: f64 = 0.0695;
const REFERENCE_PUMP_NM: f64 = 397.5;

pub const PRESETS: [(&str, &str); 3] = [
    ("table1", include_str!("../presets/table1.toml")),
    ("table2", include_str!("../presets/table2.toml")),
    ("fig1", include_str!("../presets/fig1.toml")),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {}", self.key, self.message),
            None => write!(f, "`{}`: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CrystalModel {
    LithiumIodate,
    Vacuum,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSpec {
    pub name: String,
    pub model: CrystalModel,
    pub length_mm: f64,
    pub pump_angle_deg: Option<f64>,
    pub anchor: Option<(f64, f64)>,
}

impl CrystalSpec {
    /// Shipped crystal names.
    pub fn named(name: &str) -> Option<Self> {
        let (model, length_mm, anchor) = match name {
            "LiIO3-10mm-default" => (CrystalModel::LithiumIodate, 10.0, Some((REFERENCE_A, REFERENCE_B))),
            "LiIO3-5mm-default" => (CrystalModel::LithiumIodate, 5.0, Some((REFERENCE_A, REFERENCE_B))),
            "LiIO3-10mm-sellmeier" => (CrystalModel::LithiumIodate, 10.0, None),
            "LiIO3-5mm-sellmeier" => (CrystalModel::LithiumIodate, 5.0, None),
            "vacuum-test" => (CrystalModel::Vacuum, 10.0, None),
            _ => return None,
        };
        Some(Self {
            name: name.to_string(),
            model,
            length_mm,
            pump_angle_deg: None,
            anchor,
        })
    }
}

pub const CRYSTAL_NAMES: [&str; 5] = [
    "LiIO3-10mm-default",
    "LiIO3-5mm-default",
    "LiIO3-10mm-sellmeier",
    "LiIO3-5mm-sellmeier",
    "vacuum-test",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JsaFormat {
    None,
    Csv,
    Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub spectral_points: Option<usize>,
    pub spectral_max_points: usize,
    pub schmidt_points: Option<usize>,
    pub dense_cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSection {
    pub idler_detuning_rad_s: f64,
    pub idler_window_rad_s: f64,
    pub resolution_nm: Option<f64>,
    pub single_resolution_nm: Option<f64>,
    pub response: ResponseShape,
    pub k_method: KMethod,
    pub measured_coincidence: Option<PathBuf>,
    pub measured_single: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub jsa: JsaFormat,
    pub jsa_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub tau_min_fs: f64,
    pub tau_max_fs: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub crystal: CrystalSpec,
    pub lambda_nm: f64,
    pub tau_fs: f64,
    pub grid: GridSection,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
    pub sweep: SweepSection,
}

/// Everything the physics needs, resolved from a configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub crystal: Crystal,
    pub pump: PumpSpec,
    pub constants: PhaseMatchConstants,
}

impl RunConfig {
    pub fn length_m(&self) -> f64 {
        self.crystal.length_mm * 1e-3
    }

    pub fn with_tau_fs(mut self, tau_fs: f64) -> Self {
        self.tau_fs = tau_fs;
        self
    }

    /// Crystal, pump and phase-matching constants.
    pub fn resolve(&self) -> biphoton::Result<Resolved> {
        let length_m = self.length_m();
        let crystal = match &self.crystal.model {
            CrystalModel::LithiumIodate => Crystal::lithium_iodate(length_m),
            CrystalModel::Vacuum => Crystal::vacuum(length_m),
            CrystalModel::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    biphoton::Error::Ingestion(format!("dispersion file {}: {e}", path.display()))
                })?;
                Crystal::from_dispersion(parse_dispersion_model(&text)?, length_m)?
            }
        };
        let crystal = match self.crystal.pump_angle_deg {
            Some(deg) => crystal.with_pump_angle(PumpAngle::Fixed(deg.to_radians())),
            None => crystal,
        };
        let pump = PumpSpec::new(self.lambda_nm, self.tau_fs)?;
        let constants = match self.crystal.anchor {
            Some((a, b)) => {
                if (self.lambda_nm - REFERENCE_PUMP_NM).abs() > 5.0 && self.crystal.anchor == Some((REFERENCE_A, REFERENCE_B)) {
                    log::warn!(
                        "reference constants belong to a {REFERENCE_PUMP_NM} nm pump; using them at {} nm",
                        self.lambda_nm
                    );
                }
                PhaseMatchConstants::anchored(a, b, length_m, pump.tau_s())?
            }
            None => walkoff_constants(&crystal, &pump)?,
        };
        Ok(Resolved { crystal, pump, constants })
    }
}

/// Parses a configuration file; relative paths inside it resolve against
/// its directory.
pub fn parse_config(path: &Path) -> Result<RunConfig, Vec<ConfigIssue>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![ConfigIssue {
            key: path.display().to_string(),
            line: None,
            message: format!("cannot read: {e}"),
        }]
    })?;
    parse_config_str(&text, path.parent())
}

/// A shipped preset on its own.
pub fn preset_config(name: &str) -> Result<RunConfig, Vec<ConfigIssue>> {
    parse_config_str(&format!("preset = \"{name}\"\n"), None)
}

pub fn parse_config_str(text: &str, base_dir: Option<&Path>) -> Result<RunConfig, Vec<ConfigIssue>> {
    let user: Table = text.parse().map_err(|e: toml::de::Error| {
        vec![ConfigIssue {
            key: "<syntax>".into(),
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        }]
    })?;
    let mut v = Validator {
        text,
        preset_text: None,
        issues: Vec::new(),
    };
    let preset = match user.get("preset") {
        None => None,
        Some(Value::String(name)) => match preset_text(name) {
            Some(t) => Some((name.clone(), t)),
            None => {
                v.issue(
                    "",
                    "preset",
                    format!(
                        "unknown preset `{name}` (available: {})",
                        PRESETS.map(|p| p.0).join(", ")
                    ),
                );
                None
            }
        },
        Some(_) => {
            v.issue("", "preset", "expected a string".into());
            None
        }
    };
    let merged = match &preset {
        Some((_, ptext)) => {
            let base: Table = ptext.parse().expect("shipped presets are valid TOML");
            v.preset_text = Some(ptext);
            overlay(base, user)
        }
        None => user,
    };
    let cfg = v.run(&merged, preset.map(|p| p.0), base_dir);
    if v.issues.is_empty() {
        Ok(cfg.expect("complete configuration"))
    } else {
        Err(v.issues)
    }
}

/// `top` over `base`: tables merge key by key, anything else replaces.
fn overlay(mut base: Table, top: Table) -> Table {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => {
                let merged = overlay(std::mem::take(b), t);
                *b = merged;
            }
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
    base
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]` (top level when empty).
fn locate(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = h.trim().to_string();
            continue;
        }
        let name = line.split('=').next().unwrap_or("").trim();
        if current == section && name == key && line.contains('=') {
            return Some(i + 1);
        }
        // dotted or inline form at top level: `crystal.length_mm = ...`
        if current.is_empty() && !section.is_empty() && name == format!("{section}.{key}") {
            return Some(i + 1);
        }
    }
    None
}

struct Validator<'a> {
    text: &'a str,
    preset_text: Option<&'a str>,
    issues: Vec<ConfigIssue>,
}

const TOP_KEYS: [&str; 7] = ["preset", "crystal", "pump", "grid", "analysis", "output", "sweep"];
const CRYSTAL_KEYS: [&str; 6] = ["model", "dispersion_file", "length_mm", "pump_angle_deg", "anchor_a", "anchor_b"];
const PUMP_KEYS: [&str; 2] = ["lambda_nm", "tau_fs"];
const GRID_KEYS: [&str; 4] = ["spectral_points", "spectral_max_points", "schmidt_points", "dense_cap"];
const ANALYSIS_KEYS: [&str; 8] = [
    "idler_detuning_rad_s",
    "idler_window_rad_s",
    "resolution_nm",
    "single_resolution_nm",
    "response",
    "k_method",
    "measured_coincidence",
    "measured_single",
];
const OUTPUT_KEYS: [&str; 3] = ["directory", "jsa", "jsa_points"];
const SWEEP_KEYS: [&str; 3] = ["tau_min_fs", "tau_max_fs", "points"];

impl Validator<'_> {
    fn issue(&mut self, section: &str, key: &str, message: String) {
        let line = locate(self.text, section, key);
        let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        let message = if line.is_none() && self.preset_text.is_some_and(|p| locate(p, section, key).is_some()) {
            format!("{message} (from the preset)")
        } else {
            message
        };
        self.issues.push(ConfigIssue { key: full, line, message });
    }

    fn table<'t>(&mut self, root: &'t Table, name: &str, allowed: &[&str]) -> Option<&'t Table> {
        match root.get(name) {
            None => None,
            Some(Value::Table(t)) => {
                for k in t.keys() {
                    if !allowed.contains(&k.as_str()) {
                        self.issue(name, k, format!("unknown key (allowed: {})", allowed.join(", ")));
                    }
                }
                Some(t)
            }
            Some(_) => {
                self.issue("", name, "expected a table".into());
                None
            }
        }
    }

    fn number(&mut self, t: Option<&Table>, section: &str, key: &str) -> Option<f64> {
        match t?.get(key)? {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.issue(section, key, "expected a number".into());
                None
            }
        }
    }

    fn positive(&mut self, t: Option<&Table>, section: &str, key: &str) -> Option<f64> {
        let v = self.number(t, section, key)?;
        if v > 0.0 && v.is_finite() {
            Some(v)
        } else {
            self.issue(section, key, format!("must be positive, got {v}"));
            None
        }
    }

    fn required(&mut self, t: Option<&Table>, section: &str, key: &str) -> Option<f64> {
        if t.and_then(|t| t.get(key)).is_none() {
            self.issue(section, key, "missing required key".into());
            return None;
        }
        self.positive(t, section, key)
    }

    fn count(&mut self, t: Option<&Table>, section: &str, key: &str, min: usize) -> Option<usize> {
        match t?.get(key)? {
            Value::Integer(i) if *i >= min as i64 => Some(*i as usize),
            Value::Integer(i) => {
                self.issue(section, key, format!("must be at least {min}, got {i}"));
                None
            }
            _ => {
                self.issue(section, key, "expected an integer".into());
                None
            }
        }
    }

    fn string<'t>(&mut self, t: Option<&'t Table>, section: &str, key: &str) -> Option<&'t str> {
        match t?.get(key)? {
            Value::String(s) => Some(s),
            _ => {
                self.issue(section, key, "expected a string".into());
                None
            }
        }
    }

    fn path(&mut self, t: Option<&Table>, section: &str, key: &str, base: Option<&Path>) -> Option<PathBuf> {
        let s = self.string(t, section, key)?;
        let p = PathBuf::from(s);
        Some(match base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p,
        })
    }

    fn run(&mut self, root: &Table, preset: Option<String>, base: Option<&Path>) -> Option<RunConfig> {
        for k in root.keys() {
            if !TOP_KEYS.contains(&k.as_str()) {
                self.issue("", k, format!("unknown key (allowed: {})", TOP_KEYS.join(", ")));
            }
        }
        let crystal = self.crystal(root, base);

        let pump = self.table(root, "pump", &PUMP_KEYS);
        if pump.is_none() && !root.contains_key("pump") {
            self.issue("", "pump", "missing required section".into());
        }
        let lambda_nm = self.required(pump, "pump", "lambda_nm");
        let tau_fs = self.required(pump, "pump", "tau_fs");

        let g = self.table(root, "grid", &GRID_KEYS);
        let grid = GridSection {
            spectral_points: self.count(g, "grid", "spectral_points", 3),
            spectral_max_points: self.count(g, "grid", "spectral_max_points", 3).unwrap_or(65_537),
            schmidt_points: self.count(g, "grid", "schmidt_points", 3),
            dense_cap: self.count(g, "grid", "dense_cap", 3).unwrap_or(2049),
        };

        let a = self.table(root, "analysis", &ANALYSIS_KEYS);
        let response = match self.string(a, "analysis", "response") {
            None => ResponseShape::Gaussian,
            Some(s) => s.parse().unwrap_or_else(|e: biphoton::Error| {
                self.issue("analysis", "response", e.to_string());
                ResponseShape::Gaussian
            }),
        };
        let k_method = match self.string(a, "analysis", "k_method") {
            None | Some("auto") => KMethod::Auto,
            Some("decomposition") => KMethod::Decomposition,
            Some("purity") => KMethod::Purity,
            Some("skip") => KMethod::Skip,
            Some(other) => {
                self.issue(
                    "analysis",
                    "k_method",
                    format!("unknown method `{other}` (auto | decomposition | purity | skip)"),
                );
                KMethod::Auto
            }
        };
        let idler_window = self.number(a, "analysis", "idler_window_rad_s").unwrap_or(0.0);
        if idler_window < 0.0 {
            self.issue("analysis", "idler_window_rad_s", "must be nonnegative".into());
        }
        let analysis = AnalysisSection {
            idler_detuning_rad_s: self.number(a, "analysis", "idler_detuning_rad_s").unwrap_or(0.0),
            idler_window_rad_s: idler_window,
            resolution_nm: self.positive(a, "analysis", "resolution_nm"),
            single_resolution_nm: self.positive(a, "analysis", "single_resolution_nm"),
            response,
            k_method,
            measured_coincidence: self.path(a, "analysis", "measured_coincidence", base),
            measured_single: self.path(a, "analysis", "measured_single", base),
        };

        let o = self.table(root, "output", &OUTPUT_KEYS);
        let jsa = match self.string(o, "output", "jsa") {
            None | Some("none") => JsaFormat::None,
            Some("csv") => JsaFormat::Csv,
            Some("matrix") => JsaFormat::Matrix,
            Some(other) => {
                self.issue("output", "jsa", format!("unknown format `{other}` (none | csv | matrix)"));
                JsaFormat::None
            }
        };
        let jsa_points = self.count(o, "output", "jsa_points", 3).unwrap_or(401);
        if jsa_points.is_multiple_of(2) {
            self.issue("output", "jsa_points", "must be odd".into());
        }
        let output = OutputSection {
            directory: self.path(o, "output", "directory", base).unwrap_or_else(|| PathBuf::from("out")),
            jsa,
            jsa_points,
        };

        let s = self.table(root, "sweep", &SWEEP_KEYS);
        let sweep = SweepSection {
            tau_min_fs: self.positive(s, "sweep", "tau_min_fs").unwrap_or(50.0),
            tau_max_fs: self.positive(s, "sweep", "tau_max_fs").unwrap_or(10_000.0),
            points: self.count(s, "sweep", "points", 2).unwrap_or(40),
        };
        if sweep.tau_max_fs <= sweep.tau_min_fs {
            self.issue("sweep", "tau_max_fs", "must exceed tau_min_fs".into());
        }

        Some(RunConfig {
            preset,
            crystal: crystal?,
            lambda_nm: lambda_nm?,
            tau_fs: tau_fs?,
            grid,
            analysis,
            output,
            sweep,
        })
    }

    fn crystal(&mut self, root: &Table, base: Option<&Path>) -> Option<CrystalSpec> {
        match root.get("crystal") {
            None => {
                self.issue("", "crystal", "missing required key".into());
                None
            }
            Some(Value::String(name)) => CrystalSpec::named(name).or_else(|| {
                self.issue(
                    "",
                    "crystal",
                    format!("unknown crystal `{name}` (available: {})", CRYSTAL_NAMES.join(", ")),
                );
                None
            }),
            Some(Value::Table(_)) => {
                let t = self.table(root, "crystal", &CRYSTAL_KEYS);
                let model = match self.string(t, "crystal", "model") {
                    Some("LiIO3") => Some(CrystalModel::LithiumIodate),
                    Some("vacuum") => Some(CrystalModel::Vacuum),
                    Some("file") => match self.path(t, "crystal", "dispersion_file", base) {
                        Some(p) => Some(CrystalModel::File(p)),
                        None => {
                            self.issue("crystal", "dispersion_file", "required when model = \"file\"".into());
                            None
                        }
                    },
                    Some(other) => {
                        self.issue("crystal", "model", format!("unknown model `{other}` (LiIO3 | vacuum | file)"));
                        None
                    }
                    None => {
                        self.issue("crystal", "model", "missing required key".into());
                        None
                    }
                };
                if model.as_ref().is_some_and(|m| !matches!(m, CrystalModel::File(_)))
                    && t.is_some_and(|t| t.contains_key("dispersion_file"))
                {
                    self.issue("crystal", "dispersion_file", "only valid with model = \"file\"".into());
                }
                let length_mm = self.required(t, "crystal", "length_mm");
                let pump_angle_deg = self.number(t, "crystal", "pump_angle_deg");
                let a = self.positive(t, "crystal", "anchor_a");
                let b = self.positive(t, "crystal", "anchor_b");
                let has = |k: &str| t.is_some_and(|t| t.contains_key(k));
                let anchor = match (has("anchor_a"), has("anchor_b")) {
                    (true, true) => Some((a?, b?)),
                    (false, false) => None,
                    (true, false) => {
                        self.issue("crystal", "anchor_b", "anchor_a and anchor_b must be given together".into());
                        None
                    }
                    (false, true) => {
                        self.issue("crystal", "anchor_a", "anchor_a and anchor_b must be given together".into());
                        None
                    }
                };
                Some(CrystalSpec {
                    name: match &model {
                        Some(CrystalModel::File(p)) => p.display().to_string(),
                        Some(CrystalModel::Vacuum) => "vacuum".into(),
                        _ => "LiIO3".into(),
                    },
                    model: model?,
                    length_mm: length_mm?,
                    pump_angle_deg,
                    anchor,
                })
            }
            Some(_) => {
                self.issue("", "crystal", "expected a crystal name or a table".into());
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        let t1 = preset_config("table1").unwrap();
        assert_eq!((t1.tau_fs, t1.lambda_nm, t1.crystal.length_mm), (186.0, 397.5, 10.0));
        let t2 = preset_config("table2").unwrap();
        assert_eq!((t2.tau_fs, t2.lambda_nm, t2.crystal.length_mm), (186.0, 397.5, 5.0));
        let f1 = preset_config("fig1").unwrap();
        assert_eq!((f1.lambda_nm, f1.crystal.length_mm, f1.sweep.points), (400.0, 5.0, 40));
        assert_eq!(f1.crystal.anchor, None);
    }

    #[test]
    fn crystal_and_preset_reproduce_the_reference() {
        let c = parse_config_str("crystal = \"LiIO3-10mm-default\"\npreset = \"table1\"\n", None).unwrap();
        assert_eq!(c, preset_config("table1").unwrap());
    }

    #[test]
    fn user_keys_override_the_preset() {
        let c = parse_config_str("preset = \"table1\"\n[pump]\ntau_fs = 372\n", None).unwrap();
        assert_eq!((c.tau_fs, c.lambda_nm), (372.0, 397.5));
    }

    #[test]
    fn negative_tau_names_the_key_and_line() {
        let e = parse_config_str("preset = \"table1\"\n\n[pump]\ntau_fs = -1\n", None).unwrap_err();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].key, "pump.tau_fs");
        assert_eq!(e[0].line, Some(4));
    }

    #[test]
    fn all_errors_are_reported() {
        let text = "crystal = \"nope\"\ncolour = 3\n[pump]\nlambda_nm = \"x\"\n[grid]\nfoo = 1\n";
        let e = parse_config_str(text, None).unwrap_err();
        let keys: Vec<&str> = e.iter().map(|i| i.key.as_str()).collect();
        for k in ["crystal", "colour", "pump.lambda_nm", "pump.tau_fs", "grid.foo"] {
            assert!(keys.contains(&k), "{k} missing from {keys:?}");
        }
        let colour = e.iter().find(|i| i.key == "colour").unwrap();
        assert_eq!(colour.line, Some(2));
    }

    #[test]
    fn crystal_table_and_anchors() {
        let text = "[crystal]\nmodel = \"LiIO3\"\nlength_mm = 3\nanchor_a = 0.2\n[pump]\nlambda_nm = 400\ntau_fs = 100\n";
        let e = parse_config_str(text, None).unwrap_err();
        assert_eq!(e[0].key, "crystal.anchor_b");
        let text = "[crystal]\nmodel = \"file\"\nlength_mm = 3\n[pump]\nlambda_nm = 400\ntau_fs = 100\n";
        let e = parse_config_str(text, None).unwrap_err();
        assert_eq!(e[0].key, "crystal.dispersion_file");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let e = parse_config_str("[pump]\nlambda_nm = = 3\n", None).unwrap_err();
        assert_eq!(e[0].line, Some(2));
    }

    #[test]
    fn resolves_reference_and_sellmeier_constants() {
        let r = preset_config("table1").unwrap().resolve().unwrap();
        assert_eq!((r.constants.a, r.constants.b), (REFERENCE_A, REFERENCE_B));
        let r = preset_config("fig1").unwrap().resolve().unwrap();
        assert!((r.constants.a - 0.1675).abs() < 0.002, "{}", r.constants.a);
        let v = parse_config_str("crystal = \"vacuum-test\"\n[pump]\nlambda_nm = 400\ntau_fs = 100\n", None)
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(v.constants.a, 0.0);
    }
}
