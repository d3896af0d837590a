//! Subcommand implementations. Each returns what goes to standard output;
//! files are written only where a command's contract says so.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use biphoton::entanglement::{
    r_from_widths, sweep_with_constants, total_entanglement_bound, EntanglementReport, Quantities,
    QuadratureConfig, ReportOptions, TauRange, WidthMeasurement,
};
use biphoton::jsa::{build_grid, sample_jsa, write_jsa_csv, write_jsa_matrix, FrequencyAxis, FrequencyGrid, GridPolicy, ImplicitJsa};
use biphoton::spectra::{
    coincidence_spectrum_windowed, convolve_response, fit_gaussian, fwhm, read_spectrum_csv, AxisUnit, FitResult,
    Spectrum,
};
use biphoton::{Biphoton, Regime};

use crate::config::{JsaFormat, RunConfig};
use crate::error::{exit, CliError, CliResult};

/// Standard output of a command and its exit code. A nonzero code with
/// output means the command ran but its result is flagged (e.g. a fit
/// that did not converge).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: exit::OK, message: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    KeyValue,
    Csv,
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map(|v| format!("{v:.digits$}")).unwrap_or_else(|| "-".into())
}

/// Fixed-width text table; the first column is left-aligned, the others
/// right-aligned.
fn render_table(rows: &[Vec<String>]) -> String {
    render(rows, true)
}

/// Key-value block: all columns left-aligned.
fn render_block(rows: &[Vec<String>]) -> String {
    render(rows, false)
}

fn render(rows: &[Vec<String>], right: bool) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, w) in widths.iter().enumerate() {
            let cell = r.get(c).map(String::as_str).unwrap_or("");
            if c == 0 {
                let _ = write!(line, "{cell:<w$}");
            } else if !right {
                let _ = write!(line, "  {cell:<w$}");
            } else {
                let _ = write!(line, "  {cell:>w$}");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn constants(cfg: &RunConfig, csv: bool) -> CliResult<Outcome> {
    let r = cfg.resolve()?;
    let c = r.constants;
    let gv = c.group_velocities;
    let angle = c.pump_angle.map(f64::to_degrees);
    let rows: Vec<(&str, String, &str)> = vec![
        ("crystal", cfg.crystal.name.clone(), ""),
        ("lambda_p", format!("{}", cfg.lambda_nm), "nm"),
        ("tau", format!("{}", cfg.tau_fs), "fs"),
        ("length", format!("{}", cfg.crystal.length_mm), "mm"),
        ("A", format!("{:.6}", c.a), ""),
        ("B", format!("{:.6}", c.b), ""),
        ("eta", fmt_opt(c.eta, 6), ""),
        ("regime", c.regime.to_string(), ""),
        ("source", format!("{:?}", c.source).to_lowercase(), ""),
        ("pump_angle", fmt_opt(angle, 4), "deg"),
        ("v_group_pump", gv.map(|g| format!("{:.6e}", g.pump)).unwrap_or("-".into()), "m/s"),
        ("v_group_signal", gv.map(|g| format!("{:.6e}", g.ordinary)).unwrap_or("-".into()), "m/s"),
    ];
    let stdout = if csv {
        let header: Vec<String> = rows
            .iter()
            .map(|(k, _, u)| if u.is_empty() { k.to_string() } else { format!("{k}_{}", u.replace('/', "_")) })
            .collect();
        let values: Vec<String> = rows.iter().map(|(_, v, _)| if v == "-" { String::new() } else { v.clone() }).collect();
        format!("{}\n{}\n", header.join(","), values.join(","))
    } else {
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|(k, v, u)| vec![k.to_string(), v.clone(), u.to_string()])
            .collect();
        render_block(&table)
    };
    if c.regime == Regime::Undefined {
        return Ok(Outcome {
            stdout,
            code: exit::REGIME,
            message: Some(format!("regime error: A = {} gives no walk-off; eta is undefined", c.a)),
        });
    }
    Ok(Outcome::ok(stdout))
}

/// Report options from the configuration.
pub fn report_options(cfg: &RunConfig) -> ReportOptions {
    let mut spectral = GridPolicy::spectral().with_max_points(cfg.grid.spectral_max_points);
    if let Some(p) = cfg.grid.spectral_points {
        spectral = spectral.with_points(p);
    }
    let mut schmidt = GridPolicy::schmidt();
    if let Some(p) = cfg.grid.schmidt_points {
        schmidt = schmidt.with_points(p);
    }
    ReportOptions {
        spectral_grid: spectral,
        schmidt_grid: schmidt,
        quadrature: QuadratureConfig::default(),
        k_method: cfg.analysis.k_method,
        auto_dense_cap: cfg.grid.dense_cap,
        nu2_fixed: cfg.analysis.idler_detuning_rad_s,
        idler_window: cfg.analysis.idler_window_rad_s,
    }
}

/// Fit of a measured spectrum file.
#[derive(Debug, Clone)]
pub struct Measured {
    pub path: PathBuf,
    pub unit: AxisUnit,
    pub fit: FitResult,
}

impl Measured {
    fn width(&self) -> WidthMeasurement {
        WidthMeasurement { value: self.fit.fwhm, sigma: self.fit.sigma_fwhm, unit: self.unit }
    }
}

pub fn fit_file(path: &Path) -> CliResult<Measured> {
    let file = File::open(path).map_err(|e| CliError::io(path.display(), e))?;
    let m = read_spectrum_csv(BufReader::new(file))
        .map_err(|e| biphoton::Error::Ingestion(format!("{}: {}", path.display(), e)))?;
    let fit = fit_gaussian(&m.axis, &m.intensity, m.sigma.as_deref())?;
    Ok(Measured { path: path.to_path_buf(), unit: m.unit, fit })
}

/// Theory report plus optional instrument-broadened and measured values.
#[derive(Debug, Clone)]
pub struct FullReport {
    pub report: EntanglementReport,
    pub coincidence_convolved_nm: Option<f64>,
    pub single_convolved_nm: Option<f64>,
    pub measured_coincidence: Option<Measured>,
    pub measured_single: Option<Measured>,
}

impl FullReport {
    pub fn compute(cfg: &RunConfig) -> CliResult<Self> {
        let r = cfg.resolve()?;
        let report = EntanglementReport::compute(&r.constants, &r.pump, cfg.length_m(), &report_options(cfg))?;
        let center = report.center_nm();
        let broadened = |s: Option<&Spectrum>, res: Option<f64>| -> CliResult<Option<f64>> {
            match (s, res) {
                (Some(s), Some(res)) => {
                    let nm = s.to_wavelength(center)?;
                    Ok(Some(fwhm(&convolve_response(&nm, res, cfg.analysis.response)?)?))
                }
                _ => Ok(None),
            }
        };
        let fine = match cfg.analysis.resolution_nm {
            Some(_) => Some(fine_coincidence(&Biphoton::new(&r.constants, &r.pump, cfg.length_m())?, cfg)?),
            None => None,
        };
        let coincidence_convolved_nm = broadened(fine.as_ref(), cfg.analysis.resolution_nm)?;
        let single_convolved_nm = broadened(report.single.as_ref(), cfg.analysis.single_resolution_nm)?;
        let measured_coincidence = cfg.analysis.measured_coincidence.as_deref().map(fit_file).transpose()?;
        let measured_single = cfg.analysis.measured_single.as_deref().map(fit_file).transpose()?;
        Ok(Self { report, coincidence_convolved_nm, single_convolved_nm, measured_coincidence, measured_single })
    }

    pub fn r_convolved(&self) -> Option<f64> {
        Some(self.single_convolved_nm? / self.coincidence_convolved_nm?)
    }

    pub fn r_measured(&self) -> Option<biphoton::Result<biphoton::entanglement::Ratio>> {
        let (s, c) = (self.measured_single.as_ref()?, self.measured_coincidence.as_ref()?);
        Some(r_from_widths(s.width(), c.width()))
    }

    pub fn key_values(&self) -> Vec<(String, String)> {
        let f = |v: Option<f64>| v.map(|v| format!("{v:.6e}")).unwrap_or_default();
        let mut kv: Vec<(String, String)> =
            self.report.key_values().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let flags = kv.pop().expect("flags entry");
        kv.push(("delta_lambda_c_convolved_nm".into(), f(self.coincidence_convolved_nm)));
        kv.push(("delta_lambda_s_convolved_nm".into(), f(self.single_convolved_nm)));
        kv.push(("R_convolved".into(), f(self.r_convolved())));
        for (name, m) in [("coincidence", &self.measured_coincidence), ("single", &self.measured_single)] {
            kv.push((format!("measured_{name}_fwhm"), f(m.as_ref().map(|m| m.fit.fwhm))));
            kv.push((format!("measured_{name}_sigma"), f(m.as_ref().map(|m| m.fit.sigma_fwhm))));
        }
        let rm = self.r_measured().and_then(|r| r.ok());
        kv.push(("R_measured".into(), f(rm.map(|r| r.value))));
        kv.push(("R_measured_sigma".into(), f(rm.map(|r| r.sigma))));
        kv.push(flags);
        kv
    }

    pub fn to_table(&self) -> String {
        let r = &self.report;
        let has_exp = self.measured_coincidence.is_some() || self.measured_single.is_some();
        let has_conv = self.coincidence_convolved_nm.is_some() || self.single_convolved_nm.is_some();
        let mut header = vec!["".to_string(), "analytic".into(), "numerical".into()];
        if has_conv {
            header.push("with response".into());
        }
        if has_exp {
            header.push("experiment".into());
        }
        let measured = |m: &Option<Measured>| {
            m.as_ref()
                .map(|m| format!("{:.3} +- {:.3}", m.fit.fwhm, m.fit.sigma_fwhm))
                .unwrap_or_else(|| "-".into())
        };
        let mut rows = vec![header];
        let mut push = |label: &str, cells: Vec<String>, conv: Option<String>, exp: Option<String>| {
            let mut row = vec![label.to_string()];
            row.extend(cells);
            if has_conv {
                row.push(conv.unwrap_or_else(|| "-".into()));
            }
            if has_exp {
                row.push(exp.unwrap_or_else(|| "-".into()));
            }
            rows.push(row);
        };
        push("pump dlambda_p [nm]", vec![format!("{:.3}", r.delta_lambda_p_nm), "-".into()], None, None);
        push(
            "coincidence dlambda_c [nm]",
            vec![fmt_opt(r.delta_lambda_c_analytic(), 3), fmt_opt(r.delta_lambda_c_numerical(), 3)],
            Some(fmt_opt(self.coincidence_convolved_nm, 3)),
            Some(measured(&self.measured_coincidence)),
        );
        push(
            "single dlambda_s [nm]",
            vec![fmt_opt(r.delta_lambda_s_analytic(), 1), fmt_opt(r.delta_lambda_s_numerical(), 1)],
            Some(fmt_opt(self.single_convolved_nm, 1)),
            Some(measured(&self.measured_single)),
        );
        let rm = match self.r_measured() {
            Some(Ok(r)) => format!("{:.1} +- {:.1}", r.value, r.sigma),
            _ => "-".into(),
        };
        push(
            "R = dlambda_s/dlambda_c",
            vec![fmt_opt(r.r_analytic(), 1), fmt_opt(r.r_numerical(), 1)],
            Some(fmt_opt(self.r_convolved(), 1)),
            Some(rm),
        );
        let k = r
            .schmidt
            .as_ref()
            .map(|s| format!("{:.1} ({})", s.k, s.source))
            .unwrap_or_else(|| "-".into());
        push("Schmidt number K", vec!["-".into(), k], None, None);

        let mut out = format!(
            "lambda_p = {} nm, tau = {:.1} fs, L = {} mm, A = {:.4}, B = {:.4}, eta = {:.4} ({})\n\n",
            r.lambda_p_nm,
            r.tau_s * 1e15,
            r.length_m * 1e3,
            r.a,
            r.b,
            r.eta,
            r.regime
        );
        out.push_str(&render_table(&rows));
        if let Some(c) = r.schmidt.as_ref().and_then(|s| s.convergence) {
            let _ = writeln!(
                out,
                "\nK at half grid density: {:.1} ({:.2}% change, {})",
                c.k_half_density,
                100.0 * c.relative_change,
                if c.converged { "converged" } else { "not converged" }
            );
        }
        if let Some(Err(e)) = self.r_measured() {
            let _ = writeln!(out, "note: measured R unavailable: {e}");
        }
        for flag in &r.flags {
            let _ = writeln!(out, "note: {flag}");
        }
        out
    }
}

pub fn report(cfg: &RunConfig, format: Format) -> CliResult<Outcome> {
    let full = FullReport::compute(cfg)?;
    let stdout = match format {
        Format::Table => full.to_table(),
        Format::KeyValue => full.key_values().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect(),
        Format::Csv => {
            let kv = full.key_values();
            let header: Vec<&str> = kv.iter().map(|(k, _)| k.as_str()).collect();
            let row: Vec<String> =
                kv.iter().map(|(_, v)| if v.contains(',') { format!("\"{v}\"") } else { v.clone() }).collect();
            format!("{}\n{}\n", header.join(","), row.join(","))
        }
    };
    Ok(Outcome::ok(stdout))
}

/// Half-span of the written coincidence spectrum in coincidence widths.
pub const COINCIDENCE_SPAN_WIDTHS: f64 = 10.0;
/// Points of the written coincidence spectrum.
pub const COINCIDENCE_POINTS: usize = 2001;

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path.display(), e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path.display(), e))
}

/// Coincidence spectrum on its own fine grid around degeneracy.
pub fn fine_coincidence(bp: &Biphoton, cfg: &RunConfig) -> CliResult<Spectrum> {
    let est = bp.width_estimates()?;
    let half = COINCIDENCE_SPAN_WIDTHS * est.coincidence;
    let nu1 = FrequencyAxis::with_points(half, COINCIDENCE_POINTS)?;
    let reach = cfg.analysis.idler_detuning_rad_s.abs() + cfg.analysis.idler_window_rad_s / 2.0;
    let nu2 = if reach < half { nu1 } else { FrequencyAxis::with_points(2.0 * reach, COINCIDENCE_POINTS)? };
    let src = ImplicitJsa::new(*bp, FrequencyGrid::new(nu1, nu2))?;
    Ok(coincidence_spectrum_windowed(
        &src,
        cfg.analysis.idler_detuning_rad_s,
        cfg.analysis.idler_window_rad_s,
    )?)
}

pub fn spectra(cfg: &RunConfig, out_dir: &Path) -> CliResult<Outcome> {
    let r = cfg.resolve()?;
    let bp = Biphoton::new(&r.constants, &r.pump, cfg.length_m())?;
    let center = r.pump.degenerate_lambda_nm();
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir.display(), e))?;

    let coincidence = fine_coincidence(&bp, cfg)?.to_wavelength(center)?;
    let opts = ReportOptions { k_method: biphoton::entanglement::KMethod::Skip, ..report_options(cfg) };
    let single = EntanglementReport::compute(&r.constants, &r.pump, cfg.length_m(), &opts)?
        .single
        .expect("report carries the single-count spectrum")
        .to_wavelength(center)?;

    let mut files: Vec<(PathBuf, Option<f64>)> = Vec::new();
    let mut emit = |name: &str, s: &Spectrum| -> CliResult<()> {
        let path = out_dir.join(name);
        write_file(&path, |w| s.write_csv(w))?;
        files.push((path, fwhm(s).ok()));
        Ok(())
    };
    emit("coincidence.csv", &coincidence)?;
    emit("singles.csv", &single)?;
    if let Some(res) = cfg.analysis.resolution_nm {
        emit("coincidence_convolved.csv", &convolve_response(&coincidence, res, cfg.analysis.response)?)?;
    }
    if let Some(res) = cfg.analysis.single_resolution_nm {
        emit("singles_convolved.csv", &convolve_response(&single, res, cfg.analysis.response)?)?;
    }

    let mut stdout = String::new();
    for (path, w) in &files {
        let _ = writeln!(stdout, "wrote {} (FWHM {} nm)", path.display(), fmt_opt(*w, 4));
    }
    if cfg.output.jsa != JsaFormat::None {
        let grid = build_grid(&bp, &GridPolicy::spectral().with_points(cfg.output.jsa_points))
            .or_else(|_| {
                let est = bp.width_estimates()?;
                FrequencyAxis::with_points(GridPolicy::spectral().span_factor * est.single, cfg.output.jsa_points)
                    .map(FrequencyGrid::square)
            })?;
        let jsa = sample_jsa(&bp, &grid)?;
        match cfg.output.jsa {
            JsaFormat::Csv => {
                let path = out_dir.join("jsa.csv");
                write_file(&path, |w| write_jsa_csv(&jsa, w))?;
                let _ = writeln!(stdout, "wrote {}", path.display());
            }
            JsaFormat::Matrix => {
                let names = ["jsa_matrix.txt", "jsa_nu1.txt", "jsa_nu2.txt"];
                let open = |n: &str| {
                    let p = out_dir.join(n);
                    File::create(&p).map(BufWriter::new).map_err(|e| CliError::io(p.display(), e))
                };
                let (mut m, mut a, mut b) = (open(names[0])?, open(names[1])?, open(names[2])?);
                write_jsa_matrix(&jsa, &mut m, &mut a, &mut b)
                    .and_then(|_| m.flush())
                    .and_then(|_| a.flush())
                    .and_then(|_| b.flush())
                    .map_err(|e| CliError::io(out_dir.display(), e))?;
                for n in names {
                    let _ = writeln!(stdout, "wrote {}", out_dir.join(n).display());
                }
            }
            JsaFormat::None => unreachable!(),
        }
        if grid.nu1.step() > bp.width_estimates()?.coincidence / 2.0 {
            let _ = writeln!(
                stdout,
                "note: JSA dump step {:.3e} rad/s does not resolve the coincidence width",
                grid.nu1.step()
            );
        }
    }
    Ok(Outcome::ok(stdout))
}

pub fn sweep(cfg: &RunConfig, output: Option<&Path>) -> CliResult<Outcome> {
    let r = cfg.resolve()?;
    let range = TauRange::new(cfg.sweep.tau_min_fs * 1e-15, cfg.sweep.tau_max_fs * 1e-15, cfg.sweep.points)?;
    let table = sweep_with_constants(
        &r.constants,
        &r.pump,
        cfg.length_m(),
        &range.values(),
        Quantities { r_analytic: true, k: true },
        &QuadratureConfig::default(),
    )?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv).expect("write to memory");
    let csv = String::from_utf8(csv).expect("ASCII CSV");
    let mut notes = String::new();
    for row in &table.rows {
        for e in &row.errors {
            let _ = writeln!(notes, "note: tau = {:.1} fs: {e}", row.tau_s * 1e15);
        }
    }
    let stdout = match output {
        None => csv,
        Some(path) => {
            write_file(path, |w| w.write_all(csv.as_bytes()))?;
            let mut s = format!("wrote {} ({} rows)\n", path.display(), table.rows.len());
            if let Some(min) = table.k_minimum() {
                let _ = writeln!(
                    s,
                    "K minimum {:.2} at tau = {:.1} fs (eta = {:.3}); {} interior local minim{}",
                    min.k.unwrap_or(f64::NAN),
                    min.tau_s * 1e15,
                    min.eta,
                    table.k_local_minima(),
                    if table.k_local_minima() == 1 { "um" } else { "a" }
                );
            }
            s
        }
    };
    let message = (!notes.is_empty()).then(|| notes.trim_end().to_string());
    Ok(Outcome { stdout, code: exit::OK, message })
}

pub fn fit(input: &Path, resolution_nm: Option<f64>) -> CliResult<Outcome> {
    let m = fit_file(input)?;
    let f = &m.fit;
    let u = match m.unit {
        AxisUnit::Nanometre => "nm",
        AxisUnit::RadPerSecond => "rad/s",
    };
    let mut rows = vec![
        vec!["input".to_string(), m.path.display().to_string()],
        vec!["model".into(), "gaussian + baseline".into()],
        vec!["center".into(), format!("{:.6} +- {:.6} {u}", f.center, f.sigma_center)],
        vec!["fwhm".into(), format!("{:.6} +- {:.6} {u}", f.fwhm, f.sigma_fwhm)],
        vec!["amplitude".into(), format!("{:.6e} +- {:.3e}", f.amplitude, f.sigma_amplitude)],
        vec!["baseline".into(), format!("{:.6e} +- {:.3e}", f.baseline, f.sigma_baseline)],
        vec!["chi2 / dof".into(), format!("{:.4} / {}", f.chi2, f.dof)],
        vec!["rms residual".into(), format!("{:.4e}", f.rms_residual)],
        vec!["iterations".into(), f.iterations.to_string()],
        vec!["converged".into(), f.converged.to_string()],
    ];
    if let Some(res) = resolution_nm {
        if m.unit != AxisUnit::Nanometre {
            return Err(biphoton::Error::InvalidInput("--resolution-nm needs a spectrum on a nm axis".into()).into());
        }
        let cell = match f.deconvolved_fwhm(res) {
            Some((w, s)) => format!("{w:.6} +- {s:.6} nm"),
            None => format!("- (fitted width does not exceed the {res} nm resolution)"),
        };
        rows.push(vec![format!("fwhm, {res} nm response removed"), cell]);
    }
    let stdout = render_block(&rows);
    if !f.converged {
        return Ok(Outcome {
            stdout,
            code: exit::NUMERICAL,
            message: Some(format!("fit did not converge after {} iterations", f.iterations)),
        });
    }
    Ok(Outcome::ok(stdout))
}

pub fn rtot(r_angle: f64, r_omega: f64) -> CliResult<Outcome> {
    let b = total_entanglement_bound(r_angle, r_omega)?;
    Ok(Outcome::ok(format!("{b}\n")))
}
