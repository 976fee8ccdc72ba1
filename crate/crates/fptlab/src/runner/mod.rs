//! Experiment orchestration: run the requested methods, write CSV/JSON
//! outputs, comparison metrics and a plot script.

mod compare;
mod config;

pub use compare::{compare, ComparisonReport, CurveSummary, NamedCurve, PairMetrics};
pub use config::{ExperimentConfig, Method};

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::asymptotics::{
    asymptotic_density, fit_exponential, periodicity_check, ExpFit, PeriodicityReport,
};
use crate::boundary::Boundary;
use crate::csvio::{curve_csv, read_csv, write_atomic};
use crate::daniels::closed_form_daniels;
use crate::error::{Error, Result};
use crate::fpt::{
    estimate_density_mc, estimate_upcrossing_density, McEstimate,
};
use crate::gauss_markov::GaussMarkov;
use crate::simulate::{Conditioning, PathGrid};
use crate::volterra::solve_volterra;

/// Everything a run produced, for callers that want to post-process.
pub struct RunOutputs {
    pub files: Vec<PathBuf>,
    pub report: ComparisonReport,
    pub summary: Value,
}

struct MethodOutput {
    method: Method,
    curve: NamedCurve,
    details: Map<String, Value>,
    fit: Option<(ExpFit, Option<PeriodicityReport>)>,
}

/// Execute every requested method, then write per-method CSVs, a JSON
/// summary, a comparison report, fit reports and a plot script into the
/// config's output directory. All writes are atomic.
pub fn run(config: &ExperimentConfig) -> Result<RunOutputs> {
    config.validate()?;
    let grid = PathGrid::covering(config.dt, config.t_max)?;
    // Hazard provenance warning is advisory only.
    if config.methods.contains(&Method::Asymptotic) && !config.process.ms_differentiable() {
        eprintln!(
            "warning: the asymptotic hazard assumes a mean-square differentiable process \
             (damped-oscillatory with alpha == beta); got {} with alpha = {}, beta = {}",
            config.process.family_name(),
            config.process.alpha(),
            config.process.beta()
        );
    }

    let mut outputs = Vec::new();
    for method in &config.methods {
        outputs.push(run_method(config, &grid, *method)?);
    }

    let curves: Vec<NamedCurve> = outputs.iter().map(|o| o.curve.clone()).collect();
    let report = if curves.len() >= 2 {
        compare(&curves)?
    } else {
        ComparisonReport {
            grid: (0.0, config.bin_width, 0),
            pairs: Vec::new(),
            summaries: Vec::new(),
        }
    };

    let mut files = Vec::new();
    let dir = &config.out_dir;

    for out in &outputs {
        let path = dir.join(format!("{}.csv", out.method.name()));
        let text = match &out.curve.curve {
            crate::csvio::CsvCurve::Binned { .. } => {
                density_csv_from_curve(&out.curve)
            }
            crate::csvio::CsvCurve::Points { times, values } => curve_csv("g", times, values),
        };
        write_atomic(&path, &text)?;
        files.push(path);
    }

    // Fit report: plain-text key=value, one block per fitted method.
    let mut fit_text = String::new();
    for out in &outputs {
        if let Some((fit, periodicity)) = &out.fit {
            fit_text.push_str(&format!("method = {}\n", out.method.name()));
            fit_text.push_str(&format!("lambda_hat = {}\n", fit.lambda_hat));
            fit_text.push_str(&format!("window = {} {}\n", fit.window.0, fit.window.1));
            fit_text.push_str(&format!("rms_residual = {}\n", fit.rms_residual));
            if let Some(p) = periodicity {
                fit_text.push_str(&format!("periodicity_corr = {}\n", p.correlation));
                fit_text.push_str(&format!(
                    "periodicity = {}\n",
                    if p.pass { "pass" } else { "fail" }
                ));
            }
            fit_text.push('\n');
        }
    }
    if !fit_text.is_empty() {
        let path = dir.join("fit.txt");
        write_atomic(&path, &fit_text)?;
        files.push(path);
    }

    let report_path = dir.join("report.txt");
    write_atomic(&report_path, &report.render())?;
    files.push(report_path);

    let summary = summary_json(config, &outputs, &report);
    let summary_path = dir.join("summary.json");
    write_atomic(
        &summary_path,
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    files.push(summary_path);

    let plot_path = dir.join("plot.gp");
    let csv_files: Vec<PathBuf> = files
        .iter()
        .filter(|f| f.extension().is_some_and(|e| e == "csv"))
        .cloned()
        .collect();
    let lambda = outputs
        .iter()
        .find_map(|o| o.fit.as_ref().map(|(f, _)| f.lambda_hat));
    emit_plot_script(&plot_path, &csv_files, lambda)?;
    files.push(plot_path);

    Ok(RunOutputs {
        files,
        report,
        summary,
    })
}

fn density_csv_from_curve(curve: &NamedCurve) -> String {
    match &curve.curve {
        crate::csvio::CsvCurve::Binned { edges, density } => {
            // Rebuild stderr column is impossible from a bare curve; this
            // path only serves curves built from estimates, which carry it.
            let mut out = String::from("t_left,t_right,density,stderr\n");
            for i in 0..density.len() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    edges[i],
                    edges[i + 1],
                    density[i],
                    curve.stderr.as_ref().map_or(0.0, |s| s[i])
                ));
            }
            out
        }
        _ => unreachable!(),
    }
}

fn run_method(
    config: &ExperimentConfig,
    grid: &PathGrid,
    method: Method,
) -> Result<MethodOutput> {
    let started = Instant::now();
    let mut details = Map::new();
    let (curve, fit) = match method {
        Method::Mc => {
            let McEstimate { estimate, times } = estimate_density_mc(
                &config.process,
                &config.boundary,
                &Conditioning::FixedStart(0.0),
                grid,
                config.n_paths,
                config.seed,
                config.bin_width,
            )?;
            details.insert("n_paths".into(), json!(config.n_paths));
            details.insert("mass".into(), json!(estimate.mass()));
            details.insert("censored".into(), json!(estimate.n_censored()));
            details.insert("mode".into(), json!(estimate.mode()));
            let fit = maybe_fit(config, &estimate);
            (NamedCurve::from_estimate("mc", &estimate, Some(times)), fit)
        }
        Method::McUpcrossing => {
            let McEstimate { estimate, times } = estimate_upcrossing_density(
                &config.process,
                &config.boundary,
                config.epsilon,
                grid,
                config.n_paths,
                config.seed,
                config.bin_width,
            )?;
            details.insert("n_paths".into(), json!(config.n_paths));
            details.insert("epsilon".into(), json!(config.epsilon));
            details.insert("mass".into(), json!(estimate.mass()));
            details.insert("censored".into(), json!(estimate.n_censored()));
            details.insert("mode".into(), json!(estimate.mode()));
            let fit = maybe_fit(config, &estimate);
            (
                NamedCurve::from_estimate("mc-upcrossing", &estimate, Some(times)),
                fit,
            )
        }
        Method::Volterra => {
            let spec = GaussMarkov::conditioned_ou(config.process.beta())?;
            let sol = solve_volterra(&spec, &config.boundary, 0.0, config.h, config.t_max)?;
            details.insert("h".into(), json!(config.h));
            details.insert("mass".into(), json!(sol.cumulative_mass()));
            let values = sol.clamped_values();
            let mode_idx = values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            details.insert("mode".into(), json!(sol.times()[mode_idx]));
            (
                NamedCurve::from_points("volterra", sol.times().to_vec(), values),
                None,
            )
        }
        Method::ClosedForm => {
            let (d, rate) = match &config.boundary {
                Boundary::DanielsOu { start_gap, rate } => (*start_gap, *rate),
                _ => unreachable!("validated"),
            };
            let n = (config.t_max / config.h).round() as usize;
            let times: Vec<f64> = (0..=n).map(|k| k as f64 * config.h).collect();
            let values: Vec<f64> = times
                .iter()
                .map(|&t| {
                    if t > 0.0 {
                        closed_form_daniels(d, rate, t)
                    } else {
                        Ok(0.0)
                    }
                })
                .collect::<Result<_>>()?;
            let mass =
                config.h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n]));
            details.insert("mass".into(), json!(mass));
            let mode_idx = values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            details.insert("mode".into(), json!(times[mode_idx]));
            (
                NamedCurve::from_points("closed-form", times, values),
                None,
            )
        }
        Method::Asymptotic => {
            let params = config.hazard_params()?;
            let times = grid.times();
            let values = asymptotic_density(&params, &times);
            let mass: f64 = config.dt
                * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[values.len() - 1]));
            details.insert("mass".into(), json!(mass));
            let mode_idx = values
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            details.insert("mode".into(), json!(times[mode_idx]));
            (
                NamedCurve::from_points("asymptotic", times, values),
                None,
            )
        }
    };
    details.insert(
        "runtime_ms".into(),
        json!(started.elapsed().as_millis() as u64),
    );
    Ok(MethodOutput {
        method,
        curve,
        details,
        fit,
    })
}

/// Exponential fits are produced for Monte Carlo estimates over periodic
/// boundaries with enough support; failure to fit is not fatal.
fn maybe_fit(
    config: &ExperimentConfig,
    estimate: &crate::fpt::FptDensityEstimate,
) -> Option<(ExpFit, Option<PeriodicityReport>)> {
    let period = match &config.boundary {
        Boundary::Periodic { period, .. } => *period,
        _ => return None,
    };
    let fit = fit_exponential(estimate, period).ok()?;
    let periodicity = periodicity_check(&fit, period).ok();
    Some((fit, periodicity))
}

fn summary_json(
    config: &ExperimentConfig,
    outputs: &[MethodOutput],
    report: &ComparisonReport,
) -> Value {
    let mut methods = Map::new();
    for out in outputs {
        let mut m = out.details.clone();
        if let Some((fit, periodicity)) = &out.fit {
            m.insert("lambda_hat".into(), json!(fit.lambda_hat));
            m.insert("fit_window".into(), json!([fit.window.0, fit.window.1]));
            m.insert("fit_rms_residual".into(), json!(fit.rms_residual));
            if let Some(p) = periodicity {
                m.insert("periodicity_corr".into(), json!(p.correlation));
                m.insert("periodicity_pass".into(), json!(p.pass));
            }
        }
        methods.insert(out.method.name().into(), Value::Object(m));
    }
    let comparisons: Vec<Value> = report
        .pairs
        .iter()
        .map(|p| {
            let mut m = Map::new();
            m.insert("a".into(), json!(p.a));
            m.insert("b".into(), json!(p.b));
            m.insert("l1".into(), json!(p.l1));
            m.insert("sup".into(), json!(p.sup));
            if let Some(ks) = p.ks {
                m.insert("ks".into(), json!(ks));
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "config": config.to_text(),
        "methods": Value::Object(methods),
        "comparisons": comparisons,
    })
}

/// Write a self-contained gnuplot script laying the given CSVs out in 2x2
/// panels (one figure per four files). When a fitted rate is supplied, each
/// density panel overlays the plain exponential `lambda e^{-lambda t}`.
pub fn emit_plot_script(path: &Path, csv_files: &[PathBuf], lambda: Option<f64>) -> Result<()> {
    if csv_files.is_empty() {
        return Err(Error::EmptyInput("no output files to plot".into()));
    }
    for f in csv_files {
        if !f.exists() {
            return Err(Error::MissingFile(f.clone()));
        }
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 1200,900\n");
    s.push_str("set output 'figure.png'\n");
    s.push_str("set multiplot layout 2,2\n");
    s.push_str("set style data lines\n");
    s.push_str("set xlabel 't'\n");
    s.push_str("set ylabel 'density'\n");
    for f in csv_files.iter().take(4) {
        let rel = f.strip_prefix(dir).unwrap_or(f);
        let name = f
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_default();
        s.push_str(&format!("set title '{name}'\n"));
        s.push_str("set datafile separator ','\n");
        let binned = std::fs::read_to_string(f)
            .map(|t| t.starts_with("t_left"))
            .unwrap_or(false);
        let mut plot = if binned {
            format!(
                "plot '{}' every ::1 using (($1+$2)/2):3 with steps title '{name}'",
                rel.display()
            )
        } else {
            format!(
                "plot '{}' every ::1 using 1:2 with lines title '{name}'",
                rel.display()
            )
        };
        if let Some(l) = lambda {
            plot.push_str(&format!(", {l} * exp(-{l} * x) title 'lambda exp(-lambda t)'"));
        }
        plot.push('\n');
        s.push_str(&plot);
    }
    s.push_str("unset multiplot\n");
    write_atomic(path, &s)?;
    Ok(())
}

/// CLI `compare` entry: read CSVs and compare them.
pub fn compare_files(paths: &[PathBuf]) -> Result<ComparisonReport> {
    let mut curves = Vec::new();
    for p in paths {
        let label = p
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| p.display().to_string());
        curves.push(NamedCurve {
            label,
            curve: read_csv(p)?,
            times: None,
            stderr: None,
        });
    }
    compare(&curves)
}
