//! Thin command-line front end over the `fptlab` library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fptlab::asymptotics::{correlation_time, hazard_curve, HazardParams};
use fptlab::covariance::Covariance;
use fptlab::csvio::{curve_csv, write_atomic};
use fptlab::error::Result;
use fptlab::runner::{compare_files, run, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "fptlab",
    about = "First-passage-time laboratory for stationary Gaussian processes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a config file.
    Run {
        /// Path to the key=value config file.
        config: PathBuf,
        /// Override the config's random seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's number of Monte Carlo paths.
        #[arg(long)]
        paths: Option<usize>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare density CSVs (binned or sampled curves) on a common grid.
    Compare {
        /// Two or more CSV files.
        #[arg(required = true, num_args = 2..)]
        csv: Vec<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the periodic-threshold crossing hazard as CSV.
    Hazard {
        #[arg(long)]
        s0: f64,
        #[arg(long, default_value_t = 0.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1.0)]
        period: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlation time of a covariance model.
    Theta {
        /// exp-cosine | damped-oscillatory
        #[arg(long)]
        family: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            paths,
            out,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|_| fptlab::Error::MissingFile(config.clone()))?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = paths {
                cfg.n_paths = n;
            }
            if let Some(dir) = out {
                cfg.out_dir = dir;
            }
            let outputs = run(&cfg)?;
            for f in &outputs.files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Compare { csv, out } => {
            let report = compare_files(&csv)?;
            let text = report.render();
            match out {
                Some(path) => write_atomic(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Hazard {
            s0,
            amplitude,
            period,
            alpha,
            beta,
            t_max,
            dt,
            out,
        } => {
            let params = HazardParams::new(s0, amplitude, period, alpha, beta)?;
            if alpha != beta {
                eprintln!(
                    "warning: the hazard formula assumes alpha == beta \
                     (mean-square differentiability); got alpha = {alpha}, beta = {beta}"
                );
            }
            let n = (t_max / dt).ceil() as usize;
            let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
            let curve = hazard_curve(&params, times);
            let text = curve_csv("h", &curve.times, &curve.values);
            match out {
                Some(path) => write_atomic(&path, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Theta {
            family,
            alpha,
            beta,
        } => {
            let model = match family.as_str() {
                "exp-cosine" => Covariance::exp_cosine(alpha, beta)?,
                "damped-oscillatory" => Covariance::damped_oscillatory(alpha, beta)?,
                other => {
                    return Err(fptlab::Error::InvalidParameter(format!(
                        "unknown family '{other}'"
                    )))
                }
            };
            println!("theta = {}", correlation_time(&model));
            Ok(())
        }
    }
}
