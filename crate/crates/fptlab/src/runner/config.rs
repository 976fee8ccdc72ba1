//! Experiment configuration: a flat key=value file with section headers.
//!
//! ```text
//! [process]
//! family = exp-cosine          # exp-cosine | damped-oscillatory
//! alpha = 1e-10
//! beta = 0.5
//!
//! [boundary]
//! family = daniels-ou          # constant | periodic | daniels-ou | polynomial
//! d = 0.25
//! rate = 0.5
//!
//! [methods]
//! list = mc, volterra, closed-form
//!
//! [grid]
//! dt = 0.01
//! t_max = 10
//! h = 0.001                    # optional integral-equation step
//!
//! [estimate]
//! n_paths = 100000
//! seed = 42
//! epsilon = 0.2                # optional
//! bin_width = 0.05             # optional
//!
//! [output]
//! dir = out
//! ```
//!
//! Unknown sections or keys are config errors carrying the line number.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::boundary::Boundary;
use crate::covariance::Covariance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Mc,
    McUpcrossing,
    Volterra,
    ClosedForm,
    Asymptotic,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::McUpcrossing => "mc-upcrossing",
            Method::Volterra => "volterra",
            Method::ClosedForm => "closed-form",
            Method::Asymptotic => "asymptotic",
        }
    }

    fn parse(s: &str) -> Option<Method> {
        match s {
            "mc" => Some(Method::Mc),
            "mc-upcrossing" => Some(Method::McUpcrossing),
            "volterra" => Some(Method::Volterra),
            "closed-form" => Some(Method::ClosedForm),
            "asymptotic" => Some(Method::Asymptotic),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub process: Covariance,
    pub boundary: Boundary,
    pub methods: Vec<Method>,
    pub dt: f64,
    pub t_max: f64,
    /// Step of the Volterra march; defaults to `dt / 10`.
    pub h: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Truncation margin of the upcrossing start; defaults to `0.1 S(0)`.
    pub epsilon: f64,
    pub bin_width: f64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Parse and cross-validate a config file's text.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let raw = RawConfig::parse(text)?;
        raw.build()
    }

    /// Canonical text form; reparsing it yields an identical config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[process]");
        let _ = writeln!(s, "family = {}", self.process.family_name());
        let _ = writeln!(s, "alpha = {}", self.process.alpha());
        let _ = writeln!(s, "beta = {}", self.process.beta());
        let _ = writeln!(s, "\n[boundary]");
        match &self.boundary {
            Boundary::Constant { level } => {
                let _ = writeln!(s, "family = constant");
                let _ = writeln!(s, "level = {level}");
            }
            Boundary::Periodic {
                base,
                amplitude,
                period,
            } => {
                let _ = writeln!(s, "family = periodic");
                let _ = writeln!(s, "base = {base}");
                let _ = writeln!(s, "amplitude = {amplitude}");
                let _ = writeln!(s, "period = {period}");
            }
            Boundary::DanielsOu { start_gap, rate } => {
                let _ = writeln!(s, "family = daniels-ou");
                let _ = writeln!(s, "d = {start_gap}");
                let _ = writeln!(s, "rate = {rate}");
            }
            Boundary::Polynomial { coeffs } => {
                let _ = writeln!(s, "family = polynomial");
                let list = coeffs
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(", ");
                let _ = writeln!(s, "coeffs = {list}");
            }
        }
        let _ = writeln!(s, "\n[methods]");
        let list = self
            .methods
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(", ");
        let _ = writeln!(s, "list = {list}");
        let _ = writeln!(s, "\n[grid]");
        let _ = writeln!(s, "dt = {}", self.dt);
        let _ = writeln!(s, "t_max = {}", self.t_max);
        let _ = writeln!(s, "h = {}", self.h);
        let _ = writeln!(s, "\n[estimate]");
        let _ = writeln!(s, "n_paths = {}", self.n_paths);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "epsilon = {}", self.epsilon);
        let _ = writeln!(s, "bin_width = {}", self.bin_width);
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.out_dir.display());
        s
    }
}

/// Key-value pairs by section, each with the line it came from.
struct RawConfig {
    entries: BTreeMap<(String, String), (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<RawConfig> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or(Error::Config {
                    line: lineno,
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                if !matches!(
                    section.as_str(),
                    "process" | "boundary" | "methods" | "grid" | "estimate" | "output"
                ) {
                    return Err(Error::Config {
                        line: lineno,
                        message: format!("unknown section [{section}]"),
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Config {
                line: lineno,
                message: "expected key = value".into(),
            })?;
            if section.is_empty() {
                return Err(Error::Config {
                    line: lineno,
                    message: "key outside of any section".into(),
                });
            }
            let key = key.trim().to_string();
            let prev = entries.insert(
                (section.clone(), key.clone()),
                (lineno, value.trim().to_string()),
            );
            if prev.is_some() {
                return Err(Error::Config {
                    line: lineno,
                    message: format!("duplicate key '{key}' in [{section}]"),
                });
            }
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    fn require(&mut self, section: &str, key: &str) -> Result<(usize, String)> {
        self.take(section, key).ok_or(Error::Config {
            line: 0,
            message: format!("missing required key '{key}' in [{section}]"),
        })
    }

    fn number(&mut self, section: &str, key: &str) -> Result<f64> {
        let (line, v) = self.require(section, key)?;
        v.parse().map_err(|_| Error::Config {
            line,
            message: format!("'{key}' must be a number, got '{v}'"),
        })
    }

    fn number_opt(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| Error::Config {
                line,
                message: format!("'{key}' must be a number, got '{v}'"),
            }),
        }
    }

    fn integer_opt(&mut self, section: &str, key: &str) -> Result<Option<u64>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|_| Error::Config {
                line,
                message: format!("'{key}' must be an integer, got '{v}'"),
            }),
        }
    }

    fn build(mut self) -> Result<ExperimentConfig> {
        let (fam_line, family) = self.require("process", "family")?;
        let alpha = self.number("process", "alpha")?;
        let beta = self.number("process", "beta")?;
        let numeric = |e: Error| match e {
            Error::InvalidParameter(message) => Error::Config {
                line: fam_line,
                message,
            },
            other => other,
        };
        let process = match family.as_str() {
            "exp-cosine" => Covariance::exp_cosine(alpha, beta).map_err(numeric)?,
            "damped-oscillatory" => {
                Covariance::damped_oscillatory(alpha, beta).map_err(numeric)?
            }
            other => {
                return Err(Error::Config {
                    line: fam_line,
                    message: format!("unknown process family '{other}'"),
                })
            }
        };

        let (bfam_line, bfamily) = self.require("boundary", "family")?;
        let bnumeric = |e: Error| match e {
            Error::InvalidParameter(message) => Error::Config {
                line: bfam_line,
                message,
            },
            other => other,
        };
        let boundary = match bfamily.as_str() {
            "constant" => Boundary::constant(self.number("boundary", "level")?),
            "periodic" => Boundary::periodic(
                self.number("boundary", "base")?,
                self.number("boundary", "amplitude")?,
                self.number("boundary", "period")?,
            )
            .map_err(bnumeric)?,
            "daniels-ou" => Boundary::daniels_ou(
                self.number("boundary", "d")?,
                self.number("boundary", "rate")?,
            )
            .map_err(bnumeric)?,
            "polynomial" => {
                let (line, list) = self.require("boundary", "coeffs")?;
                let coeffs: std::result::Result<Vec<f64>, _> =
                    list.split(',').map(|c| c.trim().parse::<f64>()).collect();
                let coeffs = coeffs.map_err(|_| Error::Config {
                    line,
                    message: format!("bad coefficient list '{list}'"),
                })?;
                Boundary::polynomial(coeffs).map_err(bnumeric)?
            }
            other => {
                return Err(Error::Config {
                    line: bfam_line,
                    message: format!("unknown boundary family '{other}'"),
                })
            }
        };

        let (mline, list) = self.require("methods", "list")?;
        let mut methods = Vec::new();
        for item in list.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let m = Method::parse(item).ok_or(Error::Config {
                line: mline,
                message: format!("unknown method '{item}'"),
            })?;
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
        if methods.is_empty() {
            return Err(Error::Config {
                line: mline,
                message: "method list is empty".into(),
            });
        }

        let dt = self.number_opt("grid", "dt")?.unwrap_or(0.01);
        let t_max = self.number("grid", "t_max")?;
        let h = self.number_opt("grid", "h")?.unwrap_or(dt / 10.0);

        let n_paths = self.integer_opt("estimate", "n_paths")?.unwrap_or(100_000) as usize;
        let seed = self.integer_opt("estimate", "seed")?.unwrap_or(42);
        let epsilon = self
            .number_opt("estimate", "epsilon")?
            .unwrap_or_else(|| 0.1 * boundary.value(0.0));
        let bin_width = self
            .number_opt("estimate", "bin_width")?
            .unwrap_or(if t_max <= 20.0 { 0.05 } else { 0.5 });

        let out_dir = PathBuf::from(
            self.take("output", "dir")
                .map(|(_, v)| v)
                .unwrap_or_else(|| "out".into()),
        );

        if let Some(((section, key), (line, _))) = self.entries.into_iter().next() {
            return Err(Error::Config {
                line,
                message: format!("unknown key '{key}' in [{section}]"),
            });
        }

        let config = ExperimentConfig {
            process,
            boundary,
            methods,
            dt,
            t_max,
            h,
            n_paths,
            seed,
            epsilon,
            bin_width,
            out_dir,
        };
        config.validate()?;
        Ok(config)
    }
}

impl ExperimentConfig {
    /// Cross-field checks: incompatible method/process combinations are
    /// config errors, never silent skips.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |message: String| Error::Config { line: 0, message };
        if !(self.dt > 0.0 && self.t_max > self.dt) {
            return Err(cfg_err(format!(
                "grid needs 0 < dt < t_max, got dt = {}, t_max = {}",
                self.dt, self.t_max
            )));
        }
        if self.bin_width < self.dt {
            return Err(cfg_err(format!(
                "bin_width {} must be at least dt {}",
                self.bin_width, self.dt
            )));
        }
        if self.n_paths == 0 {
            return Err(cfg_err("n_paths must be positive".into()));
        }
        for m in &self.methods {
            match m {
                Method::Volterra | Method::ClosedForm => {
                    if !self.process.is_markov() {
                        return Err(cfg_err(format!(
                            "method '{}' needs the Markov case (exp-cosine with alpha ~ 0), \
                             got {} with alpha = {}",
                            m.name(),
                            self.process.family_name(),
                            self.process.alpha()
                        )));
                    }
                    if *m == Method::ClosedForm {
                        match &self.boundary {
                            Boundary::DanielsOu { rate, .. }
                                if (rate - self.process.beta()).abs()
                                    <= 1e-9 * self.process.beta() => {}
                            Boundary::DanielsOu { rate, .. } => {
                                return Err(cfg_err(format!(
                                    "closed-form needs the boundary decay rate ({rate}) to match \
                                     the process beta ({})",
                                    self.process.beta()
                                )));
                            }
                            other => {
                                return Err(cfg_err(format!(
                                    "closed-form needs a daniels-ou boundary, got {}",
                                    other.family_name()
                                )));
                            }
                        }
                    }
                }
                Method::Asymptotic => {
                    if !matches!(
                        self.boundary,
                        Boundary::Periodic { .. } | Boundary::Constant { .. }
                    ) {
                        return Err(cfg_err(format!(
                            "asymptotic needs a periodic or constant boundary, got {}",
                            self.boundary.family_name()
                        )));
                    }
                }
                Method::Mc | Method::McUpcrossing => {
                    if self.boundary.value(0.0) <= 0.0 {
                        return Err(cfg_err(
                            "Monte Carlo methods start at 0 and need S(0) > 0".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Parameters of the asymptotic hazard for this configuration.
    pub fn hazard_params(&self) -> Result<crate::asymptotics::HazardParams> {
        let (s0, amplitude, period) = match &self.boundary {
            Boundary::Periodic {
                base,
                amplitude,
                period,
            } => (*base, *amplitude, *period),
            Boundary::Constant { level } => (*level, 0.0, 1.0),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "no hazard parameters for a {} boundary",
                    other.family_name()
                )))
            }
        };
        crate::asymptotics::HazardParams::new(
            s0,
            amplitude,
            period,
            self.process.alpha(),
            self.process.beta(),
        )
    }
}
