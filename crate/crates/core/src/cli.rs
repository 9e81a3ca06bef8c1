//! Command-line front end. `Cli` is the clap surface; it lowers to a
//! `RunConfig` which `run` dispatches.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::GridSpec;
use crate::error::{LabError, Result};
use crate::function::{function_from_label, FUNCTION_LABELS};
use crate::probe::{
    claim_lower_bound, classify_membership, continuity_curve, corollary_bound, default_t_schedule, thm2_decay,
    thm4_radial,
};
use crate::quadrature::QuadratureConfig;
use crate::semigroup::{interior_points, semigroup_from_label, SEMIGROUP_LABELS};
use crate::seminorms::{seminorm, SeminormKind, Thresholds};
use crate::verify::{verify_suite_with, Settings, CRITERIA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Box condition on `(1 - |z|)/|G|²`.
    Thm2,
    /// Pointwise bound on `(1 - |z|)^α/|G|`.
    Corollary,
    /// Radial decay of `(1 - r)^{(3-λ)/2}/|G|`.
    Thm4,
    /// Bloch-type lower bound of `f∘φ_t - f` along the singular radii.
    Claim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    Gallery,
    Norm,
    Flow { points: Vec<Complex64>, cross_check: bool },
    Probe { classify: bool },
    Condition { check: Condition, alpha: f64, centers: usize },
    Verify { suite: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub lambda: f64,
    pub seminorm: SeminormKind,
    pub function: String,
    pub semigroup: String,
    /// Flow or probe times; empty means the command's default.
    pub t_values: Vec<f64>,
    pub grid: GridSpec,
    pub quadrature: QuadratureConfig,
    pub thresholds: Thresholds,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            lambda: 0.5,
            seminorm: SeminormKind::P3,
            function: "f_lambda".into(),
            semigroup: "rotation:1".into(),
            t_values: Vec::new(),
            grid: GridSpec::default(),
            quadrature: QuadratureConfig::default(),
            thresholds: Thresholds::default(),
            format: Format::Json,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(LabError::Domain(format!("λ must lie in (0, 1), got {}", self.lambda)));
        }
        if self.t_values.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(LabError::Domain("t values must be positive".into()));
        }
        self.grid.validate()?;
        self.quadrature.validate()
    }
}

/// The serialized report and the process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: String,
}

fn render<T: Serialize>(value: &T, csv: impl FnOnce(&T) -> String, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Csv => csv(value),
    })
}

#[derive(Serialize)]
struct GalleryListing {
    functions: &'static [&'static str],
    semigroups: &'static [&'static str],
    criteria: &'static [&'static str],
}

fn gallery_csv(g: &GalleryListing) -> String {
    let mut out = String::from("kind,label\n");
    for (kind, labels) in [("function", g.functions), ("semigroup", g.semigroups), ("criterion", g.criteria)] {
        for l in labels {
            out.push_str(&format!("{kind},\"{l}\"\n"));
        }
    }
    out
}

/// Executes one command. `progress` receives verify summaries as they finish.
pub fn run_with(config: &RunConfig, mut progress: impl FnMut(&str)) -> Result<Outcome> {
    config.validate()?;
    let ok = |report| Ok(Outcome { exit_code: EXIT_OK, report });
    let fmt = config.format;
    let (grid, cfg, th) = (&config.grid, &config.quadrature, &config.thresholds);
    match &config.command {
        Command::Gallery => {
            let listing = GalleryListing {
                functions: FUNCTION_LABELS,
                semigroups: SEMIGROUP_LABELS,
                criteria: CRITERIA,
            };
            ok(render(&listing, gallery_csv, fmt)?)
        }
        Command::Norm => {
            let f = function_from_label(&config.function, config.lambda)?;
            let rep = seminorm(&f, config.seminorm, config.lambda, grid, cfg)?;
            ok(render(&rep, |r| r.to_csv(), fmt)?)
        }
        Command::Flow { points, cross_check } => {
            let sg = semigroup_from_label(&config.semigroup)?;
            let pts = if points.is_empty() { interior_points(3, 8, 0.9) } else { points.clone() };
            let ts = if config.t_values.is_empty() { vec![0.5] } else { config.t_values.clone() };
            let results = ts
                .iter()
                .map(|&t| sg.flow_points(t, &pts, *cross_check))
                .collect::<Result<Vec<_>>>()?;
            let csv = |rs: &Vec<crate::semigroup::FlowResult>| {
                let mut out = String::new();
                for (i, r) in rs.iter().enumerate() {
                    let body = r.to_csv();
                    out.push_str(if i == 0 { &body } else { body.split_once('\n').map_or("", |x| x.1) });
                }
                out
            };
            ok(render(&results, csv, fmt)?)
        }
        Command::Probe { classify } => {
            let f = function_from_label(&config.function, config.lambda)?;
            let sg = semigroup_from_label(&config.semigroup)?;
            let ts = if config.t_values.is_empty() { default_t_schedule() } else { config.t_values.clone() };
            if *classify {
                let v = classify_membership(&f, &sg, config.lambda, config.seminorm, Some(&ts), grid, cfg, th)?;
                ok(render(&v, |v| v.to_csv(), fmt)?)
            } else {
                let curve = continuity_curve(&f, &sg, config.lambda, config.seminorm, &ts, grid, cfg)?;
                ok(render(&curve, |c| c.to_csv(), fmt)?)
            }
        }
        Command::Condition { check, alpha, centers } => {
            let sg = semigroup_from_label(&config.semigroup)?;
            let g = sg.generator();
            let verdict = match check {
                Condition::Thm2 => {
                    let lengths: Vec<f64> = grid.arc_levels.iter().copied().filter(|&l| l <= 0.125).collect();
                    thm2_decay(g, &lengths, *centers, cfg, th)?
                }
                Condition::Corollary => corollary_bound(g, *alpha, grid)?,
                Condition::Thm4 => thm4_radial(g, config.lambda, &cfg.radius_schedule, grid.angles_per_radius, th)?,
                Condition::Claim => {
                    let f = function_from_label(&config.function, config.lambda)?;
                    let ts = if config.t_values.is_empty() { vec![0.2, 0.1, 0.05] } else { config.t_values.clone() };
                    let curve = claim_lower_bound(&f, &sg, config.lambda, &ts)?;
                    return ok(render(&curve, |c| c.to_csv(), fmt)?);
                }
            };
            ok(render(&verdict, |v| v.to_csv(), fmt)?)
        }
        Command::Verify { suite } => {
            let settings = Settings {
                grid: grid.clone(),
                quadrature: cfg.clone(),
                thresholds: *th,
            };
            let rep = verify_suite_with(suite, &settings, |r| progress(&r.summary()))?;
            let csv = |r: &crate::verify::VerifyReport| {
                let mut out = String::from("criterion,passed,runtime_s,runtime_budget_s\n");
                for c in &r.criteria {
                    out.push_str(&format!("{},{},{},{}\n", c.name, c.passed, c.runtime_s, c.runtime_budget_s));
                }
                out
            };
            Ok(Outcome {
                exit_code: if rep.passed { EXIT_OK } else { EXIT_VERIFY_FAILED },
                report: render(&rep, csv, fmt)?,
            })
        }
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    run_with(config, |_| {})
}

/// Exit status for an error returned by `run`.
pub fn exit_code_for(err: &LabError) -> i32 {
    if err.is_domain_error() {
        EXIT_DOMAIN
    } else {
        EXIT_NUMERICAL
    }
}

fn parse_point(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

#[derive(Debug, Parser)]
#[command(name = "morrey", version, about = "Morrey-space norms and composition semigroups on the unit disc")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Morrey exponent λ in (0, 1).
    #[arg(long, global = true, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, global = true, default_value = "p3")]
    pub seminorm: SeminormKind,
    /// Function label (see `gallery`).
    #[arg(long = "fn", global = true, default_value = "f_lambda")]
    pub function: String,
    /// Semigroup label (see `gallery`).
    #[arg(long, global = true, default_value = "rotation:1")]
    pub semigroup: String,
    /// Comma-separated times.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ts: Vec<f64>,
    /// Finest arc level k (arcs of length 2^-k, k = 0..=K).
    #[arg(long, global = true, default_value_t = 10)]
    pub arc_levels: u32,
    /// Arc centers per level.
    #[arg(long, global = true, default_value_t = 64)]
    pub centers: usize,
    /// Finest radius level k (radii 1 - 2^-k, k = 0..=K).
    #[arg(long, global = true, default_value_t = 12)]
    pub radius_levels: u32,
    /// Angles per radius.
    #[arg(long, global = true, default_value_t = 64)]
    pub angles: usize,
    #[arg(long, global = true, default_value_t = 0.05)]
    pub vanish: f64,
    #[arg(long, global = true, default_value_t = 0.5)]
    pub persist: f64,
    #[arg(long, global = true, default_value_t = 3)]
    pub tail: usize,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// List function, semigroup and criterion labels.
    Gallery,
    /// Seminorm report of a gallery function.
    Norm,
    /// Flow points under a semigroup.
    Flow {
        /// Point as RE,IM; repeatable.
        #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
        points: Vec<Complex64>,
        /// Also run the integrator and record the largest deviation.
        #[arg(long)]
        cross_check: bool,
    },
    /// Continuity curve t ↦ ‖f∘φ_t - f‖.
    Probe {
        /// Classify the curve instead of printing it.
        #[arg(long)]
        classify: bool,
    },
    /// Generator condition checks.
    Condition {
        #[arg(long, value_enum)]
        check: Condition,
        /// Exponent for the corollary bound.
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
    },
    /// Run the acceptance suite.
    Verify {
        /// Comma-separated criterion names, or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<String>,
    },
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        let c = self.common;
        let command = match self.command {
            CliCommand::Gallery => Command::Gallery,
            CliCommand::Norm => Command::Norm,
            CliCommand::Flow { points, cross_check } => Command::Flow { points, cross_check },
            CliCommand::Probe { classify } => Command::Probe { classify },
            CliCommand::Condition { check, alpha } => Command::Condition {
                check,
                alpha,
                centers: c.centers,
            },
            CliCommand::Verify { suite } => Command::Verify { suite },
        };
        RunConfig {
            command,
            lambda: c.lambda,
            seminorm: c.seminorm,
            function: c.function,
            semigroup: c.semigroup,
            t_values: c.ts,
            grid: GridSpec::dyadic(0..=c.arc_levels, c.centers, 0..=c.radius_levels, c.angles),
            quadrature: QuadratureConfig::default(),
            thresholds: Thresholds {
                vanish: c.vanish,
                persist: c.persist,
                tail: c.tail,
            },
            format: c.format,
            output: c.output,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_from(args: &[&str]) -> RunConfig {
        Cli::try_parse_from(std::iter::once("morrey").chain(args.iter().copied()))
            .unwrap()
            .into_config()
    }

    #[test]
    fn bare_flags_match_module_defaults() {
        let c = cfg_from(&["verify"]);
        assert_eq!(c.grid, GridSpec::default());
        assert_eq!(c.thresholds, Thresholds::default());
        assert_eq!(c.quadrature, QuadratureConfig::default());
        assert_eq!(c.command, Command::Verify { suite: vec!["all".into()] });
    }

    #[test]
    fn parses_points_and_times() {
        let c = cfg_from(&["flow", "--semigroup", "dilation", "--ts", "0.1,0.2", "--point", "-0.5,0.25"]);
        assert_eq!(c.t_values, vec![0.1, 0.2]);
        assert_eq!(
            c.command,
            Command::Flow {
                points: vec![Complex64::new(-0.5, 0.25)],
                cross_check: false
            }
        );
    }

    #[test]
    fn unknown_labels_are_domain_errors() {
        let mut c = cfg_from(&["norm"]);
        c.function = "nope".into();
        let err = run(&c).unwrap_err();
        assert_eq!(exit_code_for(&err), EXIT_DOMAIN);
        assert!(err.to_string().contains("f_lambda"));
        let mut c = cfg_from(&["flow"]);
        c.semigroup = "nope".into();
        assert_eq!(exit_code_for(&run(&c).unwrap_err()), EXIT_DOMAIN);
        let c = cfg_from(&["norm", "--lambda", "1.5"]);
        assert_eq!(exit_code_for(&run(&c).unwrap_err()), EXIT_DOMAIN);
    }

    #[test]
    fn flow_report_is_deterministic() {
        let c = cfg_from(&["flow", "--semigroup", "koenigs_lambda:0.5", "--ts", "0.3,0.6"]);
        let a = run(&c).unwrap();
        assert_eq!(a, run(&c).unwrap());
        assert_eq!(a.exit_code, EXIT_OK);
        let csv = run(&RunConfig { format: Format::Csv, ..c }).unwrap().report;
        assert_eq!(csv.lines().filter(|l| l.starts_with("t,")).count(), 1);
        assert_eq!(csv.lines().count(), 1 + 2 * 24);
    }
}
