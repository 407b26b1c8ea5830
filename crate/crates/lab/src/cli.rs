//! The `eplab` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::error::{io_err, LabError, Result};
use crate::output::{self, Format};
use crate::presets::PRESETS;
use crate::runner::{self, ConsistencyStatus, RunReport};
use crate::scenario::{load_scenario, preset_scenario, Overrides, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_DISAGREE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "eplab",
    version,
    about = "Critical thresholds and breakdown in 1D Euler-Poisson flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the threshold conditions on the initial data.
    Classify {
        #[command(flatten)]
        source: Source,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve the data and write the diagnostics trace and snapshots.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Classify, simulate and trace characteristics; writes the report and paths.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Everything `verify` does, plus snapshots and the full trace.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run several scenarios in parallel, each into `<out>/<name>`.
    Sweep {
        /// Preset names.
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
        /// Scenario files.
        #[arg(long = "config")]
        configs: Vec<PathBuf>,
        #[command(flatten)]
        overrides: OverrideArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// List the built-in presets.
    Presets,
}

#[derive(Debug, Args)]
struct Source {
    /// Built-in preset name.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    scenario: Option<String>,
    /// Scenario file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset parameter, `name=value`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", requires = "scenario")]
    params: Vec<String>,
    #[command(flatten)]
    overrides: OverrideArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args, Clone, Copy)]
struct OverrideArgs {
    /// Number of cells.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
}

impl From<OverrideArgs> for Overrides {
    fn from(o: OverrideArgs) -> Self {
        Overrides {
            n: o.n,
            cfl: o.cfl,
            t_end: o.t_end,
        }
    }
}

fn parse_params(raw: &[String]) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    for item in raw {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| LabError::Parse(format!("`{item}` is not NAME=VALUE")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| LabError::Parse(format!("`{item}`: value is not a number")))?;
        let v = serde_json::Number::from_f64(v)
            .ok_or_else(|| LabError::Parse(format!("`{item}`: value is not finite")))?;
        map.insert(k.trim().to_string(), Value::Number(v));
    }
    Ok(map)
}

fn load(source: &Source) -> Result<Scenario> {
    let base = match (&source.scenario, &source.config) {
        (Some(name), _) => preset_scenario(name, &parse_params(&source.params)?)?,
        (None, Some(path)) => load_scenario(path)?,
        (None, None) => unreachable!("clap requires one of --scenario, --config"),
    };
    let o: Overrides = source.overrides.into();
    if o.n.is_none() && o.cfl.is_none() && o.t_end.is_none() {
        Ok(base)
    } else {
        base.with_overrides(&o)
    }
}

fn summary_line(r: &RunReport) -> String {
    format!(
        "{}: verdict {:?}, outcome {:?}, {}",
        r.scenario.name, r.threshold.verdict, r.summary.outcome, r.consistency.annotation
    )
}

fn exit_for(r: &RunReport) -> i32 {
    if r.consistency.status == ConsistencyStatus::Disagree {
        EXIT_DISAGREE
    } else {
        EXIT_OK
    }
}

fn write_verify(dir: &Path, r: &RunReport) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let file = std::fs::File::create(dir.join("report.json")).map_err(io_err(dir))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), r)?;
    output::write_paths(&dir.join("paths"), r)
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    let echo = |stdout: &mut dyn Write, line: &str| -> Result<()> {
        writeln!(stdout, "{line}").map_err(io_err(Path::new("<stdout>")))
    };
    match cli.command {
        Command::Presets => {
            for (name, about) in PRESETS {
                echo(stdout, &format!("{name:<26}{about}"))?;
            }
            Ok(EXIT_OK)
        }
        Command::Classify { source, out } => {
            let s = load(&source)?;
            let report = runner::classify_scenario(&s)?;
            let x = s.init.grid().centers();
            match out {
                Some(path) => {
                    let mut f = std::fs::File::create(&path).map_err(io_err(&path))?;
                    output::write_classification(&mut f, &report, &x, source.format)?;
                    echo(stdout, &format!("{:?}", report.verdict))?;
                }
                None => output::write_classification(stdout, &report, &x, source.format)?,
            }
            Ok(EXIT_OK)
        }
        Command::Simulate { source, out } => {
            let s = load(&source)?;
            let trace = runner::simulate_scenario(&s)?;
            std::fs::create_dir_all(&out).map_err(io_err(&out))?;
            let path = out.join("trace.json");
            let f = std::fs::File::create(&path).map_err(io_err(&path))?;
            serde_json::to_writer_pretty(std::io::BufWriter::new(f), &trace)?;
            output::write_snapshots(
                &out.join("snapshots"),
                &trace.snapshots,
                s.model(),
                source.format,
            )?;
            echo(
                stdout,
                &format!("{}: outcome {:?}", s.name(), trace.outcome),
            )?;
            Ok(EXIT_OK)
        }
        Command::Verify { source, out } => {
            let r = runner::run(&load(&source)?)?;
            write_verify(&out, &r)?;
            echo(stdout, &summary_line(&r))?;
            Ok(exit_for(&r))
        }
        Command::Run { source, out } => {
            let r = runner::run(&load(&source)?)?;
            output::write_run(&out, &r, source.format)?;
            echo(stdout, &summary_line(&r))?;
            Ok(exit_for(&r))
        }
        Command::Sweep {
            scenarios,
            configs,
            overrides,
            format,
            out,
        } => {
            if scenarios.is_empty() && configs.is_empty() {
                return Err(LabError::Parse(
                    "sweep needs at least one --scenario or --config".into(),
                ));
            }
            let o: Overrides = overrides.into();
            let mut jobs: Vec<Scenario> = Vec::new();
            for name in &scenarios {
                jobs.push(preset_scenario(name, &Map::new())?.with_overrides(&o)?);
            }
            for path in &configs {
                jobs.push(load_scenario(path)?.with_overrides(&o)?);
            }
            let dirs = unique_dirs(&out, &jobs);
            let results: Vec<Result<RunReport>> = jobs
                .par_iter()
                .zip(&dirs)
                .map(|(s, dir)| {
                    let r = runner::run(s)?;
                    output::write_run(dir, &r, format)?;
                    Ok(r)
                })
                .collect();
            let mut code = EXIT_OK;
            for r in results {
                let r = r?;
                echo(stdout, &summary_line(&r))?;
                code = code.max(exit_for(&r));
            }
            Ok(code)
        }
    }
}

/// `<out>/<name>`, with a numeric suffix on repeated names.
fn unique_dirs(out: &Path, jobs: &[Scenario]) -> Vec<PathBuf> {
    let mut seen: Vec<String> = Vec::new();
    jobs.iter()
        .map(|s| {
            let base = s.name().to_string();
            let count = seen.iter().filter(|n| **n == base).count();
            seen.push(base.clone());
            if count == 0 {
                out.join(base)
            } else {
                out.join(format!("{base}-{count}"))
            }
        })
        .collect()
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(args.iter().copied(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_one_and_help_zero() {
        assert_eq!(call(&["eplab", "frobnicate"]).0, EXIT_ERROR);
        assert_eq!(call(&["eplab", "classify"]).0, EXIT_ERROR);
        assert_eq!(call(&["eplab", "--help"]).0, EXIT_OK);
        let (code, _, err) = call(&["eplab", "classify", "--scenario", "nope"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("nope"));
    }

    #[test]
    fn params_parse_as_numbers() {
        let m = parse_params(&["eps=0.5".into(), " k = 2".into()]).unwrap();
        assert_eq!(m["eps"], 0.5);
        assert_eq!(m["k"], 2.0);
        assert!(parse_params(&["eps".into()]).is_err());
        assert!(parse_params(&["eps=x".into()]).is_err());
    }

    #[test]
    fn presets_are_listed() {
        let (code, out, _) = call(&["eplab", "presets"]);
        assert_eq!(code, EXIT_OK);
        for (name, _) in PRESETS {
            assert!(out.contains(name));
        }
    }
}
