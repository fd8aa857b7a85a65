//! `polydisc`: batch front end for the polydisc workbench.
//!
//! Exit codes: 0 on success (verdicts live in the report), 2 on parse or
//! configuration errors, 3 on numerical failure. Errors go to stderr as JSON.

mod commands;
mod inputs;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use polydisc::{Result, SpaceSpec};

use commands::{FactorArgs, Output};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct GlobalOpts {
    /// Space, e.g. `h2:n=2`, `dirichlet:n=2:alpha=1.0`, `drury:n=3`.
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Truncation degree.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Largest approximant degree (cyclicity, gram, wco) or fit degree (factor).
    #[arg(long = "degree-max", global = true)]
    pub degree_max: Option<usize>,
    /// Comma-separated radii.
    #[arg(long, global = true, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Quadrature nodes per circle.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Outer-test acceptance tolerance on the defect.
    #[arg(long = "tol-outer", global = true)]
    pub tol_outer: Option<f64>,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl GlobalOpts {
    pub fn space(&self) -> Result<Option<SpaceSpec>> {
        self.space.as_deref().map(str::parse).transpose()
    }
}

#[derive(Subcommand, Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Norm in the chosen space and optional quadrature p-means at --radii.
    Norm {
        #[arg(allow_hyphen_values = true)]
        input: String,
        /// Exponents for the p-means.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        p: Vec<f64>,
    },
    /// Gram matrix of `z^α f`, |α| <= --degree-max.
    Gram {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Optimal-approximant distances d_N, N = 0..=--degree-max.
    Cyclicity {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Outer-function integral test.
    Outer {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Classify a moment functional.
    Classify { input: String },
    /// Weighted-composition recovery, probes and cyclicity preservation.
    Wco { input: String },
    /// Recover p from F = e^p.
    Factor {
        #[arg(allow_hyphen_values = true)]
        input: String,
        /// Growth order.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long = "growth-a")]
        growth_a: Option<f64>,
        #[arg(long = "growth-b")]
        growth_b: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm { .. } => "norm",
            Command::Gram { .. } => "gram",
            Command::Cyclicity { .. } => "cyclicity",
            Command::Outer { .. } => "outer",
            Command::Classify { .. } => "classify",
            Command::Wco { .. } => "wco",
            Command::Factor { .. } => "factor",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "polydisc", version, about = "Truncated-order computations on polydisc function spaces")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: RunConfig<'a>,
    tolerances: BTreeMap<&'static str, f64>,
    result: serde_json::Value,
}

#[derive(Serialize)]
struct RunConfig<'a> {
    #[serde(flatten)]
    args: &'a Command,
    #[serde(flatten)]
    opts: &'a GlobalOpts,
}

fn run(cli: &Cli) -> Result<String> {
    let o = &cli.opts;
    let output = match &cli.command {
        Command::Norm { input, p } => commands::norm(o, input, p)?,
        Command::Gram { input } => commands::gram(o, input)?,
        Command::Cyclicity { input } => commands::cyclicity(o, input)?,
        Command::Outer { input } => commands::outer(o, input)?,
        Command::Classify { input } => commands::classify_cmd(o, input)?,
        Command::Wco { input } => commands::wco(o, input)?,
        Command::Factor { input, m, growth_a, growth_b } => {
            commands::factor(o, input, &FactorArgs { m: *m, growth_a: *growth_a, growth_b: *growth_b })?
        }
    };
    Ok(match output {
        Output::Text(t) => t,
        Output::Json { result, tolerances } => {
            let report = Report {
                tool: "polydisc",
                version: polydisc::VERSION,
                command: cli.command.name(),
                config: RunConfig { args: &cli.command, opts: o },
                tolerances,
                result,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    })
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim(), 2),
    };
    match run(&cli) {
        Ok(text) => {
            let written = match &cli.opts.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| e.to_string()),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(msg) => fail("io", &msg, 2),
            }
        }
        Err(e) => fail(e.kind(), &e.to_string(), if e.is_numerical() { 3 } else { 2 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use polydisc::Error;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["polydisc", "norm", "z1*z2", "--space", "drury:n=2", "--radii", "0.5,0.9"]).unwrap();
        assert_eq!(cli.opts.space.as_deref(), Some("drury:n=2"));
        assert_eq!(cli.opts.radii, Some(vec![0.5, 0.9]));
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert!(!Error::Parse("x".into()).is_numerical());
        assert!(Error::SingularGram { condition: 1e20 }.is_numerical());
    }
}
