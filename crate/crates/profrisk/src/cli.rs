//! Command-line interface: argument definitions and their translation into
//! a [`RunConfig`].
//!
//! Exit codes: 0 on success (skipped files are not failures), 1 on fatal
//! config/IO errors, 2 on invalid arguments.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::complexity::Rank;
use crate::corpus::{OutputFormat, RunConfig};
use crate::proficiency::CompetencyLevel;

/// Environment variable consulted when `--jobs` is not given.
pub const JOBS_ENV_VAR: &str = "PROFRISK_JOBS";

#[derive(Debug, Parser)]
#[command(
    name = "profrisk",
    version,
    about = "Detect proficient Python constructs, rank block complexity, and join the two by line span"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one or more local project checkouts and write reports.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Project to analyze as NAME=PATH; repeatable.
    #[arg(long = "project", value_name = "NAME=PATH", required = true)]
    pub projects: Vec<String>,

    /// Output directory for occurrences.csv, blocks.csv, cases.csv,
    /// summary.json, and manifest.json.
    #[arg(long = "out", value_name = "DIR")]
    pub out: PathBuf,

    /// Competency levels kept for the join (comma-separated).
    #[arg(long, value_name = "LEVELS", default_value = "C1,C2")]
    pub levels: String,

    /// Complexity ranks kept for the join (comma-separated). Only A and F
    /// have a binary risk category; other ranks always discard.
    #[arg(long, value_name = "RANKS", default_value = "A,F")]
    pub ranks: String,

    /// Construct registry file replacing the built-in one
    /// (lines of `class-name | detector-id | level`).
    #[arg(long, value_name = "FILE")]
    pub registry: Option<PathBuf>,

    /// Outputs to produce (comma-separated: csv,json,table).
    #[arg(long, value_name = "FORMATS", default_value = "csv,json")]
    pub format: String,

    /// Glob of project-relative paths to skip; repeatable.
    #[arg(long = "exclude", value_name = "GLOB")]
    pub excludes: Vec<String>,

    /// Worker threads (falls back to the PROFRISK_JOBS env var, then to
    /// the available parallelism).
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

fn parse_list<T, E>(raw: &str, what: &str) -> Result<BTreeSet<T>, String>
where
    T: std::str::FromStr<Err = E> + Ord,
    E: std::fmt::Display,
{
    let mut out = BTreeSet::new();
    for item in raw.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        out.insert(
            item.parse::<T>()
                .map_err(|err| format!("invalid {what} {item:?}: {err}"))?,
        );
    }
    if out.is_empty() {
        return Err(format!("at least one {what} is required"));
    }
    Ok(out)
}

fn parse_project(raw: &str) -> Result<(String, PathBuf), String> {
    let (name, path) = raw
        .split_once('=')
        .ok_or_else(|| format!("--project must be NAME=PATH, got {raw:?}"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(format!("--project has an empty name: {raw:?}"));
    }
    if path.is_empty() {
        return Err(format!("--project has an empty path: {raw:?}"));
    }
    Ok((name.to_owned(), PathBuf::from(path)))
}

impl AnalyzeArgs {
    /// Validate and convert the parsed arguments; errors here are invalid
    /// arguments (exit code 2).
    pub fn to_run_config(&self) -> Result<RunConfig, String> {
        let mut roots = Vec::new();
        let mut seen = BTreeSet::new();
        for raw in &self.projects {
            let (name, path) = parse_project(raw)?;
            if !seen.insert(name.clone()) {
                return Err(format!("duplicate project name {name:?}"));
            }
            roots.push((name, path));
        }

        for pattern in &self.excludes {
            globset::Glob::new(pattern)
                .map_err(|err| format!("invalid --exclude glob {pattern:?}: {err}"))?;
        }

        let jobs = match self.jobs {
            Some(n) => Some(n),
            None => match std::env::var(JOBS_ENV_VAR) {
                Err(_) => None,
                Ok(raw) => Some(raw.trim().parse::<usize>().map_err(|_| {
                    format!("invalid {JOBS_ENV_VAR} value {raw:?}: expected a number")
                })?),
            },
        };
        if jobs == Some(0) {
            return Err("--jobs must be at least 1".into());
        }

        let mut config = RunConfig::new(roots, self.out.clone());
        config.exclude_globs = self.excludes.clone();
        config.keep_levels = parse_list::<CompetencyLevel, _>(&self.levels, "level")?;
        config.keep_ranks = parse_list::<Rank, _>(&self.ranks, "rank")?;
        config.registry_path = self.registry.clone();
        config.formats = parse_list::<OutputFormat, _>(&self.format, "format")?;
        config.jobs = jobs;
        Ok(config)
    }
}
