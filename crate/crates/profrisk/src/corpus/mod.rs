//! Corpus ingestion and pipeline orchestration: walk project roots, run the
//! per-file analyses in parallel, join, aggregate, and write the output
//! files.
//!
//! A run is a pure function of (file bytes, config, registry): outputs are
//! byte-identical across repeated runs and worker counts. Per-file parse
//! failures never abort a run; they are tallied and listed in the manifest.

mod output;

pub use output::{render_tables, BlockRow, CaseRow, OccurrenceRow};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use walkdir::WalkDir;

use crate::complexity::{analyze_file_complexity, ComplexityBlock, Rank};
use crate::join::{join_cases, BlockIndex, JoinError, JoinOutcome};
use crate::proficiency::{
    classify_constructs, filter_by_level, CompetencyLevel, ConstructRegistry,
    ProficiencyOccurrence, RegistryError, DEFAULT_REGISTRY_TEXT,
};
use crate::report::ReportSummary;
use crate::syntax::{SyntaxTree, GRAMMAR_LEVEL};

/// Rows per risk category in the summary's top-classes tables.
pub const TOP_CLASSES_PER_RISK: usize = 5;

/// Which outputs a run emits. The manifest is always written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// occurrences.csv, blocks.csv, cases.csv
    Csv,
    /// summary.json
    Json,
    /// human-readable tables (rendered by the caller, not written to disk)
    Table,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "table" => Ok(OutputFormat::Table),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputFormat::Csv => write!(f, "csv"),
            OutputFormat::Json => write!(f, "json"),
            OutputFormat::Table => write!(f, "table"),
        }
    }
}

/// Configuration of one corpus run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// (project name, root directory) pairs; must be non-empty.
    pub roots: Vec<(String, PathBuf)>,
    pub include_glob: String,
    pub exclude_globs: Vec<String>,
    pub keep_levels: BTreeSet<CompetencyLevel>,
    pub keep_ranks: BTreeSet<Rank>,
    /// Replacement registry config; `None` uses the built-in registry.
    pub registry_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<OutputFormat>,
    /// Worker threads; `None` lets the pool pick.
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(roots: Vec<(String, PathBuf)>, output_dir: PathBuf) -> Self {
        RunConfig {
            roots,
            include_glob: "**/*.py".into(),
            exclude_globs: Vec::new(),
            keep_levels: [CompetencyLevel::C1, CompetencyLevel::C2].into(),
            keep_ranks: [Rank::A, Rank::F].into(),
            registry_path: None,
            output_dir,
            formats: [OutputFormat::Csv, OutputFormat::Json].into(),
            jobs: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("project root does not exist or is not a directory: {path}")]
    MissingRoot { path: PathBuf },
    #[error("no project roots configured")]
    NoRoots,
    #[error("invalid glob pattern {pattern:?}: {source}")]
    BadGlob {
        pattern: String,
        source: globset::Error,
    },
    #[error("cannot read registry {path}: {source}")]
    RegistryIo { path: PathBuf, source: io::Error },
    #[error("invalid registry {path}: {source}")]
    RegistryInvalid {
        path: PathBuf,
        source: RegistryError,
    },
    #[error("cannot write {path}: {source}")]
    OutputIo { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Join(#[from] JoinError),
}

/// One file selected by the corpus walk.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorpusFile {
    pub project: String,
    /// Project-relative directory ("." at the root), forward slashes.
    pub directory: String,
    /// Project-relative path, forward slashes.
    pub file: String,
    pub absolute_path: PathBuf,
}

fn compile_globs(config: &RunConfig) -> Result<(GlobSet, GlobSet), RunError> {
    let build_one = |pattern: &str| -> Result<Glob, RunError> {
        Glob::new(pattern).map_err(|source| RunError::BadGlob {
            pattern: pattern.to_owned(),
            source,
        })
    };
    let mut include = GlobSetBuilder::new();
    include.add(build_one(&config.include_glob)?);
    let include = include.build().map_err(|source| RunError::BadGlob {
        pattern: config.include_glob.clone(),
        source,
    })?;
    let mut exclude = GlobSetBuilder::new();
    for pattern in &config.exclude_globs {
        exclude.add(build_one(pattern)?);
    }
    let exclude = exclude.build().map_err(|source| RunError::BadGlob {
        pattern: config.exclude_globs.join(","),
        source,
    })?;
    Ok((include, exclude))
}

/// Enumerate corpus files in lexicographic (project, path) order.
///
/// Files match `include_glob` minus `exclude_globs` against the
/// project-relative path; symlinks are not followed.
pub fn walk_corpus(config: &RunConfig) -> Result<Vec<CorpusFile>, RunError> {
    if config.roots.is_empty() {
        return Err(RunError::NoRoots);
    }
    let (include, exclude) = compile_globs(config)?;
    let mut files = Vec::new();
    for (project, root) in &config.roots {
        if !root.is_dir() {
            return Err(RunError::MissingRoot { path: root.clone() });
        }
        for entry in WalkDir::new(root).follow_links(false) {
            let entry = match entry {
                Ok(entry) => entry,
                // Unreadable subtrees are skipped, not fatal.
                Err(_) => continue,
            };
            if !entry.file_type().is_file() || entry.path_is_symlink() {
                continue;
            }
            let rel = entry
                .path()
                .strip_prefix(root)
                .expect("walk entries live under their root");
            let rel_str = rel.to_string_lossy().replace('\\', "/");
            if !include.is_match(&rel_str) || exclude.is_match(&rel_str) {
                continue;
            }
            let directory = match rel_str.rsplit_once('/') {
                Some((dir, _)) => dir.to_owned(),
                None => ".".to_owned(),
            };
            files.push(CorpusFile {
                project: project.clone(),
                directory,
                file: rel_str,
                absolute_path: entry.path().to_path_buf(),
            });
        }
    }
    files.sort_by(|a, b| (&a.project, &a.file).cmp(&(&b.project, &b.file)));
    files
        .windows(2)
        .for_each(|w| debug_assert!((&w[0].project, &w[0].file) != (&w[1].project, &w[1].file)));
    Ok(files)
}

/// A file skipped by the run, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub project: String,
    pub file: String,
    pub line: u32,
    pub message: String,
}

/// Reproducibility record written as `manifest.json`. The timestamp lives
/// only here; all other outputs are byte-deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub grammar_level: String,
    pub registry_sha256: String,
    pub files_attempted: u64,
    pub files_parsed: u64,
    pub files_skipped: u64,
    pub timestamp_utc: String,
    pub config: ConfigEcho,
    pub skipped: Vec<SkippedFile>,
}

/// The configuration a run actually used, echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub projects: Vec<ProjectEcho>,
    pub include_glob: String,
    pub exclude_globs: Vec<String>,
    pub keep_levels: Vec<CompetencyLevel>,
    pub keep_ranks: Vec<Rank>,
    pub registry_path: Option<String>,
    pub output_dir: String,
    pub formats: Vec<OutputFormat>,
    pub jobs: Option<usize>,
    /// Percentages in the summary pool the whole case set rather than
    /// averaging per-project shares.
    pub percentage_pooling: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectEcho {
    pub name: String,
    pub path: String,
}

impl ConfigEcho {
    fn from_config(config: &RunConfig) -> Self {
        ConfigEcho {
            projects: config
                .roots
                .iter()
                .map(|(name, path)| ProjectEcho {
                    name: name.clone(),
                    path: path.to_string_lossy().into_owned(),
                })
                .collect(),
            include_glob: config.include_glob.clone(),
            exclude_globs: config.exclude_globs.clone(),
            keep_levels: config.keep_levels.iter().copied().collect(),
            keep_ranks: config.keep_ranks.iter().copied().collect(),
            registry_path: config
                .registry_path
                .as_ref()
                .map(|p| p.to_string_lossy().into_owned()),
            output_dir: config.output_dir.to_string_lossy().into_owned(),
            formats: config.formats.iter().copied().collect(),
            jobs: config.jobs,
            percentage_pooling: "pooled over all joined cases".into(),
        }
    }
}

/// Everything a finished run produced, besides the files on disk.
#[derive(Debug)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub summary: ReportSummary,
    pub occurrences: Vec<ProficiencyOccurrence>,
    pub blocks: Vec<ComplexityBlock>,
    pub outcome: JoinOutcome,
}

enum FileOutcome {
    Parsed {
        occurrences: Vec<ProficiencyOccurrence>,
        blocks: Vec<ComplexityBlock>,
    },
    Skipped {
        line: u32,
        message: String,
    },
}

fn analyze_one(file: &CorpusFile, registry: &ConstructRegistry) -> FileOutcome {
    let bytes = match std::fs::read(&file.absolute_path) {
        Ok(bytes) => bytes,
        Err(err) => {
            return FileOutcome::Skipped {
                line: 0,
                message: format!("io: {err}"),
            }
        }
    };
    match SyntaxTree::parse_bytes(&bytes, &file.file) {
        Ok(tree) => FileOutcome::Parsed {
            occurrences: classify_constructs(&tree, registry, &file.project),
            blocks: analyze_file_complexity(&tree, &file.project),
        },
        Err(err) => FileOutcome::Skipped {
            line: err.line,
            message: err.message,
        },
    }
}

fn load_registry(config: &RunConfig) -> Result<(ConstructRegistry, String), RunError> {
    let text = match &config.registry_path {
        None => DEFAULT_REGISTRY_TEXT.to_owned(),
        Some(path) => std::fs::read_to_string(path).map_err(|source| RunError::RegistryIo {
            path: path.clone(),
            source,
        })?,
    };
    let registry =
        ConstructRegistry::from_config_text(&text).map_err(|source| RunError::RegistryInvalid {
            path: config
                .registry_path
                .clone()
                .unwrap_or_else(|| PathBuf::from("<built-in>")),
            source,
        })?;
    let hash = format!("{:x}", Sha256::digest(text.as_bytes()));
    Ok((registry, hash))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    std::fs::write(path, bytes).map_err(|source| RunError::OutputIo {
        path: path.to_path_buf(),
        source,
    })
}

/// Run the full pipeline and write the configured outputs.
///
/// Returns the manifest and in-memory results. Per-file parse errors are
/// recorded as skips; only an unusable output directory, an invalid
/// registry, or a missing project root is fatal.
pub fn run_analysis(config: &RunConfig) -> Result<RunOutput, RunError> {
    let (registry, registry_sha256) = load_registry(config)?;
    let files = walk_corpus(config)?;

    std::fs::create_dir_all(&config.output_dir).map_err(|source| RunError::OutputIo {
        path: config.output_dir.clone(),
        source,
    })?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .expect("thread pool construction");
    let outcomes: Vec<FileOutcome> = pool.install(|| {
        files
            .par_iter()
            .map(|file| analyze_one(file, &registry))
            .collect()
    });

    // Deterministic merge in walk order, independent of worker scheduling.
    let mut occurrences = Vec::new();
    let mut blocks = Vec::new();
    let mut block_index = BlockIndex::new();
    let mut skipped = Vec::new();
    let mut file_tallies: BTreeMap<String, u64> = BTreeMap::new();
    for (file, outcome) in files.iter().zip(outcomes) {
        *file_tallies.entry(file.project.clone()).or_insert(0) += 1;
        match outcome {
            FileOutcome::Parsed {
                occurrences: occs,
                blocks: file_blocks,
            } => {
                block_index.insert_file(&file.project, &file.file, file_blocks.clone());
                occurrences.extend(occs);
                blocks.extend(file_blocks);
            }
            FileOutcome::Skipped { line, message } => skipped.push(SkippedFile {
                project: file.project.clone(),
                file: file.file.clone(),
                line,
                message,
            }),
        }
    }

    let kept = filter_by_level(&occurrences, &config.keep_levels);
    let outcome = join_cases(&kept, &block_index, &config.keep_ranks)?;
    let summary = ReportSummary::assemble(
        &file_tallies,
        &occurrences,
        &blocks,
        &outcome,
        kept.len() as u64,
        TOP_CLASSES_PER_RISK,
    );

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        grammar_level: GRAMMAR_LEVEL.to_owned(),
        registry_sha256,
        files_attempted: files.len() as u64,
        files_parsed: files.len() as u64 - skipped.len() as u64,
        files_skipped: skipped.len() as u64,
        timestamp_utc: chrono::Utc::now().to_rfc3339(),
        config: ConfigEcho::from_config(config),
        skipped,
    };

    if config.formats.contains(&OutputFormat::Csv) {
        write_bytes(
            &config.output_dir.join("occurrences.csv"),
            &output::occurrences_csv(&occurrences),
        )?;
        write_bytes(
            &config.output_dir.join("blocks.csv"),
            &output::blocks_csv(&blocks),
        )?;
        write_bytes(
            &config.output_dir.join("cases.csv"),
            &output::cases_csv(&outcome.cases),
        )?;
    }
    if config.formats.contains(&OutputFormat::Json) {
        write_bytes(
            &config.output_dir.join("summary.json"),
            &output::summary_json(&summary),
        )?;
    }
    write_bytes(
        &config.output_dir.join("manifest.json"),
        &output::manifest_json(&manifest),
    )?;

    Ok(RunOutput {
        manifest,
        summary,
        occurrences,
        blocks,
        outcome,
    })
}
