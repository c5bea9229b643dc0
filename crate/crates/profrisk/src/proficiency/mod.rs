//! Detection of proficiency-level language constructs.
//!
//! A [`ConstructRegistry`] maps construct-class names (e.g. "Simple List
//! Comprehension") to a syntactic [`Detector`] and a [`CompetencyLevel`].
//! [`classify_constructs`] walks a parsed file and emits one
//! [`ProficiencyOccurrence`] per matched syntax node, in source order.
//!
//! Detection is purely syntactic: `enumerate`/`zip`/`super` are recognized
//! as call expressions whose callee is the bare name, with no data-flow
//! tracking of rebinding. An occurrence's span is the span of the matched
//! expression itself, not the whole enclosing statement, so the case join
//! can use the tightest containment.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ruff_python_ast::visitor::{self, Visitor};
use ruff_python_ast::{Expr, Stmt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{LineSpan, SyntaxTree};

/// Registry text compiled into the binary; used when no `--registry` file
/// is given. Kept in config format so its bytes can be hashed and echoed.
pub const DEFAULT_REGISTRY_TEXT: &str = include_str!("default_registry.txt");

/// The seven construct classes whose level assignment is fixed; every
/// registry must contain them with exactly these levels.
pub const REQUIRED_CLASSES: [(&str, CompetencyLevel); 7] = [
    ("Simple List Comprehension", CompetencyLevel::C1),
    ("Generator Expression", CompetencyLevel::C1),
    ("Generator Function (yield)", CompetencyLevel::C1),
    ("Simple Dictionary Comprehension", CompetencyLevel::C1),
    ("'enumerate' call function", CompetencyLevel::C2),
    ("'zip' call function", CompetencyLevel::C2),
    ("Super Function", CompetencyLevel::C2),
];

/// CEFR-style competency level of a construct class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CompetencyLevel {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
}

impl CompetencyLevel {
    pub const ALL: [CompetencyLevel; 6] = [
        CompetencyLevel::A1,
        CompetencyLevel::A2,
        CompetencyLevel::B1,
        CompetencyLevel::B2,
        CompetencyLevel::C1,
        CompetencyLevel::C2,
    ];

    /// Study category of the level: C1 is Advance, C2 is Mastery, the rest
    /// fall outside the proficient focus set.
    pub fn category(self) -> LevelCategory {
        match self {
            CompetencyLevel::A1 | CompetencyLevel::A2 => LevelCategory::Basic,
            CompetencyLevel::B1 | CompetencyLevel::B2 => LevelCategory::Intermediate,
            CompetencyLevel::C1 => LevelCategory::Advance,
            CompetencyLevel::C2 => LevelCategory::Mastery,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CompetencyLevel::A1 => "A1",
            CompetencyLevel::A2 => "A2",
            CompetencyLevel::B1 => "B1",
            CompetencyLevel::B2 => "B2",
            CompetencyLevel::C1 => "C1",
            CompetencyLevel::C2 => "C2",
        }
    }
}

impl fmt::Display for CompetencyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CompetencyLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A1" => Ok(CompetencyLevel::A1),
            "A2" => Ok(CompetencyLevel::A2),
            "B1" => Ok(CompetencyLevel::B1),
            "B2" => Ok(CompetencyLevel::B2),
            "C1" => Ok(CompetencyLevel::C1),
            "C2" => Ok(CompetencyLevel::C2),
            other => Err(format!("unknown competency level {other:?}")),
        }
    }
}

/// Category derived from a [`CompetencyLevel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LevelCategory {
    Basic,
    Intermediate,
    Advance,
    Mastery,
}

impl fmt::Display for LevelCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelCategory::Basic => write!(f, "Basic"),
            LevelCategory::Intermediate => write!(f, "Intermediate"),
            LevelCategory::Advance => write!(f, "Advance"),
            LevelCategory::Mastery => write!(f, "Mastery"),
        }
    }
}

/// Syntactic pattern a registry entry matches.
///
/// A comprehension is "simple" when it has exactly one `for` clause and its
/// element expression is not itself a comprehension; everything else falls
/// under the multi-clause detector of the same family. Guard `if` clauses
/// do not affect simplicity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Detector {
    ListCompSimple,
    ListCompMulti,
    DictCompSimple,
    DictCompMulti,
    SetCompSimple,
    SetCompMulti,
    GeneratorExpression,
    /// Any `yield` or `yield from` expression.
    YieldExpression,
    Lambda,
    /// Call expression whose callee is this bare name.
    Call(String),
}

impl Detector {
    pub fn id(&self) -> String {
        match self {
            Detector::ListCompSimple => "list-comp-simple".into(),
            Detector::ListCompMulti => "list-comp-multi".into(),
            Detector::DictCompSimple => "dict-comp-simple".into(),
            Detector::DictCompMulti => "dict-comp-multi".into(),
            Detector::SetCompSimple => "set-comp-simple".into(),
            Detector::SetCompMulti => "set-comp-multi".into(),
            Detector::GeneratorExpression => "generator-expression".into(),
            Detector::YieldExpression => "yield-expression".into(),
            Detector::Lambda => "lambda".into(),
            Detector::Call(name) => format!("call:{name}"),
        }
    }
}

impl FromStr for Detector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(name) = s.strip_prefix("call:") {
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(format!("bad call detector name {name:?}"));
            }
            return Ok(Detector::Call(name.to_owned()));
        }
        match s {
            "list-comp-simple" => Ok(Detector::ListCompSimple),
            "list-comp-multi" => Ok(Detector::ListCompMulti),
            "dict-comp-simple" => Ok(Detector::DictCompSimple),
            "dict-comp-multi" => Ok(Detector::DictCompMulti),
            "set-comp-simple" => Ok(Detector::SetCompSimple),
            "set-comp-multi" => Ok(Detector::SetCompMulti),
            "generator-expression" => Ok(Detector::GeneratorExpression),
            "yield-expression" => Ok(Detector::YieldExpression),
            "lambda" => Ok(Detector::Lambda),
            other => Err(format!("unknown detector {other:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("registry line {line}: expected `class-name | detector-id | level`, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("registry line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("duplicate construct class {class:?}")]
    DuplicateClass { class: String },
    #[error("detector {detector:?} is claimed by both {first:?} and {second:?}")]
    DuplicateDetector {
        detector: String,
        first: String,
        second: String,
    },
    #[error("registry is missing required class {class:?} at level {level}")]
    MissingRequiredClass {
        class: String,
        level: CompetencyLevel,
    },
    #[error("required class {class:?} must be level {expected}, registry says {actual}")]
    WrongRequiredLevel {
        class: String,
        expected: CompetencyLevel,
        actual: CompetencyLevel,
    },
}

/// One construct class the classifier can emit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistryEntry {
    pub class_name: String,
    pub detector: Detector,
    pub level: CompetencyLevel,
}

/// Mapping from construct-class names to detectors and competency levels.
///
/// Class names and detectors are both unique, so every matched node yields
/// exactly one occurrence. The registry is read-only after load and safe to
/// share across threads.
#[derive(Debug, Clone)]
pub struct ConstructRegistry {
    entries: Vec<RegistryEntry>,
    // detector -> index into entries; Call detectors resolved via call_names
    by_detector: BTreeMap<Detector, usize>,
    call_names: BTreeMap<String, usize>,
}

impl ConstructRegistry {
    /// The built-in registry ([`DEFAULT_REGISTRY_TEXT`]).
    pub fn default_registry() -> Self {
        Self::from_config_text(DEFAULT_REGISTRY_TEXT)
            .expect("embedded default registry must be valid")
    }

    /// Parse the flat config format: one `class-name | detector-id | level`
    /// entry per line; blank lines and `#` comments are ignored.
    pub fn from_config_text(text: &str) -> Result<Self, RegistryError> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split('|').map(str::trim).collect();
            let [class_name, detector_id, level] = parts[..] else {
                return Err(RegistryError::Malformed {
                    line: lineno + 1,
                    text: raw.to_owned(),
                });
            };
            if class_name.is_empty() {
                return Err(RegistryError::Invalid {
                    line: lineno + 1,
                    message: "empty class name".into(),
                });
            }
            let detector = detector_id
                .parse()
                .map_err(|message| RegistryError::Invalid {
                    line: lineno + 1,
                    message,
                })?;
            let level = level.parse().map_err(|message| RegistryError::Invalid {
                line: lineno + 1,
                message,
            })?;
            entries.push(RegistryEntry {
                class_name: class_name.to_owned(),
                detector,
                level,
            });
        }
        Self::from_entries(entries)
    }

    pub fn from_entries(entries: Vec<RegistryEntry>) -> Result<Self, RegistryError> {
        let mut by_detector = BTreeMap::new();
        let mut call_names = BTreeMap::new();
        let mut seen_classes = BTreeMap::new();
        for (idx, entry) in entries.iter().enumerate() {
            if let Some(_prev) = seen_classes.insert(entry.class_name.clone(), idx) {
                return Err(RegistryError::DuplicateClass {
                    class: entry.class_name.clone(),
                });
            }
            let slot = match &entry.detector {
                Detector::Call(name) => call_names.insert(name.clone(), idx),
                other => by_detector.insert(other.clone(), idx),
            };
            if let Some(prev) = slot {
                return Err(RegistryError::DuplicateDetector {
                    detector: entry.detector.id(),
                    first: entries[prev].class_name.clone(),
                    second: entry.class_name.clone(),
                });
            }
        }
        for (class, level) in REQUIRED_CLASSES {
            match seen_classes.get(class) {
                None => {
                    return Err(RegistryError::MissingRequiredClass {
                        class: class.to_owned(),
                        level,
                    })
                }
                Some(&idx) if entries[idx].level != level => {
                    return Err(RegistryError::WrongRequiredLevel {
                        class: class.to_owned(),
                        expected: level,
                        actual: entries[idx].level,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(ConstructRegistry {
            entries,
            by_detector,
            call_names,
        })
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn level_of(&self, class_name: &str) -> Option<CompetencyLevel> {
        self.entries
            .iter()
            .find(|e| e.class_name == class_name)
            .map(|e| e.level)
    }

    fn lookup(&self, detector: &Detector) -> Option<&RegistryEntry> {
        let idx = match detector {
            Detector::Call(name) => self.call_names.get(name.as_str()),
            other => self.by_detector.get(other),
        };
        idx.map(|&i| &self.entries[i])
    }
}

/// One detected construct instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProficiencyOccurrence {
    pub project: String,
    pub directory: String,
    pub file: String,
    pub construct_class: String,
    pub start_line: u32,
    pub end_line: u32,
    pub level: CompetencyLevel,
}

impl ProficiencyOccurrence {
    pub fn span(&self) -> LineSpan {
        LineSpan::new(self.start_line, self.end_line)
    }
}

/// Derive the (directory, file) labels from a tree's source path, relative
/// to the project root. Directory is "." for top-level files.
pub(crate) fn dir_file_labels(tree: &SyntaxTree) -> (String, String) {
    let file = tree.source_path().to_string_lossy().replace('\\', "/");
    let directory = match file.rsplit_once('/') {
        Some((dir, _)) => dir.to_owned(),
        None => ".".to_owned(),
    };
    (directory, file)
}

/// Detect every registry construct in a file, in source order.
///
/// A single line may yield several occurrences (`zip` inside a list
/// comprehension yields two); syntax matching no registry entry yields
/// nothing. The whole tree is walked, including decorators, default
/// arguments, and module-level code.
pub fn classify_constructs(
    tree: &SyntaxTree,
    registry: &ConstructRegistry,
    project: &str,
) -> Vec<ProficiencyOccurrence> {
    let (directory, file) = dir_file_labels(tree);
    let mut finder = ConstructFinder {
        tree,
        registry,
        project,
        directory: &directory,
        file: &file,
        out: Vec::new(),
    };
    for stmt in &tree.module().body {
        finder.visit_stmt(stmt);
    }
    finder.out
}

/// Order-preserving subset of occurrences whose level is in `keep`.
pub fn filter_by_level(
    occurrences: &[ProficiencyOccurrence],
    keep: &std::collections::BTreeSet<CompetencyLevel>,
) -> Vec<ProficiencyOccurrence> {
    occurrences
        .iter()
        .filter(|occ| keep.contains(&occ.level))
        .cloned()
        .collect()
}

struct ConstructFinder<'a> {
    tree: &'a SyntaxTree,
    registry: &'a ConstructRegistry,
    project: &'a str,
    directory: &'a str,
    file: &'a str,
    out: Vec<ProficiencyOccurrence>,
}

impl ConstructFinder<'_> {
    fn emit(&mut self, detector: &Detector, range: ruff_text_size::TextRange) {
        if let Some(entry) = self.registry.lookup(detector) {
            let span = self.tree.span_of(range);
            self.out.push(ProficiencyOccurrence {
                project: self.project.to_owned(),
                directory: self.directory.to_owned(),
                file: self.file.to_owned(),
                construct_class: entry.class_name.clone(),
                start_line: span.start,
                end_line: span.end,
                level: entry.level,
            });
        }
    }
}

fn is_comprehension(expr: &Expr) -> bool {
    matches!(
        expr,
        Expr::ListComp(_) | Expr::SetComp(_) | Expr::DictComp(_) | Expr::Generator(_)
    )
}

impl<'a> Visitor<'a> for ConstructFinder<'_> {
    fn visit_expr(&mut self, expr: &'a Expr) {
        use ruff_text_size::Ranged;
        let detector = match expr {
            Expr::ListComp(comp) => {
                if comp.generators.len() == 1 && !is_comprehension(&comp.elt) {
                    Some(Detector::ListCompSimple)
                } else {
                    Some(Detector::ListCompMulti)
                }
            }
            Expr::SetComp(comp) => {
                if comp.generators.len() == 1 && !is_comprehension(&comp.elt) {
                    Some(Detector::SetCompSimple)
                } else {
                    Some(Detector::SetCompMulti)
                }
            }
            Expr::DictComp(comp) => {
                let key_is_comp = comp.key.as_deref().is_some_and(is_comprehension);
                if comp.generators.len() == 1 && !key_is_comp && !is_comprehension(&comp.value) {
                    Some(Detector::DictCompSimple)
                } else {
                    Some(Detector::DictCompMulti)
                }
            }
            Expr::Generator(_) => Some(Detector::GeneratorExpression),
            Expr::Yield(_) | Expr::YieldFrom(_) => Some(Detector::YieldExpression),
            Expr::Lambda(_) => Some(Detector::Lambda),
            Expr::Call(call) => match call.func.as_ref() {
                Expr::Name(name) => Some(Detector::Call(name.id.as_str().to_owned())),
                _ => None,
            },
            _ => None,
        };
        if let Some(detector) = detector {
            self.emit(&detector, expr.range());
        }
        visitor::walk_expr(self, expr);
    }

    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        visitor::walk_stmt(self, stmt);
    }
}
