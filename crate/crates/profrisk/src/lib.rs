//! Static analysis of Python codebases that joins two per-file measurements:
//!
//! - **Proficiency detection**: occurrences of language constructs classified
//!   on a CEFR-style competency scale (A1-C2), where C1 ("Advance") and C2
//!   ("Mastery") mark proficient code.
//! - **Cyclomatic complexity**: McCabe scores (decision points + 1) per
//!   function/method/class block, bucketed into ranks A-F, where rank A is
//!   "Safe" and rank F is "Risky".
//!
//! Each proficient occurrence is mapped to its innermost enclosing ranked
//! block, producing joined cases over the (Advance|Mastery) x (Safe|Risky)
//! grid. Aggregation yields a per-project overview, the 2x2 category matrix
//! with percentages, top construct-class tables per risk category, and a phi
//! association score.
//!
//! The pipeline, from source bytes to reports:
//!
//! ```text
//! bytes -> syntax::SyntaxTree -> proficiency::classify_constructs -> occurrences
//!                             -> syntax::enumerate_blocks
//!                             -> complexity::analyze_file_complexity -> blocks
//! occurrences + blocks -> join::join_cases -> cases -> report::* -> summary
//! ```
//!
//! The [`corpus`] module orchestrates the pipeline over directory trees and
//! writes deterministic CSV/JSON outputs; the `profrisk` binary is a thin CLI
//! wrapper around it.

pub mod cli;
pub mod complexity;
pub mod corpus;
pub mod join;
pub mod proficiency;
pub mod report;
pub mod syntax;

pub use complexity::{
    analyze_file_complexity, cyclomatic_complexity, ComplexityBlock, ComplexityScore, Rank,
    RiskCategory,
};
pub use join::{
    category_of, default_keep_ranks, join_cases, BlockIndex, FileKey, JoinError, JoinOutcome,
    JoinedCase,
};
pub use proficiency::{
    classify_constructs, filter_by_level, CompetencyLevel, ConstructRegistry, Detector,
    LevelCategory, ProficiencyOccurrence, RegistryError,
};
pub use report::{
    association_score, category_matrix, project_overview, top_classes, CategoryMatrix,
    ClassTableRow, ProjectOverviewRow, ReportError, ReportSummary,
};
pub use syntax::{enumerate_blocks, BlockKind, BlockSpan, LineSpan, ParseError, SyntaxTree};
