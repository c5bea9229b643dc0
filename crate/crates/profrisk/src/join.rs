//! Mapping of proficient occurrences onto their innermost enclosing ranked
//! block, yielding the (Advance|Mastery) x (Safe|Risky) case set.
//!
//! Join rules:
//!
//! - An occurrence pairs with the innermost (smallest-span) block of kind
//!   function or method in the same file whose span fully contains the
//!   occurrence span. Class blocks are used only when no function or method
//!   contains the occurrence.
//! - Occurrences contained in no block at all are module-level code; they
//!   produce no case and are tallied in `module_level_discards`.
//! - Occurrences whose block rank is outside the kept set (B-E never form a
//!   binary risk category) produce no case and are tallied in
//!   `rank_discards`.
//!
//! This makes the mapping functional (one case per occurrence), so
//! conservation holds exactly: input occurrences = cases + module-level
//! discards + rank discards.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexity::{ComplexityBlock, Rank, RiskCategory};
use crate::proficiency::{CompetencyLevel, LevelCategory, ProficiencyOccurrence};
use crate::syntax::BlockKind;

/// Identifies a file within a corpus run: (project, project-relative path).
pub type FileKey = (String, String);

/// Per-file complexity blocks, keyed by [`FileKey`]. Every *parsed* file
/// must be registered, even when it contains no blocks; a missing entry for
/// an occurrence's file signals a pipeline wiring bug, not a data condition.
#[derive(Debug, Clone, Default)]
pub struct BlockIndex {
    files: BTreeMap<FileKey, Vec<ComplexityBlock>>,
}

impl BlockIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Register a parsed file and its blocks (possibly empty).
    pub fn insert_file(&mut self, project: &str, file: &str, blocks: Vec<ComplexityBlock>) {
        self.files
            .insert((project.to_owned(), file.to_owned()), blocks);
    }

    /// Build an index from a flat block list alone. Files without blocks
    /// cannot be represented this way; prefer [`BlockIndex::insert_file`]
    /// when wiring a full pipeline.
    pub fn from_blocks(blocks: &[ComplexityBlock]) -> Self {
        let mut index = BlockIndex::new();
        for block in blocks {
            index
                .files
                .entry((block.project.clone(), block.file.clone()))
                .or_default()
                .push(block.clone());
        }
        index
    }

    pub fn get(&self, project: &str, file: &str) -> Option<&[ComplexityBlock]> {
        self.files
            .get(&(project.to_owned(), file.to_owned()))
            .map(Vec::as_slice)
    }

    pub fn file_count(&self) -> usize {
        self.files.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JoinError {
    /// An occurrence references a file with no registered block list.
    #[error("no parsed block list for {project}:{file} (pipeline wiring bug)")]
    InconsistentInput { project: String, file: String },
}

/// One (occurrence, enclosing block) pair with its derived categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinedCase {
    pub occurrence: ProficiencyOccurrence,
    pub block: ComplexityBlock,
}

impl JoinedCase {
    /// C1 maps to Advance, C2 to Mastery. Cases are only built from
    /// occurrences at these two levels.
    pub fn level_category(&self) -> LevelCategory {
        self.occurrence.level.category()
    }

    /// Rank A maps to Safe, rank F to Risky. Cases are only built from
    /// blocks at these two ranks.
    pub fn risk_category(&self) -> RiskCategory {
        self.block.rank.risk_category()
    }
}

/// The derived category pair of a case.
pub fn category_of(case: &JoinedCase) -> (LevelCategory, RiskCategory) {
    (case.level_category(), case.risk_category())
}

/// Join result with its conservation tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JoinOutcome {
    /// Cases sorted by (project, file, occurrence start line, construct
    /// class); ties keep source order.
    pub cases: Vec<JoinedCase>,
    /// Occurrences outside every block (module-level code).
    pub module_level_discards: u64,
    /// Occurrences whose enclosing block rank forms no case.
    pub rank_discards: u64,
}

impl JoinOutcome {
    /// Conservation check: every input occurrence is accounted for.
    pub fn accounts_for(&self, input_occurrences: usize) -> bool {
        self.cases.len() as u64 + self.module_level_discards + self.rank_discards
            == input_occurrences as u64
    }
}

/// Innermost containing block: smallest span among function/method blocks
/// containing the occurrence, falling back to the innermost class block.
/// Containing blocks always form a nesting chain, so "smallest span" is
/// unambiguous.
fn innermost_enclosing<'a>(
    occurrence: &ProficiencyOccurrence,
    blocks: &'a [ComplexityBlock],
) -> Option<&'a ComplexityBlock> {
    let span = occurrence.span();
    let innermost = |kinds: &[BlockKind]| {
        blocks
            .iter()
            .filter(|b| kinds.contains(&b.kind) && b.span().contains(&span))
            .min_by_key(|b| (b.span().line_len(), std::cmp::Reverse(b.start_line)))
    };
    innermost(&[BlockKind::Function, BlockKind::Method]).or_else(|| innermost(&[BlockKind::Class]))
}

/// Map each occurrence to its innermost enclosing ranked block.
///
/// `occurrences` must already be filtered to levels C1/C2 (see
/// [`filter_by_level`](crate::proficiency::filter_by_level)); `keep_ranks`
/// selects which block ranks form cases (the binary risk categories exist
/// only for A and F, so other kept ranks still discard).
pub fn join_cases(
    occurrences: &[ProficiencyOccurrence],
    blocks: &BlockIndex,
    keep_ranks: &BTreeSet<Rank>,
) -> Result<JoinOutcome, JoinError> {
    let mut outcome = JoinOutcome::default();
    for occ in occurrences {
        assert!(
            matches!(occ.level, CompetencyLevel::C1 | CompetencyLevel::C2),
            "join input must be filtered to C1/C2, got {} for {:?}",
            occ.level,
            occ.construct_class,
        );
        let file_blocks =
            blocks
                .get(&occ.project, &occ.file)
                .ok_or_else(|| JoinError::InconsistentInput {
                    project: occ.project.clone(),
                    file: occ.file.clone(),
                })?;
        match innermost_enclosing(occ, file_blocks) {
            None => outcome.module_level_discards += 1,
            Some(block) => {
                let binary_risk = block.rank.risk_category() != RiskCategory::Intermediate;
                if binary_risk && keep_ranks.contains(&block.rank) {
                    outcome.cases.push(JoinedCase {
                        occurrence: occ.clone(),
                        block: block.clone(),
                    });
                } else {
                    outcome.rank_discards += 1;
                }
            }
        }
    }
    outcome.cases.sort_by(|a, b| {
        (
            &a.occurrence.project,
            &a.occurrence.file,
            a.occurrence.start_line,
            &a.occurrence.construct_class,
        )
            .cmp(&(
                &b.occurrence.project,
                &b.occurrence.file,
                b.occurrence.start_line,
                &b.occurrence.construct_class,
            ))
    });
    Ok(outcome)
}

/// The default kept ranks: A and F, the two binary risk categories.
pub fn default_keep_ranks() -> BTreeSet<Rank> {
    [Rank::A, Rank::F].into()
}
