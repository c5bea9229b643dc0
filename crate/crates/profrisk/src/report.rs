//! Aggregation of joined cases into the three report artifacts: the
//! per-project overview, the 2x2 category matrix with percentages, and the
//! top-N construct-class tables per risk category.
//!
//! All aggregations are exact integer counts; percentages are exact ratios
//! rounded only at rendering time. Folds are order-independent, so shuffled
//! input produces identical aggregates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexity::{ComplexityBlock, Rank, RiskCategory};
use crate::join::JoinedCase;
use crate::proficiency::{CompetencyLevel, LevelCategory, ProficiencyOccurrence};

/// Human-readable definition of the association statistic, echoed in the
/// summary so the choice of statistic is explicit in every report.
pub const PHI_DEFINITION: &str = "phi coefficient of the 2x2 level/risk contingency table: \
(AS*MR - AR*MS) / sqrt((AS+AR)*(MS+MR)*(AS+MS)*(AR+MR)); 0 when any marginal is zero";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("association score is undefined for an empty matrix")]
    EmptyMatrix,
}

/// Counts of joined cases over the (Advance|Mastery) x (Safe|Risky) grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMatrix {
    pub advance_safe: u64,
    pub advance_risky: u64,
    pub mastery_safe: u64,
    pub mastery_risky: u64,
}

impl CategoryMatrix {
    pub fn count(&self, level: LevelCategory, risk: RiskCategory) -> u64 {
        match (level, risk) {
            (LevelCategory::Advance, RiskCategory::Safe) => self.advance_safe,
            (LevelCategory::Advance, RiskCategory::Risky) => self.advance_risky,
            (LevelCategory::Mastery, RiskCategory::Safe) => self.mastery_safe,
            (LevelCategory::Mastery, RiskCategory::Risky) => self.mastery_risky,
            _ => 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.advance_safe + self.advance_risky + self.mastery_safe + self.mastery_risky
    }

    /// Exact ratio of a cell to the total; 0 for an empty matrix.
    pub fn percentage(&self, level: LevelCategory, risk: RiskCategory) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.count(level, risk) as f64 / total as f64
        }
    }

    /// Share of Safe cases (Advance-Safe + Mastery-Safe); 0 when empty.
    pub fn safe_share(&self) -> f64 {
        self.percentage(LevelCategory::Advance, RiskCategory::Safe)
            + self.percentage(LevelCategory::Mastery, RiskCategory::Safe)
    }
}

/// Exact cell counts and ratios over a case set.
pub fn category_matrix(cases: &[JoinedCase]) -> CategoryMatrix {
    let mut matrix = CategoryMatrix::default();
    for case in cases {
        match (case.level_category(), case.risk_category()) {
            (LevelCategory::Advance, RiskCategory::Safe) => matrix.advance_safe += 1,
            (LevelCategory::Advance, RiskCategory::Risky) => matrix.advance_risky += 1,
            (LevelCategory::Mastery, RiskCategory::Safe) => matrix.mastery_safe += 1,
            (LevelCategory::Mastery, RiskCategory::Risky) => matrix.mastery_risky += 1,
            other => unreachable!("joined case with category {other:?}"),
        }
    }
    matrix
}

/// Phi coefficient of the 2x2 counts table; see [`PHI_DEFINITION`].
///
/// Returns 0 when any marginal is zero and an error for an empty matrix.
pub fn association_score(matrix: &CategoryMatrix) -> Result<f64, ReportError> {
    if matrix.total() == 0 {
        return Err(ReportError::EmptyMatrix);
    }
    let a = matrix.advance_safe as i128;
    let b = matrix.advance_risky as i128;
    let c = matrix.mastery_safe as i128;
    let d = matrix.mastery_risky as i128;
    let marginals = [a + b, c + d, a + c, b + d];
    if marginals.contains(&0) {
        return Ok(0.0);
    }
    let numerator = (a * d - b * c) as f64;
    let denominator = marginals.iter().map(|&m| m as f64).product::<f64>().sqrt();
    Ok(numerator / denominator)
}

/// One row of the top-classes table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTableRow {
    pub construct_class: String,
    pub level_category: LevelCategory,
    pub risk_category: RiskCategory,
    pub case_count: u64,
}

/// The top `n` construct classes within one risk category, sorted by case
/// count descending with ties broken by class name ascending.
pub fn top_classes(cases: &[JoinedCase], n: usize, risk: RiskCategory) -> Vec<ClassTableRow> {
    assert!(n >= 1, "top_classes needs n >= 1");
    let mut counts: BTreeMap<(String, LevelCategory), u64> = BTreeMap::new();
    for case in cases {
        if case.risk_category() == risk {
            let key = (
                case.occurrence.construct_class.clone(),
                case.level_category(),
            );
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    let mut rows: Vec<ClassTableRow> = counts
        .into_iter()
        .map(
            |((construct_class, level_category), case_count)| ClassTableRow {
                construct_class,
                level_category,
                risk_category: risk,
                case_count,
            },
        )
        .collect();
    rows.sort_by(|a, b| {
        b.case_count
            .cmp(&a.case_count)
            .then_with(|| a.construct_class.cmp(&b.construct_class))
    });
    rows.truncate(n);
    rows
}

/// One row of the per-project overview.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectOverviewRow {
    pub project: String,
    /// Files attempted for the project, parseable or not.
    pub file_count: u64,
    pub c1_count: u64,
    pub c2_count: u64,
    pub rank_a_count: u64,
    pub rank_f_count: u64,
}

/// Per-project overview rows, sorted by project name.
///
/// `file_tallies` maps each project to its attempted file count; level and
/// rank columns are exact filters over the occurrence and block lists.
pub fn project_overview(
    file_tallies: &BTreeMap<String, u64>,
    occurrences: &[ProficiencyOccurrence],
    blocks: &[ComplexityBlock],
) -> Vec<ProjectOverviewRow> {
    let mut rows: BTreeMap<String, ProjectOverviewRow> = file_tallies
        .iter()
        .map(|(project, &file_count)| {
            (
                project.clone(),
                ProjectOverviewRow {
                    project: project.clone(),
                    file_count,
                    c1_count: 0,
                    c2_count: 0,
                    rank_a_count: 0,
                    rank_f_count: 0,
                },
            )
        })
        .collect();
    for occ in occurrences {
        if let Some(row) = rows.get_mut(&occ.project) {
            match occ.level {
                CompetencyLevel::C1 => row.c1_count += 1,
                CompetencyLevel::C2 => row.c2_count += 1,
                _ => {}
            }
        }
    }
    for block in blocks {
        if let Some(row) = rows.get_mut(&block.project) {
            match block.rank {
                Rank::A => row.rank_a_count += 1,
                Rank::F => row.rank_f_count += 1,
                _ => {}
            }
        }
    }
    rows.into_values().collect()
}

/// Full aggregate report, serialized as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub projects: Vec<ProjectOverviewRow>,
    pub category_matrix: MatrixSection,
    pub top_classes: TopClassesSection,
    pub association: AssociationSection,
    pub tallies: TallySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSection {
    pub counts: CategoryMatrix,
    pub total: u64,
    pub percentages: MatrixPercentages,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPercentages {
    pub advance_safe: f64,
    pub advance_risky: f64,
    pub mastery_safe: f64,
    pub mastery_risky: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopClassesSection {
    pub risky: Vec<ClassTableRow>,
    pub safe: Vec<ClassTableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationSection {
    pub statistic: String,
    pub definition: String,
    /// Absent when no cases were joined.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallySection {
    pub occurrences_total: u64,
    pub occurrences_kept: u64,
    pub blocks_total: u64,
    pub cases_joined: u64,
    pub module_level_discards: u64,
    pub rank_discards: u64,
}

impl ReportSummary {
    /// Assemble the summary from the pipeline's pooled outputs. Percentages
    /// pool the whole case set rather than averaging per-project shares.
    pub fn assemble(
        file_tallies: &BTreeMap<String, u64>,
        occurrences: &[ProficiencyOccurrence],
        blocks: &[ComplexityBlock],
        outcome: &crate::join::JoinOutcome,
        occurrences_kept: u64,
        top_n: usize,
    ) -> ReportSummary {
        let matrix = category_matrix(&outcome.cases);
        ReportSummary {
            projects: project_overview(file_tallies, occurrences, blocks),
            category_matrix: MatrixSection {
                counts: matrix,
                total: matrix.total(),
                percentages: MatrixPercentages {
                    advance_safe: matrix.percentage(LevelCategory::Advance, RiskCategory::Safe),
                    advance_risky: matrix.percentage(LevelCategory::Advance, RiskCategory::Risky),
                    mastery_safe: matrix.percentage(LevelCategory::Mastery, RiskCategory::Safe),
                    mastery_risky: matrix.percentage(LevelCategory::Mastery, RiskCategory::Risky),
                },
            },
            top_classes: TopClassesSection {
                risky: top_classes(&outcome.cases, top_n, RiskCategory::Risky),
                safe: top_classes(&outcome.cases, top_n, RiskCategory::Safe),
            },
            association: AssociationSection {
                statistic: "phi".into(),
                definition: PHI_DEFINITION.into(),
                value: association_score(&matrix).ok(),
            },
            tallies: TallySection {
                occurrences_total: occurrences.len() as u64,
                occurrences_kept,
                blocks_total: blocks.len() as u64,
                cases_joined: outcome.cases.len() as u64,
                module_level_discards: outcome.module_level_discards,
                rank_discards: outcome.rank_discards,
            },
        }
    }
}
