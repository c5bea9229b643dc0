//! Output serialization: CSV schemas, JSON rendering, and the
//! human-readable tables.
//!
//! Column orders are fixed. CSV and JSON use plain numbers and LF line
//! endings; thousands separators appear only in the rendered tables.

use serde::{Deserialize, Serialize};

use crate::complexity::{ComplexityBlock, ComplexityScore, Rank, RiskCategory};
use crate::join::JoinedCase;
use crate::proficiency::{CompetencyLevel, LevelCategory, ProficiencyOccurrence};
use crate::report::ReportSummary;
use crate::syntax::BlockKind;

use super::RunManifest;

/// Row schema of `occurrences.csv`:
/// `project,directory,file,class,start_line,end_line,level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceRow {
    pub project: String,
    pub directory: String,
    pub file: String,
    pub class: String,
    pub start_line: u32,
    pub end_line: u32,
    pub level: CompetencyLevel,
}

impl From<&ProficiencyOccurrence> for OccurrenceRow {
    fn from(occ: &ProficiencyOccurrence) -> Self {
        OccurrenceRow {
            project: occ.project.clone(),
            directory: occ.directory.clone(),
            file: occ.file.clone(),
            class: occ.construct_class.clone(),
            start_line: occ.start_line,
            end_line: occ.end_line,
            level: occ.level,
        }
    }
}

impl From<OccurrenceRow> for ProficiencyOccurrence {
    fn from(row: OccurrenceRow) -> Self {
        ProficiencyOccurrence {
            project: row.project,
            directory: row.directory,
            file: row.file,
            construct_class: row.class,
            start_line: row.start_line,
            end_line: row.end_line,
            level: row.level,
        }
    }
}

/// Row schema of `blocks.csv`:
/// `project,directory,file,kind,name,cc,rank,line_start,line_end`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRow {
    pub project: String,
    pub directory: String,
    pub file: String,
    pub kind: BlockKind,
    pub name: String,
    pub cc: u32,
    pub rank: Rank,
    pub line_start: u32,
    pub line_end: u32,
}

impl From<&ComplexityBlock> for BlockRow {
    fn from(block: &ComplexityBlock) -> Self {
        BlockRow {
            project: block.project.clone(),
            directory: block.directory.clone(),
            file: block.file.clone(),
            kind: block.kind,
            name: block.qualified_name.clone(),
            cc: block.score.value(),
            rank: block.rank,
            line_start: block.start_line,
            line_end: block.end_line,
        }
    }
}

impl TryFrom<BlockRow> for ComplexityBlock {
    type Error = String;

    fn try_from(row: BlockRow) -> Result<Self, Self::Error> {
        let score = ComplexityScore::new(row.cc).ok_or("cc must be >= 1")?;
        if Rank::of_score(score) != row.rank {
            return Err(format!("rank {} does not match cc {}", row.rank, row.cc));
        }
        Ok(ComplexityBlock {
            project: row.project,
            directory: row.directory,
            file: row.file,
            kind: row.kind,
            qualified_name: row.name,
            score,
            rank: row.rank,
            start_line: row.line_start,
            end_line: row.line_end,
        })
    }
}

/// Row schema of `cases.csv`: the occurrence, its block, and both derived
/// categories, one row per joined case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRow {
    pub project: String,
    pub directory: String,
    pub file: String,
    pub class: String,
    pub level: CompetencyLevel,
    pub level_category: LevelCategory,
    pub start_line: u32,
    pub end_line: u32,
    pub block_kind: BlockKind,
    pub block_name: String,
    pub cc: u32,
    pub rank: Rank,
    pub risk_category: RiskCategory,
    pub block_line_start: u32,
    pub block_line_end: u32,
}

impl From<&JoinedCase> for CaseRow {
    fn from(case: &JoinedCase) -> Self {
        CaseRow {
            project: case.occurrence.project.clone(),
            directory: case.occurrence.directory.clone(),
            file: case.occurrence.file.clone(),
            class: case.occurrence.construct_class.clone(),
            level: case.occurrence.level,
            level_category: case.level_category(),
            start_line: case.occurrence.start_line,
            end_line: case.occurrence.end_line,
            block_kind: case.block.kind,
            block_name: case.block.qualified_name.clone(),
            cc: case.block.score.value(),
            rank: case.block.rank,
            risk_category: case.risk_category(),
            block_line_start: case.block.start_line,
            block_line_end: case.block.end_line,
        }
    }
}

impl TryFrom<CaseRow> for JoinedCase {
    type Error = String;

    fn try_from(row: CaseRow) -> Result<Self, Self::Error> {
        let score = ComplexityScore::new(row.cc).ok_or("cc must be >= 1")?;
        if Rank::of_score(score) != row.rank {
            return Err(format!("rank {} does not match cc {}", row.rank, row.cc));
        }
        if row.level.category() != row.level_category {
            return Err(format!(
                "level category {} does not match level {}",
                row.level_category, row.level
            ));
        }
        if row.rank.risk_category() != row.risk_category {
            return Err(format!(
                "risk category {} does not match rank {}",
                row.risk_category, row.rank
            ));
        }
        if row.start_line < row.block_line_start || row.end_line > row.block_line_end {
            return Err(format!(
                "occurrence span {}-{} escapes block span {}-{}",
                row.start_line, row.end_line, row.block_line_start, row.block_line_end
            ));
        }
        Ok(JoinedCase {
            occurrence: ProficiencyOccurrence {
                project: row.project.clone(),
                directory: row.directory.clone(),
                file: row.file.clone(),
                construct_class: row.class,
                start_line: row.start_line,
                end_line: row.end_line,
                level: row.level,
            },
            block: ComplexityBlock {
                project: row.project,
                directory: row.directory,
                file: row.file,
                kind: row.block_kind,
                qualified_name: row.block_name,
                score,
                rank: row.rank,
                start_line: row.block_line_start,
                end_line: row.block_line_end,
            },
        })
    }
}

fn csv_bytes<R: Serialize>(rows: impl Iterator<Item = R>, header_fallback: &[&str]) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut wrote_any = false;
    for row in rows {
        writer.serialize(row).expect("in-memory CSV write");
        wrote_any = true;
    }
    if !wrote_any {
        // serde-driven headers only appear with at least one record; keep
        // the header line for empty outputs so schemas stay visible.
        writer
            .write_record(header_fallback)
            .expect("in-memory CSV write");
    }
    writer.into_inner().expect("in-memory CSV flush")
}

pub(super) fn occurrences_csv(occurrences: &[ProficiencyOccurrence]) -> Vec<u8> {
    csv_bytes(
        occurrences.iter().map(OccurrenceRow::from),
        &[
            "project",
            "directory",
            "file",
            "class",
            "start_line",
            "end_line",
            "level",
        ],
    )
}

pub(super) fn blocks_csv(blocks: &[ComplexityBlock]) -> Vec<u8> {
    csv_bytes(
        blocks.iter().map(BlockRow::from),
        &[
            "project",
            "directory",
            "file",
            "kind",
            "name",
            "cc",
            "rank",
            "line_start",
            "line_end",
        ],
    )
}

pub(super) fn cases_csv(cases: &[JoinedCase]) -> Vec<u8> {
    csv_bytes(
        cases.iter().map(CaseRow::from),
        &[
            "project",
            "directory",
            "file",
            "class",
            "level",
            "level_category",
            "start_line",
            "end_line",
            "block_kind",
            "block_name",
            "cc",
            "rank",
            "risk_category",
            "block_line_start",
            "block_line_end",
        ],
    )
}

pub(super) fn summary_json(summary: &ReportSummary) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(summary).expect("summary serialization");
    bytes.push(b'\n');
    bytes
}

pub(super) fn manifest_json(manifest: &RunManifest) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(manifest).expect("manifest serialization");
    bytes.push(b'\n');
    bytes
}

fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// Render the summary as human-readable tables (the `table` format).
pub fn render_tables(summary: &ReportSummary) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    writeln!(out, "Project overview").unwrap();
    writeln!(
        out,
        "{:<24} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "project", "files", "C1", "C2", "A", "F"
    )
    .unwrap();
    for row in &summary.projects {
        writeln!(
            out,
            "{:<24} {:>8} {:>8} {:>8} {:>8} {:>8}",
            row.project,
            thousands(row.file_count),
            thousands(row.c1_count),
            thousands(row.c2_count),
            thousands(row.rank_a_count),
            thousands(row.rank_f_count),
        )
        .unwrap();
    }

    let m = &summary.category_matrix;
    writeln!(out).unwrap();
    writeln!(out, "Category matrix ({} joined cases)", thousands(m.total)).unwrap();
    let cell = |label: &str, count: u64, pct: f64| {
        format!(
            "{:<16} {:>8}  {:>6.2}%",
            label,
            thousands(count),
            pct * 100.0
        )
    };
    writeln!(
        out,
        "{}",
        cell(
            "Advance-Safe",
            m.counts.advance_safe,
            m.percentages.advance_safe
        )
    )
    .unwrap();
    writeln!(
        out,
        "{}",
        cell(
            "Mastery-Safe",
            m.counts.mastery_safe,
            m.percentages.mastery_safe
        )
    )
    .unwrap();
    writeln!(
        out,
        "{}",
        cell(
            "Advance-Risky",
            m.counts.advance_risky,
            m.percentages.advance_risky
        )
    )
    .unwrap();
    writeln!(
        out,
        "{}",
        cell(
            "Mastery-Risky",
            m.counts.mastery_risky,
            m.percentages.mastery_risky
        )
    )
    .unwrap();

    for (label, rows) in [
        ("Top classes (Risky)", &summary.top_classes.risky),
        ("Top classes (Safe)", &summary.top_classes.safe),
    ] {
        writeln!(out).unwrap();
        writeln!(out, "{label}").unwrap();
        if rows.is_empty() {
            writeln!(out, "  (none)").unwrap();
        }
        for row in rows {
            writeln!(
                out,
                "  {:<44} {:<12} {:>8}",
                row.construct_class,
                row.level_category.to_string(),
                thousands(row.case_count),
            )
            .unwrap();
        }
    }

    writeln!(out).unwrap();
    match summary.association.value {
        Some(value) => writeln!(out, "Association (phi): {value:.4}").unwrap(),
        None => writeln!(out, "Association (phi): undefined (no joined cases)").unwrap(),
    }
    writeln!(out, "  {}", summary.association.definition).unwrap();
    out
}
