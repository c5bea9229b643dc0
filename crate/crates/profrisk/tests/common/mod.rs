//! Shared helpers for the integration suites: fixture paths and a seeded
//! generator of synthetic (occurrence, block) configurations for the join
//! equivalence checks.

// Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use profrisk::{
    BlockIndex, BlockKind, CompetencyLevel, ComplexityBlock, ComplexityScore,
    ProficiencyOccurrence, Rank,
};

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

/// One synthetic join scenario over a single file.
pub struct SyntheticConfig {
    pub occurrences: Vec<ProficiencyOccurrence>,
    pub blocks: Vec<ComplexityBlock>,
    pub index: BlockIndex,
}

const FILE_LINES: u32 = 400;
const MAX_BLOCKS: usize = 50;
const MAX_DEPTH: usize = 4;
const MAX_OCCURRENCES: usize = 200;

fn mk_block(name: usize, kind: BlockKind, score: u32, start: u32, end: u32) -> ComplexityBlock {
    let score = ComplexityScore::new(score).unwrap();
    ComplexityBlock {
        project: "syn".into(),
        directory: ".".into(),
        file: "case.py".into(),
        kind,
        qualified_name: format!("b{name}"),
        score,
        rank: Rank::of_score(score),
        start_line: start,
        end_line: end,
    }
}

/// Recursively carve strictly nested, sibling-disjoint spans. Children are
/// strictly smaller than their parent, so every interval in the family is
/// distinct and "innermost" is unambiguous.
fn carve(rng: &mut StdRng, start: u32, end: u32, depth: usize, out: &mut Vec<ComplexityBlock>) {
    if depth >= MAX_DEPTH || out.len() >= MAX_BLOCKS {
        return;
    }
    let mut cursor = start;
    while cursor + 1 < end && out.len() < MAX_BLOCKS {
        if rng.gen_bool(0.4) {
            // leave a gap
            cursor += rng.gen_range(1..=4).min(end - cursor);
            continue;
        }
        let remaining = end - cursor;
        let len = rng.gen_range(2..=remaining.clamp(2, 60));
        let b_start = cursor;
        let b_end = (cursor + len - 1).min(end - 1);
        if b_end <= b_start {
            break;
        }
        let kind = match rng.gen_range(0..6) {
            0 => BlockKind::Class,
            1 | 2 => BlockKind::Method,
            _ => BlockKind::Function,
        };
        let score = match rng.gen_range(0..4) {
            0 => rng.gen_range(41..=80), // rank F
            1 => rng.gen_range(6..=40),  // ranks B..E
            _ => rng.gen_range(1..=5),   // rank A
        };
        out.push(mk_block(out.len(), kind, score, b_start, b_end));
        // children strictly inside: at least one line shaved off an edge
        if b_end > b_start + 1 {
            carve(rng, b_start + 1, b_end, depth + 1, out);
        }
        cursor = b_end + 1;
        cursor += rng.gen_range(0..=2);
    }
}

pub fn synthetic_config(seed: u64) -> SyntheticConfig {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut blocks = Vec::new();
    carve(&mut rng, 1, FILE_LINES, 0, &mut blocks);

    let n_occurrences = rng.gen_range(0..=MAX_OCCURRENCES);
    let classes = [
        "Simple List Comprehension",
        "Generator Expression",
        "'enumerate' call function",
        "'zip' call function",
        "Super Function",
    ];
    let occurrences = (0..n_occurrences)
        .map(|_| {
            let start = rng.gen_range(1..=FILE_LINES);
            let extra = if rng.gen_bool(0.15) {
                rng.gen_range(0..=5)
            } else {
                0
            };
            let class = classes[rng.gen_range(0..classes.len())];
            let level = if rng.gen_bool(0.5) {
                CompetencyLevel::C1
            } else {
                CompetencyLevel::C2
            };
            ProficiencyOccurrence {
                project: "syn".into(),
                directory: ".".into(),
                file: "case.py".into(),
                construct_class: class.into(),
                start_line: start,
                end_line: (start + extra).min(FILE_LINES),
                level,
            }
        })
        .collect();

    let mut index = BlockIndex::new();
    index.insert_file("syn", "case.py", blocks.clone());
    SyntheticConfig {
        occurrences,
        blocks,
        index,
    }
}

/// Exhaustive O(blocks x occurrences) reference join: scan every block per
/// occurrence, prefer function/method containers over classes, pick the
/// smallest containing span.
pub struct BruteForceJoin {
    /// (occurrence index, chosen block qualified name) for formed cases.
    pub cases: Vec<(usize, String)>,
    pub module_level_discards: u64,
    pub rank_discards: u64,
}

pub fn brute_force_join(
    occurrences: &[ProficiencyOccurrence],
    blocks: &[ComplexityBlock],
    keep_ranks: &std::collections::BTreeSet<Rank>,
) -> BruteForceJoin {
    let mut result = BruteForceJoin {
        cases: Vec::new(),
        module_level_discards: 0,
        rank_discards: 0,
    };
    for (idx, occ) in occurrences.iter().enumerate() {
        let contains =
            |b: &&ComplexityBlock| b.start_line <= occ.start_line && occ.end_line <= b.end_line;
        let fn_candidates: Vec<&ComplexityBlock> = blocks
            .iter()
            .filter(|b| matches!(b.kind, BlockKind::Function | BlockKind::Method))
            .filter(contains)
            .collect();
        let class_candidates: Vec<&ComplexityBlock> = blocks
            .iter()
            .filter(|b| b.kind == BlockKind::Class)
            .filter(contains)
            .collect();
        let pick = |cands: &[&ComplexityBlock]| -> Option<ComplexityBlock> {
            cands
                .iter()
                .min_by_key(|b| b.end_line - b.start_line)
                .map(|b| (*b).clone())
        };
        let chosen = pick(&fn_candidates).or_else(|| pick(&class_candidates));
        match chosen {
            None => result.module_level_discards += 1,
            Some(block) => {
                if matches!(block.rank, Rank::A | Rank::F) && keep_ranks.contains(&block.rank) {
                    result.cases.push((idx, block.qualified_name));
                } else {
                    result.rank_discards += 1;
                }
            }
        }
    }
    result
}
