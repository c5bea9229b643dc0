//! Property tests over generated inputs: join/brute-force agreement,
//! matrix arithmetic, CSV row round-trips, and block enumeration
//! invariants on synthesized Python sources.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{brute_force_join, synthetic_config};
use profrisk::corpus::OccurrenceRow;
use profrisk::{
    category_matrix, default_keep_ranks, enumerate_blocks, join_cases, CompetencyLevel,
    LevelCategory, ProficiencyOccurrence, RiskCategory, SyntaxTree,
};

proptest! {
    #[test]
    fn join_agrees_with_exhaustive_search(seed in any::<u64>()) {
        let config = synthetic_config(seed);
        let keep = default_keep_ranks();
        let ours = join_cases(&config.occurrences, &config.index, &keep).unwrap();
        let reference = brute_force_join(&config.occurrences, &config.blocks, &keep);
        prop_assert!(ours.accounts_for(config.occurrences.len()));
        prop_assert_eq!(ours.cases.len(), reference.cases.len());
        prop_assert_eq!(ours.module_level_discards, reference.module_level_discards);
        prop_assert_eq!(ours.rank_discards, reference.rank_discards);
    }
}

fn occurrence_strategy() -> impl Strategy<Value = ProficiencyOccurrence> {
    let text = "[A-Za-z0-9 ,'\"/|().-]{0,24}";
    (
        text,
        text,
        text,
        text,
        1u32..5000,
        0u32..10,
        prop::sample::select(CompetencyLevel::ALL.to_vec()),
    )
        .prop_map(|(project, directory, file, class, start, extra, level)| {
            ProficiencyOccurrence {
                project,
                directory,
                file,
                construct_class: class,
                start_line: start,
                end_line: start + extra,
                level,
            }
        })
}

proptest! {
    // Quoting-sensitive fields (commas, quotes, pipes) must survive the
    // CSV schema unchanged.
    #[test]
    fn occurrence_rows_round_trip_through_csv(occs in prop::collection::vec(occurrence_strategy(), 1..8)) {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for occ in &occs {
            writer.serialize(OccurrenceRow::from(occ)).unwrap();
        }
        let bytes = writer.into_inner().unwrap();
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        let back: Vec<ProficiencyOccurrence> = reader
            .deserialize::<OccurrenceRow>()
            .map(|row| ProficiencyOccurrence::from(row.unwrap()))
            .collect();
        prop_assert_eq!(back, occs);
    }

    #[test]
    fn matrix_total_matches_case_count(seed in any::<u64>()) {
        let config = synthetic_config(seed);
        let keep = default_keep_ranks();
        let outcome = join_cases(&config.occurrences, &config.index, &keep).unwrap();
        let matrix = category_matrix(&outcome.cases);
        prop_assert_eq!(matrix.total(), outcome.cases.len() as u64);
        if matrix.total() > 0 {
            let sum: f64 = [
                (LevelCategory::Advance, RiskCategory::Safe),
                (LevelCategory::Advance, RiskCategory::Risky),
                (LevelCategory::Mastery, RiskCategory::Safe),
                (LevelCategory::Mastery, RiskCategory::Risky),
            ]
            .iter()
            .map(|&(l, r)| matrix.percentage(l, r))
            .sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }
    }
}

/// Structure of a synthesized Python file: nested definitions inside
/// arbitrary control flow, rendered with unique names.
#[derive(Debug, Clone)]
enum Item {
    Stmt,
    Func(Vec<Item>),
    Class(Vec<Item>),
    If(Vec<Item>),
    For(Vec<Item>),
}

fn item_strategy() -> impl Strategy<Value = Item> {
    let leaf = Just(Item::Stmt);
    leaf.prop_recursive(3, 20, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..3).prop_map(Item::Func),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Item::Class),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Item::If),
            prop::collection::vec(inner, 0..3).prop_map(Item::For),
        ]
    })
}

fn render(items: &[Item], indent: usize, counter: &mut usize, out: &mut String) {
    let pad = "    ".repeat(indent);
    if items.is_empty() {
        out.push_str(&format!("{pad}pass\n"));
        return;
    }
    for item in items {
        *counter += 1;
        let id = *counter;
        match item {
            Item::Stmt => out.push_str(&format!("{pad}x{id} = {id}\n")),
            Item::Func(body) => {
                out.push_str(&format!("{pad}def fn{id}():\n"));
                render(body, indent + 1, counter, out);
            }
            Item::Class(body) => {
                out.push_str(&format!("{pad}class Cls{id}:\n"));
                render(body, indent + 1, counter, out);
            }
            Item::If(body) => {
                out.push_str(&format!("{pad}if flag{id}:\n"));
                render(body, indent + 1, counter, out);
            }
            Item::For(body) => {
                out.push_str(&format!("{pad}for i{id} in it{id}:\n"));
                render(body, indent + 1, counter, out);
            }
        }
    }
}

proptest! {
    #[test]
    fn enumerated_blocks_hold_their_invariants(items in prop::collection::vec(item_strategy(), 0..6)) {
        let mut src = String::new();
        let mut counter = 0;
        render(&items, 0, &mut counter, &mut src);
        if src.is_empty() {
            src.push_str("pass\n");
        }
        let tree = SyntaxTree::parse(&src, "gen.py").unwrap();
        let blocks = enumerate_blocks(&tree);

        // determinism across reparses
        let again = enumerate_blocks(&SyntaxTree::parse(&src, "gen.py").unwrap());
        prop_assert_eq!(&blocks, &again);

        let names: BTreeSet<_> = blocks.iter().map(|b| b.qualified_name.clone()).collect();
        prop_assert_eq!(names.len(), blocks.len(), "names are unique by construction");

        let lines: Vec<&str> = src.lines().collect();
        for (i, block) in blocks.iter().enumerate() {
            prop_assert!(block.span.start >= 1);
            prop_assert!(block.span.end as usize <= lines.len());
            // the definition keyword sits on the span's first line
            let simple = block.qualified_name.rsplit('.').next().unwrap();
            prop_assert!(lines[(block.span.start - 1) as usize].contains(simple));
            if let Some(parent) = block.parent {
                prop_assert!(parent < i, "parents precede children");
                prop_assert!(blocks[parent].span.contains(&block.span));
            }
            for other in blocks.iter().skip(i + 1) {
                let disjoint =
                    block.span.end < other.span.start || other.span.end < block.span.start;
                let nested =
                    block.span.contains(&other.span) || other.span.contains(&block.span);
                prop_assert!(disjoint || nested);
            }
        }

        let starts: Vec<u32> = blocks.iter().map(|b| b.span.start).collect();
        let mut sorted = starts.clone();
        sorted.sort_unstable();
        prop_assert_eq!(starts, sorted, "blocks come out in source order");
    }
}
