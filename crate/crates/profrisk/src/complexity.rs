//! McCabe cyclomatic complexity per code block, bucketed into ranks A-F.
//!
//! A block's score is 1 plus the number of decision points in its own body,
//! where nested functions, methods, and classes score separately and
//! contribute nothing to their parent. The decision points, each worth +1:
//!
//! - `if` / `elif` and the conditional (ternary) expression
//! - `for` (incl. `async for`) and `while`
//! - each `except` handler
//! - `assert`
//! - each `and` / `or` boolean operator (a chain of n operands counts n-1)
//! - each comprehension `for` clause and each comprehension `if` clause
//! - each `case` arm of a `match`
//!
//! `else`, `finally`, `with`, and `try` add nothing. Decorators, parameter
//! defaults, and annotations on a definition are outside its body and are
//! never counted. Lambdas are not blocks; decisions inside a lambda count
//! toward the enclosing block.
//!
//! Ranks bucket scores as A:1-5, B:6-10, C:11-20, D:21-30, E:31-40, F:41+,
//! with A labeled Safe (lowest risk) and F labeled Risky (highest risk).

use std::fmt;
use std::str::FromStr;

use ruff_python_ast::visitor::{self, Visitor};
use ruff_python_ast::{Expr, Stmt};
use serde::{Deserialize, Serialize};

use crate::syntax::{collect_block_nodes, BlockAst, BlockKind, BlockSpan, LineSpan, SyntaxTree};

/// A cyclomatic complexity value (decision count + 1, always >= 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexityScore(u32);

impl ComplexityScore {
    /// Returns `None` for 0; every real block scores at least 1.
    pub fn new(value: u32) -> Option<Self> {
        (value >= 1).then_some(ComplexityScore(value))
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for ComplexityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Complexity rank letter, ordered from simplest (A) to most complex (F).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rank {
    A,
    B,
    C,
    D,
    E,
    F,
}

/// Maintainability-risk bucket of a rank: A is Safe, F is Risky, B-E sit
/// outside the study focus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RiskCategory {
    Safe,
    Intermediate,
    Risky,
}

impl Rank {
    pub const ALL: [Rank; 6] = [Rank::A, Rank::B, Rank::C, Rank::D, Rank::E, Rank::F];

    /// Bucket a score: A:1-5, B:6-10, C:11-20, D:21-30, E:31-40, F:41+.
    pub fn of_score(score: ComplexityScore) -> Rank {
        match score.value() {
            1..=5 => Rank::A,
            6..=10 => Rank::B,
            11..=20 => Rank::C,
            21..=30 => Rank::D,
            31..=40 => Rank::E,
            _ => Rank::F,
        }
    }

    pub fn risk_category(self) -> RiskCategory {
        match self {
            Rank::A => RiskCategory::Safe,
            Rank::F => RiskCategory::Risky,
            _ => RiskCategory::Intermediate,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Rank::A => "A",
            Rank::B => "B",
            Rank::C => "C",
            Rank::D => "D",
            Rank::E => "E",
            Rank::F => "F",
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rank {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" => Ok(Rank::A),
            "B" => Ok(Rank::B),
            "C" => Ok(Rank::C),
            "D" => Ok(Rank::D),
            "E" => Ok(Rank::E),
            "F" => Ok(Rank::F),
            other => Err(format!("unknown rank {other:?}")),
        }
    }
}

impl fmt::Display for RiskCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiskCategory::Safe => write!(f, "Safe"),
            RiskCategory::Intermediate => write!(f, "Intermediate"),
            RiskCategory::Risky => write!(f, "Risky"),
        }
    }
}

/// One ranked code block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityBlock {
    pub project: String,
    pub directory: String,
    pub file: String,
    pub kind: BlockKind,
    pub qualified_name: String,
    pub score: ComplexityScore,
    pub rank: Rank,
    pub start_line: u32,
    pub end_line: u32,
}

impl ComplexityBlock {
    pub fn span(&self) -> LineSpan {
        LineSpan::new(self.start_line, self.end_line)
    }
}

/// Count of decision points in a statement list, not descending into nested
/// definitions (those score on their own).
struct DecisionCounter {
    count: u32,
}

impl<'a> Visitor<'a> for DecisionCounter {
    fn visit_stmt(&mut self, stmt: &'a Stmt) {
        match stmt {
            // Nested block boundary: its decorators, defaults, and body all
            // belong to the nested block's own accounting.
            Stmt::FunctionDef(_) | Stmt::ClassDef(_) => return,
            Stmt::If(s) => {
                self.count += 1;
                self.count += s
                    .elif_else_clauses
                    .iter()
                    .filter(|clause| clause.test.is_some())
                    .count() as u32;
            }
            Stmt::For(_) | Stmt::While(_) | Stmt::Assert(_) => self.count += 1,
            Stmt::Try(s) => self.count += s.handlers.len() as u32,
            Stmt::Match(s) => self.count += s.cases.len() as u32,
            _ => {}
        }
        visitor::walk_stmt(self, stmt);
    }

    fn visit_expr(&mut self, expr: &'a Expr) {
        match expr {
            Expr::BoolOp(op) => self.count += op.values.len().saturating_sub(1) as u32,
            Expr::If(_) => self.count += 1,
            _ => {}
        }
        visitor::walk_expr(self, expr);
    }

    fn visit_comprehension(&mut self, comp: &'a ruff_python_ast::Comprehension) {
        self.count += 1 + comp.ifs.len() as u32;
        visitor::walk_comprehension(self, comp);
    }
}

fn decisions_in(body: &[Stmt]) -> u32 {
    let mut counter = DecisionCounter { count: 0 };
    for stmt in body {
        counter.visit_stmt(stmt);
    }
    counter.count
}

fn score_of_body(body: &[Stmt]) -> ComplexityScore {
    ComplexityScore(1 + decisions_in(body))
}

/// Score one block with the decisions+1 formula over its own region.
///
/// For classes this counts only decisions directly in the class body
/// (outside any method); [`analyze_file_complexity`] instead reports the
/// aggregate mean-of-methods score for class rows, since a class is not a
/// linear code block.
///
/// # Panics
/// The block must have been produced by
/// [`enumerate_blocks`](crate::syntax::enumerate_blocks) on the same tree.
pub fn cyclomatic_complexity(block: &BlockSpan, tree: &SyntaxTree) -> ComplexityScore {
    let nodes = collect_block_nodes(tree);
    let node = nodes.iter().find(|n| n.block == *block).unwrap_or_else(|| {
        panic!(
            "block {:?} was not produced by this tree",
            block.qualified_name
        )
    });
    match &node.ast {
        BlockAst::Function(func) => score_of_body(&func.body),
        BlockAst::Class(class) => score_of_body(&class.body),
    }
}

/// Round-half-up arithmetic mean of method scores.
fn mean_half_up(scores: &[u32]) -> u32 {
    let sum: u64 = scores.iter().map(|&s| u64::from(s)).sum();
    let n = scores.len() as u64;
    ((2 * sum + n) / (2 * n)) as u32
}

/// Score every block of a file, in source order.
///
/// Functions and methods get the decisions+1 score. Class rows carry the
/// arithmetic mean of their direct methods' scores, rounded half up;
/// classes without methods are omitted.
pub fn analyze_file_complexity(tree: &SyntaxTree, project: &str) -> Vec<ComplexityBlock> {
    let (directory, file) = crate::proficiency::dir_file_labels(tree);
    let nodes = collect_block_nodes(tree);

    // First pass: decisions+1 for every function/method node.
    let fn_scores: Vec<Option<u32>> = nodes
        .iter()
        .map(|node| match &node.ast {
            BlockAst::Function(func) => Some(score_of_body(&func.body).value()),
            BlockAst::Class(_) => None,
        })
        .collect();

    let mut out = Vec::with_capacity(nodes.len());
    for (idx, node) in nodes.iter().enumerate() {
        let score_value = match node.block.kind {
            BlockKind::Function | BlockKind::Method => fn_scores[idx].unwrap(),
            BlockKind::Class => {
                let method_scores: Vec<u32> = nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| {
                        n.block.parent == Some(idx) && n.block.kind == BlockKind::Method
                    })
                    .map(|(i, _)| fn_scores[i].unwrap())
                    .collect();
                if method_scores.is_empty() {
                    continue;
                }
                mean_half_up(&method_scores)
            }
        };
        let score = ComplexityScore::new(score_value).expect("scores start at 1");
        out.push(ComplexityBlock {
            project: project.to_owned(),
            directory: directory.clone(),
            file: file.clone(),
            kind: node.block.kind,
            qualified_name: node.block.qualified_name.clone(),
            score,
            rank: Rank::of_score(score),
            start_line: node.block.span.start,
            end_line: node.block.span.end,
        });
    }
    out
}
