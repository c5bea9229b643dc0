//! Python source parsing and code-block enumeration.
//!
//! [`SyntaxTree`] wraps a parsed module together with the line index needed
//! to express every downstream result in 1-based physical line numbers.
//! [`enumerate_blocks`] walks the tree and returns every function, method,
//! and class definition as a [`BlockSpan`] - the unit that complexity
//! scoring and case joining operate on.
//!
//! Parsing a file is a pure function of its bytes; a `SyntaxTree` is
//! immutable after construction and safe to share across threads.

use std::fmt;
use std::path::{Path, PathBuf};

use ruff_python_ast::token::TokenKind;
use ruff_python_ast::{self as ast, Stmt};
use ruff_python_parser::{parse_module, Parsed};
use ruff_source_file::LineIndex;
use ruff_text_size::{Ranged, TextRange, TextSize};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Grammar level accepted by the parser, recorded in run manifests.
pub const GRAMMAR_LEVEL: &str = "Python 3 (ruff_python_parser 0.0.8, incl. match/async)";

/// Raised when input bytes are not valid UTF-8 or not syntactically valid
/// Python. Corpus runs record the file as skipped and continue.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line of the first offending position.
    pub line: u32,
    pub message: String,
}

/// An inclusive range of 1-based physical line numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: u32,
    pub end: u32,
}

impl LineSpan {
    /// Panics if `start > end` or `start == 0`.
    pub fn new(start: u32, end: u32) -> Self {
        assert!(
            start >= 1 && start <= end,
            "invalid line span {start}..{end}"
        );
        LineSpan { start, end }
    }

    /// Number of physical lines covered.
    pub fn line_len(&self) -> u32 {
        self.end - self.start + 1
    }

    /// Whether `other` lies entirely within `self` (inclusive bounds).
    pub fn contains(&self, other: &LineSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn contains_line(&self, line: u32) -> bool {
        self.start <= line && line <= self.end
    }
}

impl fmt::Display for LineSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// What kind of definition a [`BlockSpan`] is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Function,
    Method,
    Class,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockKind::Function => write!(f, "function"),
            BlockKind::Method => write!(f, "method"),
            BlockKind::Class => write!(f, "class"),
        }
    }
}

/// One function, method, or class definition found in a file.
///
/// The span starts at the `def`/`class` keyword line (decorators excluded)
/// and ends at the last line of the definition body. `parent` indexes into
/// the list returned by [`enumerate_blocks`]; because blocks are emitted in
/// source order, a parent always precedes its children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSpan {
    pub kind: BlockKind,
    /// Dotted path through enclosing definitions, e.g. `ClassA.method_b`.
    pub qualified_name: String,
    pub span: LineSpan,
    pub parent: Option<usize>,
}

impl BlockSpan {
    pub fn start_line(&self) -> u32 {
        self.span.start
    }

    pub fn end_line(&self) -> u32 {
        self.span.end
    }
}

/// A parsed Python source file with 1-based line accounting.
pub struct SyntaxTree {
    source_path: PathBuf,
    source: String,
    parsed: Parsed<ast::ModModule>,
    line_index: LineIndex,
    line_count: u32,
}

impl fmt::Debug for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SyntaxTree")
            .field("source_path", &self.source_path)
            .field("line_count", &self.line_count)
            .finish_non_exhaustive()
    }
}

impl SyntaxTree {
    /// Parse source bytes into a tree. The path is used only for labeling.
    ///
    /// Input must be valid UTF-8; invalid bytes yield a [`ParseError`] at
    /// the line containing the first bad byte.
    pub fn parse_bytes(bytes: &[u8], path: impl Into<PathBuf>) -> Result<Self, ParseError> {
        match std::str::from_utf8(bytes) {
            Ok(text) => Self::parse(text, path),
            Err(err) => {
                let line = bytes[..err.valid_up_to()]
                    .iter()
                    .filter(|&&b| b == b'\n')
                    .count() as u32
                    + 1;
                Err(ParseError {
                    line,
                    message: format!("invalid UTF-8: {err}"),
                })
            }
        }
    }

    /// Parse source text into a tree. The path is used only for labeling.
    pub fn parse(text: &str, path: impl Into<PathBuf>) -> Result<Self, ParseError> {
        let line_index = LineIndex::from_source_text(text);
        let parsed = parse_module(text).map_err(|err| ParseError {
            line: line_index.line_index(err.location.start()).get() as u32,
            message: err.error.to_string(),
        })?;
        // Physical lines: a trailing newline does not open a new line, and
        // an empty file has zero lines.
        let line_count = if text.is_empty() {
            0
        } else {
            let newlines = text.bytes().filter(|&b| b == b'\n').count() as u32;
            newlines + u32::from(!text.ends_with('\n'))
        };
        Ok(SyntaxTree {
            source_path: path.into(),
            source: text.to_owned(),
            parsed,
            line_index,
            line_count,
        })
    }

    pub fn source_path(&self) -> &Path {
        &self.source_path
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Number of physical lines in the file (0 for an empty file).
    pub fn line_count(&self) -> u32 {
        self.line_count
    }

    /// Number of top-level statements in the module body.
    pub fn statement_count(&self) -> usize {
        self.module().body.len()
    }

    pub(crate) fn module(&self) -> &ast::ModModule {
        self.parsed.syntax()
    }

    pub(crate) fn line_of(&self, offset: TextSize) -> u32 {
        self.line_index.line_index(offset).get() as u32
    }

    /// Line span of an AST node range. Node end offsets are exclusive and
    /// never cross past the node's last line, so both bounds map directly.
    pub(crate) fn span_of(&self, range: TextRange) -> LineSpan {
        let start = self.line_of(range.start());
        let end = self.line_of(range.end()).max(start);
        LineSpan::new(start, end)
    }

    /// Line of the first `def`/`class`/`async` keyword token at or after
    /// `offset`. Used to place a decorated definition at its keyword line
    /// rather than at its first decorator.
    fn definition_keyword_line(&self, offset: TextSize) -> Option<u32> {
        let tokens = self.parsed.tokens();
        let idx = tokens.partition_point(|tok| tok.start() < offset);
        tokens[idx..]
            .iter()
            .find(|tok| {
                matches!(
                    tok.kind(),
                    TokenKind::Def | TokenKind::Class | TokenKind::Async
                )
            })
            .map(|tok| self.line_of(tok.start()))
    }
}

/// AST handle for a block, used by complexity scoring.
pub(crate) enum BlockAst<'a> {
    Function(&'a ast::StmtFunctionDef),
    Class(&'a ast::StmtClassDef),
}

pub(crate) struct BlockNode<'a> {
    pub(crate) block: BlockSpan,
    pub(crate) ast: BlockAst<'a>,
}

/// Return every function, method, and class definition in source order.
///
/// A method is a function defined *directly* in a class body; a `def`
/// nested below control flow inside a class is a plain function whose
/// parent is still the class. `async def` counts like its sync
/// counterpart. Lambdas are not blocks. A file without definitions yields
/// an empty list.
pub fn enumerate_blocks(tree: &SyntaxTree) -> Vec<BlockSpan> {
    collect_block_nodes(tree)
        .into_iter()
        .map(|node| node.block)
        .collect()
}

pub(crate) fn collect_block_nodes(tree: &SyntaxTree) -> Vec<BlockNode<'_>> {
    let mut out = Vec::new();
    walk_stmts(tree, &tree.module().body, None, "", false, &mut out);
    out
}

/// Span of a definition with decorators excluded: the `def`/`class` keyword
/// line through the end of the body.
fn definition_span(tree: &SyntaxTree, range: TextRange, decorators: &[ast::Decorator]) -> LineSpan {
    let full = tree.span_of(range);
    let start = match decorators.last() {
        Some(last) => tree
            .definition_keyword_line(last.range().end())
            .unwrap_or(full.start),
        None => full.start,
    };
    LineSpan::new(start.clamp(full.start, full.end), full.end)
}

fn walk_stmts<'a>(
    tree: &SyntaxTree,
    stmts: &'a [Stmt],
    parent: Option<usize>,
    name_prefix: &str,
    in_class_body: bool,
    out: &mut Vec<BlockNode<'a>>,
) {
    for stmt in stmts {
        match stmt {
            Stmt::FunctionDef(func) => {
                let kind = if in_class_body {
                    BlockKind::Method
                } else {
                    BlockKind::Function
                };
                let qualified = join_name(name_prefix, func.name.as_str());
                let idx = out.len();
                out.push(BlockNode {
                    block: BlockSpan {
                        kind,
                        qualified_name: qualified.clone(),
                        span: definition_span(tree, func.range(), &func.decorator_list),
                        parent,
                    },
                    ast: BlockAst::Function(func),
                });
                walk_stmts(tree, &func.body, Some(idx), &qualified, false, out);
            }
            Stmt::ClassDef(class) => {
                let qualified = join_name(name_prefix, class.name.as_str());
                let idx = out.len();
                out.push(BlockNode {
                    block: BlockSpan {
                        kind: BlockKind::Class,
                        qualified_name: qualified.clone(),
                        span: definition_span(tree, class.range(), &class.decorator_list),
                        parent,
                    },
                    ast: BlockAst::Class(class),
                });
                walk_stmts(tree, &class.body, Some(idx), &qualified, true, out);
            }
            // Definitions may hide below any compound statement; those are
            // not "directly in a class body" anymore.
            Stmt::If(s) => {
                walk_stmts(tree, &s.body, parent, name_prefix, false, out);
                for clause in &s.elif_else_clauses {
                    walk_stmts(tree, &clause.body, parent, name_prefix, false, out);
                }
            }
            Stmt::For(s) => {
                walk_stmts(tree, &s.body, parent, name_prefix, false, out);
                walk_stmts(tree, &s.orelse, parent, name_prefix, false, out);
            }
            Stmt::While(s) => {
                walk_stmts(tree, &s.body, parent, name_prefix, false, out);
                walk_stmts(tree, &s.orelse, parent, name_prefix, false, out);
            }
            Stmt::With(s) => {
                walk_stmts(tree, &s.body, parent, name_prefix, false, out);
            }
            Stmt::Try(s) => {
                walk_stmts(tree, &s.body, parent, name_prefix, false, out);
                for handler in &s.handlers {
                    let ast::ExceptHandler::ExceptHandler(h) = handler;
                    walk_stmts(tree, &h.body, parent, name_prefix, false, out);
                }
                walk_stmts(tree, &s.orelse, parent, name_prefix, false, out);
                walk_stmts(tree, &s.finalbody, parent, name_prefix, false, out);
            }
            Stmt::Match(s) => {
                for case in &s.cases {
                    walk_stmts(tree, &case.body, parent, name_prefix, false, out);
                }
            }
            _ => {}
        }
    }
}

fn join_name(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_owned()
    } else {
        format!("{prefix}.{name}")
    }
}
