//! Block programs: the abstract syntax and its structural limits.
//!
//! A program is a sequence of blocks. Loop and branch bodies are
//! non-empty, repeat counts stay within 1..=99, nesting is at most 8
//! levels deep and a program holds at most 200 blocks in total.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Smallest allowed repeat count.
pub const MIN_REPEAT_COUNT: u32 = 1;
/// Largest allowed repeat count.
pub const MAX_REPEAT_COUNT: u32 = 99;
/// Deepest allowed block nesting; a flat block sits at depth 1.
pub const MAX_DEPTH: usize = 8;
/// Largest allowed total block count per program.
pub const MAX_BLOCKS: usize = 200;

/// Structural violations detected when assembling a program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("repeat count {count} is outside {MIN_REPEAT_COUNT}..={MAX_REPEAT_COUNT}")]
    RepeatCountOutOfRange { count: u32 },
    #[error("{construct} has an empty body")]
    EmptyBody { construct: &'static str },
    #[error("blocks nest {depth} levels deep, more than the allowed {MAX_DEPTH}")]
    TooDeep { depth: usize },
    #[error("program has {count} blocks, more than the allowed {MAX_BLOCKS}")]
    TooManyBlocks { count: usize },
}

/// Look-ahead test used by branch blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    PathAhead,
    PathLeft,
    PathRight,
}

impl Condition {
    pub const ALL: [Condition; 3] = [
        Condition::PathAhead,
        Condition::PathLeft,
        Condition::PathRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::PathAhead => "path_ahead",
            Condition::PathLeft => "path_left",
            Condition::PathRight => "path_right",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One block of the language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Move,
    TurnLeft,
    TurnRight,
    Repeat { count: u32, body: Vec<Block> },
    RepeatUntilGoal { body: Vec<Block> },
    If { cond: Condition, then_body: Vec<Block> },
    IfElse { cond: Condition, then_body: Vec<Block>, else_body: Vec<Block> },
}

impl Block {
    /// This block plus everything nested inside it.
    pub fn size(&self) -> usize {
        match self {
            Block::Move | Block::TurnLeft | Block::TurnRight => 1,
            Block::Repeat { body, .. } | Block::RepeatUntilGoal { body } => 1 + count_blocks(body),
            Block::If { then_body, .. } => 1 + count_blocks(then_body),
            Block::IfElse {
                then_body,
                else_body,
                ..
            } => 1 + count_blocks(then_body) + count_blocks(else_body),
        }
    }

    fn depth(&self) -> usize {
        match self {
            Block::Move | Block::TurnLeft | Block::TurnRight => 1,
            Block::Repeat { body, .. } | Block::RepeatUntilGoal { body } => 1 + depth_of(body),
            Block::If { then_body, .. } => 1 + depth_of(then_body),
            Block::IfElse {
                then_body,
                else_body,
                ..
            } => 1 + depth_of(then_body).max(depth_of(else_body)),
        }
    }

    fn check(&self) -> Result<(), ProgramError> {
        match self {
            Block::Move | Block::TurnLeft | Block::TurnRight => Ok(()),
            Block::Repeat { count, body } => {
                if !(MIN_REPEAT_COUNT..=MAX_REPEAT_COUNT).contains(count) {
                    return Err(ProgramError::RepeatCountOutOfRange { count: *count });
                }
                check_body(body, "repeat")
            }
            Block::RepeatUntilGoal { body } => check_body(body, "repeat_until_goal"),
            Block::If { then_body, .. } => check_body(then_body, "if"),
            Block::IfElse {
                then_body,
                else_body,
                ..
            } => {
                check_body(then_body, "if")?;
                check_body(else_body, "else")
            }
        }
    }
}

fn count_blocks(blocks: &[Block]) -> usize {
    blocks.iter().map(Block::size).sum()
}

fn depth_of(blocks: &[Block]) -> usize {
    blocks.iter().map(Block::depth).max().unwrap_or(0)
}

fn check_body(body: &[Block], construct: &'static str) -> Result<(), ProgramError> {
    if body.is_empty() {
        return Err(ProgramError::EmptyBody { construct });
    }
    for b in body {
        b.check()?;
    }
    Ok(())
}

/// A validated block program. Equality looks at the blocks only, so
/// two texts that parse to the same structure compare equal.
#[derive(Debug, Clone, Eq)]
pub struct Program {
    blocks: Vec<Block>,
    source: Option<String>,
}

impl Program {
    /// Wraps blocks after checking every structural limit. The empty
    /// program is valid.
    pub fn new(blocks: Vec<Block>) -> Result<Self, ProgramError> {
        for b in &blocks {
            b.check()?;
        }
        let depth = depth_of(&blocks);
        if depth > MAX_DEPTH {
            return Err(ProgramError::TooDeep { depth });
        }
        let count = count_blocks(&blocks);
        if count > MAX_BLOCKS {
            return Err(ProgramError::TooManyBlocks { count });
        }
        Ok(Program {
            blocks,
            source: None,
        })
    }

    pub(crate) fn with_source(blocks: Vec<Block>, source: String) -> Result<Self, ProgramError> {
        let mut p = Program::new(blocks)?;
        p.source = Some(source);
        Ok(p)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Original text this program was parsed from, if any.
    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Total number of blocks, counting nested ones.
    pub fn block_count(&self) -> usize {
        count_blocks(&self.blocks)
    }

    /// Deepest nesting level; 0 for the empty program.
    pub fn depth(&self) -> usize {
        depth_of(&self.blocks)
    }

    /// Canonical text: one block per line, two-space indents, bodies
    /// wrapped in braces. Reparsing it yields an equal program.
    pub fn to_text(&self) -> String {
        let mut lines = Vec::new();
        write_blocks(&self.blocks, 0, &mut lines);
        lines.join("\n")
    }
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for Program {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for Program {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        crate::parse::parse_program(&s).map_err(D::Error::custom)
    }
}

fn write_blocks(blocks: &[Block], level: usize, lines: &mut Vec<String>) {
    for block in blocks {
        write_block(block, level, lines);
    }
}

fn write_block(block: &Block, level: usize, lines: &mut Vec<String>) {
    let indent = "  ".repeat(level);
    match block {
        Block::Move => lines.push(format!("{indent}move")),
        Block::TurnLeft => lines.push(format!("{indent}turn_left")),
        Block::TurnRight => lines.push(format!("{indent}turn_right")),
        Block::Repeat { count, body } => {
            lines.push(format!("{indent}repeat {count} {{"));
            write_blocks(body, level + 1, lines);
            lines.push(format!("{indent}}}"));
        }
        Block::RepeatUntilGoal { body } => {
            lines.push(format!("{indent}repeat_until_goal {{"));
            write_blocks(body, level + 1, lines);
            lines.push(format!("{indent}}}"));
        }
        Block::If { cond, then_body } => {
            lines.push(format!("{indent}if {cond} {{"));
            write_blocks(then_body, level + 1, lines);
            lines.push(format!("{indent}}}"));
        }
        Block::IfElse {
            cond,
            then_body,
            else_body,
        } => {
            lines.push(format!("{indent}if {cond} {{"));
            write_blocks(then_body, level + 1, lines);
            lines.push(format!("{indent}}} else {{"));
            write_blocks(else_body, level + 1, lines);
            lines.push(format!("{indent}}}"));
        }
    }
}
