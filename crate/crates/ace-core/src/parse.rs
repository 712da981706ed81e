//! Text parser for block programs.
//!
//! The syntax is whitespace-insensitive and `#` starts a comment that
//! runs to the end of the line. Bodies are brace-delimited and must
//! contain at least one block. The parser enforces the same limits as
//! [`Program::new`](crate::program::Program::new) and reports them with
//! source positions.

use crate::program::{Block, Condition, Program, MAX_BLOCKS, MAX_DEPTH, MAX_REPEAT_COUNT, MIN_REPEAT_COUNT};
use thiserror::Error;

/// Parse failure at a specific line and column (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    fn new(line: u32, column: u32, expected: impl Into<String>, found: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokKind {
    Ident(String),
    Int(u64),
    LBrace,
    RBrace,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    line: u32,
    col: u32,
}

impl Token {
    fn describe(&self) -> String {
        match &self.kind {
            TokKind::Ident(s) => format!("'{s}'"),
            TokKind::Int(n) => format!("'{n}'"),
            TokKind::LBrace => "'{'".to_string(),
            TokKind::RBrace => "'}'".to_string(),
            TokKind::Eof => "end of input".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump!();
            }
        } else if c.is_whitespace() {
            bump!();
        } else if c == '{' {
            tokens.push(Token {
                kind: TokKind::LBrace,
                line,
                col,
            });
            bump!();
        } else if c == '}' {
            tokens.push(Token {
                kind: TokKind::RBrace,
                line,
                col,
            });
            bump!();
        } else if c.is_ascii_digit() {
            let (start_line, start_col) = (line, col);
            let mut value: u64 = 0;
            while let Some(&c) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                value = value
                    .saturating_mul(10)
                    .saturating_add((c as u8 - b'0') as u64);
                bump!();
            }
            tokens.push(Token {
                kind: TokKind::Int(value),
                line: start_line,
                col: start_col,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let (start_line, start_col) = (line, col);
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                ident.push(bump!());
            }
            tokens.push(Token {
                kind: TokKind::Ident(ident),
                line: start_line,
                col: start_col,
            });
        } else {
            return Err(ParseError::new(
                line,
                col,
                "a block keyword, number, '{' or '}'",
                format!("'{c}'"),
            ));
        }
    }

    tokens.push(Token {
        kind: TokKind::Eof,
        line,
        col,
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    blocks_seen: usize,
}

const BLOCK_KEYWORDS: &str =
    "a block keyword (move, turn_left, turn_right, repeat, repeat_until_goal or if)";

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, expected: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(t.line, t.col, expected, t.describe())
    }

    fn expect_lbrace(&mut self) -> Result<(), ParseError> {
        match self.peek().kind {
            TokKind::LBrace => {
                self.advance();
                Ok(())
            }
            _ => Err(self.err_here("'{'")),
        }
    }

    /// Parses `{ block+ }` for the body of a container block.
    fn parse_body(&mut self, depth: usize) -> Result<Vec<Block>, ParseError> {
        self.expect_lbrace()?;
        let mut body = Vec::new();
        loop {
            match self.peek().kind {
                TokKind::RBrace => {
                    if body.is_empty() {
                        return Err(self.err_here("at least one block before '}'"));
                    }
                    self.advance();
                    return Ok(body);
                }
                TokKind::Eof => return Err(self.err_here("'}'")),
                _ => body.push(self.parse_block(depth)?),
            }
        }
    }

    fn parse_condition(&mut self) -> Result<Condition, ParseError> {
        let want = "a condition (path_ahead, path_left or path_right)";
        let t = self.peek().clone();
        let cond = match &t.kind {
            TokKind::Ident(s) => match s.as_str() {
                "path_ahead" => Condition::PathAhead,
                "path_left" => Condition::PathLeft,
                "path_right" => Condition::PathRight,
                _ => return Err(self.err_here(want)),
            },
            _ => return Err(self.err_here(want)),
        };
        self.advance();
        Ok(cond)
    }

    fn parse_block(&mut self, depth: usize) -> Result<Block, ParseError> {
        let t = self.peek().clone();
        let name = match &t.kind {
            TokKind::Ident(s) => s.clone(),
            _ => return Err(self.err_here(BLOCK_KEYWORDS)),
        };

        self.blocks_seen += 1;
        if self.blocks_seen > MAX_BLOCKS {
            return Err(ParseError::new(
                t.line,
                t.col,
                format!("a program with at most {MAX_BLOCKS} blocks"),
                format!("block {}", self.blocks_seen),
            ));
        }
        let deeper = || {
            ParseError::new(
                t.line,
                t.col,
                format!("nesting at most {MAX_DEPTH} levels deep"),
                format!("a level {} block", depth + 1),
            )
        };

        match name.as_str() {
            "move" => {
                self.advance();
                Ok(Block::Move)
            }
            "turn_left" => {
                self.advance();
                Ok(Block::TurnLeft)
            }
            "turn_right" => {
                self.advance();
                Ok(Block::TurnRight)
            }
            "repeat" => {
                self.advance();
                let count = match self.peek().kind {
                    TokKind::Int(n) => n,
                    _ => {
                        return Err(self.err_here(format!(
                            "a repeat count between {MIN_REPEAT_COUNT} and {MAX_REPEAT_COUNT}"
                        )))
                    }
                };
                if !(MIN_REPEAT_COUNT as u64..=MAX_REPEAT_COUNT as u64).contains(&count) {
                    return Err(self.err_here(format!(
                        "a repeat count between {MIN_REPEAT_COUNT} and {MAX_REPEAT_COUNT}"
                    )));
                }
                self.advance();
                if depth + 1 > MAX_DEPTH {
                    return Err(deeper());
                }
                let body = self.parse_body(depth + 1)?;
                Ok(Block::Repeat {
                    count: count as u32,
                    body,
                })
            }
            "repeat_until_goal" => {
                self.advance();
                if depth + 1 > MAX_DEPTH {
                    return Err(deeper());
                }
                let body = self.parse_body(depth + 1)?;
                Ok(Block::RepeatUntilGoal { body })
            }
            "if" => {
                self.advance();
                let cond = self.parse_condition()?;
                if depth + 1 > MAX_DEPTH {
                    return Err(deeper());
                }
                let then_body = self.parse_body(depth + 1)?;
                if matches!(&self.peek().kind, TokKind::Ident(s) if s == "else") {
                    self.advance();
                    let else_body = self.parse_body(depth + 1)?;
                    Ok(Block::IfElse {
                        cond,
                        then_body,
                        else_body,
                    })
                } else {
                    Ok(Block::If { cond, then_body })
                }
            }
            _ => Err(self.err_here(BLOCK_KEYWORDS)),
        }
    }
}

/// Parses program text; the resulting program remembers the text as
/// its source.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        blocks_seen: 0,
    };
    let mut blocks = Vec::new();
    loop {
        match parser.peek().kind {
            TokKind::Eof => break,
            TokKind::RBrace => {
                return Err(parser.err_here("a block or end of input"));
            }
            _ => blocks.push(parser.parse_block(1)?),
        }
    }
    Program::with_source(blocks, text.to_string()).map_err(|e| {
        // The parser enforces every structural limit itself, so this
        // conversion is a safety net rather than a reachable path.
        ParseError::new(1, 1, "a structurally valid program", e.to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(text: &str) -> Program {
        parse_program(text).unwrap_or_else(|e| panic!("parse failed for {text:?}: {e}"))
    }

    #[test]
    fn flat_blocks_parse_in_order() {
        let p = parse_ok("move turn_left turn_right move");
        assert_eq!(
            p.blocks(),
            &[Block::Move, Block::TurnLeft, Block::TurnRight, Block::Move]
        );
        assert_eq!(p.source(), Some("move turn_left turn_right move"));
    }

    #[test]
    fn whitespace_and_comments_do_not_matter() {
        let dense = parse_ok("repeat 2{move}if path_ahead{move}else{turn_left}");
        let airy = parse_ok(
            "# header comment\nrepeat 2 {  # twice\n  move\n}\nif path_ahead {\n  move\n} else {\n  turn_left\n}\n",
        );
        assert_eq!(dense, airy);
        assert_eq!(parse_ok("# nothing but a comment").blocks(), &[]);
        assert_eq!(parse_ok("").blocks(), &[]);
    }

    #[test]
    fn nested_structures_parse() {
        let p = parse_ok("repeat 3 { repeat 2 { move } turn_right } repeat_until_goal { move }");
        assert_eq!(
            p.blocks(),
            &[
                Block::Repeat {
                    count: 3,
                    body: vec![
                        Block::Repeat {
                            count: 2,
                            body: vec![Block::Move]
                        },
                        Block::TurnRight
                    ]
                },
                Block::RepeatUntilGoal {
                    body: vec![Block::Move]
                }
            ]
        );
    }

    #[test]
    fn canonical_text_reparses_to_an_equal_program() {
        let p = parse_ok(
            "repeat 9 { if path_left { turn_left move } else { if path_ahead { move } else { turn_right } } }",
        );
        let reparsed = parse_ok(&p.to_text());
        assert_eq!(p, reparsed);
        assert_eq!(reparsed.to_text(), p.to_text());
    }

    #[test]
    fn unknown_keyword_is_located() {
        let err = parse_program("move\nhop").unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
        assert_eq!(err.found, "'hop'");
        let err = parse_program("if path_up { move }").unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
        assert!(err.expected.contains("path_ahead"));
    }

    #[test]
    fn unbalanced_braces_are_located() {
        let err = parse_program("repeat 2 { move").unwrap_err();
        assert_eq!(err.expected, "'}'");
        assert_eq!(err.found, "end of input");
        let err = parse_program("move }").unwrap_err();
        assert_eq!((err.line, err.column), (1, 6));
        assert_eq!(err.found, "'}'");
    }

    #[test]
    fn repeat_count_bounds_are_parse_errors() {
        for text in ["repeat 0 { move }", "repeat 100 { move }", "repeat 99999999999999999999 { move }"] {
            let err = parse_program(text).unwrap_err();
            assert!(err.expected.contains("between 1 and 99"), "{err}");
        }
        assert!(parse_program("repeat 1 { move }").is_ok());
        assert!(parse_program("repeat 99 { move }").is_ok());
        let err = parse_program("repeat { move }").unwrap_err();
        assert!(err.expected.contains("repeat count"));
    }

    #[test]
    fn empty_bodies_are_rejected_with_positions() {
        let err = parse_program("repeat 2 { }").unwrap_err();
        assert_eq!((err.line, err.column), (1, 12));
        assert!(err.expected.contains("at least one block"));
        assert!(parse_program("if path_ahead { move } else { }").is_err());
    }

    #[test]
    fn nesting_depth_limit_is_a_parse_error() {
        // n nested repeats put the innermost move at level n + 1.
        let nested = |n: usize| format!("{}move {}", "repeat 2 { ".repeat(n), "}".repeat(n));
        assert!(parse_program(&nested(7)).is_ok());
        let err = parse_program(&nested(8)).unwrap_err();
        assert!(err.expected.contains("8 levels"), "{err}");
    }

    #[test]
    fn block_budget_is_a_parse_error() {
        let ok = "move ".repeat(200);
        assert!(parse_program(&ok).is_ok());
        let too_many = "move ".repeat(201);
        let err = parse_program(&too_many).unwrap_err();
        assert!(err.expected.contains("200 blocks"), "{err}");
        assert_eq!(err.found, "block 201");
    }

    #[test]
    fn stray_characters_are_lex_errors() {
        let err = parse_program("move; turn_left").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert_eq!(err.found, "';'");
    }
}
