//! Brute-force oracles over the interpreter.
//!
//! These functions decide item answer keys by exhaustive search:
//! whether a program solves a maze, which avatar placements or goal
//! cells make it succeed, how many small wall additions it survives,
//! and whether two programs behave alike across a grid family. The
//! item generator and the validator both lean on
//! [`pick_correct_choice`], which re-derives the keyed answer of any
//! machine-checkable item from these primitives.

use crate::exec::{execute_default, Outcome};
use crate::grid::{AvatarState, CellKind, Direction, Grid, OpenGrid, Position};
use crate::item::{ChoiceContent, Item, ItemKind, Label};
use crate::program::Program;
use itertools::Itertools;
use std::collections::BTreeSet;
use thiserror::Error;

/// Largest wall budget [`count_wall_configurations`] accepts.
pub const MAX_WALL_BUDGET: u32 = 4;
/// Refusal threshold on the number of candidate wall subsets.
pub const MAX_WALL_SUBSETS: u64 = 1_000_000;

/// Why an enumeration could not run.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("start {0} is not on a free cell")]
    InvalidStart(AvatarState),
    #[error("equivalence needs a non-empty grid family")]
    EmptyFamily,
    #[error("wall budget {budget} exceeds the allowed {MAX_WALL_BUDGET}")]
    BudgetTooLarge { budget: u32 },
    #[error("{total} wall subsets over {candidates} cells exceed the {MAX_WALL_SUBSETS} limit")]
    TooManyConfigurations { candidates: usize, total: u64 },
}

/// True when the program reaches the goal from `start` within the
/// default step limit. Invalid starts simply do not solve.
pub fn solves(grid: &Grid, start: AvatarState, program: &Program) -> bool {
    execute_default(grid, start, program)
        .map(|run| run.outcome.is_goal_reached())
        .unwrap_or(false)
}

/// Every avatar placement from which the program reaches the goal.
/// Candidates are all free cells except the goal itself, crossed with
/// the four directions.
pub fn enumerate_avatar_starts(grid: &Grid, program: &Program) -> BTreeSet<AvatarState> {
    let mut starts = BTreeSet::new();
    for pos in grid.free_positions() {
        if pos == grid.goal() {
            continue;
        }
        for dir in Direction::ALL {
            let start = AvatarState::new(pos, dir);
            if solves(grid, start, program) {
                starts.insert(start);
            }
        }
    }
    starts
}

/// Positions covered by a start set, ignoring direction.
pub fn distinct_positions(starts: &BTreeSet<AvatarState>) -> BTreeSet<Position> {
    starts.iter().map(|s| s.pos).collect()
}

/// Every free cell that, designated as the goal, makes the program
/// succeed from `start`. The start cell itself is not a candidate.
/// Each candidate gets a fresh execution because the goal position
/// changes where `repeat_until_goal` and the run itself stop.
pub fn enumerate_goal_cells(
    open: &OpenGrid,
    start: AvatarState,
    program: &Program,
) -> Result<BTreeSet<Position>, OracleError> {
    if !open.is_free(start.pos) {
        return Err(OracleError::InvalidStart(start));
    }
    let mut cells = BTreeSet::new();
    for candidate in open.free_positions() {
        if candidate == start.pos {
            continue;
        }
        let grid = Grid::new(open.clone(), candidate)
            .expect("candidate goal is free and the start cell keeps it company");
        if solves(&grid, start, program) {
            cells.insert(candidate);
        }
    }
    Ok(cells)
}

/// Number of subsets of at most `budget` cells drawn from `candidates`.
pub fn wall_subset_total(candidates: usize, budget: u32) -> u64 {
    let mut total: u64 = 0;
    for size in 0..=(budget as usize).min(candidates) {
        let mut binom: u64 = 1;
        for i in 0..size {
            binom = binom.saturating_mul((candidates - i) as u64) / (i as u64 + 1);
        }
        total = total.saturating_add(binom);
    }
    total
}

/// Counts the ways to turn at most `budget` free cells into walls so
/// that the program still succeeds from `start`. The empty addition
/// counts when the base grid already works. Candidate cells exclude
/// the goal and the start cell, which keeps every configuration a
/// well-formed grid.
pub fn count_wall_configurations(
    grid: &Grid,
    start: AvatarState,
    program: &Program,
    budget: u32,
) -> Result<u64, OracleError> {
    if budget > MAX_WALL_BUDGET {
        return Err(OracleError::BudgetTooLarge { budget });
    }
    if !grid.is_free(start.pos) {
        return Err(OracleError::InvalidStart(start));
    }
    let candidates: Vec<Position> = grid
        .free_positions()
        .filter(|p| *p != grid.goal() && *p != start.pos)
        .collect();
    let total = wall_subset_total(candidates.len(), budget);
    if total > MAX_WALL_SUBSETS {
        return Err(OracleError::TooManyConfigurations {
            candidates: candidates.len(),
            total,
        });
    }

    let mut count = 0u64;
    for size in 0..=(budget as usize).min(candidates.len()) {
        for subset in candidates.iter().combinations(size) {
            let mut open = grid.open().clone();
            for wall in subset {
                open.set_cell(*wall, CellKind::Wall);
            }
            let walled = Grid::new(open, grid.goal())
                .expect("goal and start stay free in every configuration");
            if solves(&walled, start, program) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// How closely two programs must agree to count as equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceMode {
    /// Same visited-cell sequence and same outcome kind on every
    /// family member. Headings along the way do not matter.
    Trace,
    /// Same outcome kind on every family member.
    Outcome,
}

/// A family member on which two programs disagreed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceWitness {
    pub grid: Grid,
    pub start: AvatarState,
    pub left: Outcome,
    pub right: Outcome,
}

/// Verdict of an equivalence check, with a counterexample when the
/// programs differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub witness: Option<EquivalenceWitness>,
}

/// Compares two programs across a non-empty family of grid and start
/// pairs. Trace equivalence implies outcome equivalence.
pub fn equivalent(
    left: &Program,
    right: &Program,
    family: &[(Grid, AvatarState)],
    mode: EquivalenceMode,
) -> Result<EquivalenceReport, OracleError> {
    if family.is_empty() {
        return Err(OracleError::EmptyFamily);
    }
    for (grid, start) in family {
        let run_l =
            execute_default(grid, *start, left).map_err(|_| OracleError::InvalidStart(*start))?;
        let run_r =
            execute_default(grid, *start, right).map_err(|_| OracleError::InvalidStart(*start))?;
        let same_kind = run_l.outcome.kind_name() == run_r.outcome.kind_name();
        let agree = match mode {
            EquivalenceMode::Outcome => same_kind,
            EquivalenceMode::Trace => {
                same_kind && run_l.visited_cells(*start) == run_r.visited_cells(*start)
            }
        };
        if !agree {
            return Ok(EquivalenceReport {
                equivalent: false,
                witness: Some(EquivalenceWitness {
                    grid: grid.clone(),
                    start: *start,
                    left: run_l.outcome,
                    right: run_r.outcome,
                }),
            });
        }
    }
    Ok(EquivalenceReport {
        equivalent: true,
        witness: None,
    })
}

/// Oracle-verified answer of an item, or the admission that its kind
/// cannot be machine checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectChoice {
    Label(Label),
    NotMachineCheckable,
}

/// Why an item's answer key could not be pinned to one choice.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ItemIntegrityError {
    #[error("item '{item_id}': no choice verifies as correct")]
    NoCorrectChoice { item_id: String },
    #[error("item '{item_id}': more than one choice verifies as correct")]
    MultipleCorrectChoices { item_id: String, labels: Vec<Label> },
    #[error("item '{item_id}': missing {missing}")]
    MissingPayload {
        item_id: String,
        missing: &'static str,
    },
    #[error("item '{item_id}': {message}")]
    BadPayload { item_id: String, message: String },
}

fn missing(item: &Item, what: &'static str) -> ItemIntegrityError {
    ItemIntegrityError::MissingPayload {
        item_id: item.id.clone(),
        missing: what,
    }
}

fn bad(item: &Item, message: impl Into<String>) -> ItemIntegrityError {
    ItemIntegrityError::BadPayload {
        item_id: item.id.clone(),
        message: message.into(),
    }
}

fn complete_grid(item: &Item) -> Result<&Grid, ItemIntegrityError> {
    item.grids
        .first()
        .and_then(|g| g.complete())
        .ok_or_else(|| missing(item, "a complete grid in grids[0]"))
}

fn open_grid(item: &Item) -> Result<&OpenGrid, ItemIntegrityError> {
    item.grids
        .first()
        .and_then(|g| g.open_grid())
        .ok_or_else(|| missing(item, "a goal-less grid in grids[0]"))
}

fn start_state(item: &Item) -> Result<AvatarState, ItemIntegrityError> {
    item.start.ok_or_else(|| missing(item, "a start state"))
}

fn first_program(item: &Item) -> Result<&Program, ItemIntegrityError> {
    item.programs
        .first()
        .ok_or_else(|| missing(item, "a program in programs[0]"))
}

/// Runs `test` over every choice; `Ok(None)` marks a choice whose
/// content type the current kind cannot check. Exactly one hit wins.
fn pick_unique<F>(item: &Item, test: F) -> Result<CorrectChoice, ItemIntegrityError>
where
    F: Fn(&ChoiceContent) -> Result<Option<bool>, ItemIntegrityError>,
{
    let mut matches = Vec::new();
    let mut candidates = 0usize;
    for choice in &item.choices {
        if let Some(hit) = test(&choice.content)? {
            candidates += 1;
            if hit {
                matches.push(choice.label);
            }
        }
    }
    if candidates == 0 {
        return Ok(CorrectChoice::NotMachineCheckable);
    }
    match matches.len() {
        1 => Ok(CorrectChoice::Label(matches[0])),
        0 => Err(ItemIntegrityError::NoCorrectChoice {
            item_id: item.id.clone(),
        }),
        _ => Err(ItemIntegrityError::MultipleCorrectChoices {
            item_id: item.id.clone(),
            labels: matches,
        }),
    }
}

/// Re-derives the keyed answer of an item from its payload. Exactly
/// one choice must verify; zero or several is an integrity error.
/// Kinds without a checkable content type return
/// [`CorrectChoice::NotMachineCheckable`].
pub fn pick_correct_choice(item: &Item) -> Result<CorrectChoice, ItemIntegrityError> {
    match item.kind {
        ItemKind::FreeText => Ok(CorrectChoice::NotMachineCheckable),
        ItemKind::SolutionFinding | ItemKind::BugFinding => {
            let grid = complete_grid(item)?.clone();
            let start = start_state(item)?;
            if !grid.is_free(start.pos) {
                return Err(bad(item, format!("start {start} is not on a free cell")));
            }
            let want_solving = item.kind == ItemKind::SolutionFinding;
            pick_unique(item, |content| match content {
                ChoiceContent::Program(p) => Ok(Some(solves(&grid, start, p) == want_solving)),
                _ => Ok(None),
            })
        }
        ItemKind::TraceOutcome => {
            let grid = complete_grid(item)?.clone();
            let start = start_state(item)?;
            let program = first_program(item)?;
            let run = execute_default(&grid, start, program)
                .map_err(|e| bad(item, e.to_string()))?;
            let final_cell = run.final_state(start).pos;
            pick_unique(item, |content| match content {
                ChoiceContent::Cell(p) => Ok(Some(*p == final_cell)),
                _ => Ok(None),
            })
        }
        ItemKind::EquivalenceJudgment => {
            let start = start_state(item)?;
            let mut family = Vec::new();
            for payload in &item.grids {
                let grid = payload
                    .complete()
                    .ok_or_else(|| bad(item, "equivalence grids must all be complete"))?;
                family.push((grid.clone(), start));
            }
            if family.is_empty() {
                return Err(missing(item, "a complete grid in grids[0]"));
            }
            let reference = first_program(item)?;
            pick_unique(item, |content| match content {
                ChoiceContent::Program(p) => equivalent(reference, p, &family, EquivalenceMode::Trace)
                    .map(|r| Some(r.equivalent))
                    .map_err(|e| bad(item, e.to_string())),
                _ => Ok(None),
            })
        }
        ItemKind::AvatarPlacementCount => {
            let grid = complete_grid(item)?.clone();
            let program = first_program(item)?;
            let count = enumerate_avatar_starts(&grid, program).len() as u64;
            pick_unique(item, |content| match content {
                ChoiceContent::Count(n) => Ok(Some(*n == count)),
                _ => Ok(None),
            })
        }
        ItemKind::GoalPlacementDesign => {
            let open = open_grid(item)?.clone();
            let start = start_state(item)?;
            let program = first_program(item)?;
            let cells = enumerate_goal_cells(&open, start, program)
                .map_err(|e| bad(item, e.to_string()))?;
            pick_unique(item, |content| match content {
                ChoiceContent::Cell(p) => Ok(Some(cells.contains(p))),
                _ => Ok(None),
            })
        }
        ItemKind::WallDesignCount => {
            let grid = complete_grid(item)?.clone();
            let start = start_state(item)?;
            let program = first_program(item)?;
            let budget = item.wall_budget.ok_or_else(|| missing(item, "a wall_budget"))?;
            let count = count_wall_configurations(&grid, start, program, budget)
                .map_err(|e| bad(item, e.to_string()))?;
            pick_unique(item, |content| match content {
                ChoiceContent::Count(n) => Ok(Some(*n == count)),
                _ => Ok(None),
            })
        }
    }
}
