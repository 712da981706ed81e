//! Interpreter for block programs on a grid.
//!
//! Every `move`, `turn_left`, `turn_right` and condition evaluation
//! consumes one step; loop bookkeeping and the goal test of
//! `repeat_until_goal` are free. Execution halts the instant the
//! avatar enters the goal cell, when a move hits a wall or the
//! boundary, or when the step budget runs out. A crashing move counts
//! its step but leaves no trace event and does not change the avatar.

use crate::grid::{AvatarState, Grid, Position, Turn};
use crate::program::{Block, Condition, Program};
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Step budget used when the caller does not pick one.
pub const DEFAULT_STEP_LIMIT: u32 = 1000;

/// Why execution could not start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("start {0} is outside the grid")]
    StartOutOfBounds(AvatarState),
    #[error("start {0} is on a wall")]
    StartOnWall(AvatarState),
}

/// What a single step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Move,
    TurnLeft,
    TurnRight,
    CondEval { cond: Condition, result: bool },
}

/// One consumed step and the avatar state right after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u32,
    pub action: Action,
    pub state_after: AvatarState,
}

impl Serialize for TraceEvent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("step", &self.step)?;
        match self.action {
            Action::Move => map.serialize_entry("action", "move")?,
            Action::TurnLeft => map.serialize_entry("action", "turn_left")?,
            Action::TurnRight => map.serialize_entry("action", "turn_right")?,
            Action::CondEval { cond, result } => {
                map.serialize_entry("action", "cond")?;
                map.serialize_entry("cond", cond.name())?;
                map.serialize_entry("result", &result)?;
            }
        }
        map.serialize_entry("cell", &self.state_after.pos)?;
        map.serialize_entry("dir", &self.state_after.dir)?;
        map.end()
    }
}

/// Chronological list of consumed, non-crashing steps.
pub type Trace = Vec<TraceEvent>;

/// What a crashing move ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrashTarget {
    /// The wall cell the move aimed at.
    Wall(Position),
    /// The edge of the grid.
    Boundary,
}

impl Serialize for CrashTarget {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CrashTarget::Wall(pos) => pos.serialize(serializer),
            CrashTarget::Boundary => serializer.serialize_str("boundary"),
        }
    }
}

impl<'de> Deserialize<'de> for CrashTarget {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s == "boundary" {
            Ok(CrashTarget::Boundary)
        } else {
            Position::parse_cell_name(&s)
                .map(CrashTarget::Wall)
                .map_err(D::Error::custom)
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// The avatar entered the goal cell at the given step; step 0
    /// means it started there.
    GoalReached { at_step: u32 },
    /// A move at the given step aimed at a wall or the boundary.
    Crashed {
        at_step: u32,
        #[serde(rename = "into")]
        attempted: CrashTarget,
    },
    /// The program needed more than the allowed number of steps.
    StepLimitExceeded,
    /// The program finished with the avatar short of the goal.
    IncompleteStop {
        #[serde(rename = "final")]
        final_state: AvatarState,
    },
}

impl Outcome {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Outcome::GoalReached { .. } => "goal_reached",
            Outcome::Crashed { .. } => "crashed",
            Outcome::StepLimitExceeded => "step_limit_exceeded",
            Outcome::IncompleteStop { .. } => "incomplete_stop",
        }
    }

    pub fn is_goal_reached(&self) -> bool {
        matches!(self, Outcome::GoalReached { .. })
    }
}

/// Outcome of a run together with its trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub outcome: Outcome,
    pub trace: Trace,
}

impl Run {
    /// Avatar state after the last consumed step, or the start state
    /// for an empty trace. A crash leaves the avatar where it stood.
    pub fn final_state(&self, start: AvatarState) -> AvatarState {
        self.trace.last().map_or(start, |e| e.state_after)
    }

    /// Cells in visiting order: the start cell followed by the target
    /// of every completed move. Turns and condition evaluations do not
    /// add entries.
    pub fn visited_cells(&self, start: AvatarState) -> Vec<Position> {
        let mut cells = vec![start.pos];
        for event in &self.trace {
            if matches!(event.action, Action::Move) {
                cells.push(event.state_after.pos);
            }
        }
        cells
    }
}

/// True when the cell next to the avatar in the tested direction is
/// inside the grid and free.
pub fn path_clear(grid: &Grid, state: AvatarState, cond: Condition) -> bool {
    let dir = match cond {
        Condition::PathAhead => state.dir,
        Condition::PathLeft => state.dir.turned(Turn::Left),
        Condition::PathRight => state.dir.turned(Turn::Right),
    };
    grid.neighbor(state.pos, dir)
        .is_some_and(|next| grid.is_free(next))
}

struct Machine<'a> {
    grid: &'a Grid,
    state: AvatarState,
    steps: u32,
    limit: u32,
    trace: Trace,
}

impl Machine<'_> {
    /// Reserves the next step number or halts with the limit outcome.
    fn tick(&mut self) -> Result<u32, Outcome> {
        if self.steps == self.limit {
            return Err(Outcome::StepLimitExceeded);
        }
        self.steps += 1;
        Ok(self.steps)
    }

    fn record(&mut self, step: u32, action: Action) {
        self.trace.push(TraceEvent {
            step,
            action,
            state_after: self.state,
        });
    }

    fn do_move(&mut self) -> Result<(), Outcome> {
        let step = self.tick()?;
        let target = match self.grid.neighbor(self.state.pos, self.state.dir) {
            None => {
                return Err(Outcome::Crashed {
                    at_step: step,
                    attempted: CrashTarget::Boundary,
                })
            }
            Some(next) if !self.grid.is_free(next) => {
                return Err(Outcome::Crashed {
                    at_step: step,
                    attempted: CrashTarget::Wall(next),
                })
            }
            Some(next) => next,
        };
        self.state.pos = target;
        self.record(step, Action::Move);
        if target == self.grid.goal() {
            return Err(Outcome::GoalReached { at_step: step });
        }
        Ok(())
    }

    fn do_turn(&mut self, turn: Turn) -> Result<(), Outcome> {
        let step = self.tick()?;
        self.state.dir = self.state.dir.turned(turn);
        let action = match turn {
            Turn::Left => Action::TurnLeft,
            Turn::Right => Action::TurnRight,
        };
        self.record(step, action);
        Ok(())
    }

    fn eval_cond(&mut self, cond: Condition) -> Result<bool, Outcome> {
        let step = self.tick()?;
        let result = path_clear(self.grid, self.state, cond);
        self.record(step, Action::CondEval { cond, result });
        Ok(result)
    }

    fn exec_blocks(&mut self, blocks: &[Block]) -> Result<(), Outcome> {
        for block in blocks {
            self.exec_block(block)?;
        }
        Ok(())
    }

    fn exec_block(&mut self, block: &Block) -> Result<(), Outcome> {
        match block {
            Block::Move => self.do_move(),
            Block::TurnLeft => self.do_turn(Turn::Left),
            Block::TurnRight => self.do_turn(Turn::Right),
            Block::Repeat { count, body } => {
                for _ in 0..*count {
                    self.exec_blocks(body)?;
                }
                Ok(())
            }
            Block::RepeatUntilGoal { body } => {
                // The goal test is free. Bodies are non-empty, so each
                // iteration consumes at least one step and the step
                // limit bounds the loop.
                while self.state.pos != self.grid.goal() {
                    self.exec_blocks(body)?;
                }
                Ok(())
            }
            Block::If { cond, then_body } => {
                if self.eval_cond(*cond)? {
                    self.exec_blocks(then_body)?;
                }
                Ok(())
            }
            Block::IfElse {
                cond,
                then_body,
                else_body,
            } => {
                if self.eval_cond(*cond)? {
                    self.exec_blocks(then_body)?;
                } else {
                    self.exec_blocks(else_body)?;
                }
                Ok(())
            }
        }
    }
}

/// Runs `program` from `start` and reports how it ended plus the
/// trace of consumed steps. Starting on the goal succeeds at step 0
/// without executing anything.
pub fn execute(
    grid: &Grid,
    start: AvatarState,
    program: &Program,
    step_limit: u32,
) -> Result<Run, ExecError> {
    match grid.cell(start.pos) {
        None => return Err(ExecError::StartOutOfBounds(start)),
        Some(crate::grid::CellKind::Wall) => return Err(ExecError::StartOnWall(start)),
        Some(crate::grid::CellKind::Free) => {}
    }
    if start.pos == grid.goal() {
        return Ok(Run {
            outcome: Outcome::GoalReached { at_step: 0 },
            trace: Vec::new(),
        });
    }
    let mut machine = Machine {
        grid,
        state: start,
        steps: 0,
        limit: step_limit,
        trace: Vec::new(),
    };
    let outcome = match machine.exec_blocks(program.blocks()) {
        Err(outcome) => outcome,
        Ok(()) => Outcome::IncompleteStop {
            final_state: machine.state,
        },
    };
    Ok(Run {
        outcome,
        trace: machine.trace,
    })
}

/// [`execute`] with the default step limit.
pub fn execute_default(grid: &Grid, start: AvatarState, program: &Program) -> Result<Run, ExecError> {
    execute(grid, start, program, DEFAULT_STEP_LIMIT)
}
