//! Release gate for the toolkit. Each test checks one criterion and
//! prints a single `PASS criterion N ...` line once it holds; a
//! failing assertion is the corresponding FAIL.
//!
//! The golden fixtures in criterion 1 were simulated by hand on grid
//! paper before the interpreter existed; the enumeration checks in
//! criterion 3 re-derive every count with independently written
//! loops; the statistics fixtures in criteria 5 and 7 carry
//! closed-form constants.

use ace_core::grid::{parse_grid_text, render_grid_text};
use ace_core::item::{validate_bank, validate_item, BloomCategory, ItemKind};
use ace_core::oracle::{count_wall_configurations, enumerate_avatar_starts, pick_correct_choice, CorrectChoice};
use ace_core::stats::alpha::cronbach_alpha;
use ace_core::stats::infer::{pearson, welch_t};
use ace_core::stats::matrix::{responses_to_csv, MetaTable, ResponseMatrix};
use ace_core::stats::rasch::{rasch_fit, RaschOptions};
use ace_core::stats::sim::simulate_matrix;
use ace_core::{
    derive_seed, execute, generate_bank, generate_item, parse_program, Action, AvatarState,
    Block, Condition, CrashTarget, Difficulty, GenSpec, Grid, Outcome, Position, Program, Run,
    TraceEvent, Turn,
};
use rand::prelude::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

// ---------------------------------------------------------------
// Shared glue: compact text forms for traces and outcomes, so the
// hand-written expectations stay readable.
// ---------------------------------------------------------------

fn dir_letter(dir: ace_core::Direction) -> char {
    use ace_core::Direction::*;
    match dir {
        East => 'E',
        South => 'S',
        West => 'W',
        North => 'N',
    }
}

fn state_str(state: AvatarState) -> String {
    format!(
        "{}{}",
        state.pos.cell_name().expect("cell inside the 8x8 range"),
        dir_letter(state.dir)
    )
}

fn cond_short(cond: Condition) -> &'static str {
    match cond {
        Condition::PathAhead => "PA",
        Condition::PathLeft => "PL",
        Condition::PathRight => "PR",
    }
}

fn event_str(event: &TraceEvent) -> String {
    let action = match event.action {
        Action::Move => "M".to_string(),
        Action::TurnLeft => "L".to_string(),
        Action::TurnRight => "R".to_string(),
        Action::CondEval { cond, result } => {
            format!("?{}={}", cond_short(cond), if result { 'T' } else { 'F' })
        }
    };
    format!("{} {} {}", event.step, action, state_str(event.state_after))
}

fn outcome_str(outcome: &Outcome) -> String {
    match outcome {
        Outcome::GoalReached { at_step } => format!("goal@{at_step}"),
        Outcome::Crashed {
            at_step,
            attempted: CrashTarget::Wall(pos),
        } => format!("crash@{} wall={}", at_step, pos.cell_name().unwrap()),
        Outcome::Crashed {
            at_step,
            attempted: CrashTarget::Boundary,
        } => format!("crash@{at_step} boundary"),
        Outcome::StepLimitExceeded => "steplimit".to_string(),
        Outcome::IncompleteStop { final_state } => format!("stop {}", state_str(*final_state)),
    }
}

/// Parses a marked-up grid into the complete grid plus the start.
fn fixture_world(text: &str) -> (Grid, AvatarState) {
    let parsed = parse_grid_text(text).expect("fixture grid parses");
    let goal = parsed.goal.expect("fixture grid has a goal");
    let start = parsed.avatar.expect("fixture grid has an avatar");
    (Grid::new(parsed.open, goal).expect("fixture grid is valid"), start)
}

fn run_fixture(grid_text: &str, program_text: &str, step_limit: u32) -> (Run, AvatarState) {
    let (grid, start) = fixture_world(grid_text);
    let program = parse_program(program_text).expect("fixture program parses");
    let run = execute(&grid, start, &program, step_limit).expect("fixture start is legal");
    (run, start)
}

// ---------------------------------------------------------------
// Criterion 1: golden interpreter fixtures.
// ---------------------------------------------------------------

struct Golden {
    name: &'static str,
    grid: &'static str,
    program: &'static str,
    step_limit: u32,
    events: &'static [&'static str],
    outcome: &'static str,
}

const GOLDEN: &[Golden] = &[
    Golden {
        name: "F01 empty program stops in place",
        grid: ">.G\n...\n...",
        program: "",
        step_limit: 1000,
        events: &[],
        outcome: "stop a1E",
    },
    Golden {
        name: "F02 single move onto the goal",
        grid: ".>G\n...",
        program: "move",
        step_limit: 1000,
        events: &["1 M c1E"],
        outcome: "goal@1",
    },
    Golden {
        name: "F03 move into a wall crashes",
        grid: ">#G\n...",
        program: "move",
        step_limit: 1000,
        events: &[],
        outcome: "crash@1 wall=b1",
    },
    Golden {
        name: "F04 move off the west edge crashes",
        grid: "<.G\n...",
        program: "move",
        step_limit: 1000,
        events: &[],
        outcome: "crash@1 boundary",
    },
    Golden {
        name: "F05 four left turns come back around",
        grid: ">G\n..",
        program: "turn_left\nturn_left\nturn_left\nturn_left",
        step_limit: 1000,
        events: &["1 L a1N", "2 L a1W", "3 L a1S", "4 L a1E"],
        outcome: "stop a1E",
    },
    Golden {
        name: "F06 turn right, move south, turn left, move east",
        grid: ">.\n.G",
        program: "turn_right\nmove\nturn_left\nmove",
        step_limit: 1000,
        events: &["1 R a1S", "2 M a2S", "3 L a2E", "4 M b2E"],
        outcome: "goal@4",
    },
    Golden {
        name: "F07 repeat 4 walks the corridor onto the goal",
        grid: ">...G\n.....",
        program: "repeat 4 { move }",
        step_limit: 1000,
        events: &["1 M b1E", "2 M c1E", "3 M d1E", "4 M e1E"],
        outcome: "goal@4",
    },
    Golden {
        name: "F08 goal reached mid-loop halts the repeat",
        grid: ">.G..\n.....",
        program: "repeat 4 { move }",
        step_limit: 1000,
        events: &["1 M b1E", "2 M c1E"],
        outcome: "goal@2",
    },
    Golden {
        name: "F09 crash mid-repeat keeps the earlier steps",
        grid: ">.#.G\n.....",
        program: "repeat 4 { move }",
        step_limit: 1000,
        events: &["1 M b1E"],
        outcome: "crash@2 wall=c1",
    },
    Golden {
        name: "F10 repeat_until_goal walks until arrival",
        grid: ">..G.\n#....",
        program: "repeat_until_goal { move }",
        step_limit: 1000,
        events: &["1 M b1E", "2 M c1E", "3 M d1E"],
        outcome: "goal@3",
    },
    Golden {
        name: "F11 repeat_until_goal into a wall crashes at once",
        grid: ">#G.\n....",
        program: "repeat_until_goal { move }",
        step_limit: 1000,
        events: &[],
        outcome: "crash@1 wall=b1",
    },
    Golden {
        name: "F12 spinning forever hits the step limit",
        grid: ">.G.\n....",
        program: "repeat_until_goal { turn_left }",
        step_limit: 12,
        events: &[
            "1 L a1N", "2 L a1W", "3 L a1S", "4 L a1E", "5 L a1N", "6 L a1W", "7 L a1S",
            "8 L a1E", "9 L a1N", "10 L a1W", "11 L a1S", "12 L a1E",
        ],
        outcome: "steplimit",
    },
    Golden {
        name: "F13 if with a true condition takes the branch",
        grid: ">.G\n###",
        program: "if path_ahead { move }\nmove",
        step_limit: 1000,
        events: &["1 ?PA=T a1E", "2 M b1E", "3 M c1E"],
        outcome: "goal@3",
    },
    Golden {
        name: "F14 if with a false condition skips the branch",
        grid: ">#.G\n....",
        program: "if path_ahead { move }\nturn_right",
        step_limit: 1000,
        events: &["1 ?PA=F a1E", "2 R a1S"],
        outcome: "stop a1S",
    },
    Golden {
        name: "F15 if/else takes the else branch",
        grid: ">#G.\n....",
        program: "if path_ahead { move } else { turn_right move turn_left move }",
        step_limit: 1000,
        events: &["1 ?PA=F a1E", "2 R a1S", "3 M a2S", "4 L a2E", "5 M b2E"],
        outcome: "stop b2E",
    },
    Golden {
        name: "F16 path_left and path_right both see walls",
        grid: ".#.\n.>.\n.#G",
        program: "if path_left { turn_left }\nif path_right { turn_right }\nmove\nturn_right\nmove",
        step_limit: 1000,
        events: &["1 ?PL=F b2E", "2 ?PR=F b2E", "3 M c2E", "4 R c2S", "5 M c3S"],
        outcome: "goal@5",
    },
    Golden {
        name: "F17 right-hand rule threads the maze",
        grid: ">..#\n.#.G\n....",
        program: "repeat_until_goal { if path_right { turn_right move } else { if path_ahead { move } else { turn_left } } }",
        step_limit: 1000,
        events: &[
            "1 ?PR=T a1E", "2 R a1S", "3 M a2S", "4 ?PR=F a2S", "5 ?PA=T a2S", "6 M a3S",
            "7 ?PR=F a3S", "8 ?PA=F a3S", "9 L a3E", "10 ?PR=F a3E", "11 ?PA=T a3E",
            "12 M b3E", "13 ?PR=F b3E", "14 ?PA=T b3E", "15 M c3E", "16 ?PR=F c3E",
            "17 ?PA=T c3E", "18 M d3E", "19 ?PR=F d3E", "20 ?PA=F d3E", "21 L d3N",
            "22 ?PR=F d3N", "23 ?PA=T d3N", "24 M d2N",
        ],
        outcome: "goal@24",
    },
    Golden {
        name: "F18 nested repeats trace an L and stop short",
        grid: ">..#\n...#\n.G.#\n####",
        program: "repeat 2 { repeat 2 { move } turn_right }",
        step_limit: 1000,
        events: &["1 M b1E", "2 M c1E", "3 R c1S", "4 M c2S", "5 M c3S", "6 R c3W"],
        outcome: "stop c3W",
    },
    Golden {
        name: "F19 goal on the very last allowed step still counts",
        grid: ">...G\n.....",
        program: "repeat 4 { move }",
        step_limit: 4,
        events: &["1 M b1E", "2 M c1E", "3 M d1E", "4 M e1E"],
        outcome: "goal@4",
    },
    Golden {
        name: "F20 one step over the limit is exceeded",
        grid: ">...G\n.....",
        program: "repeat 4 { move }",
        step_limit: 3,
        events: &["1 M b1E", "2 M c1E", "3 M d1E"],
        outcome: "steplimit",
    },
    Golden {
        name: "F22 wall-avoiding loop orbits until the limit",
        grid: ">.#G\n....",
        program: "repeat_until_goal { if path_ahead { move } else { turn_right } }",
        step_limit: 16,
        events: &[
            "1 ?PA=T a1E", "2 M b1E", "3 ?PA=F b1E", "4 R b1S", "5 ?PA=T b1S", "6 M b2S",
            "7 ?PA=F b2S", "8 R b2W", "9 ?PA=T b2W", "10 M a2W", "11 ?PA=F a2W", "12 R a2N",
            "13 ?PA=T a2N", "14 M a1N", "15 ?PA=F a1N", "16 R a1E",
        ],
        outcome: "steplimit",
    },
    Golden {
        name: "F23 crash off the north edge after one move",
        grid: "..\n^G",
        program: "move\nmove",
        step_limit: 1000,
        events: &["1 M a1N"],
        outcome: "crash@2 boundary",
    },
    Golden {
        name: "F24 wall crash reports the wall cell",
        grid: "...\n.>#\n..G",
        program: "move",
        step_limit: 1000,
        events: &[],
        outcome: "crash@1 wall=c2",
    },
    Golden {
        name: "F25 if inside repeat turns away from trouble",
        grid: ">.#\n..G",
        program: "repeat 3 { if path_ahead { move } else { turn_left } }",
        step_limit: 1000,
        events: &["1 ?PA=T a1E", "2 M b1E", "3 ?PA=F b1E", "4 L b1N", "5 ?PA=F b1N", "6 L b1W"],
        outcome: "stop b1W",
    },
];

#[test]
fn criterion_1_interpreter_golden_suite() {
    let clock = Instant::now();
    for fixture in GOLDEN {
        let (run, _) = run_fixture(fixture.grid, fixture.program, fixture.step_limit);
        let got: Vec<String> = run.trace.iter().map(event_str).collect();
        let want: Vec<String> = fixture.events.iter().map(|s| s.to_string()).collect();
        assert_eq!(got, want, "trace mismatch in {}", fixture.name);
        assert_eq!(
            outcome_str(&run.outcome),
            fixture.outcome,
            "outcome mismatch in {}",
            fixture.name
        );
    }

    // F21: starting on the goal succeeds at step zero without
    // executing anything. The start is placed in code because the
    // text form cannot stack the avatar on the goal marker.
    let parsed = parse_grid_text("..G\n...").unwrap();
    let grid = Grid::new(parsed.open, parsed.goal.unwrap()).unwrap();
    let start = AvatarState::new(grid.goal(), ace_core::Direction::East);
    let run = execute(&grid, start, &parse_program("move").unwrap(), 1000).unwrap();
    assert_eq!(outcome_str(&run.outcome), "goal@0");
    assert!(run.trace.is_empty());

    let elapsed = clock.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "golden suite took {elapsed:?}, over the 1 s budget"
    );
    assert!(GOLDEN.len() + 1 >= 20, "need at least 20 fixtures");
    println!(
        "PASS criterion 1: {} golden fixtures match trace and outcome in {elapsed:?}",
        GOLDEN.len() + 1
    );
}

// ---------------------------------------------------------------
// Criterion 2: semantic properties on random worlds and programs.
// ---------------------------------------------------------------

/// Random grid up to `max_side` per side with a marked start; the
/// start never sits on the goal.
fn random_world(rng: &mut ChaCha8Rng, max_side: u8) -> (Grid, AvatarState) {
    loop {
        let width = rng.random_range(2..=max_side);
        let height = rng.random_range(2..=max_side);
        let density = rng.random::<f64>() * 0.35;
        let rows: Vec<String> = (0..height)
            .map(|_| {
                (0..width)
                    .map(|_| if rng.random::<f64>() < density { '#' } else { '.' })
                    .collect()
            })
            .collect();
        let text = rows.join("\n");
        let parsed = match parse_grid_text(&text) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let free: Vec<Position> = parsed.open.free_positions().collect();
        if free.len() < 2 {
            continue;
        }
        let goal = *free.choose(rng).unwrap();
        let start_pos = loop {
            let p = *free.choose(rng).unwrap();
            if p != goal {
                break p;
            }
        };
        let dir = *ace_core::Direction::ALL.choose(rng).unwrap();
        let grid = Grid::new(parsed.open, goal).expect("goal cell is free");
        return (grid, AvatarState::new(start_pos, dir));
    }
}

fn random_cond(rng: &mut ChaCha8Rng) -> Condition {
    *Condition::ALL.choose(rng).unwrap()
}

/// Random block list; repeats nest at most two deep with counts at
/// most 3, so full unrolling stays under the program size limit.
fn random_blocks(rng: &mut ChaCha8Rng, budget: &mut usize, nesting: usize) -> Vec<Block> {
    let mut out = Vec::new();
    while *budget > 0 && (out.is_empty() || rng.random::<f64>() < 0.6) {
        *budget -= 1;
        let roll = rng.random_range(0u8..12);
        let block = match roll {
            0..=4 => Block::Move,
            5 => Block::TurnLeft,
            6 => Block::TurnRight,
            7 | 8 if nesting < 2 => Block::Repeat {
                count: rng.random_range(1..=3),
                body: nonempty(rng, budget, nesting),
            },
            9 if nesting < 2 => Block::RepeatUntilGoal {
                body: nonempty(rng, budget, nesting),
            },
            10 if nesting < 2 => Block::If {
                cond: random_cond(rng),
                then_body: nonempty(rng, budget, nesting),
            },
            11 if nesting < 2 => Block::IfElse {
                cond: random_cond(rng),
                then_body: nonempty(rng, budget, nesting),
                else_body: nonempty(rng, budget, nesting),
            },
            _ => Block::Move,
        };
        out.push(block);
    }
    out
}

fn nonempty(rng: &mut ChaCha8Rng, budget: &mut usize, nesting: usize) -> Vec<Block> {
    let mut body = random_blocks(rng, budget, nesting + 1);
    if body.is_empty() {
        body.push(Block::Move);
    }
    body
}

fn random_program(rng: &mut ChaCha8Rng, max_blocks: usize) -> Program {
    loop {
        let mut budget = max_blocks.saturating_sub(2);
        let blocks = random_blocks(rng, &mut budget, 0);
        if let Ok(program) = Program::new(blocks) {
            if program.block_count() <= max_blocks {
                return program;
            }
        }
    }
}

/// Replaces every counted repeat by its body written out count
/// times, recursively. An exact semantic no-op: loop bookkeeping is
/// free, so traces must match step for step.
fn unroll(blocks: &[Block]) -> Vec<Block> {
    let mut out = Vec::new();
    for block in blocks {
        match block {
            Block::Repeat { count, body } => {
                let body = unroll(body);
                for _ in 0..*count {
                    out.extend(body.iter().cloned());
                }
            }
            Block::RepeatUntilGoal { body } => out.push(Block::RepeatUntilGoal {
                body: unroll(body),
            }),
            Block::If { cond, then_body } => out.push(Block::If {
                cond: *cond,
                then_body: unroll(then_body),
            }),
            Block::IfElse {
                cond,
                then_body,
                else_body,
            } => out.push(Block::IfElse {
                cond: *cond,
                then_body: unroll(then_body),
                else_body: unroll(else_body),
            }),
            other => out.push(other.clone()),
        }
    }
    out
}

#[test]
fn criterion_2_semantics_properties() {
    let mut checked_unroll = 0usize;
    for case in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(0x5E11, case));
        let (grid, start) = random_world(&mut rng, 6);
        let program = random_program(&mut rng, 15);

        // Determinism: two executions agree completely.
        let first = execute(&grid, start, &program, 1000).unwrap();
        let second = execute(&grid, start, &program, 1000).unwrap();
        assert_eq!(first, second, "case {case}: nondeterministic execution");

        // Repeat unrolling is invisible to the interpreter.
        if let Ok(flat) = Program::new(unroll(program.blocks())) {
            let third = execute(&grid, start, &flat, 1000).unwrap();
            assert_eq!(
                first, third,
                "case {case}: unrolled program diverged\n{}",
                program.to_text()
            );
            checked_unroll += 1;
        }

        // Turn-group identity: k turns net out to a rotation, never
        // leave the cell, and never end the run early.
        let k = rng.random_range(0..=7u32);
        let mut net_left = 0u32;
        let mut turns = Vec::new();
        for _ in 0..k {
            if rng.random::<bool>() {
                turns.push(Block::TurnLeft);
                net_left += 1;
            } else {
                turns.push(Block::TurnRight);
                net_left += 3;
            }
        }
        let mut expected_dir = start.dir;
        for _ in 0..(net_left % 4) {
            expected_dir = expected_dir.turned(Turn::Left);
        }
        let spin = execute(&grid, start, &Program::new(turns).unwrap(), 1000).unwrap();
        match spin.outcome {
            Outcome::IncompleteStop { final_state } => {
                assert_eq!(final_state.pos, start.pos, "case {case}: turning moved");
                assert_eq!(final_state.dir, expected_dir, "case {case}: wrong net turn");
            }
            other => panic!("case {case}: turn-only program ended with {other:?}"),
        }

        // Goal outcomes always leave the avatar on the goal cell.
        if let Outcome::GoalReached { at_step } = first.outcome {
            assert_eq!(
                first.final_state(start).pos,
                grid.goal(),
                "case {case}: goal outcome away from goal"
            );
            match first.trace.last() {
                Some(last) => {
                    assert_eq!(last.step, at_step, "case {case}: goal step mismatch");
                    assert_eq!(last.state_after.pos, grid.goal());
                }
                None => {
                    assert_eq!(at_step, 0, "case {case}: empty trace but nonzero step");
                    assert_eq!(start.pos, grid.goal());
                }
            }
        }
    }
    assert!(checked_unroll > 900, "unroll check skipped too often");
    println!(
        "PASS criterion 2: 1000 random cases uphold determinism, unrolling ({checked_unroll} applicable), turn identities, goal placement"
    );
}

// ---------------------------------------------------------------
// Criterion 3: enumeration against independently written loops.
// ---------------------------------------------------------------

#[test]
fn criterion_3_enumeration_against_brute_force() {
    for case in 0..200u64 {
        let clock = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(0xB00F, case));
        let (grid, start) = random_world(&mut rng, 5);
        let program = random_program(&mut rng, 10);

        // Avatar starts: plain double loop over cells and directions.
        let mut by_hand = BTreeSet::new();
        for col in 0..grid.width() {
            for row in 0..grid.height() {
                let pos = Position::new(col, row);
                if !grid.is_free(pos) || pos == grid.goal() {
                    continue;
                }
                for dir in ace_core::Direction::ALL {
                    let candidate = AvatarState::new(pos, dir);
                    let reached = execute(&grid, candidate, &program, 1000)
                        .map(|run| run.outcome.is_goal_reached())
                        .unwrap_or(false);
                    if reached {
                        by_hand.insert(candidate);
                    }
                }
            }
        }
        assert_eq!(
            enumerate_avatar_starts(&grid, &program),
            by_hand,
            "case {case}: avatar start sets differ"
        );

        // Wall additions: enumerate subsets of size 0, 1, 2 by
        // index, rebuild each grid from text, and execute.
        let budget = rng.random_range(0..=2u32);
        let candidates: Vec<Position> = {
            let mut v = Vec::new();
            for col in 0..grid.width() {
                for row in 0..grid.height() {
                    let pos = Position::new(col, row);
                    if grid.is_free(pos) && pos != grid.goal() && pos != start.pos {
                        v.push(pos);
                    }
                }
            }
            v
        };
        let mut subsets: Vec<Vec<Position>> = vec![Vec::new()];
        if budget >= 1 {
            for &a in &candidates {
                subsets.push(vec![a]);
            }
        }
        if budget >= 2 {
            for i in 0..candidates.len() {
                for j in (i + 1)..candidates.len() {
                    subsets.push(vec![candidates[i], candidates[j]]);
                }
            }
        }
        let mut by_hand_count = 0u64;
        for subset in &subsets {
            let mut rows: Vec<Vec<char>> = render_grid_text(grid.open(), None, None)
                .lines()
                .map(|l| l.chars().collect())
                .collect();
            for pos in subset {
                let name = pos.cell_name().unwrap();
                let col = (name.as_bytes()[0] - b'a') as usize;
                let row = name[1..].parse::<usize>().unwrap() - 1;
                rows[row][col] = '#';
            }
            let text: String = rows
                .iter()
                .map(|r| r.iter().collect::<String>())
                .collect::<Vec<_>>()
                .join("\n");
            let reparsed = parse_grid_text(&text).unwrap();
            let walled = Grid::new(reparsed.open, grid.goal()).unwrap();
            let ok = execute(&walled, start, &program, 1000)
                .map(|run| run.outcome.is_goal_reached())
                .unwrap_or(false);
            if ok {
                by_hand_count += 1;
            }
        }
        assert_eq!(
            count_wall_configurations(&grid, start, &program, budget).unwrap(),
            by_hand_count,
            "case {case}: wall configuration counts differ (budget {budget})"
        );

        let elapsed = clock.elapsed();
        assert!(
            elapsed.as_secs_f64() < 1.0,
            "case {case} took {elapsed:?}, over the per-case 1 s budget"
        );
    }
    println!("PASS criterion 3: 200 cases match brute-force avatar and wall enumeration");
}

// ---------------------------------------------------------------
// Criterion 4: generator integrity.
// ---------------------------------------------------------------

#[test]
fn criterion_4_generator_integrity() {
    let kinds_for = |category: BloomCategory| -> Vec<ItemKind> {
        ItemKind::ALL
            .iter()
            .copied()
            .filter(|k| k.is_machine_checkable() && k.admissible_for(category))
            .filter(|k| k.home_category() == Some(category))
            .collect()
    };
    let bands = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    for category in BloomCategory::ALL {
        let kinds = kinds_for(category);
        assert!(!kinds.is_empty());
        for seed in 1..=100u64 {
            let kind = kinds[(seed as usize) % kinds.len()];
            let difficulty = bands[(seed as usize) % bands.len()];
            let spec = GenSpec::new(seed, category, kind, difficulty);
            let item = generate_item(&spec)
                .unwrap_or_else(|e| panic!("seed {seed} {category} {kind}: {e}"));
            let report = validate_item(&item);
            assert!(
                report.is_clean(),
                "seed {seed} {category} {kind}: {:?}",
                report.findings
            );
            match pick_correct_choice(&item) {
                Ok(CorrectChoice::Label(label)) => assert_eq!(
                    label, item.correct,
                    "seed {seed} {category} {kind}: oracle disagrees with the key"
                ),
                other => panic!("seed {seed} {category} {kind}: oracle said {other:?}"),
            }
            // Regeneration is byte-identical.
            let again = generate_item(&spec).unwrap();
            assert_eq!(
                serde_json::to_string(&item).unwrap(),
                serde_json::to_string(&again).unwrap(),
                "seed {seed} {category} {kind}: regeneration differs"
            );
        }
    }

    let demo = generate_bank(42, [7, 7, 7]).expect("demo bank generates");
    assert_eq!(demo.items.len(), 21);
    assert_eq!(demo.category_counts(), [7, 7, 7]);
    let report = validate_bank(&demo);
    assert!(report.is_clean(), "demo bank findings: {:?}", report.findings);

    println!(
        "PASS criterion 4: 300 generated items validate clean with oracle-confirmed keys; regeneration byte-identical; 7/7/7 demo bank clean"
    );
}

// ---------------------------------------------------------------
// Criterion 5: Cronbach alpha fixtures and invariances.
// ---------------------------------------------------------------

fn matrix_from(rows: &[Vec<u8>]) -> ResponseMatrix {
    let person_ids: Vec<String> = (1..=rows.len()).map(|i| format!("p{i:02}")).collect();
    let item_ids: Vec<String> = (1..=rows[0].len()).map(|i| format!("i{i:02}")).collect();
    ResponseMatrix::new(person_ids, item_ids, rows.to_vec()).unwrap()
}

#[test]
fn criterion_5_cronbach_alpha() {
    // Identical columns are perfectly consistent.
    let column = [1u8, 0, 1, 1, 0, 1, 0, 0, 1, 1];
    let rows: Vec<Vec<u8>> = column.iter().map(|&v| vec![v; 5]).collect();
    let alpha = cronbach_alpha(&matrix_from(&rows)).unwrap();
    assert!(
        (alpha - 1.0).abs() <= 1e-12,
        "duplicated columns gave alpha {alpha}"
    );

    // Hand-computed 4x3 fixture: item variances 1/4 + 1/3 + 1/4,
    // total variance 5/3, alpha = 3/2 * (1 - (5/6)/(5/3)) = 3/4.
    let fixture = vec![vec![1, 1, 1], vec![1, 0, 1], vec![0, 0, 1], vec![0, 0, 0]];
    let alpha = cronbach_alpha(&matrix_from(&fixture)).unwrap();
    assert!(
        (alpha - 0.75).abs() <= 1e-12,
        "4x3 fixture gave alpha {alpha}"
    );

    // Shuffling persons and items together never changes alpha.
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1FA);
    let mut checked = 0;
    while checked < 50 {
        let n = rng.random_range(5..=20usize);
        let k = rng.random_range(3..=10usize);
        let p = 0.2 + rng.random::<f64>() * 0.6;
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|_| (0..k).map(|_| u8::from(rng.random::<f64>() < p)).collect())
            .collect();
        let base = match cronbach_alpha(&matrix_from(&rows)) {
            Ok(a) => a,
            Err(_) => continue, // degenerate draw; try another
        };

        let mut person_order: Vec<usize> = (0..n).collect();
        let mut item_order: Vec<usize> = (0..k).collect();
        use rand::seq::SliceRandom;
        person_order.shuffle(&mut rng);
        item_order.shuffle(&mut rng);
        let shuffled_rows: Vec<Vec<u8>> = person_order
            .iter()
            .map(|&pi| item_order.iter().map(|&ii| rows[pi][ii]).collect())
            .collect();
        let shuffled = cronbach_alpha(&matrix_from(&shuffled_rows)).unwrap();
        assert!(
            (base - shuffled).abs() <= 1e-12,
            "permutation moved alpha from {base} to {shuffled}"
        );
        checked += 1;
    }

    println!(
        "PASS criterion 5: alpha exact on duplicated columns and the 4x3 fixture; permutation-invariant on 50 matrices"
    );
}

// ---------------------------------------------------------------
// Criterion 6: Rasch difficulty recovery on simulated data.
// ---------------------------------------------------------------

#[test]
fn criterion_6_rasch_recovery() {
    let clock = Instant::now();
    let n = 500usize;
    let k = 21usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6A5C);
    let theta: Vec<f64> = (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    let b_true: Vec<f64> = (0..k).map(|i| -2.0 + 0.2 * i as f64).collect();
    let person_ids: Vec<String> = (1..=n).map(|i| format!("p{i:03}")).collect();
    let item_ids: Vec<String> = (1..=k).map(|i| format!("i{i:02}")).collect();
    let matrix = simulate_matrix(0x51A1, &theta, &b_true, person_ids, item_ids).unwrap();

    let fit = rasch_fit(&matrix, &RaschOptions::default()).unwrap();
    assert!(fit.converged, "no convergence in {} sweeps", fit.sweeps);
    assert!(fit.sweeps <= 100, "took {} sweeps", fit.sweeps);
    assert!(
        fit.max_score_residual < 1e-4,
        "score residual {}",
        fit.max_score_residual
    );

    // Pair the fitted difficulties with the generating ones by item
    // id; extreme items would have been dropped.
    let mut b_hat = Vec::new();
    let mut b_gen = Vec::new();
    for (idx, id) in fit.item_ids.iter().enumerate() {
        let true_index: usize = id[1..].parse::<usize>().unwrap() - 1;
        b_hat.push(fit.difficulty[idx]);
        b_gen.push(b_true[true_index]);
    }
    assert!(b_hat.len() >= 20, "too many items dropped as extreme");

    let r = pearson(&b_hat, &b_gen).unwrap().r;
    assert!(r >= 0.95, "difficulty correlation only {r:.4}");
    let rmse = (b_hat
        .iter()
        .zip(&b_gen)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / b_hat.len() as f64)
        .sqrt();
    assert!(rmse <= 0.3, "difficulty RMSE {rmse:.4} logits");
    assert!(
        (0.70..=0.90).contains(&fit.person_reliability),
        "person reliability {:.3} outside [0.70, 0.90]",
        fit.person_reliability
    );

    let elapsed = clock.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "PASS criterion 6: 500x21 simulation recovered difficulties (r={r:.3}, RMSE={rmse:.3}, reliability={:.3}) in {elapsed:?}",
        fit.person_reliability
    );
}

// ---------------------------------------------------------------
// Criterion 7: correlation and Welch fixtures.
// ---------------------------------------------------------------

#[test]
fn criterion_7_correlation_and_welch() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    assert_eq!(pearson(&x, &x).unwrap().r, 1.0, "self-correlation not exact");
    assert_eq!(pearson(&x, &neg).unwrap().r, -1.0, "anti-correlation not exact");

    // Hand-computed: r = 12 / sqrt(10 * 14.8); t = 6*sqrt(3) on 3
    // degrees of freedom gives the two-sided p below.
    let y = [1.0, 2.0, 3.0, 4.0, 6.0];
    let got = pearson(&x, &y).unwrap();
    assert!((got.r - 0.9863939238321437).abs() <= 1e-9, "r = {}", got.r);
    assert!((got.p - 0.0019012746601962949).abs() <= 1e-6, "p = {}", got.p);

    // Hand-computed Welch fixture: t = -3.5 / sqrt(29/12),
    // df = 2523/457.
    let a = [1.0, 2.0, 3.0, 4.0];
    let b = [2.0, 4.0, 6.0, 8.0, 10.0];
    let w = welch_t(&a, &b).unwrap();
    assert!((w.t - (-2.2514363231593695)).abs() <= 1e-9, "t = {}", w.t);
    assert!((w.df - 5.520787746170677).abs() <= 1e-9, "df = {}", w.df);

    // Swapping samples flips the statistic and keeps df and p.
    let back = welch_t(&b, &a).unwrap();
    assert_eq!(back.t, -w.t);
    assert_eq!(back.df, w.df);
    assert_eq!(back.p, w.p);

    // A sample against itself: no effect at all.
    let same = welch_t(&a, &a).unwrap();
    assert_eq!(same.t, 0.0);
    assert_eq!(same.p, 1.0);

    println!("PASS criterion 7: correlation and Welch fixtures match closed forms");
}

// ---------------------------------------------------------------
// Criterion 8: full pipeline through the command-line binary.
// ---------------------------------------------------------------

#[test]
fn criterion_8_end_to_end_pipeline() {
    let clock = Instant::now();
    let bin = env!("CARGO_BIN_EXE_ace");
    let dir = tempfile::tempdir().unwrap();
    let bank_path = dir.path().join("bank.json");
    let responses_path = dir.path().join("responses.csv");
    let report_path = dir.path().join("report.json");

    // Generate the demo bank.
    let out = Command::new(bin)
        .args(["generate", "--seed", "42", "--out"])
        .arg(&bank_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "generate exited with {}", out.status);

    // Simulate responses from the logistic model over those items.
    let bank = ace_core::item::bank_from_json(&std::fs::read_to_string(&bank_path).unwrap())
        .expect("generated bank parses");
    let item_ids: Vec<String> = bank.items.iter().map(|i| i.id.clone()).collect();
    let k = item_ids.len();
    assert_eq!(k, 21);
    let n = 300usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0xE2E);
    let theta: Vec<f64> = (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    let b: Vec<f64> = (0..k).map(|i| -2.0 + 0.2 * i as f64).collect();
    let person_ids: Vec<String> = (1..=n).map(|i| format!("s{i:03}")).collect();
    let matrix = simulate_matrix(0xE2E2, &theta, &b, person_ids, item_ids).unwrap();
    std::fs::write(&responses_path, responses_to_csv(&matrix, &MetaTable::default())).unwrap();

    // Analyze through the binary.
    let out = Command::new(bin)
        .arg("analyze")
        .arg(&responses_path)
        .arg("--bank")
        .arg(&bank_path)
        .arg("--out")
        .arg(&report_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "analyze exited with {}", out.status);

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema"], "ace-report/1");
    assert_eq!(report["descriptive"]["n_persons"], 300);
    assert_eq!(report["descriptive"]["n_items"], 21);
    assert_eq!(report["rasch"]["converged"], true);

    // Every curve rises with ability, and the easiest and hardest
    // items bound all others pointwise.
    let curves = report["icc"].as_array().unwrap();
    assert!(!curves.is_empty());
    let prob = |c: &serde_json::Value, j: usize| c["points"][j][1].as_f64().unwrap();
    let n_points = curves[0]["points"].as_array().unwrap().len();
    for curve in curves {
        assert_eq!(curve["points"].as_array().unwrap().len(), n_points);
        for j in 1..n_points {
            assert!(
                prob(curve, j) >= prob(curve, j - 1),
                "curve {} not monotone",
                curve["id"]
            );
        }
    }
    let easiest = curves
        .iter()
        .min_by(|a, b| {
            a["difficulty"].as_f64().unwrap().total_cmp(&b["difficulty"].as_f64().unwrap())
        })
        .unwrap();
    let hardest = curves
        .iter()
        .max_by(|a, b| {
            a["difficulty"].as_f64().unwrap().total_cmp(&b["difficulty"].as_f64().unwrap())
        })
        .unwrap();
    for curve in curves {
        for j in 0..n_points {
            assert!(
                prob(easiest, j) >= prob(curve, j) - 1e-12,
                "easiest curve dips under {} at point {j}",
                curve["id"]
            );
            assert!(
                prob(hardest, j) <= prob(curve, j) + 1e-12,
                "hardest curve rises over {} at point {j}",
                curve["id"]
            );
        }
    }

    // Wright map bins conserve the fitted persons.
    let binned: u64 = report["wright_map"]["bins"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["count"].as_u64().unwrap())
        .sum();
    let fitted = report["rasch"]["persons"].as_array().unwrap().len() as u64;
    assert_eq!(binned, fitted, "wright bins lose or invent persons");

    let elapsed = clock.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "pipeline took {elapsed:?}");
    println!(
        "PASS criterion 8: generate -> simulate -> analyze pipeline verified in {elapsed:?}"
    );
}
