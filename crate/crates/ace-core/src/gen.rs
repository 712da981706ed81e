//! Seeded construction of new items, one strategy per item kind.
//!
//! Every strategy follows the same shape: derive a fresh random
//! stream for the attempt, build a grid and programs, compute the
//! correct answer with the matching oracle, surround it with
//! distractors the oracle confirms wrong, and accept the item only
//! if the full validation pass comes back clean. Attempts that miss
//! a difficulty band or fail a check are discarded and retried with
//! the next derived sub-seed, up to a fixed bound.

use crate::grid::{AvatarState, CellKind, Direction, Grid, OpenGrid, Position, Turn};
use crate::item::{
    validate_item, BloomCategory, Choice, ChoiceContent, GeneratorInfo, GridPayload, Item,
    ItemBank, ItemKind, Label,
};
use crate::oracle::{
    count_wall_configurations, enumerate_avatar_starts, enumerate_goal_cells, equivalent,
    pick_correct_choice, solves, wall_subset_total, CorrectChoice, EquivalenceMode,
};
use crate::program::{Block, Program};
use crate::TOOL_VERSION;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

/// Attempts per item before generation gives up.
pub const RETRY_BOUND: u64 = 1000;

/// Default bank shape: seven items per category.
pub const DEFAULT_BANK_SHAPE: [usize; 3] = [7, 7, 7];

const MUTATION_TRIES: usize = 200;

/// Difficulty band of a generated item. Easy solutions stay within
/// 4 blocks and easy counts within 3; medium runs to 8 blocks or a
/// count of 6; hard is everything beyond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }

    /// Grid side lengths used for this band.
    pub fn grid_size(self) -> (u8, u8) {
        match self {
            Difficulty::Easy => (4, 4),
            Difficulty::Medium => (6, 6),
            Difficulty::Hard => (8, 8),
        }
    }

    /// Inclusive block-count band for generated programs.
    fn block_band(self) -> (usize, usize) {
        match self {
            Difficulty::Easy => (1, 4),
            Difficulty::Medium => (5, 8),
            Difficulty::Hard => (9, crate::program::MAX_BLOCKS),
        }
    }

    /// Inclusive band for count answers.
    fn count_band(self) -> (u64, u64) {
        match self {
            Difficulty::Easy => (1, 3),
            Difficulty::Medium => (4, 6),
            Difficulty::Hard => (7, u64::MAX),
        }
    }
}

/// Everything that pins down one generated item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub seed: u64,
    pub category: BloomCategory,
    pub kind: ItemKind,
    pub grid_size: (u8, u8),
    pub difficulty: Difficulty,
}

impl GenSpec {
    /// Spec with the default grid size of the difficulty band.
    pub fn new(seed: u64, category: BloomCategory, kind: ItemKind, difficulty: Difficulty) -> Self {
        GenSpec {
            seed,
            category,
            kind,
            grid_size: difficulty.grid_size(),
            difficulty,
        }
    }

    pub fn check(&self) -> Result<(), GenError> {
        if self.kind == ItemKind::FreeText {
            return Err(GenError::FreeTextNotGeneratable);
        }
        if !self.kind.admissible_for(self.category) {
            return Err(GenError::KindNotAdmissible {
                kind: self.kind,
                category: self.category,
            });
        }
        let (w, h) = self.grid_size;
        let side = crate::grid::MIN_SIDE..=crate::grid::MAX_SIDE;
        if !side.contains(&w) || !side.contains(&h) {
            return Err(GenError::BadGridSize {
                width: w,
                height: h,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{kind} items do not belong to the {category} category")]
    KindNotAdmissible {
        kind: ItemKind,
        category: BloomCategory,
    },
    #[error("free_text items have no machine-checkable answer to generate")]
    FreeTextNotGeneratable,
    #[error("grid size {width}x{height} is outside 2..=8 per side")]
    BadGridSize { width: u8, height: u8 },
    #[error("gave up on a {kind} item after {attempts} attempts with seed {seed}")]
    Exhausted {
        kind: ItemKind,
        seed: u64,
        attempts: u64,
    },
}

/// Mixes an index into a master seed so that each item draws from
/// an independent stream. Uses the splitmix64 finalizer.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn attempt_rng(seed: u64, attempt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt))
}

/// Shortest free-cell path between two cells, endpoints included.
fn bfs_path(open: &OpenGrid, from: Position, to: Position) -> Option<Vec<Position>> {
    let width = open.width() as usize;
    let index = |p: Position| p.row as usize * width + p.col as usize;
    let size = width * open.height() as usize;
    let mut parent: Vec<Option<Position>> = vec![None; size];
    let mut seen = vec![false; size];
    let mut queue = VecDeque::new();
    seen[index(from)] = true;
    queue.push_back(from);
    while let Some(p) = queue.pop_front() {
        if p == to {
            let mut path = vec![p];
            let mut cur = p;
            while let Some(prev) = parent[index(cur)] {
                path.push(prev);
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        for dir in Direction::ALL {
            if let Some(n) = open.neighbor(p, dir) {
                if open.is_free(n) && !seen[index(n)] {
                    seen[index(n)] = true;
                    parent[index(n)] = Some(p);
                    queue.push_back(n);
                }
            }
        }
    }
    None
}

struct PathSetup {
    grid: Grid,
    start: AvatarState,
    path: Vec<Position>,
}

/// One attempt at a random grid with a start, a goal and a shortest
/// path whose length suits the difficulty band.
fn try_path_grid(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<PathSetup> {
    let (w, h) = spec.grid_size;
    let density = match spec.difficulty {
        Difficulty::Easy => 0.15,
        Difficulty::Medium => 0.22,
        Difficulty::Hard => 0.28,
    };
    let cells: Vec<CellKind> = (0..w as usize * h as usize)
        .map(|_| {
            if rng.random::<f64>() < density {
                CellKind::Wall
            } else {
                CellKind::Free
            }
        })
        .collect();
    let open = OpenGrid::new(w, h, cells).ok()?;
    let free: Vec<Position> = open.free_positions().collect();
    if free.len() < 4 {
        return None;
    }
    let start_pos = *free.choose(rng)?;
    let others: Vec<Position> = free.iter().copied().filter(|p| *p != start_pos).collect();
    let goal = *others.choose(rng)?;
    let path = bfs_path(&open, start_pos, goal)?;
    let steps = path.len() - 1;
    let (lo, hi) = match spec.difficulty {
        Difficulty::Easy => (2, 3),
        Difficulty::Medium => (4, 7),
        Difficulty::Hard => (7, 12),
    };
    if steps < lo || steps > hi {
        return None;
    }
    let grid = Grid::new(open, goal).ok()?;
    let dir = *Direction::ALL.choose(rng)?;
    Some(PathSetup {
        grid,
        start: AvatarState::new(start_pos, dir),
        path,
    })
}

/// Grid with a guaranteed free path from the returned start to the
/// goal; deterministic per seed.
pub fn generate_grid(seed: u64, spec: &GenSpec) -> Result<(Grid, AvatarState), GenError> {
    spec.check()?;
    for attempt in 0..RETRY_BOUND {
        let mut rng = attempt_rng(seed, attempt);
        if let Some(setup) = try_path_grid(&mut rng, spec) {
            return Ok((setup.grid, setup.start));
        }
    }
    Err(GenError::Exhausted {
        kind: spec.kind,
        seed,
        attempts: RETRY_BOUND,
    })
}

fn direction_between(a: Position, b: Position) -> Option<Direction> {
    Direction::ALL.into_iter().find(|d| {
        let (dx, dy) = d.delta();
        i16::from(b.col) == i16::from(a.col) + dx && i16::from(b.row) == i16::from(a.row) + dy
    })
}

fn turn_blocks(from: Direction, to: Direction) -> Vec<Block> {
    if from == to {
        Vec::new()
    } else if from.turned(Turn::Left) == to {
        vec![Block::TurnLeft]
    } else if from.turned(Turn::Right) == to {
        vec![Block::TurnRight]
    } else {
        vec![Block::TurnRight, Block::TurnRight]
    }
}

/// Straight-line move and turn blocks that walk the path.
fn path_to_blocks(path: &[Position], start_dir: Direction) -> Vec<Block> {
    let mut dir = start_dir;
    let mut blocks = Vec::new();
    for pair in path.windows(2) {
        let need = direction_between(pair[0], pair[1]).expect("path cells are adjacent");
        blocks.extend(turn_blocks(dir, need));
        dir = need;
        blocks.push(Block::Move);
    }
    blocks
}

/// Collapses each run of two or more moves into a repeat block, by
/// coin flip per run.
fn compress_moves(blocks: &[Block], rng: &mut ChaCha8Rng) -> Vec<Block> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < blocks.len() {
        if blocks[i] == Block::Move {
            let mut j = i;
            while j < blocks.len() && blocks[j] == Block::Move {
                j += 1;
            }
            let run = j - i;
            if run >= 2 && rng.random::<bool>() {
                out.push(Block::Repeat {
                    count: run as u32,
                    body: vec![Block::Move],
                });
            } else {
                out.extend(std::iter::repeat_n(Block::Move, run));
            }
            i = j;
        } else {
            out.push(blocks[i].clone());
            i += 1;
        }
    }
    out
}

/// Solution program along the setup path, kept inside the block
/// band of the difficulty.
fn make_solution(rng: &mut ChaCha8Rng, spec: &GenSpec, setup: &PathSetup) -> Option<Program> {
    let blocks = compress_moves(&path_to_blocks(&setup.path, setup.start.dir), rng);
    let program = Program::new(blocks).ok()?;
    let (lo, hi) = spec.difficulty.block_band();
    if program.block_count() < lo || program.block_count() > hi {
        return None;
    }
    if !solves(&setup.grid, setup.start, &program) {
        return None;
    }
    Some(program)
}

/// One random edit of a top-level block list: delete a block, swap
/// two neighbours, flip a turn, nudge a repeat count, or insert a
/// stray turn.
fn mutate_once(blocks: &[Block], rng: &mut ChaCha8Rng) -> Option<Vec<Block>> {
    let mut ops = vec![4u8];
    if blocks.len() >= 2 {
        ops.push(0);
        if blocks.windows(2).any(|w| w[0] != w[1]) {
            ops.push(1);
        }
    }
    if blocks
        .iter()
        .any(|b| matches!(b, Block::TurnLeft | Block::TurnRight))
    {
        ops.push(2);
    }
    if blocks.iter().any(|b| matches!(b, Block::Repeat { .. })) {
        ops.push(3);
    }
    let mut out = blocks.to_vec();
    match *ops.choose(rng)? {
        0 => {
            out.remove(rng.random_range(0..out.len()));
        }
        1 => {
            let pairs: Vec<usize> = (0..out.len() - 1).filter(|&i| out[i] != out[i + 1]).collect();
            let i = *pairs.choose(rng)?;
            out.swap(i, i + 1);
        }
        2 => {
            let turns: Vec<usize> = out
                .iter()
                .enumerate()
                .filter(|(_, b)| matches!(b, Block::TurnLeft | Block::TurnRight))
                .map(|(i, _)| i)
                .collect();
            let i = *turns.choose(rng)?;
            out[i] = if out[i] == Block::TurnLeft {
                Block::TurnRight
            } else {
                Block::TurnLeft
            };
        }
        3 => {
            let repeats: Vec<usize> = out
                .iter()
                .enumerate()
                .filter(|(_, b)| matches!(b, Block::Repeat { .. }))
                .map(|(i, _)| i)
                .collect();
            let i = *repeats.choose(rng)?;
            if let Block::Repeat { count, body } = &out[i] {
                let mut candidates = Vec::new();
                if *count > crate::program::MIN_REPEAT_COUNT {
                    candidates.push(count - 1);
                }
                if *count < crate::program::MAX_REPEAT_COUNT {
                    candidates.push(count + 1);
                }
                let new_count = *candidates.choose(rng)?;
                out[i] = Block::Repeat {
                    count: new_count,
                    body: body.clone(),
                };
            }
        }
        _ => {
            let turn = if rng.random::<bool>() {
                Block::TurnLeft
            } else {
                Block::TurnRight
            };
            out.insert(rng.random_range(0..=out.len()), turn);
        }
    }
    Some(out)
}

/// Mutated variants of `base` that satisfy `accept` and are
/// pairwise distinct from each other and from `taken`.
fn mutants(
    rng: &mut ChaCha8Rng,
    base: &Program,
    count: usize,
    taken: &[String],
    mut accept: impl FnMut(&Program) -> bool,
) -> Option<Vec<Program>> {
    let mut texts: Vec<String> = taken.to_vec();
    let mut found = Vec::new();
    for _ in 0..MUTATION_TRIES {
        if found.len() == count {
            break;
        }
        let Some(blocks) = mutate_once(base.blocks(), rng) else {
            continue;
        };
        let Ok(candidate) = Program::new(blocks) else {
            continue;
        };
        let text = candidate.to_text();
        if texts.contains(&text) || !accept(&candidate) {
            continue;
        }
        texts.push(text);
        found.push(candidate);
    }
    (found.len() == count).then_some(found)
}

/// Unrolls the first repeat block, or collapses the first move run
/// when there is nothing to unroll.
fn unroll_or_compress(blocks: &[Block]) -> Option<Vec<Block>> {
    if let Some(i) = blocks.iter().position(|b| matches!(b, Block::Repeat { .. })) {
        let Block::Repeat { count, body } = &blocks[i] else {
            unreachable!()
        };
        let mut out = blocks[..i].to_vec();
        for _ in 0..*count {
            out.extend(body.iter().cloned());
        }
        out.extend(blocks[i + 1..].iter().cloned());
        return (out.len() <= crate::program::MAX_BLOCKS).then_some(out);
    }
    let mut i = 0;
    while i < blocks.len() {
        let mut j = i;
        while j < blocks.len() && blocks[j] == Block::Move {
            j += 1;
        }
        if j - i >= 2 {
            let mut out = blocks[..i].to_vec();
            out.push(Block::Repeat {
                count: (j - i) as u32,
                body: vec![Block::Move],
            });
            out.extend(blocks[j..].iter().cloned());
            return Some(out);
        }
        i = j.max(i + 1);
    }
    None
}

/// Inserts a turn-left/turn-right pair, which costs two steps but
/// leaves the visited cells and the outcome unchanged.
fn insert_noop_pair(blocks: &[Block], at: usize) -> Vec<Block> {
    let mut out = blocks.to_vec();
    out.insert(at.min(out.len()), Block::TurnRight);
    out.insert(at.min(out.len() - 1), Block::TurnLeft);
    out
}

/// Random walk over free cells that never crashes and never enters
/// `forbidden`; returns the blocks, the final state, and the cell
/// the avatar stood on before its last move.
fn random_safe_walk(
    rng: &mut ChaCha8Rng,
    open: &OpenGrid,
    forbidden: Option<Position>,
    start: AvatarState,
    target_blocks: usize,
) -> Option<(Vec<Block>, AvatarState, Position)> {
    let mut state = start;
    let mut blocks = Vec::with_capacity(target_blocks);
    let mut before_last_move = start.pos;
    let mut moves = 0;
    while blocks.len() < target_blocks {
        let ahead = open
            .neighbor(state.pos, state.dir)
            .filter(|p| open.is_free(*p) && Some(*p) != forbidden);
        match ahead {
            Some(next) if rng.random::<f64>() < 0.75 => {
                before_last_move = state.pos;
                state.pos = next;
                blocks.push(Block::Move);
                moves += 1;
            }
            _ => {
                if rng.random::<bool>() {
                    blocks.push(Block::TurnLeft);
                    state.dir = state.dir.turned(Turn::Left);
                } else {
                    blocks.push(Block::TurnRight);
                    state.dir = state.dir.turned(Turn::Right);
                }
            }
        }
    }
    (moves > 0).then_some((blocks, state, before_last_move))
}

fn walk_length(rng: &mut ChaCha8Rng, difficulty: Difficulty) -> usize {
    match difficulty {
        Difficulty::Easy => rng.random_range(3..=4),
        Difficulty::Medium => rng.random_range(5..=8),
        Difficulty::Hard => rng.random_range(9..=12),
    }
}

fn describe_start(start: AvatarState) -> String {
    format!(
        "at {} facing {}",
        start.pos.cell_name().expect("grid cells have names"),
        start.dir.name()
    )
}

/// Shuffles the correct content in with the distractors and labels
/// them A through D.
fn assemble_choices(
    rng: &mut ChaCha8Rng,
    correct: ChoiceContent,
    distractors: Vec<ChoiceContent>,
) -> (Vec<Choice>, Label) {
    let mut contents: Vec<(bool, ChoiceContent)> = vec![(true, correct)];
    contents.extend(distractors.into_iter().map(|c| (false, c)));
    contents.shuffle(rng);
    let mut correct_label = Label::A;
    let choices = contents
        .into_iter()
        .enumerate()
        .map(|(i, (is_correct, content))| {
            let label = Label::from_index(i).expect("four choices");
            if is_correct {
                correct_label = label;
            }
            Choice { label, content }
        })
        .collect();
    (choices, correct_label)
}

/// Off-by-one and off-by-two count distractors around the answer.
fn count_distractors(rng: &mut ChaCha8Rng, correct: u64) -> Vec<ChoiceContent> {
    let mut candidates: Vec<u64> = [-2i64, -1, 1, 2]
        .iter()
        .filter_map(|d| {
            let v = correct as i64 + d;
            (v >= 0).then_some(v as u64)
        })
        .collect();
    candidates.shuffle(rng);
    candidates
        .into_iter()
        .take(3)
        .map(ChoiceContent::Count)
        .collect()
}

fn item_id(spec: &GenSpec) -> String {
    format!("{}-{}", spec.kind, spec.seed)
}

fn try_solution_finding(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<Item> {
    let setup = try_path_grid(rng, spec)?;
    let solution = make_solution(rng, spec, &setup)?;
    let distractors = mutants(rng, &solution, 3, &[solution.to_text()], |p| {
        !solves(&setup.grid, setup.start, p)
    })?;
    let (choices, correct) = assemble_choices(
        rng,
        ChoiceContent::Program(solution),
        distractors.into_iter().map(ChoiceContent::Program).collect(),
    );
    Some(Item {
        id: item_id(spec),
        category: spec.category,
        kind: spec.kind,
        stem: format!(
            "The avatar starts {}. Which program brings it to the goal?",
            describe_start(setup.start)
        ),
        grids: vec![GridPayload::Complete(setup.grid)],
        start: Some(setup.start),
        programs: Vec::new(),
        wall_budget: None,
        choices,
        correct,
    })
}

fn try_trace_outcome(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<Item> {
    let setup = try_path_grid(rng, spec)?;
    let length = walk_length(rng, spec.difficulty);
    let (blocks, final_state, before_last) = random_safe_walk(
        rng,
        setup.grid.open(),
        Some(setup.grid.goal()),
        setup.start,
        length,
    )?;
    let program = Program::new(blocks).ok()?;
    let correct_cell = final_state.pos;

    let mut pool: Vec<Position> = Direction::ALL
        .into_iter()
        .filter_map(|d| setup.grid.neighbor(correct_cell, d))
        .filter(|p| setup.grid.is_free(*p))
        .collect();
    if before_last != correct_cell && !pool.contains(&before_last) {
        pool.push(before_last);
    }
    let mut rest: Vec<Position> = setup
        .grid
        .free_positions()
        .filter(|p| *p != correct_cell && !pool.contains(p))
        .collect();
    rest.shuffle(rng);
    pool.retain(|p| *p != correct_cell);
    pool.extend(rest);
    if pool.len() < 3 {
        return None;
    }
    let distractors: Vec<ChoiceContent> =
        pool.into_iter().take(3).map(ChoiceContent::Cell).collect();

    let (choices, correct) = assemble_choices(rng, ChoiceContent::Cell(correct_cell), distractors);
    Some(Item {
        id: item_id(spec),
        category: spec.category,
        kind: spec.kind,
        stem: format!(
            "The avatar starts {}. On which cell does it stop after running the program?",
            describe_start(setup.start)
        ),
        grids: vec![GridPayload::Complete(setup.grid)],
        start: Some(setup.start),
        programs: vec![program],
        wall_budget: None,
        choices,
        correct,
    })
}

fn try_bug_finding(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<Item> {
    let setup = try_path_grid(rng, spec)?;
    let solution = make_solution(rng, spec, &setup)?;
    let variant_b = match unroll_or_compress(solution.blocks()) {
        Some(blocks) => Program::new(blocks).ok()?,
        None => Program::new(insert_noop_pair(solution.blocks(), 0)).ok()?,
    };
    let at = rng.random_range(0..=solution.block_count());
    let variant_c = Program::new(insert_noop_pair(solution.blocks(), at)).ok()?;
    let keepers = [solution.clone(), variant_b, variant_c];
    let mut texts: Vec<String> = keepers.iter().map(Program::to_text).collect();
    texts.sort();
    texts.dedup();
    if texts.len() != 3 {
        return None;
    }
    if keepers.iter().any(|p| !solves(&setup.grid, setup.start, p)) {
        return None;
    }
    let bug = mutants(rng, &solution, 1, &texts, |p| {
        !solves(&setup.grid, setup.start, p)
    })?
    .remove(0);

    let (choices, correct) = assemble_choices(
        rng,
        ChoiceContent::Program(bug),
        keepers.into_iter().map(ChoiceContent::Program).collect(),
    );
    Some(Item {
        id: item_id(spec),
        category: spec.category,
        kind: spec.kind,
        stem: format!(
            "The avatar starts {}. Three of these programs reach the goal. Which one does not?",
            describe_start(setup.start)
        ),
        grids: vec![GridPayload::Complete(setup.grid)],
        start: Some(setup.start),
        programs: Vec::new(),
        wall_budget: None,
        choices,
        correct,
    })
}

fn try_equivalence_judgment(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<Item> {
    let setup = try_path_grid(rng, spec)?;
    let reference = make_solution(rng, spec, &setup)?;
    let family = vec![(setup.grid.clone(), setup.start)];
    let is_equivalent = |p: &Program| {
        equivalent(&reference, p, &family, EquivalenceMode::Trace)
            .map(|r| r.equivalent)
            .unwrap_or(false)
    };

    let twin = match unroll_or_compress(reference.blocks()) {
        Some(blocks) => Program::new(blocks).ok()?,
        None => {
            let at = rng.random_range(0..=reference.block_count());
            Program::new(insert_noop_pair(reference.blocks(), at)).ok()?
        }
    };
    if twin.to_text() == reference.to_text() || !is_equivalent(&twin) {
        return None;
    }
    let distractors = mutants(
        rng,
        &reference,
        3,
        &[reference.to_text(), twin.to_text()],
        |p| !is_equivalent(p),
    )?;

    let (choices, correct) = assemble_choices(
        rng,
        ChoiceContent::Program(twin),
        distractors.into_iter().map(ChoiceContent::Program).collect(),
    );
    Some(Item {
        id: item_id(spec),
        category: spec.category,
        kind: spec.kind,
        stem: format!(
            "The avatar starts {}. Which program visits exactly the same cells as the \
             program shown and ends the same way?",
            describe_start(setup.start)
        ),
        grids: vec![GridPayload::Complete(setup.grid)],
        start: Some(setup.start),
        programs: vec![reference],
        wall_budget: None,
        choices,
        correct,
    })
}

/// Builds a grid whose answer to "how many placements solve it" is
/// exact by construction: the goal sits in a carved cross of
/// corridor arms, and only cells on those arms, facing the goal,
/// let `repeat_until_goal { move }` succeed.
fn try_avatar_placement_count(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<Item> {
    let (w, h) = spec.grid_size;
    let (lo, hi) = spec.difficulty.count_band();
    let target = rng.random_range(lo..=hi.min(10));

    let capacity = |p: Position| -> [u64; 4] {
        [
            u64::from(w - 1 - p.col),
            u64::from(h - 1 - p.row),
            u64::from(p.col),
            u64::from(p.row),
        ]
    };
    let candidates: Vec<Position> = (0..h)
        .flat_map(|row| (0..w).map(move |col| Position::new(col, row)))
        .filter(|p| capacity(*p).iter().sum::<u64>() >= target)
        .collect();
    let goal = *candidates.choose(rng)?;

    let mut cells = vec![CellKind::Wall; w as usize * h as usize];
    let mut carve = |p: Position| cells[p.row as usize * w as usize + p.col as usize] = CellKind::Free;
    carve(goal);

    let caps = capacity(goal);
    let mut dirs: Vec<usize> = (0..4).collect();
    dirs.shuffle(rng);
    let mut remaining = target;
    for (i, &d) in dirs.iter().enumerate() {
        let later: u64 = dirs[i + 1..].iter().map(|&x| caps[x]).sum();
        let lo_take = remaining.saturating_sub(later);
        let hi_take = caps[d].min(remaining);
        let take = rng.random_range(lo_take..=hi_take);
        let dir = [Direction::East, Direction::South, Direction::West, Direction::North][d];
        let mut cursor = goal;
        for _ in 0..take {
            let (dx, dy) = dir.delta();
            cursor = Position::new(
                (i16::from(cursor.col) + dx) as u8,
                (i16::from(cursor.row) + dy) as u8,
            );
            carve(cursor);
        }
        remaining -= take;
    }

    // A few cells off the goal's row and column for texture; they
    // cannot see the goal in a straight line, so the count stays.
    let decor: Vec<Position> = (0..h)
        .flat_map(|row| (0..w).map(move |col| Position::new(col, row)))
        .filter(|p| p.col != goal.col && p.row != goal.row)
        .collect();
    let decor_count = rng.random_range(0..=3);
    for p in decor.choose_multiple(rng, decor_count) {
        carve(*p);
    }

    let open = OpenGrid::new(w, h, cells).ok()?;
    let grid = Grid::new(open, goal).ok()?;
    let program = Program::new(vec![Block::RepeatUntilGoal {
        body: vec![Block::Move],
    }])
    .ok()?;
    let count = enumerate_avatar_starts(&grid, &program).len() as u64;
    if count != target {
        return None;
    }

    let distractors = count_distractors(rng, count);
    let (choices, correct) = assemble_choices(rng, ChoiceContent::Count(count), distractors);
    Some(Item {
        id: item_id(spec),
        category: spec.category,
        kind: spec.kind,
        stem: "In how many ways can the avatar be placed on a free cell and pointed in a \
               direction so that the program reaches the goal? Count each cell and facing \
               combination once."
            .to_string(),
        grids: vec![GridPayload::Complete(grid)],
        start: None,
        programs: vec![program],
        wall_budget: None,
        choices,
        correct,
    })
}

fn try_goal_placement_design(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<Item> {
    let (w, h) = spec.grid_size;
    let density = match spec.difficulty {
        Difficulty::Easy => 0.15,
        Difficulty::Medium => 0.2,
        Difficulty::Hard => 0.25,
    };
    let cells: Vec<CellKind> = (0..w as usize * h as usize)
        .map(|_| {
            if rng.random::<f64>() < density {
                CellKind::Wall
            } else {
                CellKind::Free
            }
        })
        .collect();
    let open = OpenGrid::new(w, h, cells).ok()?;
    let free: Vec<Position> = open.free_positions().collect();
    if free.len() < 6 {
        return None;
    }
    let start = AvatarState::new(*free.choose(rng)?, *Direction::ALL.choose(rng)?);
    let length = walk_length(rng, spec.difficulty);
    let (blocks, _, _) = random_safe_walk(rng, &open, None, start, length)?;
    let program = Program::new(blocks).ok()?;

    let valid = enumerate_goal_cells(&open, start, &program).ok()?;
    if valid.is_empty() {
        return None;
    }
    let valid_list: Vec<Position> = valid.iter().copied().collect();
    let correct_cell = *valid_list.choose(rng)?;
    let mut pool: Vec<Position> = free
        .iter()
        .copied()
        .filter(|p| *p != start.pos && !valid.contains(p))
        .collect();
    if pool.len() < 3 {
        return None;
    }
    pool.shuffle(rng);
    let distractors: Vec<ChoiceContent> =
        pool.into_iter().take(3).map(ChoiceContent::Cell).collect();

    let (choices, correct) = assemble_choices(rng, ChoiceContent::Cell(correct_cell), distractors);
    Some(Item {
        id: item_id(spec),
        category: spec.category,
        kind: spec.kind,
        stem: format!(
            "The grid has no goal yet. The avatar starts {}. On which cell can the goal \
             be placed so that this program reaches it?",
            describe_start(start)
        ),
        grids: vec![GridPayload::Open(open)],
        start: Some(start),
        programs: vec![program],
        wall_budget: None,
        choices,
        correct,
    })
}

/// Corridor construction with an exact configuration count: the
/// program walks a fixed path, so a wall on any path cell breaks it
/// and a wall on any of the `spare` reopened cells never does. The
/// count is therefore the number of small subsets of spare cells.
fn try_wall_design_count(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<Item> {
    let setup = try_path_grid(rng, spec)?;
    let (budget, spare) = match spec.difficulty {
        Difficulty::Easy => (1u32, rng.random_range(0..=2usize)),
        Difficulty::Medium => {
            if rng.random::<bool>() {
                (1, rng.random_range(3..=5))
            } else {
                (2, 2)
            }
        }
        Difficulty::Hard => (2, rng.random_range(3..=5)),
    };

    let (w, h) = (setup.grid.width(), setup.grid.height());
    let mut cells = vec![CellKind::Wall; w as usize * h as usize];
    for p in &setup.path {
        cells[p.row as usize * w as usize + p.col as usize] = CellKind::Free;
    }
    let mut off_path: Vec<Position> = (0..h)
        .flat_map(|row| (0..w).map(move |col| Position::new(col, row)))
        .filter(|p| !setup.path.contains(p))
        .collect();
    if off_path.len() < spare {
        return None;
    }
    off_path.shuffle(rng);
    for p in off_path.into_iter().take(spare) {
        cells[p.row as usize * w as usize + p.col as usize] = CellKind::Free;
    }
    let open = OpenGrid::new(w, h, cells).ok()?;
    let grid = Grid::new(open, setup.grid.goal()).ok()?;

    let program = Program::new(compress_moves(
        &path_to_blocks(&setup.path, setup.start.dir),
        rng,
    ))
    .ok()?;
    if !solves(&grid, setup.start, &program) {
        return None;
    }
    let count = count_wall_configurations(&grid, setup.start, &program, budget).ok()?;
    if count != wall_subset_total(spare, budget) {
        return None;
    }
    let (lo, hi) = spec.difficulty.count_band();
    if count < lo || count > hi {
        return None;
    }

    let distractors = count_distractors(rng, count);
    let (choices, correct) = assemble_choices(rng, ChoiceContent::Count(count), distractors);
    Some(Item {
        id: item_id(spec),
        category: spec.category,
        kind: spec.kind,
        stem: format!(
            "The avatar starts {}. In how many ways can walls be added to at most {} of \
             the other free cells so that the program still reaches the goal? Adding no \
             wall at all counts as one way.",
            describe_start(setup.start),
            budget
        ),
        grids: vec![GridPayload::Complete(grid)],
        start: Some(setup.start),
        programs: vec![program],
        wall_budget: Some(budget),
        choices,
        correct,
    })
}

fn try_item(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Option<Item> {
    match spec.kind {
        ItemKind::SolutionFinding => try_solution_finding(rng, spec),
        ItemKind::TraceOutcome => try_trace_outcome(rng, spec),
        ItemKind::BugFinding => try_bug_finding(rng, spec),
        ItemKind::EquivalenceJudgment => try_equivalence_judgment(rng, spec),
        ItemKind::AvatarPlacementCount => try_avatar_placement_count(rng, spec),
        ItemKind::GoalPlacementDesign => try_goal_placement_design(rng, spec),
        ItemKind::WallDesignCount => try_wall_design_count(rng, spec),
        ItemKind::FreeText => None,
    }
}

/// Generates one item. The result is deterministic per spec, the
/// stored answer key is re-derived by the oracle before returning,
/// and the item validates clean.
pub fn generate_item(spec: &GenSpec) -> Result<Item, GenError> {
    spec.check()?;
    for attempt in 0..RETRY_BOUND {
        let mut rng = attempt_rng(spec.seed, attempt);
        let Some(item) = try_item(&mut rng, spec) else {
            continue;
        };
        let oracle_agrees = matches!(
            pick_correct_choice(&item),
            Ok(CorrectChoice::Label(label)) if label == item.correct
        );
        if oracle_agrees && validate_item(&item).is_clean() {
            return Ok(item);
        }
    }
    Err(GenError::Exhausted {
        kind: spec.kind,
        seed: spec.seed,
        attempts: RETRY_BOUND,
    })
}

/// Kinds cycled through within one category.
pub fn kind_cycle(category: BloomCategory) -> &'static [ItemKind] {
    match category {
        BloomCategory::ApplyingAnalyzing => &[ItemKind::SolutionFinding, ItemKind::TraceOutcome],
        BloomCategory::AnalyzingEvaluating => {
            &[ItemKind::BugFinding, ItemKind::EquivalenceJudgment]
        }
        BloomCategory::EvaluatingCreating => &[
            ItemKind::AvatarPlacementCount,
            ItemKind::GoalPlacementDesign,
            ItemKind::WallDesignCount,
        ],
    }
}

/// Position within a category run decides the band: the first two
/// sevenths are easy and the last two sevenths hard.
pub fn difficulty_for_position(index: usize, count: usize) -> Difficulty {
    if index * 7 < count * 2 {
        Difficulty::Easy
    } else if index * 7 < count * 5 {
        Difficulty::Medium
    } else {
        Difficulty::Hard
    }
}

/// Generates a whole bank with `shape[c]` items in category `c`,
/// ids numbered per category (AA01, AA02, ...). Deterministic per
/// seed and shape.
pub fn generate_bank(seed: u64, shape: [usize; 3]) -> Result<ItemBank, GenError> {
    let mut items = Vec::new();
    let mut slot = 0u64;
    for (c, &category) in BloomCategory::ALL.iter().enumerate() {
        let cycle = kind_cycle(category);
        for i in 0..shape[c] {
            let difficulty = difficulty_for_position(i, shape[c]);
            let spec = GenSpec {
                seed: derive_seed(seed, slot),
                category,
                kind: cycle[i % cycle.len()],
                grid_size: difficulty.grid_size(),
                difficulty,
            };
            let mut item = generate_item(&spec)?;
            item.id = format!("{}{:02}", category.id_prefix(), i + 1);
            items.push(item);
            slot += 1;
        }
    }
    Ok(ItemBank {
        name: "ace-demo".to_string(),
        version: "1".to_string(),
        generator: Some(GeneratorInfo {
            seed,
            shape,
            tool_version: TOOL_VERSION.to_string(),
        }),
        items,
    })
}
