//! Grids, positions, headings and the avatar state.
//!
//! A grid is a rectangle of Free and Wall cells between 2x2 and 8x8.
//! Columns are named `a`..`h` left to right and rows `1`..`8` top to
//! bottom, so `(col 1, row 1)` prints as `b2`. The text form uses one
//! character per cell: `.` Free, `#` Wall, `G` the goal, and one of
//! `>`, `v`, `<`, `^` for an avatar overlay on a Free cell.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Smallest accepted grid side length.
pub const MIN_SIDE: u8 = 2;
/// Largest accepted grid side length.
pub const MAX_SIDE: u8 = 8;

/// Problems building or parsing grids and cell names.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid must be between {MIN_SIDE}x{MIN_SIDE} and {MAX_SIDE}x{MAX_SIDE}, got {width}x{height}")]
    BadDimensions { width: usize, height: usize },
    #[error("grid text is empty")]
    EmptyText,
    #[error("line {line} has a different length from line 1")]
    NotRectangular { line: usize },
    #[error("unexpected character '{ch}' at line {line}, column {col}")]
    UnknownChar { line: usize, col: usize, ch: char },
    #[error("more than one goal marker (second at line {line}, column {col})")]
    MultipleGoals { line: usize, col: usize },
    #[error("more than one avatar marker (second at line {line}, column {col})")]
    MultipleAvatars { line: usize, col: usize },
    #[error("grid text contains no goal marker")]
    MissingGoal,
    #[error("goal marker is not allowed here")]
    UnexpectedGoal,
    #[error("avatar marker is not allowed here")]
    UnexpectedAvatar,
    #[error("goal cell {0} is outside the grid")]
    GoalOutOfBounds(Position),
    #[error("goal cell {0} is a wall")]
    GoalOnWall(Position),
    #[error("grid has no free cell besides the goal")]
    NoFreeCellBesidesGoal,
    #[error("bad cell name '{0}': expected a column letter a-h followed by a row digit 1-8")]
    BadCellName(String),
}

/// Zero-based cell coordinates; `col` grows rightward, `row` grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    pub col: u8,
    pub row: u8,
}

impl Position {
    pub fn new(col: u8, row: u8) -> Self {
        Position { col, row }
    }

    /// Letter-digit name like `b2`; `None` when either coordinate is
    /// outside the 8x8 naming range.
    pub fn cell_name(self) -> Option<String> {
        if self.col < MAX_SIDE && self.row < MAX_SIDE {
            Some(format!("{}{}", (b'a' + self.col) as char, self.row + 1))
        } else {
            None
        }
    }

    /// Parses a letter-digit name like `b2` back into coordinates.
    pub fn parse_cell_name(s: &str) -> Result<Self, GridError> {
        let bad = || GridError::BadCellName(s.to_string());
        let mut chars = s.chars();
        let col = match chars.next() {
            Some(c @ 'a'..='h') => c as u8 - b'a',
            _ => return Err(bad()),
        };
        let row = match chars.next() {
            Some(c @ '1'..='8') => c as u8 - b'1',
            _ => return Err(bad()),
        };
        if chars.next().is_some() {
            return Err(bad());
        }
        Ok(Position { col, row })
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cell_name() {
            Some(name) => f.write_str(&name),
            None => write!(f, "({},{})", self.col, self.row),
        }
    }
}

// Reading order: top row first, then left to right.
impl Ord for Position {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.row, self.col).cmp(&(other.row, other.col))
    }
}

impl PartialOrd for Position {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.cell_name() {
            Some(name) => serializer.serialize_str(&name),
            None => Err(serde::ser::Error::custom(format!(
                "position ({},{}) has no cell name",
                self.col, self.row
            ))),
        }
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Position::parse_cell_name(&s).map_err(D::Error::custom)
    }
}

/// Quarter-turn direction of a turn block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Turn {
    Left,
    Right,
}

/// Facing of the avatar. On screen, east points right and south points
/// down; a left turn is counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    East,
    South,
    West,
    North,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::East,
        Direction::South,
        Direction::West,
        Direction::North,
    ];

    /// Column and row deltas of a one-cell move in this direction.
    pub fn delta(self) -> (i16, i16) {
        match self {
            Direction::East => (1, 0),
            Direction::South => (0, 1),
            Direction::West => (-1, 0),
            Direction::North => (0, -1),
        }
    }

    pub fn turned(self, turn: Turn) -> Direction {
        match (self, turn) {
            (Direction::East, Turn::Left) => Direction::North,
            (Direction::North, Turn::Left) => Direction::West,
            (Direction::West, Turn::Left) => Direction::South,
            (Direction::South, Turn::Left) => Direction::East,
            (Direction::East, Turn::Right) => Direction::South,
            (Direction::South, Turn::Right) => Direction::West,
            (Direction::West, Turn::Right) => Direction::North,
            (Direction::North, Turn::Right) => Direction::East,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::East => "east",
            Direction::South => "south",
            Direction::West => "west",
            Direction::North => "north",
        }
    }

    /// Overlay character used in the grid text form.
    pub fn marker(self) -> char {
        match self {
            Direction::East => '>',
            Direction::South => 'v',
            Direction::West => '<',
            Direction::North => '^',
        }
    }

    fn from_marker(ch: char) -> Option<Direction> {
        match ch {
            '>' => Some(Direction::East),
            'v' => Some(Direction::South),
            '<' => Some(Direction::West),
            '^' => Some(Direction::North),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a grid cell is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Free,
    Wall,
}

/// Position plus facing; the full state of the avatar between steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AvatarState {
    #[serde(rename = "cell")]
    pub pos: Position,
    pub dir: Direction,
}

impl AvatarState {
    pub fn new(pos: Position, dir: Direction) -> Self {
        AvatarState { pos, dir }
    }
}

impl fmt::Display for AvatarState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} facing {}", self.pos, self.dir)
    }
}

/// Rectangle of cells without a designated goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenGrid {
    width: u8,
    height: u8,
    cells: Vec<CellKind>,
}

impl OpenGrid {
    /// Builds a grid from row-major cells; dimensions must be 2..=8.
    pub fn new(width: u8, height: u8, cells: Vec<CellKind>) -> Result<Self, GridError> {
        if !(MIN_SIDE..=MAX_SIDE).contains(&width) || !(MIN_SIDE..=MAX_SIDE).contains(&height) {
            return Err(GridError::BadDimensions {
                width: width as usize,
                height: height as usize,
            });
        }
        assert_eq!(
            cells.len(),
            width as usize * height as usize,
            "cell vector length must be width * height"
        );
        Ok(OpenGrid {
            width,
            height,
            cells,
        })
    }

    /// All-free grid of the given dimensions.
    pub fn open(width: u8, height: u8) -> Result<Self, GridError> {
        let n = width as usize * height as usize;
        OpenGrid::new(width, height, vec![CellKind::Free; n])
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn height(&self) -> u8 {
        self.height
    }

    pub fn contains(&self, pos: Position) -> bool {
        pos.col < self.width && pos.row < self.height
    }

    pub fn cell(&self, pos: Position) -> Option<CellKind> {
        if self.contains(pos) {
            Some(self.cells[pos.row as usize * self.width as usize + pos.col as usize])
        } else {
            None
        }
    }

    /// True for in-bounds Free cells only.
    pub fn is_free(&self, pos: Position) -> bool {
        self.cell(pos) == Some(CellKind::Free)
    }

    pub fn set_cell(&mut self, pos: Position, kind: CellKind) {
        assert!(self.contains(pos), "cell {pos} is outside the grid");
        self.cells[pos.row as usize * self.width as usize + pos.col as usize] = kind;
    }

    /// Cell one step from `pos` in `dir`, or `None` at the boundary.
    pub fn neighbor(&self, pos: Position, dir: Direction) -> Option<Position> {
        let (dc, dr) = dir.delta();
        let col = pos.col as i16 + dc;
        let row = pos.row as i16 + dr;
        if col < 0 || row < 0 || col >= self.width as i16 || row >= self.height as i16 {
            None
        } else {
            Some(Position::new(col as u8, row as u8))
        }
    }

    /// All positions in reading order.
    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        let (w, h) = (self.width, self.height);
        (0..h).flat_map(move |row| (0..w).map(move |col| Position::new(col, row)))
    }

    /// Free positions in reading order.
    pub fn free_positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.positions().filter(|p| self.is_free(*p))
    }

    /// Parses the text form; goal and avatar markers are rejected.
    pub fn parse(text: &str) -> Result<Self, GridError> {
        let parsed = parse_grid_text(text)?;
        if parsed.goal.is_some() {
            return Err(GridError::UnexpectedGoal);
        }
        if parsed.avatar.is_some() {
            return Err(GridError::UnexpectedAvatar);
        }
        Ok(parsed.open)
    }

    pub fn to_text(&self) -> String {
        render_grid_text(self, None, None)
    }

    /// Promotes this grid by designating a goal cell.
    pub fn with_goal(self, goal: Position) -> Result<Grid, GridError> {
        Grid::new(self, goal)
    }
}

impl Serialize for OpenGrid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for OpenGrid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        OpenGrid::parse(&s).map_err(D::Error::custom)
    }
}

/// Grid with exactly one goal on a Free cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    open: OpenGrid,
    goal: Position,
}

impl Grid {
    /// The goal must be an in-bounds Free cell, and at least one other
    /// Free cell must remain for the avatar to stand on.
    pub fn new(open: OpenGrid, goal: Position) -> Result<Self, GridError> {
        match open.cell(goal) {
            None => return Err(GridError::GoalOutOfBounds(goal)),
            Some(CellKind::Wall) => return Err(GridError::GoalOnWall(goal)),
            Some(CellKind::Free) => {}
        }
        if !open.free_positions().any(|p| p != goal) {
            return Err(GridError::NoFreeCellBesidesGoal);
        }
        Ok(Grid { open, goal })
    }

    pub fn open(&self) -> &OpenGrid {
        &self.open
    }

    pub fn into_open(self) -> OpenGrid {
        self.open
    }

    pub fn goal(&self) -> Position {
        self.goal
    }

    pub fn width(&self) -> u8 {
        self.open.width()
    }

    pub fn height(&self) -> u8 {
        self.open.height()
    }

    pub fn contains(&self, pos: Position) -> bool {
        self.open.contains(pos)
    }

    pub fn cell(&self, pos: Position) -> Option<CellKind> {
        self.open.cell(pos)
    }

    pub fn is_free(&self, pos: Position) -> bool {
        self.open.is_free(pos)
    }

    pub fn neighbor(&self, pos: Position, dir: Direction) -> Option<Position> {
        self.open.neighbor(pos, dir)
    }

    pub fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.open.positions()
    }

    pub fn free_positions(&self) -> impl Iterator<Item = Position> + '_ {
        self.open.free_positions()
    }

    /// A start is a Free cell; standing on the goal is allowed.
    pub fn is_valid_start(&self, state: AvatarState) -> bool {
        self.is_free(state.pos)
    }

    /// Parses the text form; requires a goal marker, rejects avatars.
    pub fn parse(text: &str) -> Result<Self, GridError> {
        let parsed = parse_grid_text(text)?;
        if parsed.avatar.is_some() {
            return Err(GridError::UnexpectedAvatar);
        }
        let goal = parsed.goal.ok_or(GridError::MissingGoal)?;
        Grid::new(parsed.open, goal)
    }

    pub fn to_text(&self) -> String {
        render_grid_text(&self.open, Some(self.goal), None)
    }

    /// Text form with the avatar marker drawn over its cell.
    pub fn to_text_with_avatar(&self, avatar: AvatarState) -> String {
        render_grid_text(&self.open, Some(self.goal), Some(avatar))
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Grid::parse(&s).map_err(D::Error::custom)
    }
}

/// Result of parsing the grid text form: the cells plus whatever
/// markers the text carried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridText {
    pub open: OpenGrid,
    pub goal: Option<Position>,
    pub avatar: Option<AvatarState>,
}

impl GridText {
    /// Requires the goal marker and returns the completed grid.
    pub fn into_grid(self) -> Result<(Grid, Option<AvatarState>), GridError> {
        let goal = self.goal.ok_or(GridError::MissingGoal)?;
        Ok((Grid::new(self.open, goal)?, self.avatar))
    }
}

/// Parses the one-character-per-cell text form. Blank leading and
/// trailing lines are ignored; interior lines must all have the same
/// length. Goal and avatar markers may each appear at most once and
/// both sit on Free cells.
pub fn parse_grid_text(text: &str) -> Result<GridText, GridError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .skip_while(|l| l.trim().is_empty())
        .collect();
    let lines: Vec<&str> = match lines.iter().rposition(|l| !l.trim().is_empty()) {
        Some(last) => lines[..=last].to_vec(),
        None => return Err(GridError::EmptyText),
    };

    let width = lines[0].chars().count();
    let height = lines.len();
    if !(MIN_SIDE as usize..=MAX_SIDE as usize).contains(&width)
        || !(MIN_SIDE as usize..=MAX_SIDE as usize).contains(&height)
    {
        // Report the mismatching line first so a ragged grid is not
        // misdiagnosed as a dimension problem.
        for (i, line) in lines.iter().enumerate() {
            if line.chars().count() != width {
                return Err(GridError::NotRectangular { line: i + 1 });
            }
        }
        return Err(GridError::BadDimensions { width, height });
    }

    let mut cells = Vec::with_capacity(width * height);
    let mut goal = None;
    let mut avatar = None;
    for (row, line) in lines.iter().enumerate() {
        if line.chars().count() != width {
            return Err(GridError::NotRectangular { line: row + 1 });
        }
        for (col, ch) in line.chars().enumerate() {
            let here = Position::new(col as u8, row as u8);
            let kind = match ch {
                '.' => CellKind::Free,
                '#' => CellKind::Wall,
                'G' => {
                    if goal.is_some() {
                        return Err(GridError::MultipleGoals {
                            line: row + 1,
                            col: col + 1,
                        });
                    }
                    goal = Some(here);
                    CellKind::Free
                }
                _ => match Direction::from_marker(ch) {
                    Some(dir) => {
                        if avatar.is_some() {
                            return Err(GridError::MultipleAvatars {
                                line: row + 1,
                                col: col + 1,
                            });
                        }
                        avatar = Some(AvatarState::new(here, dir));
                        CellKind::Free
                    }
                    None => {
                        return Err(GridError::UnknownChar {
                            line: row + 1,
                            col: col + 1,
                            ch,
                        })
                    }
                },
            };
            cells.push(kind);
        }
    }

    Ok(GridText {
        open: OpenGrid::new(width as u8, height as u8, cells)?,
        goal,
        avatar,
    })
}

/// Renders cells back to text. The avatar marker is drawn over its
/// cell, so it hides a goal marker on the same cell.
pub fn render_grid_text(
    open: &OpenGrid,
    goal: Option<Position>,
    avatar: Option<AvatarState>,
) -> String {
    let mut out = String::new();
    for row in 0..open.height() {
        if row > 0 {
            out.push('\n');
        }
        for col in 0..open.width() {
            let here = Position::new(col, row);
            let ch = if avatar.map(|a| a.pos) == Some(here) {
                avatar.unwrap().dir.marker()
            } else if goal == Some(here) {
                'G'
            } else {
                match open.cell(here).unwrap() {
                    CellKind::Free => '.',
                    CellKind::Wall => '#',
                }
            };
            out.push(ch);
        }
    }
    out
}
