//! Multiple-choice item bank: categories, item kinds, payloads,
//! serialization and structural validation.
//!
//! Every item offers four labelled choices with exactly one marked
//! correct. Items carry whatever payload their kind needs (grids, a
//! start state, programs, a wall budget) so that the answer key can be
//! re-derived mechanically; see [`crate::oracle::pick_correct_choice`].

use crate::grid::{AvatarState, Grid, OpenGrid, Position};
use crate::io;
use crate::oracle::{self, CorrectChoice, ItemIntegrityError, MAX_WALL_BUDGET};
use crate::program::Program;
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Schema identifier written into and required from bank files.
pub const BANK_SCHEMA: &str = "ace-bank/1";

/// Paired cognitive levels a test section targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BloomCategory {
    ApplyingAnalyzing,
    AnalyzingEvaluating,
    EvaluatingCreating,
}

impl BloomCategory {
    pub const ALL: [BloomCategory; 3] = [
        BloomCategory::ApplyingAnalyzing,
        BloomCategory::AnalyzingEvaluating,
        BloomCategory::EvaluatingCreating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BloomCategory::ApplyingAnalyzing => "applying_analyzing",
            BloomCategory::AnalyzingEvaluating => "analyzing_evaluating",
            BloomCategory::EvaluatingCreating => "evaluating_creating",
        }
    }

    /// Two-letter prefix used in generated item ids.
    pub fn id_prefix(self) -> &'static str {
        match self {
            BloomCategory::ApplyingAnalyzing => "AA",
            BloomCategory::AnalyzingEvaluating => "AE",
            BloomCategory::EvaluatingCreating => "EC",
        }
    }
}

impl fmt::Display for BloomCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What an item asks the student to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    /// Pick the program that reaches the goal.
    SolutionFinding,
    /// Predict the cell where a given program stops.
    TraceOutcome,
    /// Pick the one program that does not reach the goal.
    BugFinding,
    /// Pick the program that behaves like a reference program.
    EquivalenceJudgment,
    /// Count the avatar placements from which a program succeeds.
    AvatarPlacementCount,
    /// Pick a goal cell that makes a program succeed.
    GoalPlacementDesign,
    /// Count the wall additions that keep a program succeeding.
    WallDesignCount,
    /// Open-ended stem with no machine-checkable answer.
    FreeText,
}

impl ItemKind {
    pub const ALL: [ItemKind; 8] = [
        ItemKind::SolutionFinding,
        ItemKind::TraceOutcome,
        ItemKind::BugFinding,
        ItemKind::EquivalenceJudgment,
        ItemKind::AvatarPlacementCount,
        ItemKind::GoalPlacementDesign,
        ItemKind::WallDesignCount,
        ItemKind::FreeText,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ItemKind::SolutionFinding => "solution_finding",
            ItemKind::TraceOutcome => "trace_outcome",
            ItemKind::BugFinding => "bug_finding",
            ItemKind::EquivalenceJudgment => "equivalence_judgment",
            ItemKind::AvatarPlacementCount => "avatar_placement_count",
            ItemKind::GoalPlacementDesign => "goal_placement_design",
            ItemKind::WallDesignCount => "wall_design_count",
            ItemKind::FreeText => "free_text",
        }
    }

    /// The one category this kind belongs to; `FreeText` fits any.
    pub fn home_category(self) -> Option<BloomCategory> {
        match self {
            ItemKind::SolutionFinding | ItemKind::TraceOutcome => {
                Some(BloomCategory::ApplyingAnalyzing)
            }
            ItemKind::BugFinding | ItemKind::EquivalenceJudgment => {
                Some(BloomCategory::AnalyzingEvaluating)
            }
            ItemKind::AvatarPlacementCount
            | ItemKind::GoalPlacementDesign
            | ItemKind::WallDesignCount => Some(BloomCategory::EvaluatingCreating),
            ItemKind::FreeText => None,
        }
    }

    pub fn admissible_for(self, category: BloomCategory) -> bool {
        self.home_category().is_none_or(|c| c == category)
    }

    pub fn is_machine_checkable(self) -> bool {
        self != ItemKind::FreeText
    }
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Choice label; every item uses A through D exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    A,
    B,
    C,
    D,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::A, Label::B, Label::C, Label::D];

    pub fn index(self) -> usize {
        match self {
            Label::A => 0,
            Label::B => 1,
            Label::C => 2,
            Label::D => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::A => "A",
            Label::B => "B",
            Label::C => "C",
            Label::D => "D",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(Label::A),
            "B" => Ok(Label::B),
            "C" => Ok(Label::C),
            "D" => Ok(Label::D),
            _ => Err(format!("bad choice label '{s}': expected A, B, C or D")),
        }
    }
}

/// Grid payload of an item: either complete with a goal, or open for
/// kinds that ask where the goal could go.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridPayload {
    Complete(Grid),
    Open(OpenGrid),
}

impl GridPayload {
    pub fn complete(&self) -> Option<&Grid> {
        match self {
            GridPayload::Complete(g) => Some(g),
            GridPayload::Open(_) => None,
        }
    }

    pub fn open_grid(&self) -> Option<&OpenGrid> {
        match self {
            GridPayload::Open(o) => Some(o),
            GridPayload::Complete(_) => None,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            GridPayload::Complete(g) => g.to_text(),
            GridPayload::Open(o) => o.to_text(),
        }
    }
}

impl Serialize for GridPayload {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for GridPayload {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        // The goal marker decides which form this is.
        if s.contains('G') {
            Grid::parse(&s).map(GridPayload::Complete).map_err(D::Error::custom)
        } else {
            OpenGrid::parse(&s).map(GridPayload::Open).map_err(D::Error::custom)
        }
    }
}

/// Content of one choice; the JSON field name encodes the variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChoiceContent {
    Program(Program),
    Cell(Position),
    Count(u64),
    Grid(Grid),
    Text(String),
}

impl ChoiceContent {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ChoiceContent::Program(_) => "program",
            ChoiceContent::Cell(_) => "cell",
            ChoiceContent::Count(_) => "count",
            ChoiceContent::Grid(_) => "grid",
            ChoiceContent::Text(_) => "text",
        }
    }
}

/// One labelled choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Choice {
    pub label: Label,
    pub content: ChoiceContent,
}

impl Serialize for Choice {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("label", &self.label)?;
        match &self.content {
            ChoiceContent::Program(p) => map.serialize_entry("program", p)?,
            ChoiceContent::Cell(c) => map.serialize_entry("cell", c)?,
            ChoiceContent::Count(n) => map.serialize_entry("count", n)?,
            ChoiceContent::Grid(g) => map.serialize_entry("grid", g)?,
            ChoiceContent::Text(t) => map.serialize_entry("text", t)?,
        }
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoiceRepr {
    label: Label,
    #[serde(default)]
    program: Option<Program>,
    #[serde(default)]
    cell: Option<Position>,
    #[serde(default)]
    count: Option<u64>,
    #[serde(default)]
    grid: Option<Grid>,
    #[serde(default)]
    text: Option<String>,
}

impl<'de> Deserialize<'de> for Choice {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ChoiceRepr::deserialize(deserializer)?;
        let mut contents = Vec::new();
        if let Some(p) = repr.program {
            contents.push(ChoiceContent::Program(p));
        }
        if let Some(c) = repr.cell {
            contents.push(ChoiceContent::Cell(c));
        }
        if let Some(n) = repr.count {
            contents.push(ChoiceContent::Count(n));
        }
        if let Some(g) = repr.grid {
            contents.push(ChoiceContent::Grid(g));
        }
        if let Some(t) = repr.text {
            contents.push(ChoiceContent::Text(t));
        }
        match contents.len() {
            1 => Ok(Choice {
                label: repr.label,
                content: contents.pop().unwrap(),
            }),
            0 => Err(D::Error::custom(
                "choice needs exactly one of program, cell, count, grid or text",
            )),
            _ => Err(D::Error::custom(format!(
                "choice has {} content fields, expected exactly one",
                contents.len()
            ))),
        }
    }
}

/// One multiple-choice item with the payload its kind needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub id: String,
    pub category: BloomCategory,
    pub kind: ItemKind,
    pub stem: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grids: Vec<GridPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<AvatarState>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub programs: Vec<Program>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_budget: Option<u32>,
    pub choices: Vec<Choice>,
    pub correct: Label,
}

impl Item {
    pub fn choice(&self, label: Label) -> Option<&Choice> {
        self.choices.iter().find(|c| c.label == label)
    }
}

/// Provenance block for generated banks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorInfo {
    pub seed: u64,
    pub shape: [usize; 3],
    pub tool_version: String,
}

/// A named collection of items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemBank {
    pub name: String,
    pub version: String,
    pub generator: Option<GeneratorInfo>,
    pub items: Vec<Item>,
}

impl ItemBank {
    pub fn item(&self, id: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.id == id)
    }

    /// Items per category, in [`BloomCategory::ALL`] order.
    pub fn category_counts(&self) -> [usize; 3] {
        let mut counts = [0usize; 3];
        for item in &self.items {
            counts[BloomCategory::ALL.iter().position(|c| *c == item.category).unwrap()] += 1;
        }
        counts
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BankFile {
    schema: String,
    name: String,
    version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorInfo>,
    items: Vec<Item>,
}

/// Why a bank file could not be loaded or saved.
#[derive(Debug, Error)]
pub enum BankError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("not valid JSON: {message}")]
    Json { message: String },
    #[error("bank schema violation: {message}")]
    Schema { message: String },
}

/// Parses bank JSON. Structural violations, an unknown schema id and
/// duplicate item ids are all rejected here; softer quality checks
/// live in [`validate_bank`].
pub fn bank_from_json(json: &str) -> Result<ItemBank, BankError> {
    let file: BankFile = serde_json::from_str(json).map_err(|e| {
        if e.classify() == serde_json::error::Category::Data {
            BankError::Schema {
                message: e.to_string(),
            }
        } else {
            BankError::Json {
                message: e.to_string(),
            }
        }
    })?;
    if file.schema != BANK_SCHEMA {
        return Err(BankError::Schema {
            message: format!("unknown schema '{}', expected '{BANK_SCHEMA}'", file.schema),
        });
    }
    let mut seen = BTreeSet::new();
    for item in &file.items {
        if !seen.insert(item.id.as_str()) {
            return Err(BankError::Schema {
                message: format!("duplicate item id '{}'", item.id),
            });
        }
    }
    Ok(ItemBank {
        name: file.name,
        version: file.version,
        generator: file.generator,
        items: file.items,
    })
}

/// Pretty-printed bank JSON with a trailing newline.
pub fn bank_to_json(bank: &ItemBank) -> String {
    let file = BankFile {
        schema: BANK_SCHEMA.to_string(),
        name: bank.name.clone(),
        version: bank.version.clone(),
        generator: bank.generator.clone(),
        items: bank.items.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("bank serialization cannot fail");
    s.push('\n');
    s
}

pub fn load_bank(path: &Path) -> Result<ItemBank, BankError> {
    let json = std::fs::read_to_string(path).map_err(|source| BankError::Read {
        path: path.display().to_string(),
        source,
    })?;
    bank_from_json(&json)
}

/// Saves atomically: the file is complete or untouched, never partial.
pub fn save_bank(bank: &ItemBank, path: &Path) -> Result<(), BankError> {
    io::write_atomic(path, bank_to_json(bank).as_bytes()).map_err(|source| BankError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Machine-readable reason a finding was raised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingCode {
    EmptyId,
    EmptyStem,
    ChoiceCount,
    LabelSet,
    DuplicateChoice,
    KindNotAdmissible,
    WrongChoiceType,
    MissingPayload,
    BadPayload,
    WallBudgetTooLarge,
    AnswerKeyMismatch,
    NoCorrectChoice,
    MultipleCorrectChoices,
    DuplicateItemId,
}

/// One problem found while validating an item or bank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub item_id: Option<String>,
    pub code: FindingCode,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.item_id {
            Some(id) => write!(f, "item '{}': {}", id, self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Everything validation had to say; empty means clean.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    fn push(&mut self, item_id: Option<&str>, code: FindingCode, message: impl Into<String>) {
        self.findings.push(Finding {
            item_id: item_id.map(str::to_string),
            code,
            message: message.into(),
        });
    }
}

/// Expected choice content types per kind. TraceOutcome accepts text
/// choices so a stem can offer outcome descriptions instead of cells,
/// at the cost of machine checking.
fn expected_choice_types(kind: ItemKind) -> &'static [&'static str] {
    match kind {
        ItemKind::SolutionFinding | ItemKind::BugFinding | ItemKind::EquivalenceJudgment => {
            &["program"]
        }
        ItemKind::TraceOutcome => &["cell", "text"],
        ItemKind::AvatarPlacementCount | ItemKind::WallDesignCount => &["count"],
        ItemKind::GoalPlacementDesign => &["cell"],
        ItemKind::FreeText => &["text"],
    }
}

/// Payload requirements per kind, reported as findings when missing.
fn check_payload(item: &Item, report: &mut ValidationReport) {
    let id = Some(item.id.as_str());
    let needs_complete_grid = !matches!(item.kind, ItemKind::GoalPlacementDesign | ItemKind::FreeText);
    let needs_start = !matches!(item.kind, ItemKind::AvatarPlacementCount | ItemKind::FreeText);
    let needs_program = matches!(
        item.kind,
        ItemKind::TraceOutcome
            | ItemKind::EquivalenceJudgment
            | ItemKind::AvatarPlacementCount
            | ItemKind::GoalPlacementDesign
            | ItemKind::WallDesignCount
    );

    if needs_complete_grid && item.grids.first().and_then(GridPayload::complete).is_none() {
        report.push(
            id,
            FindingCode::MissingPayload,
            format!("{} needs a complete grid as grids[0]", item.kind),
        );
    }
    if item.kind == ItemKind::GoalPlacementDesign
        && item.grids.first().and_then(GridPayload::open_grid).is_none()
    {
        report.push(
            id,
            FindingCode::MissingPayload,
            "goal_placement_design needs a goal-less grid as grids[0]",
        );
    }
    if item.kind == ItemKind::EquivalenceJudgment
        && item.grids.iter().any(|g| g.complete().is_none())
    {
        report.push(
            id,
            FindingCode::BadPayload,
            "equivalence_judgment grids must all be complete",
        );
    }
    if needs_start && item.start.is_none() {
        report.push(
            id,
            FindingCode::MissingPayload,
            format!("{} needs a start state", item.kind),
        );
    }
    if needs_program && item.programs.is_empty() {
        report.push(
            id,
            FindingCode::MissingPayload,
            format!("{} needs a program in programs[0]", item.kind),
        );
    }
    match (item.kind, item.wall_budget) {
        (ItemKind::WallDesignCount, None) => report.push(
            id,
            FindingCode::MissingPayload,
            "wall_design_count needs a wall_budget",
        ),
        (_, Some(b)) if b > MAX_WALL_BUDGET => report.push(
            id,
            FindingCode::WallBudgetTooLarge,
            format!("wall_budget {b} exceeds the allowed {MAX_WALL_BUDGET}"),
        ),
        _ => {}
    }
    if let (Some(start), Some(grid)) = (item.start, item.grids.first().and_then(GridPayload::complete)) {
        if !grid.is_free(start.pos) {
            report.push(
                id,
                FindingCode::BadPayload,
                format!("start {} is not on a free cell of grids[0]", start),
            );
        }
    }
    if let (Some(start), Some(open)) = (item.start, item.grids.first().and_then(GridPayload::open_grid)) {
        if !open.is_free(start.pos) {
            report.push(
                id,
                FindingCode::BadPayload,
                format!("start {} is not on a free cell of grids[0]", start),
            );
        }
    }
}

/// Structural checks plus, for machine-checkable kinds, agreement
/// between the stored answer key and the oracle-derived one.
pub fn validate_item(item: &Item) -> ValidationReport {
    let mut report = ValidationReport::default();
    let id = Some(item.id.as_str());

    if item.id.trim().is_empty() {
        report.push(None, FindingCode::EmptyId, "item has an empty id");
    }
    if item.stem.trim().is_empty() {
        report.push(id, FindingCode::EmptyStem, "item has an empty stem");
    }

    if item.choices.len() != 4 {
        report.push(
            id,
            FindingCode::ChoiceCount,
            format!("item has {} choices, expected 4", item.choices.len()),
        );
    }
    let labels: Vec<Label> = item.choices.iter().map(|c| c.label).collect();
    let mut sorted = labels.clone();
    sorted.sort();
    sorted.dedup();
    if item.choices.len() == 4 && sorted != Label::ALL {
        report.push(
            id,
            FindingCode::LabelSet,
            "choice labels must be exactly A, B, C and D",
        );
    }
    for (i, a) in item.choices.iter().enumerate() {
        for b in item.choices.iter().skip(i + 1) {
            if a.content == b.content {
                report.push(
                    id,
                    FindingCode::DuplicateChoice,
                    format!("choices {} and {} have identical content", a.label, b.label),
                );
            }
        }
    }

    if !item.kind.admissible_for(item.category) {
        report.push(
            id,
            FindingCode::KindNotAdmissible,
            format!("kind {} is not admissible in category {}", item.kind, item.category),
        );
    }

    let allowed = expected_choice_types(item.kind);
    for choice in &item.choices {
        if !allowed.contains(&choice.content.kind_name()) {
            report.push(
                id,
                FindingCode::WrongChoiceType,
                format!(
                    "choice {} carries {} content, but {} expects {}",
                    choice.label,
                    choice.content.kind_name(),
                    item.kind,
                    allowed.join(" or ")
                ),
            );
        }
    }

    check_payload(item, &mut report);

    // Only consult the oracle once the structure is sound enough for
    // it to mean something.
    if report.is_clean() {
        match oracle::pick_correct_choice(item) {
            Ok(CorrectChoice::Label(label)) => {
                if label != item.correct {
                    report.push(
                        id,
                        FindingCode::AnswerKeyMismatch,
                        format!(
                            "stored answer key says {} but the oracle verifies {}",
                            item.correct, label
                        ),
                    );
                }
            }
            Ok(CorrectChoice::NotMachineCheckable) => {}
            Err(ItemIntegrityError::NoCorrectChoice { .. }) => {
                report.push(
                    id,
                    FindingCode::NoCorrectChoice,
                    "no choice verifies as correct",
                );
            }
            Err(ItemIntegrityError::MultipleCorrectChoices { labels, .. }) => {
                let names: Vec<&str> = labels.iter().map(|l| l.name()).collect();
                report.push(
                    id,
                    FindingCode::MultipleCorrectChoices,
                    format!("choices {} all verify as correct", names.join(", ")),
                );
            }
            Err(ItemIntegrityError::MissingPayload { missing, .. }) => {
                report.push(
                    id,
                    FindingCode::MissingPayload,
                    format!("cannot check answer key: missing {missing}"),
                );
            }
            Err(ItemIntegrityError::BadPayload { message, .. }) => {
                report.push(
                    id,
                    FindingCode::BadPayload,
                    format!("cannot check answer key: {message}"),
                );
            }
        }
    }

    report
}

/// Validates every item and adds bank-level findings.
pub fn validate_bank(bank: &ItemBank) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = BTreeSet::new();
    for item in &bank.items {
        if !seen.insert(item.id.as_str()) {
            report.push(
                Some(item.id.as_str()),
                FindingCode::DuplicateItemId,
                format!("item id '{}' appears more than once", item.id),
            );
        }
        report.findings.extend(validate_item(item).findings);
    }
    report
}

/// 1 for the keyed answer, 0 for anything else.
pub fn score_response(item: &Item, response: Label) -> u8 {
    u8::from(response == item.correct)
}

/// Answer key of the reference 21-item form, in administration order.
/// Items Q01-Q07 sit in applying_analyzing, Q08-Q14 in
/// analyzing_evaluating and Q15-Q21 in evaluating_creating.
pub const REFERENCE_ANSWER_KEY: [(&str, Label); 21] = [
    ("Q01", Label::C),
    ("Q02", Label::A),
    ("Q03", Label::D),
    ("Q04", Label::D),
    ("Q05", Label::B),
    ("Q06", Label::C),
    ("Q07", Label::B),
    ("Q08", Label::C),
    ("Q09", Label::B),
    ("Q10", Label::D),
    ("Q11", Label::D),
    ("Q12", Label::B),
    ("Q13", Label::C),
    ("Q14", Label::B),
    ("Q15", Label::D),
    ("Q16", Label::C),
    ("Q17", Label::D),
    ("Q18", Label::C),
    ("Q19", Label::B),
    ("Q20", Label::B),
    ("Q21", Label::A),
];

/// Keyed answer of a reference-form item, by id.
pub fn reference_key(item_id: &str) -> Option<Label> {
    REFERENCE_ANSWER_KEY
        .iter()
        .find(|(id, _)| *id == item_id)
        .map(|(_, label)| *label)
}

/// Category of a reference-form item, by its position in the form.
pub fn reference_category(item_id: &str) -> Option<BloomCategory> {
    let idx = REFERENCE_ANSWER_KEY.iter().position(|(id, _)| *id == item_id)?;
    Some(BloomCategory::ALL[idx / 7])
}
