//! Command-line front door: run programs on grids, count task
//! configurations, generate item banks, validate them, and analyze
//! scored responses.
//!
//! Exit codes: 0 success, 1 validation findings, 2 usage or input
//! error, 3 internal error. With `--json`, stdout always carries a
//! single parseable JSON document; diagnostics go to stderr.

use ace_core::gen::generate_bank;
use ace_core::grid::parse_grid_text;
use ace_core::io::{sha256_file, write_atomic};
use ace_core::item::{bank_from_json, validate_bank, BankError, Finding, FindingCode, ItemBank};
use ace_core::oracle::{
    count_wall_configurations, enumerate_avatar_starts, enumerate_goal_cells,
};
use ace_core::stats::matrix::responses_from_csv;
use ace_core::stats::report::InputFile;
use ace_core::stats::analyze;
use ace_core::{
    execute, parse_program, AvatarState, Direction, Grid, OpenGrid, Outcome, Position, Program,
    DEFAULT_STEP_LIMIT,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ace",
    version,
    about = "Toolkit for maze block-programming assessment items"
)]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a program on a grid and report the outcome.
    Run {
        /// Grid text file; mark the avatar with > v < ^ or pass --start.
        grid: PathBuf,
        /// Program text file.
        program: PathBuf,
        /// Print every consumed step.
        #[arg(long)]
        trace: bool,
        /// Step budget before the run is cut off.
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
        step_limit: u32,
        /// Start as CELL:DIR, for example b2:east; overrides the marker.
        #[arg(long)]
        start: Option<String>,
    },
    /// Count grid configurations that let the program succeed.
    Enumerate {
        grid: PathBuf,
        program: PathBuf,
        /// What to vary across candidates.
        #[arg(long, value_enum)]
        vary: Vary,
        /// Most walls to add in walls mode.
        #[arg(long, default_value_t = 1)]
        budget: u32,
        /// Start as CELL:DIR; overrides the marker.
        #[arg(long)]
        start: Option<String>,
    },
    /// Generate a seeded, oracle-checked item bank.
    Generate {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Items per category as A,B,C.
        #[arg(long, value_parser = parse_shape, default_value = "7,7,7")]
        shape: [usize; 3],
        /// Bank file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a bank file; findings exit with status 1.
    Validate { bank: PathBuf },
    /// Score a response CSV against a bank and write the analysis report.
    Analyze {
        /// CSV with student_id, optional demographics, then one column per item.
        responses: PathBuf,
        #[arg(long)]
        bank: PathBuf,
        /// Report file to write.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Vary {
    /// All start cells and facings, goal fixed.
    Avatar,
    /// All goal cells, start fixed.
    Goal,
    /// Wall additions up to the budget.
    Walls,
}

fn parse_shape(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated counts, for example 7,7,7".into());
    }
    let mut shape = [0usize; 3];
    for (slot, part) in shape.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("'{part}' is not a count"))?;
    }
    Ok(shape)
}

/// A failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match dispatch(cli.command, json) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn dispatch(command: Command, json: bool) -> Result<u8, Failure> {
    match command {
        Command::Run {
            grid,
            program,
            trace,
            step_limit,
            start,
        } => cmd_run(&grid, &program, trace, step_limit, start.as_deref(), json),
        Command::Enumerate {
            grid,
            program,
            vary,
            budget,
            start,
        } => cmd_enumerate(&grid, &program, vary, budget, start.as_deref(), json),
        Command::Generate { seed, shape, out } => cmd_generate(seed, shape, &out, json),
        Command::Validate { bank } => cmd_validate(&bank, json),
        Command::Analyze {
            responses,
            bank,
            out,
        } => cmd_analyze(&responses, &bank, &out, json),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    parse_program(&read_file(path)?)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parse_start_flag(s: &str) -> Result<AvatarState, Failure> {
    let err = || {
        Failure::usage(format!(
            "start '{s}' should look like CELL:DIR, for example b2:east"
        ))
    };
    let (cell, dir) = s.split_once([':', ',', ' ']).ok_or_else(err)?;
    let pos = Position::parse_cell_name(cell.trim()).map_err(|_| err())?;
    let dir = match dir.trim().to_ascii_lowercase().as_str() {
        "east" => Direction::East,
        "south" => Direction::South,
        "west" => Direction::West,
        "north" => Direction::North,
        _ => return Err(err()),
    };
    Ok(AvatarState::new(pos, dir))
}

/// Grid pieces a subcommand may need, read from one text file.
struct GridInput {
    open: OpenGrid,
    goal: Option<Position>,
    start: Option<AvatarState>,
}

fn load_grid(path: &Path, start_flag: Option<&str>) -> Result<GridInput, Failure> {
    let text = read_file(path)?;
    let parsed = parse_grid_text(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let start = match start_flag {
        Some(s) => Some(parse_start_flag(s)?),
        None => parsed.avatar,
    };
    Ok(GridInput {
        open: parsed.open,
        goal: parsed.goal,
        start,
    })
}

impl GridInput {
    fn require_goal(&self, path: &Path) -> Result<Grid, Failure> {
        let goal = self.goal.ok_or_else(|| {
            Failure::usage(format!("{}: the grid needs a G goal cell", path.display()))
        })?;
        Grid::new(self.open.clone(), goal)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    fn require_start(&self, path: &Path) -> Result<AvatarState, Failure> {
        self.start.ok_or_else(|| {
            Failure::usage(format!(
                "{}: mark the avatar with > v < ^ or pass --start CELL:DIR",
                path.display()
            ))
        })
    }
}

#[derive(Serialize)]
struct RunOutput<'a> {
    outcome: &'a Outcome,
    #[serde(rename = "final")]
    end: AvatarState,
    step_limit: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a [ace_core::TraceEvent]>,
}

fn cell_name(pos: Position) -> String {
    pos.cell_name().unwrap_or_else(|| format!("{pos:?}"))
}

fn cmd_run(
    grid_path: &Path,
    program_path: &Path,
    trace: bool,
    step_limit: u32,
    start_flag: Option<&str>,
    json: bool,
) -> Result<u8, Failure> {
    let input = load_grid(grid_path, start_flag)?;
    let grid = input.require_goal(grid_path)?;
    let start = input.require_start(grid_path)?;
    let program = load_program(program_path)?;
    let run = execute(&grid, start, &program, step_limit)
        .map_err(|e| Failure::usage(format!("invalid start: {e}")))?;
    let end = run.final_state(start);

    if json {
        let payload = RunOutput {
            outcome: &run.outcome,
            end,
            step_limit,
            trace: trace.then_some(run.trace.as_slice()),
        };
        println!("{}", serde_json::to_string_pretty(&payload).expect("serializable"));
        return Ok(0);
    }

    if trace {
        for event in &run.trace {
            println!(
                "{:>4}  {:<12} -> {} {}",
                event.step,
                action_name(&event.action),
                cell_name(event.state_after.pos),
                event.state_after.dir.name()
            );
        }
    }
    match &run.outcome {
        Outcome::GoalReached { at_step } => {
            println!("GoalReached step={at_step} at={}", cell_name(end.pos));
        }
        Outcome::Crashed { at_step, attempted } => {
            let into = match attempted {
                ace_core::CrashTarget::Wall(pos) => cell_name(*pos),
                ace_core::CrashTarget::Boundary => "boundary".to_string(),
            };
            println!(
                "Crashed step={at_step} into={into} at={}",
                cell_name(end.pos)
            );
        }
        Outcome::StepLimitExceeded => {
            println!(
                "StepLimitExceeded limit={step_limit} at={}",
                cell_name(end.pos)
            );
        }
        Outcome::IncompleteStop { final_state } => {
            println!(
                "IncompleteStop at={} facing={}",
                cell_name(final_state.pos),
                final_state.dir.name()
            );
        }
    }
    Ok(0)
}

fn action_name(action: &ace_core::Action) -> String {
    match action {
        ace_core::Action::Move => "move".to_string(),
        ace_core::Action::TurnLeft => "turn_left".to_string(),
        ace_core::Action::TurnRight => "turn_right".to_string(),
        ace_core::Action::CondEval { cond, result } => format!("{cond}={result}"),
    }
}

#[derive(Serialize)]
#[serde(tag = "vary", rename_all = "snake_case")]
enum EnumerateOutput {
    Avatar {
        count: usize,
        starts: Vec<AvatarState>,
    },
    Goal {
        count: usize,
        cells: Vec<String>,
    },
    Walls {
        budget: u32,
        count: u64,
    },
}

fn cmd_enumerate(
    grid_path: &Path,
    program_path: &Path,
    vary: Vary,
    budget: u32,
    start_flag: Option<&str>,
    json: bool,
) -> Result<u8, Failure> {
    let input = load_grid(grid_path, start_flag)?;
    let program = load_program(program_path)?;

    let output = match vary {
        Vary::Avatar => {
            let grid = input.require_goal(grid_path)?;
            let starts = enumerate_avatar_starts(&grid, &program);
            EnumerateOutput::Avatar {
                count: starts.len(),
                starts: starts.into_iter().collect(),
            }
        }
        Vary::Goal => {
            let start = input.require_start(grid_path)?;
            let cells = enumerate_goal_cells(&input.open, start, &program)
                .map_err(|e| Failure::usage(e.to_string()))?;
            EnumerateOutput::Goal {
                count: cells.len(),
                cells: cells.into_iter().map(cell_name).collect(),
            }
        }
        Vary::Walls => {
            let grid = input.require_goal(grid_path)?;
            let start = input.require_start(grid_path)?;
            let count = count_wall_configurations(&grid, start, &program, budget)
                .map_err(|e| Failure::usage(e.to_string()))?;
            EnumerateOutput::Walls { budget, count }
        }
    };

    if json {
        println!("{}", serde_json::to_string_pretty(&output).expect("serializable"));
        return Ok(0);
    }
    match output {
        EnumerateOutput::Avatar { count, starts } => {
            println!("count {count}");
            for s in starts {
                println!("{} {}", cell_name(s.pos), s.dir.name());
            }
        }
        EnumerateOutput::Goal { count, cells } => {
            println!("count {count}");
            for c in cells {
                println!("{c}");
            }
        }
        EnumerateOutput::Walls { budget, count } => {
            println!("count {count} (budget {budget})");
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct GenerateOutput {
    out: String,
    seed: u64,
    shape: [usize; 3],
    items: usize,
    kinds: BTreeMap<String, usize>,
}

fn cmd_generate(seed: u64, shape: [usize; 3], out: &Path, json: bool) -> Result<u8, Failure> {
    let bank = generate_bank(seed, shape).map_err(|e| Failure::internal(e.to_string()))?;
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    for item in &bank.items {
        *kinds.entry(item.kind.to_string()).or_insert(0) += 1;
    }
    save_bank_file(&bank, out)?;

    if json {
        let payload = GenerateOutput {
            out: out.display().to_string(),
            seed,
            shape,
            items: bank.items.len(),
            kinds,
        };
        println!("{}", serde_json::to_string_pretty(&payload).expect("serializable"));
    } else {
        let [aa, ae, ec] = bank.category_counts();
        println!(
            "wrote {} with {} items (AA {aa}, AE {ae}, EC {ec}) from seed {seed}",
            out.display(),
            bank.items.len()
        );
        for (kind, n) in kinds {
            println!("  {kind}: {n}");
        }
    }
    Ok(0)
}

fn save_bank_file(bank: &ItemBank, out: &Path) -> Result<(), Failure> {
    ace_core::item::save_bank(bank, out)
        .map_err(|e| Failure::internal(format!("cannot write {}: {e}", out.display())))
}

#[derive(Serialize)]
struct ValidateOutput {
    bank: String,
    clean: bool,
    findings: Vec<Finding>,
}

fn cmd_validate(bank_path: &Path, json: bool) -> Result<u8, Failure> {
    let text = read_file(bank_path)?;
    let (findings, bank_name) = match bank_from_json(&text) {
        Ok(bank) => (validate_bank(&bank).findings, bank.name),
        Err(BankError::Schema { message }) => (
            vec![Finding {
                item_id: None,
                code: FindingCode::BadPayload,
                message: format!("schema violation: {message}"),
            }],
            String::new(),
        ),
        Err(e) => return Err(Failure::usage(format!("{}: {e}", bank_path.display()))),
    };

    let clean = findings.is_empty();
    if json {
        let payload = ValidateOutput {
            bank: bank_name,
            clean,
            findings,
        };
        println!("{}", serde_json::to_string_pretty(&payload).expect("serializable"));
    } else if clean {
        println!("{}: no findings", bank_path.display());
    } else {
        for finding in &findings {
            println!("{finding}");
        }
        println!("{} finding(s)", findings.len());
    }
    Ok(u8::from(!clean))
}

#[derive(Serialize)]
struct AnalyzeOutput {
    out: String,
    n_persons: usize,
    n_items: usize,
    alpha_total: f64,
    person_reliability: f64,
    rasch_converged: bool,
    notes: usize,
}

fn cmd_analyze(
    responses_path: &Path,
    bank_path: &Path,
    out: &Path,
    json: bool,
) -> Result<u8, Failure> {
    let csv_text = read_file(responses_path)?;
    let (matrix, meta) = responses_from_csv(&csv_text)
        .map_err(|e| Failure::usage(format!("{}: {e}", responses_path.display())))?;
    let bank_text = read_file(bank_path)?;
    let bank = bank_from_json(&bank_text)
        .map_err(|e| Failure::usage(format!("{}: {e}", bank_path.display())))?;

    let mut report = analyze(&matrix, &meta, &bank).map_err(|e| Failure::usage(e.to_string()))?;
    report.inputs = vec![
        input_file("responses", responses_path)?,
        input_file("bank", bank_path)?,
    ];
    write_atomic(out, report.to_json().as_bytes())
        .map_err(|e| Failure::internal(format!("cannot write {}: {e}", out.display())))?;

    if json {
        let payload = AnalyzeOutput {
            out: out.display().to_string(),
            n_persons: report.descriptive.n_persons,
            n_items: report.descriptive.n_items,
            alpha_total: report.descriptive.alpha_total,
            person_reliability: report.rasch.person_reliability,
            rasch_converged: report.rasch.converged,
            notes: report.notes.len(),
        };
        println!("{}", serde_json::to_string_pretty(&payload).expect("serializable"));
    } else {
        println!(
            "analyzed {} persons x {} items; alpha {:.3}, person reliability {:.3}, \
             Rasch {} in {} sweeps; report written to {}",
            report.descriptive.n_persons,
            report.descriptive.n_items,
            report.descriptive.alpha_total,
            report.rasch.person_reliability,
            if report.rasch.converged {
                "converged"
            } else {
                "did not converge"
            },
            report.rasch.sweeps,
            out.display()
        );
        for note in &report.notes {
            println!("note: {note}");
        }
    }
    Ok(0)
}

fn input_file(role: &str, path: &Path) -> Result<InputFile, Failure> {
    Ok(InputFile {
        role: role.to_string(),
        path: path.display().to_string(),
        sha256: sha256_file(path)
            .map_err(|e| Failure::usage(format!("cannot hash {}: {e}", path.display())))?,
    })
}
