//! C interface over the assessment toolkit.
//!
//! Grids and programs travel through opaque handles; everything
//! else crosses the boundary as UTF-8 strings, JSON documents, or
//! plain numbers. Every function returns an [`AceStatus`]; on any
//! failure the thread-local error message is set and can be fetched
//! with [`ace_last_error_message`]. Strings returned through out
//! parameters belong to the caller and must be released with
//! [`ace_string_free`]; handles have their own free functions.

use ace_core::gen::generate_bank;
use ace_core::grid::{parse_grid_text, render_grid_text, GridText};
use ace_core::item::{bank_from_json, bank_to_json, validate_bank, BankError};
use ace_core::oracle::{
    count_wall_configurations, enumerate_avatar_starts, enumerate_goal_cells,
};
use ace_core::stats::matrix::responses_from_csv;
use ace_core::stats::analyze;
use ace_core::{execute, parse_program, Grid, Program, DEFAULT_STEP_LIMIT};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;
use std::sync::OnceLock;

/// Result of every call; anything but `Ok` leaves a message behind
/// [`ace_last_error_message`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AceStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    Utf8 = 2,
    /// Grid, program, or JSON text failed to parse.
    Parse = 3,
    /// Parsed input misses a needed piece or breaks an invariant.
    Invalid = 4,
    /// Program execution was rejected, for example a bad start.
    Exec = 5,
    /// An enumeration refused to run, for example a budget overrun.
    Enumeration = 6,
    /// Item generation gave up or was asked for the impossible.
    Generation = 7,
    /// The statistics could not be computed from the data.
    Analysis = 8,
    Internal = 9,
}

/// Opaque parsed grid text: cells plus optional goal and avatar
/// markers.
pub struct AceGrid {
    text: GridText,
}

/// Opaque parsed program.
pub struct AceProgram {
    program: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: AceStatus, message: impl Display) -> AceStatus {
    let text = message.to_string();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).ok();
    });
    status
}

fn give_string(value: String, out: *mut *mut c_char) -> AceStatus {
    match CString::new(value) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            AceStatus::Ok
        }
        Err(_) => fail(AceStatus::Internal, "output contained a NUL byte"),
    }
}

unsafe fn want_str<'a>(ptr: *const c_char) -> Result<&'a str, AceStatus> {
    if ptr.is_null() {
        return Err(fail(AceStatus::NullArgument, "a string argument is null"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| fail(AceStatus::Utf8, format!("input is not UTF-8: {e}")))
}

unsafe fn want_ref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, AceStatus> {
    ptr.as_ref()
        .ok_or_else(|| fail(AceStatus::NullArgument, format!("{what} handle is null")))
}

fn want_out<T>(out: *mut T) -> Result<(), AceStatus> {
    if out.is_null() {
        Err(fail(AceStatus::NullArgument, "the out parameter is null"))
    } else {
        Ok(())
    }
}

/// Grid with goal and start, assembled from a parsed handle.
fn complete(grid: &AceGrid) -> Result<(Grid, ace_core::AvatarState), AceStatus> {
    let goal = grid
        .text
        .goal
        .ok_or_else(|| fail(AceStatus::Invalid, "the grid has no G goal marker"))?;
    let start = grid
        .text
        .avatar
        .ok_or_else(|| fail(AceStatus::Invalid, "the grid has no avatar marker (> v < ^)"))?;
    let grid = Grid::new(grid.text.open.clone(), goal)
        .map_err(|e| fail(AceStatus::Invalid, e))?;
    Ok((grid, start))
}

/// Version of the toolkit as a static string; never free it.
#[no_mangle]
pub extern "C" fn ace_version() -> *const c_char {
    static VERSION: OnceLock<CString> = OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(ace_core::TOOL_VERSION).expect("version has no NUL"))
        .as_ptr()
}

/// Copy of the message of the most recent failure on this thread,
/// or null when nothing failed yet. Free it with
/// [`ace_string_free`].
#[no_mangle]
pub extern "C" fn ace_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null_mut(), |c| c.clone().into_raw())
    })
}

/// Releases a string returned through an out parameter.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ace_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses grid text into a handle.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to
/// writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn ace_grid_parse(
    text: *const c_char,
    out: *mut *mut AceGrid,
) -> AceStatus {
    if let Err(status) = want_out(out) {
        return status;
    }
    let text = match want_str(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_grid_text(text) {
        Ok(parsed) => {
            *out = Box::into_raw(Box::new(AceGrid { text: parsed }));
            AceStatus::Ok
        }
        Err(e) => fail(AceStatus::Parse, e),
    }
}

/// Releases a grid handle.
///
/// # Safety
/// `grid` must come from [`ace_grid_parse`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ace_grid_free(grid: *mut AceGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Renders a grid handle back to its text form.
///
/// # Safety
/// `grid` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ace_grid_to_text(
    grid: *const AceGrid,
    out: *mut *mut c_char,
) -> AceStatus {
    if let Err(status) = want_out(out) {
        return status;
    }
    let grid = match want_ref(grid, "grid") {
        Ok(g) => g,
        Err(status) => return status,
    };
    give_string(
        render_grid_text(&grid.text.open, grid.text.goal, grid.text.avatar),
        out,
    )
}

/// Parses program text into a handle.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to
/// writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn ace_program_parse(
    text: *const c_char,
    out: *mut *mut AceProgram,
) -> AceStatus {
    if let Err(status) = want_out(out) {
        return status;
    }
    let text = match want_str(text) {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_program(text) {
        Ok(program) => {
            *out = Box::into_raw(Box::new(AceProgram { program }));
            AceStatus::Ok
        }
        Err(e) => fail(AceStatus::Parse, e),
    }
}

/// Releases a program handle.
///
/// # Safety
/// `program` must come from [`ace_program_parse`] and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn ace_program_free(program: *mut AceProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Canonical text of a program handle.
///
/// # Safety
/// `program` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ace_program_to_text(
    program: *const AceProgram,
    out: *mut *mut c_char,
) -> AceStatus {
    if let Err(status) = want_out(out) {
        return status;
    }
    let program = match want_ref(program, "program") {
        Ok(p) => p,
        Err(status) => return status,
    };
    give_string(program.program.to_text(), out)
}

/// Runs the program on the grid, which needs both a goal and an
/// avatar marker. `step_limit` 0 means the default of 1000. Writes
/// a JSON document with the outcome, the final state, and the
/// trace.
///
/// # Safety
/// `grid` and `program` must be live handles and `out_json`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ace_run_json(
    grid: *const AceGrid,
    program: *const AceProgram,
    step_limit: u32,
    out_json: *mut *mut c_char,
) -> AceStatus {
    if let Err(status) = want_out(out_json) {
        return status;
    }
    let (grid, program) = match (want_ref(grid, "grid"), want_ref(program, "program")) {
        (Ok(g), Ok(p)) => (g, p),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let (grid, start) = match complete(grid) {
        Ok(pair) => pair,
        Err(status) => return status,
    };
    let limit = if step_limit == 0 {
        DEFAULT_STEP_LIMIT
    } else {
        step_limit
    };
    let run = match execute(&grid, start, &program.program, limit) {
        Ok(run) => run,
        Err(e) => return fail(AceStatus::Exec, e),
    };
    let payload = serde_json::json!({
        "outcome": run.outcome,
        "final": run.final_state(start),
        "step_limit": limit,
        "trace": run.trace,
    });
    give_string(payload.to_string(), out_json)
}

/// Counts and lists every avatar placement from which the program
/// reaches the goal. The grid needs a goal marker. Writes
/// `{"count": n, "starts": [{"cell": "...", "dir": "..."}]}`.
///
/// # Safety
/// `grid` and `program` must be live handles and `out_json`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ace_enumerate_avatar_starts_json(
    grid: *const AceGrid,
    program: *const AceProgram,
    out_json: *mut *mut c_char,
) -> AceStatus {
    if let Err(status) = want_out(out_json) {
        return status;
    }
    let (grid, program) = match (want_ref(grid, "grid"), want_ref(program, "program")) {
        (Ok(g), Ok(p)) => (g, p),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let goal = match grid.text.goal {
        Some(goal) => goal,
        None => return fail(AceStatus::Invalid, "the grid has no G goal marker"),
    };
    let complete = match Grid::new(grid.text.open.clone(), goal) {
        Ok(g) => g,
        Err(e) => return fail(AceStatus::Invalid, e),
    };
    let starts = enumerate_avatar_starts(&complete, &program.program);
    let payload = serde_json::json!({
        "count": starts.len(),
        "starts": starts,
    });
    give_string(payload.to_string(), out_json)
}

/// Lists the goal cells the program can be sent to from the grid's
/// avatar marker. Writes `{"count": n, "cells": ["b2", ...]}`.
///
/// # Safety
/// `grid` and `program` must be live handles and `out_json`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ace_enumerate_goal_cells_json(
    grid: *const AceGrid,
    program: *const AceProgram,
    out_json: *mut *mut c_char,
) -> AceStatus {
    if let Err(status) = want_out(out_json) {
        return status;
    }
    let (grid, program) = match (want_ref(grid, "grid"), want_ref(program, "program")) {
        (Ok(g), Ok(p)) => (g, p),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let start = match grid.text.avatar {
        Some(start) => start,
        None => return fail(AceStatus::Invalid, "the grid has no avatar marker (> v < ^)"),
    };
    let cells = match enumerate_goal_cells(&grid.text.open, start, &program.program) {
        Ok(cells) => cells,
        Err(e) => return fail(AceStatus::Enumeration, e),
    };
    let names: Vec<String> = cells
        .iter()
        .filter_map(|p| p.cell_name())
        .collect();
    let payload = serde_json::json!({
        "count": names.len(),
        "cells": names,
    });
    give_string(payload.to_string(), out_json)
}

/// Counts the ways to add at most `budget` walls while the program
/// still succeeds. The grid needs goal and avatar markers.
///
/// # Safety
/// `grid` and `program` must be live handles and `out_count`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ace_count_wall_configurations(
    grid: *const AceGrid,
    program: *const AceProgram,
    budget: u32,
    out_count: *mut u64,
) -> AceStatus {
    if let Err(status) = want_out(out_count) {
        return status;
    }
    let (grid, program) = match (want_ref(grid, "grid"), want_ref(program, "program")) {
        (Ok(g), Ok(p)) => (g, p),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let (grid, start) = match complete(grid) {
        Ok(pair) => pair,
        Err(status) => return status,
    };
    match count_wall_configurations(&grid, start, &program.program, budget) {
        Ok(count) => {
            *out_count = count;
            AceStatus::Ok
        }
        Err(e) => fail(AceStatus::Enumeration, e),
    }
}

/// Generates an item bank with the given per-category counts and
/// writes its JSON document. Deterministic per seed and shape.
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ace_generate_bank_json(
    seed: u64,
    applying_analyzing: u32,
    analyzing_evaluating: u32,
    evaluating_creating: u32,
    out_json: *mut *mut c_char,
) -> AceStatus {
    if let Err(status) = want_out(out_json) {
        return status;
    }
    let shape = [
        applying_analyzing as usize,
        analyzing_evaluating as usize,
        evaluating_creating as usize,
    ];
    match generate_bank(seed, shape) {
        Ok(bank) => give_string(bank_to_json(&bank), out_json),
        Err(e) => fail(AceStatus::Generation, e),
    }
}

/// Validates a bank JSON document and writes
/// `{"clean": bool, "findings": [...]}`. Unparseable JSON maps to
/// the `Parse` status; a document of the wrong shape yields a
/// finding instead.
///
/// # Safety
/// `bank_json` must point to a NUL-terminated string and `out_json`
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn ace_validate_bank_json(
    bank_json: *const c_char,
    out_json: *mut *mut c_char,
) -> AceStatus {
    if let Err(status) = want_out(out_json) {
        return status;
    }
    let text = match want_str(bank_json) {
        Ok(t) => t,
        Err(status) => return status,
    };
    let payload = match bank_from_json(text) {
        Ok(bank) => {
            let report = validate_bank(&bank);
            serde_json::json!({
                "clean": report.is_clean(),
                "findings": report.findings,
            })
        }
        Err(BankError::Schema { message }) => serde_json::json!({
            "clean": false,
            "findings": [{
                "code": "bad_payload",
                "message": format!("schema violation: {message}"),
            }],
        }),
        Err(e) => return fail(AceStatus::Parse, e),
    };
    give_string(payload.to_string(), out_json)
}

/// Scores a response CSV against a bank JSON document and writes
/// the full analysis report JSON.
///
/// # Safety
/// Both inputs must point to NUL-terminated strings and `out_json`
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn ace_analyze_json(
    responses_csv: *const c_char,
    bank_json: *const c_char,
    out_json: *mut *mut c_char,
) -> AceStatus {
    if let Err(status) = want_out(out_json) {
        return status;
    }
    let (csv_text, bank_text) = match (want_str(responses_csv), want_str(bank_json)) {
        (Ok(c), Ok(b)) => (c, b),
        (Err(status), _) | (_, Err(status)) => return status,
    };
    let (matrix, meta) = match responses_from_csv(csv_text) {
        Ok(pair) => pair,
        Err(e) => return fail(AceStatus::Analysis, e),
    };
    let bank = match bank_from_json(bank_text) {
        Ok(bank) => bank,
        Err(BankError::Json { .. }) => {
            return fail(AceStatus::Parse, "the bank document is not valid JSON")
        }
        Err(e) => return fail(AceStatus::Invalid, e),
    };
    match analyze(&matrix, &meta, &bank) {
        Ok(report) => give_string(report.to_json(), out_json),
        Err(e) => fail(AceStatus::Analysis, e),
    }
}
