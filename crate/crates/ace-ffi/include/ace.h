/* C interface to the maze block-programming assessment toolkit. */

#ifndef ACE_H
#define ACE_H

/* Generated by cbindgen from the ace-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call; anything but `Ok` leaves a message behind
// [`ace_last_error_message`].
typedef enum AceStatus {
  ACE_STATUS_OK = 0,
  // A required pointer argument was null.
  ACE_STATUS_NULL_ARGUMENT = 1,
  // An input string was not valid UTF-8.
  ACE_STATUS_UTF8 = 2,
  // Grid, program, or JSON text failed to parse.
  ACE_STATUS_PARSE = 3,
  // Parsed input misses a needed piece or breaks an invariant.
  ACE_STATUS_INVALID = 4,
  // Program execution was rejected, for example a bad start.
  ACE_STATUS_EXEC = 5,
  // An enumeration refused to run, for example a budget overrun.
  ACE_STATUS_ENUMERATION = 6,
  // Item generation gave up or was asked for the impossible.
  ACE_STATUS_GENERATION = 7,
  // The statistics could not be computed from the data.
  ACE_STATUS_ANALYSIS = 8,
  ACE_STATUS_INTERNAL = 9,
} AceStatus;

// Opaque parsed grid text: cells plus optional goal and avatar
// markers.
typedef struct AceGrid AceGrid;

// Opaque parsed program.
typedef struct AceProgram AceProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the toolkit as a static string; never free it.
const char *ace_version(void);

// Copy of the message of the most recent failure on this thread,
// or null when nothing failed yet. Free it with
// [`ace_string_free`].
char *ace_last_error_message(void);

// Releases a string returned through an out parameter.
//
// # Safety
// `s` must come from this library and not be freed twice.
void ace_string_free(char *s);

// Parses grid text into a handle.
//
// # Safety
// `text` must point to a NUL-terminated string and `out` to
// writable pointer storage.
enum AceStatus ace_grid_parse(const char *text, struct AceGrid **out);

// Releases a grid handle.
//
// # Safety
// `grid` must come from [`ace_grid_parse`] and not be freed twice.
void ace_grid_free(struct AceGrid *grid);

// Renders a grid handle back to its text form.
//
// # Safety
// `grid` must be a live handle and `out` writable.
enum AceStatus ace_grid_to_text(const struct AceGrid *grid, char **out);

// Parses program text into a handle.
//
// # Safety
// `text` must point to a NUL-terminated string and `out` to
// writable pointer storage.
enum AceStatus ace_program_parse(const char *text, struct AceProgram **out);

// Releases a program handle.
//
// # Safety
// `program` must come from [`ace_program_parse`] and not be freed
// twice.
void ace_program_free(struct AceProgram *program);

// Canonical text of a program handle.
//
// # Safety
// `program` must be a live handle and `out` writable.
enum AceStatus ace_program_to_text(const struct AceProgram *program, char **out);

// Runs the program on the grid, which needs both a goal and an
// avatar marker. `step_limit` 0 means the default of 1000. Writes
// a JSON document with the outcome, the final state, and the
// trace.
//
// # Safety
// `grid` and `program` must be live handles and `out_json`
// writable.
enum AceStatus ace_run_json(const struct AceGrid *grid,
                            const struct AceProgram *program,
                            uint32_t step_limit,
                            char **out_json);

// Counts and lists every avatar placement from which the program
// reaches the goal. The grid needs a goal marker. Writes
// `{"count": n, "starts": [{"cell": "...", "dir": "..."}]}`.
//
// # Safety
// `grid` and `program` must be live handles and `out_json`
// writable.
enum AceStatus ace_enumerate_avatar_starts_json(const struct AceGrid *grid,
                                                const struct AceProgram *program,
                                                char **out_json);

// Lists the goal cells the program can be sent to from the grid's
// avatar marker. Writes `{"count": n, "cells": ["b2", ...]}`.
//
// # Safety
// `grid` and `program` must be live handles and `out_json`
// writable.
enum AceStatus ace_enumerate_goal_cells_json(const struct AceGrid *grid,
                                             const struct AceProgram *program,
                                             char **out_json);

// Counts the ways to add at most `budget` walls while the program
// still succeeds. The grid needs goal and avatar markers.
//
// # Safety
// `grid` and `program` must be live handles and `out_count`
// writable.
enum AceStatus ace_count_wall_configurations(const struct AceGrid *grid,
                                             const struct AceProgram *program,
                                             uint32_t budget,
                                             uint64_t *out_count);

// Generates an item bank with the given per-category counts and
// writes its JSON document. Deterministic per seed and shape.
//
// # Safety
// `out_json` must be writable.
enum AceStatus ace_generate_bank_json(uint64_t seed,
                                      uint32_t applying_analyzing,
                                      uint32_t analyzing_evaluating,
                                      uint32_t evaluating_creating,
                                      char **out_json);

// Validates a bank JSON document and writes
// `{"clean": bool, "findings": [...]}`. Unparseable JSON maps to
// the `Parse` status; a document of the wrong shape yields a
// finding instead.
//
// # Safety
// `bank_json` must point to a NUL-terminated string and `out_json`
// be writable.
enum AceStatus ace_validate_bank_json(const char *bank_json, char **out_json);

// Scores a response CSV against a bank JSON document and writes
// the full analysis report JSON.
//
// # Safety
// Both inputs must point to NUL-terminated strings and `out_json`
// be writable.
enum AceStatus ace_analyze_json(const char *responses_csv, const char *bank_json, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACE_H */
