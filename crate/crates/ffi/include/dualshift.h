#ifndef DUALSHIFT_H
#define DUALSHIFT_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsDirection {
  DS_DIRECTION_TO_VISITOR = 0,
  DS_DIRECTION_TO_COMPOSITE = 1,
} DsDirection;

typedef enum DsStatus {
  DS_STATUS_OK = 0,
  DS_STATUS_NULL_ARGUMENT = 1,
  DS_STATUS_INVALID_UTF8 = 2,
  DS_STATUS_PARSE_ERROR = 3,
  DS_STATUS_TYPE_ERROR = 4,
  DS_STATUS_REFUSED = 5,
  DS_STATUS_EVAL_ERROR = 6,
  DS_STATUS_BREACH = 7,
  DS_STATUS_PANIC = 8,
} DsStatus;

/**
 * Opaque handle to a parsed, type-checked program.
 */
typedef struct DsProgram DsProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and type-checks `source`. On success `*out` owns a new handle.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DsStatus ds_program_parse(const char *source, struct DsProgram **out);

/**
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void ds_program_free(struct DsProgram *p);

/**
 * Writes the canonical text of `p` to `*out`.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_program_pretty(const struct DsProgram *p, char **out);

/**
 * Transforms `p` in the given direction into a new handle; `p` is untouched.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_transform(const struct DsProgram *p,
                           enum DsDirection direction,
                           struct DsProgram **out);

/**
 * Transforms to the other form and back. A textual difference is reported
 * as `DS_STATUS_BREACH` with the diff as the error message.
 *
 * # Safety
 * `p` must be a live handle.
 */
enum DsStatus ds_roundtrip(const struct DsProgram *p);

/**
 * Writes the structure class explanation of `p` to `*out`, e.g.
 * `DataOriented` or `Mixed: offending column check (...)`.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum DsStatus ds_detect(const struct DsProgram *p, char **out);

/**
 * Evaluates the expression `entry` against `p` and writes the printed value.
 *
 * # Safety
 * `p` must be a live handle, `entry` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum DsStatus ds_evaluate(const struct DsProgram *p, const char *entry, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void ds_string_free(char *s);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next library call on this thread.
 */
const char *ds_last_error(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DUALSHIFT_H */
