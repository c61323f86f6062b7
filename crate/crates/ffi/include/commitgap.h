#ifndef COMMITGAP_H
#define COMMITGAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CgStatus {
  CG_STATUS_OK = 0,
  CG_STATUS_NULL_POINTER = 1,
  CG_STATUS_INVALID_INPUT = 2,
  CG_STATUS_INTERNAL_INVARIANT = 3,
  CG_STATUS_BUDGET_EXCEEDED = 4,
  CG_STATUS_PANIC = 5,
} CgStatus;

/**
 * Equilibrium search mode.
 */
typedef enum CgMode {
  CG_MODE_AUTO = 0,
  CG_MODE_FULL = 1,
  CG_MODE_PURE = 2,
} CgMode;

/**
 * Opaque game handle.
 */
typedef struct CgGame CgGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a game file. On success `*out` owns a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum CgStatus cg_game_from_json(const char *json, struct CgGame **out);

/**
 * Builds the two-type evidence game for rational `epsilon` and prior `mu`
 * given as `"p/q"` text.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be valid for writes.
 */
enum CgStatus cg_example2(const char *epsilon, const char *mu, struct CgGame **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `game` must be null or a handle not yet freed.
 */
void cg_game_free(struct CgGame *game);

/**
 * Serializes the game back to the file format.
 *
 * # Safety
 * `game` must be a live handle; `out` must be valid for writes.
 */
enum CgStatus cg_game_to_json(const struct CgGame *game, char **out);

/**
 * Commitment value as exact `"p/q"` text.
 *
 * # Safety
 * `game` must be a live handle; `out` must be valid for writes.
 */
enum CgStatus cg_commitment_value(const struct CgGame *game, char **out);

/**
 * Gap report as JSON. Returns `CG_STATUS_BUDGET_EXCEEDED` when a full
 * search would exceed `budget` support profiles and `allow_incomplete` is
 * false.
 *
 * # Safety
 * `game` must be a live handle; `out` must be valid for writes.
 */
enum CgStatus cg_commitment_gap(const struct CgGame *game,
                                enum CgMode mode,
                                uint64_t budget,
                                bool allow_incomplete,
                                char **out);

/**
 * Full diagnostics report as JSON, using the default radii. Returns
 * `CG_STATUS_INTERNAL_INVARIANT` (with the report still written) if the
 * computed results contradict each other.
 *
 * # Safety
 * `game` must be a live handle; `out` must be valid for writes.
 */
enum CgStatus cg_diagnose(const struct CgGame *game,
                          uint32_t samples,
                          uint64_t seed,
                          enum CgMode mode,
                          uint64_t budget,
                          bool allow_incomplete,
                          char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `text` must be null or a string from this library not yet freed.
 */
void cg_string_free(char *text);

/**
 * Message for the last failed call on this thread, or `""`. Valid until
 * the next call into the library from the same thread.
 */
const char *cg_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMMITGAP_H */
