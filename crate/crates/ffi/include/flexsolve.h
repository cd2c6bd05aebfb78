#ifndef FLEXSOLVE_H
#define FLEXSOLVE_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define FX_OK 0

/**
 * Negative but well-defined result (inconsistent, not equivalent, not a
 * member).
 */
#define FX_NEGATIVE 1

/**
 * Parse or validation failure; details via `fx_last_error`.
 */
#define FX_INVALID 2

/**
 * Null pointer or invalid argument.
 */
#define FX_BADARG 3

typedef struct FxSolution FxSolution;

typedef struct FxSystem FxSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The caller
 * owns the string and must release it with `fx_string_free`.
 */
char *fx_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void fx_string_free(char *s);

/**
 * Parses a system from source text. On success stores a new handle in
 * `out`; release it with `fx_system_free`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
int32_t fx_system_parse(const char *text, struct FxSystem **out);

/**
 * # Safety
 * `s` must come from `fx_system_parse` and not be freed twice.
 */
void fx_system_free(struct FxSystem *s);

/**
 * Number of inclusion rows.
 *
 * # Safety
 * `s` must be a live handle.
 */
int64_t fx_system_rows(const struct FxSystem *s);

/**
 * Number of unknowns.
 *
 * # Safety
 * `s` must be a live handle.
 */
int64_t fx_system_unknowns(const struct FxSystem *s);

/**
 * Solves the system. Always produces a solution handle on valid input;
 * returns FX_NEGATIVE when the system is inconsistent, FX_OK otherwise.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
int32_t fx_solve(const struct FxSystem *s, struct FxSolution **out);

/**
 * # Safety
 * `z` must come from `fx_solve` and not be freed twice.
 */
void fx_solution_free(struct FxSolution *z);

/**
 * 1 when consistent, 0 when inconsistent, -1 on a null handle.
 *
 * # Safety
 * `z` must be a live handle.
 */
int32_t fx_solution_is_consistent(const struct FxSolution *z);

/**
 * Rank of the echelon form, or -1 on a null handle.
 *
 * # Safety
 * `z` must be a live handle.
 */
int64_t fx_solution_rank(const struct FxSolution *z);

/**
 * Solution set in the line-oriented text form. Release with
 * `fx_string_free`.
 *
 * # Safety
 * `z` must be a live handle.
 */
char *fx_solution_to_text(const struct FxSolution *z);

/**
 * Solution set as a JSON document; `exact` switches scalars to explicit
 * coefficient lists. Release with `fx_string_free`.
 *
 * # Safety
 * `z` must be a live handle.
 */
char *fx_solution_to_json(const struct FxSolution *z, bool exact);

/**
 * Tests a point (text form, e.g. "(1, eps, -0.5)") for membership.
 * FX_OK member, FX_NEGATIVE not a member.
 *
 * # Safety
 * `s` must be a live handle and `point` a NUL-terminated string.
 */
int32_t fx_check_point(const struct FxSystem *s, const char *point);

/**
 * Compares two solution sets. FX_OK when equal; FX_NEGATIVE otherwise,
 * with the relation written to `verdict` when non-null (1 first strictly
 * inside second, 2 second strictly inside first, 3 incomparable, 0 equal).
 *
 * # Safety
 * Both handles must be live; `verdict` may be null.
 */
int32_t fx_equiv(const struct FxSystem *a, const struct FxSystem *b, int32_t *verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLEXSOLVE_H */
