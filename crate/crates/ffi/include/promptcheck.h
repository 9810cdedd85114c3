#ifndef PROMPTCHECK_H
#define PROMPTCHECK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_NULL_ARGUMENT,
  PC_STATUS_INVALID_UTF8,
  PC_STATUS_SYNTAX,
  PC_STATUS_NEGATION_BELOW_NON_ATOM,
  PC_STATUS_WRONG_FRAGMENT,
  PC_STATUS_INVALID_LTS,
  PC_STATUS_UNKNOWN_STATE,
  PC_STATUS_INVALID_LASSO,
  PC_STATUS_INVALID_PATH,
  PC_STATUS_BROKEN_CONNECTOR,
  PC_STATUS_UNSUPPORTED,
  PC_STATUS_SIZE_GUARD,
  PC_STATUS_NOT_BSCC,
  PC_STATUS_INTERNAL_WITNESS_INVALID,
  PC_STATUS_MALFORMED_DOCUMENT,
  PC_STATUS_USAGE,
  PC_STATUS_IO,
  PC_STATUS_PANIC,
} PcStatus;

typedef enum PcFragment {
  PC_FRAGMENT_PROMPT_MULLER = 0,
  PC_FRAGMENT_POSITIVE_PROMPT_MULLER,
  PC_FRAGMENT_INITIALIZED_MULLER,
  PC_FRAGMENT_EVAL_ONLY,
} PcFragment;

typedef enum PcMode {
  PC_MODE_UNIVERSAL = 0,
  PC_MODE_FAIR,
  PC_MODE_WEAK,
} PcMode;

/**
 * Parsed formula.
 */
typedef struct PcFormula PcFormula;

/**
 * Validated transition system.
 */
typedef struct PcLts PcLts;

/**
 * Check result with its rendered JSON document.
 */
typedef struct PcVerdict PcVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates an LTS document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PcStatus pc_lts_from_json(const char *json, struct PcLts **out);

/**
 * # Safety
 * `lts` must come from [`pc_lts_from_json`] and not be used afterwards.
 */
void pc_lts_free(struct PcLts *lts);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `lts` must be null or a live handle.
 */
size_t pc_lts_state_count(const struct PcLts *lts);

/**
 * # Safety
 * `formula` must be a NUL-terminated string and `out` a writable pointer.
 */
enum PcStatus pc_formula_parse(const char *formula, struct PcFormula **out);

/**
 * # Safety
 * `formula` must come from [`pc_formula_parse`] and not be used afterwards.
 */
void pc_formula_free(struct PcFormula *formula);

/**
 * Fragment of a parsed formula; `EvalOnly` for a null handle.
 *
 * # Safety
 * `formula` must be null or a live handle.
 */
enum PcFragment pc_formula_fragment(const struct PcFormula *formula);

/**
 * Runs a universal, fair, or weak check.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum PcStatus pc_check(const struct PcLts *lts,
                       const struct PcFormula *formula,
                       enum PcMode mode,
                       struct PcVerdict **out);

/**
 * # Safety
 * `verdict` must be null or a live handle.
 */
bool pc_verdict_holds(const struct PcVerdict *verdict);

/**
 * Verdict document as a newly allocated string, or null for a null handle.
 *
 * # Safety
 * `verdict` must be null or a live handle.
 */
char *pc_verdict_to_json(const struct PcVerdict *verdict);

/**
 * # Safety
 * `verdict` must come from [`pc_check`] and not be used afterwards.
 */
void pc_verdict_free(struct PcVerdict *verdict);

/**
 * Evaluates `formula` on the lasso document `run_json` at bound `k`.
 *
 * # Safety
 * Handles must be live, `run_json` NUL-terminated, and `out` writable.
 */
enum PcStatus pc_eval_bounded(const struct PcLts *lts,
                              const char *run_json,
                              const struct PcFormula *formula,
                              uint64_t k,
                              bool *out);

/**
 * Exact satisfaction probability of an initialized formula as a fraction
 * string such as `"1/2"`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum PcStatus pc_satisfaction_probability(const struct PcLts *lts,
                                          const struct PcFormula *formula,
                                          char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void pc_string_free(char *s);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next library call on the same thread.
 */
const char *pc_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROMPTCHECK_H */
