#ifndef TEMPORA_H
#define TEMPORA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TEMPORA_MODE_BEST 0

#define TEMPORA_MODE_ENUMERATE 1

#define TEMPORA_MODE_UNDERSPEC 2

typedef enum TemporaStatus {
  TEMPORA_STATUS_OK = 0,
  /**
   * Malformed input, data files or arguments.
   */
  TEMPORA_STATUS_INPUT_ERROR = 1,
  /**
   * No consistent reading: explicit markers clash.
   */
  TEMPORA_STATUS_PARSE_FAILURE = 2,
  TEMPORA_STATUS_NULL_ARGUMENT = 3,
  TEMPORA_STATUS_INVALID_UTF8 = 4,
  TEMPORA_STATUS_PANIC = 5,
} TemporaStatus;

/**
 * The readings of one discourse.
 */
typedef struct TemporaAnalysis TemporaAnalysis;

/**
 * Data files, weights and flags.
 */
typedef struct TemporaEngine TemporaEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * New engine with the shipped data files and default weights.
 */
struct TemporaEngine *tempora_engine_new(void);

/**
 * # Safety
 * `engine` must come from [`tempora_engine_new`] and not be used afterwards.
 */
void tempora_engine_free(struct TemporaEngine *engine);

/**
 * Replaces the data files with those found in `dir` (same file names as
 * the shipped set; missing files keep the defaults).
 *
 * # Safety
 * `engine` must be a live engine and `dir` a NUL-terminated string.
 */
enum TemporaStatus tempora_engine_load_data_dir(struct TemporaEngine *engine, const char *dir);

/**
 * # Safety
 * `engine` must be a live engine.
 */
enum TemporaStatus tempora_engine_set_weights(struct TemporaEngine *engine,
                                              double w_tense,
                                              double w_sem,
                                              double w_cur,
                                              double w_new);

/**
 * # Safety
 * `engine` must be a live engine.
 */
enum TemporaStatus tempora_engine_set_flags(struct TemporaEngine *engine,
                                            bool allow_marginal,
                                            bool tier_prune);

/**
 * Analyzes a discourse in the clause-line text format. On success `*out`
 * receives an analysis to release with [`tempora_analysis_free`].
 *
 * # Safety
 * `engine` must be a live engine, `text` a NUL-terminated string and `out`
 * a valid pointer.
 */
enum TemporaStatus tempora_analyze(const struct TemporaEngine *engine,
                                   const char *text,
                                   uint32_t mode,
                                   struct TemporaAnalysis **out);

/**
 * Number of readings; 0 for a null analysis.
 *
 * # Safety
 * `analysis` must be null or a live analysis.
 */
size_t tempora_analysis_reading_count(const struct TemporaAnalysis *analysis);

/**
 * JSON rendering, or null on a null analysis.
 *
 * # Safety
 * `analysis` must be null or a live analysis.
 */
char *tempora_analysis_to_json(const struct TemporaAnalysis *analysis);

/**
 * Plain-text rendering, or null on a null analysis.
 *
 * # Safety
 * `analysis` must be null or a live analysis.
 */
char *tempora_analysis_to_text(const struct TemporaAnalysis *analysis);

/**
 * # Safety
 * `analysis` must come from [`tempora_analyze`] and not be used afterwards.
 */
void tempora_analysis_free(struct TemporaAnalysis *analysis);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *tempora_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void tempora_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEMPORA_H */
