#ifndef BRT_H
#define BRT_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BrtStatus {
  BRT_STATUS_OK = 0,
  BRT_STATUS_NULL_POINTER = 1,
  BRT_STATUS_INVALID_ARGUMENT = 2,
  BRT_STATUS_PARSE_ERROR = 3,
  BRT_STATUS_EMPTY_CELL = 4,
  BRT_STATUS_PANIC = 5,
} BrtStatus;

typedef enum BrtDecision {
  BRT_DECISION_AGGRESSIVE = 0,
  BRT_DECISION_CONVENTIONAL = 1,
  BRT_DECISION_INDIFFERENT = 2,
} BrtDecision;

typedef enum BrtCountingMode {
  BRT_COUNTING_MODE_INCLUDING = 0,
  BRT_COUNTING_MODE_EXCLUDING = 1,
} BrtCountingMode;

typedef enum BrtStratum {
  BRT_STRATUM_ALL = 0,
  BRT_STRATUM_HIGH_LEVERAGE = 1,
} BrtStratum;

typedef struct BrtModel BrtModel;

typedef struct BrtTally BrtTally;

typedef struct BrtThreshold {
  double brt;
  bool clamped;
} BrtThreshold;

/**
 * Pooled counts for the T, S and F classes of one threshold.
 */
typedef struct BrtRates {
  uint64_t t_numerator;
  uint64_t t_denominator;
  uint64_t s_numerator;
  uint64_t s_denominator;
  uint64_t f_numerator;
  uint64_t f_denominator;
} BrtRates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. Valid until
 * the next call into this library from the same thread.
 */
const char *brt_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *brt_version(void);

/**
 * # Safety
 * `out` must be NULL or point to writable memory for one `BrtThreshold`.
 */
enum BrtStatus brt_compute(double t, double s, double f, struct BrtThreshold *out);

/**
 * # Safety
 * `out` must be NULL or point to writable memory for one `BrtDecision`.
 */
enum BrtStatus brt_decide(double p, double brt, enum BrtDecision *out);

/**
 * Parses a `key=value` outcome model. An empty string gives the built-in
 * model.
 *
 * # Safety
 * `text` must be NULL or a NUL-terminated string; `out` must be NULL or
 * writable.
 */
enum BrtStatus brt_model_parse(const char *text, struct BrtModel **out);

/**
 * # Safety
 * `model` must be NULL or a handle from [`brt_model_parse`] not yet freed.
 */
void brt_model_free(struct BrtModel *model);

/**
 * Exact probabilities of scoring from third only, second only (both with
 * `outs` outs) and first only with `outs + 1` outs.
 *
 * # Safety
 * `model` must be a live handle; the out pointers must be writable.
 */
enum BrtStatus brt_exact_tsf(const struct BrtModel *model,
                             uint8_t outs,
                             double *t,
                             double *s,
                             double *f);

/**
 * Probability that at least one run scores from base mask `bases` (bit 0
 * first, bit 2 third) with `outs` outs.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum BrtStatus brt_exact_score_probability(const struct BrtModel *model,
                                           uint8_t bases,
                                           uint8_t outs,
                                           double *out);

struct BrtTally *brt_tally_new(void);

/**
 * # Safety
 * `tally` must be NULL or a handle from [`brt_tally_new`] not yet freed.
 */
void brt_tally_free(struct BrtTally *tally);

/**
 * Parses the contents of an event file and adds its games to `tally`.
 * The number of games read is written to `games` when it is not NULL.
 * Games or half-innings that fail to parse are skipped.
 *
 * # Safety
 * `tally` must be a live handle, `text` a NUL-terminated string, and
 * `games` NULL or writable.
 */
enum BrtStatus brt_tally_ingest_text(struct BrtTally *tally,
                                     const char *text,
                                     enum BrtCountingMode mode,
                                     size_t *games);

/**
 * Adds every count in `src` into `dst`.
 *
 * # Safety
 * Both must be live, distinct handles.
 */
enum BrtStatus brt_tally_merge(struct BrtTally *dst, const struct BrtTally *src);

/**
 * Pooled counts for the `outs`-out threshold, over all pitchers when
 * `pitcher_id` is NULL. Counts are written even when `EmptyCell` is
 * returned.
 *
 * # Safety
 * `tally` must be a live handle, `pitcher_id` NULL or a NUL-terminated
 * string, `out` writable.
 */
enum BrtStatus brt_tally_rates(const struct BrtTally *tally,
                               uint8_t outs,
                               enum BrtStratum stratum,
                               const char *pitcher_id,
                               struct BrtRates *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRT_H */
