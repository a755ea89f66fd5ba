/* C interface for loading and querying trained relex models. */

#ifndef RELEX_H
#define RELEX_H

/* Generated from the relex-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a C-API call. `RELEX_STATUS_OK` is zero; every other value
 * signals failure and leaves details in `relex_last_error_message`.
 */
typedef enum RelexStatus {
  RELEX_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  RELEX_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  RELEX_STATUS_UTF8 = 2,
  /**
   * An argument was outside its domain (unknown token, bad threshold…).
   */
  RELEX_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The operating system reported an I/O failure.
   */
  RELEX_STATUS_IO = 4,
  /**
   * A model or data file failed to parse.
   */
  RELEX_STATUS_PARSE = 5,
  /**
   * Model files disagree with each other or with this library version.
   */
  RELEX_STATUS_FORMAT = 6,
  /**
   * A numeric invariant was violated.
   */
  RELEX_STATUS_NUMERIC = 7,
  /**
   * An unexpected internal failure.
   */
  RELEX_STATUS_UNKNOWN = 8,
} RelexStatus;

/**
 * How the calibrated knowledge-base score reads the relationship ranking.
 */
typedef enum RelexCalibration {
  /**
   * Fire when fewer than `threshold` relationships strictly beat the
   * candidate.
   */
  RELEX_CALIBRATION_TOP_RANK = 0,
  /**
   * Fire when the candidate strictly beats fewer than `threshold`
   * relationships.
   */
  RELEX_CALIBRATION_LITERAL = 1,
} RelexCalibration;

/**
 * Opaque handle to a trained knowledge-base embedding model.
 */
typedef struct RelexKb RelexKb;

/**
 * Opaque handle to a trained mention-scoring model.
 */
typedef struct RelexM2r RelexM2r;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The library version as a static NUL-terminated string.
 */
const char *relex_version(void);

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread. Never null;
 * empty before any failure.
 */
const char *relex_last_error_message(void);

/**
 * Frees a string returned by this library (e.g. by `relex_m2r_predict`).
 * Accepts null.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library and
 * not yet freed.
 */
void relex_string_free(char *s);

/**
 * Loads a mention-scoring model from `<prefix>.features` and
 * `<prefix>.relations`. On success writes a handle to `out`; free it with
 * `relex_m2r_free`.
 *
 * # Safety
 * `prefix` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RelexStatus relex_m2r_load(const char *prefix, struct RelexM2r **out);

/**
 * Frees a mention-model handle. Accepts null.
 *
 * # Safety
 * `model` must be null or an unfreed handle from `relex_m2r_load`.
 */
void relex_m2r_free(struct RelexM2r *model);

/**
 * Embedding dimension of a loaded mention model.
 *
 * # Safety
 * `model` must be a valid handle; `out` a valid pointer.
 */
enum RelexStatus relex_m2r_dim(const struct RelexM2r *model, size_t *out);

/**
 * Number of relationships the model scores, the no-relation label included.
 *
 * # Safety
 * `model` must be a valid handle; `out` a valid pointer.
 */
enum RelexStatus relex_m2r_num_relations(const struct RelexM2r *model, size_t *out);

/**
 * Scores one relationship for a mention given as an array of feature
 * tokens. Tokens outside the model vocabulary are ignored; the
 * relationship token must be known.
 *
 * # Safety
 * `features` must point to `n_features` NUL-terminated strings; `model`,
 * `relation` and `out` must be valid.
 */
enum RelexStatus relex_m2r_score(const struct RelexM2r *model,
                                 const char *const *features,
                                 size_t n_features,
                                 const char *relation,
                                 double *out);

/**
 * Predicts the highest-scoring relationship for a mention. Writes the
 * relationship token to `out_relation` (free with `relex_string_free`)
 * and, if `out_score` is non-null, the winning score.
 *
 * # Safety
 * `features` must point to `n_features` NUL-terminated strings; `model`
 * and `out_relation` must be valid.
 */
enum RelexStatus relex_m2r_predict(const struct RelexM2r *model,
                                   const char *const *features,
                                   size_t n_features,
                                   char **out_relation,
                                   double *out_score);

/**
 * Loads a knowledge-base model from `<prefix>.entities` and
 * `<prefix>.relations`. On success writes a handle to `out`; free it with
 * `relex_kb_free`.
 *
 * # Safety
 * `prefix` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RelexStatus relex_kb_load(const char *prefix, struct RelexKb **out);

/**
 * Frees a knowledge-base handle. Accepts null.
 *
 * # Safety
 * `model` must be null or an unfreed handle from `relex_kb_load`.
 */
void relex_kb_free(struct RelexKb *model);

/**
 * Plausibility of a (head, relationship, tail) fact given as tokens:
 * `−‖h + r − t‖²`, 0 for a perfect translation. All three tokens must be
 * in the model vocabularies.
 *
 * # Safety
 * All pointers must be valid; strings NUL-terminated.
 */
enum RelexStatus relex_kb_score(const struct RelexKb *model,
                                const char *head,
                                const char *relation,
                                const char *tail,
                                double *out);

/**
 * Number of relationships the candidate strictly beats for this entity
 * pair; `n_relations − 1` means it ranks first.
 *
 * # Safety
 * All pointers must be valid; strings NUL-terminated.
 */
enum RelexStatus relex_kb_rank(const struct RelexKb *model,
                               const char *head,
                               const char *relation,
                               const char *tail,
                               size_t *out);

/**
 * Binary calibrated score: 1.0 when the relationship ranks within
 * `threshold` for its pair under the chosen reading, else 0.0.
 * `threshold` must be at least 1.
 *
 * # Safety
 * All pointers must be valid; strings NUL-terminated.
 */
enum RelexStatus relex_kb_calibrated(const struct RelexKb *model,
                                     const char *head,
                                     const char *relation,
                                     const char *tail,
                                     size_t threshold,
                                     enum RelexCalibration direction,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELEX_H */
