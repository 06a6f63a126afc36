#ifndef QDICUT_H
#define QDICUT_H

/* Generated by cbindgen from the qdicut-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum QdStatus {
  QdOk = 0,
  QdNullPointer = 1,
  QdInvalidUtf8 = 2,
  QdParseError = 3,
  QdInvalidParam = 4,
  QdTooLarge = 5,
  QdIoError = 6,
  QdInternal = 7,
} QdStatus;

/**
 * Opaque bias-class configuration handle.
 */
typedef struct QdClasses QdClasses;

/**
 * Opaque edge stream handle.
 */
typedef struct QdStream QdStream;

/**
 * Estimation knobs for [`qdicut_estimate_json`]. `eps` is an exact
 * decimal string such as "0.25".
 */
typedef struct QdEstimatorParams {
  const char *eps;
  uint32_t kappa;
  uint64_t capacity_const;
  uint64_t copies_per_pair;
  uint32_t med_reps;
  double correction;
  uint64_t seed;
  /**
   * 0 = literal per-copy simulation, 1 = per-copy outcome sampling,
   * 2 = aggregate count sampling.
   */
  uint32_t sampling;
  /**
   * Nonzero: include the brute-force optimum (small instances only).
   */
  uint8_t with_opt;
} QdEstimatorParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread. Valid until the next
 * failing call on the same thread.
 */
const char *qdicut_last_error(void);

/**
 * Static library version string.
 */
const char *qdicut_version(void);

/**
 * Parses the line-oriented stream format ("n m" header, then edges).
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum QdStatus qdicut_stream_parse(const char *text, struct QdStream **out);

/**
 * Seeded directed G(n, p) stream.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QdStatus qdicut_stream_generate(uint32_t n, double p, uint64_t seed, struct QdStream **out);

/**
 * # Safety
 * `stream` must be a handle from this library or null.
 */
void qdicut_stream_free(struct QdStream *stream);

/**
 * Vertex count of a stream handle (0 for null).
 *
 * # Safety
 * `stream` must be a valid handle or null.
 */
uint32_t qdicut_stream_vertices(const struct QdStream *stream);

/**
 * Edge count of a stream handle (0 for null).
 *
 * # Safety
 * `stream` must be a valid handle or null.
 */
uint64_t qdicut_stream_edges(const struct QdStream *stream);

/**
 * Brute-force maximum directed cut (capped at 24 vertices).
 *
 * # Safety
 * Pointers must be valid.
 */
enum QdStatus qdicut_max_dicut(const struct QdStream *stream, uint64_t *out);

/**
 * Parses a bias-class configuration from TOML text.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum QdStatus qdicut_classes_parse(const char *text, struct QdClasses **out);

/**
 * # Safety
 * `classes` must be a handle from this library or null.
 */
void qdicut_classes_free(struct QdClasses *classes);

/**
 * Exact oblivious value `r^T S (1 - r)` of the stream's snapshot.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QdStatus qdicut_oblivious_value(const struct QdStream *stream,
                                     const struct QdClasses *classes,
                                     double *out);

/**
 * Runs the full estimation pipeline; on success writes a heap-allocated
 * JSON report string to `out` (free with [`qdicut_string_free`]).
 *
 * # Safety
 * Pointers must be valid; `params.eps` must be NUL-terminated.
 */
enum QdStatus qdicut_estimate_json(const struct QdStream *stream,
                                   const struct QdClasses *classes,
                                   const struct QdEstimatorParams *params,
                                   char **out);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library or be null.
 */
void qdicut_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDICUT_H */
