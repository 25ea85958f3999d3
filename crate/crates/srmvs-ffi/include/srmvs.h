#ifndef SRMVS_H
#define SRMVS_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of an FFI call.
 */
typedef enum SrmvsStatus {
  SRMVS_STATUS_OK = 0,
  /**
   * A pointer argument was null.
   */
  SRMVS_STATUS_NULL_POINTER = 1,
  /**
   * An argument value was rejected.
   */
  SRMVS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A referenced file or directory does not exist.
   */
  SRMVS_STATUS_NOT_FOUND = 3,
  /**
   * A file exists but its contents are malformed.
   */
  SRMVS_STATUS_FORMAT = 4,
  /**
   * Input data violates a pipeline invariant.
   */
  SRMVS_STATUS_VALIDATION = 5,
  /**
   * Operating-system I/O failure.
   */
  SRMVS_STATUS_IO = 6,
  /**
   * The implementation panicked; state may be inconsistent.
   */
  SRMVS_STATUS_PANIC = 7,
} SrmvsStatus;

/**
 * Opaque 3D point cloud handle.
 */
typedef struct SrmvsPointCloud SrmvsPointCloud;

/**
 * Opaque accuracy/completeness/F1 score table handle.
 */
typedef struct SrmvsScores SrmvsScores;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message of the calling thread into `buf`
 * (NUL-terminated, truncated to `len` bytes) and returns the full message
 * length in bytes, excluding the NUL. `buf` may be null to query the
 * length only.
 *
 * # Safety
 * `buf`, when non-null, must point to at least `len` writable bytes.
 */
uintptr_t srmvs_last_error_message(char *buf, uintptr_t len);

/**
 * Reads a PLY point cloud (ASCII or binary little-endian) from `path`.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. On success `*out` owns a new handle.
 */
enum SrmvsStatus srmvs_point_cloud_load(const char *path, struct SrmvsPointCloud **out);

/**
 * Writes a point cloud to `path` as binary little-endian PLY.
 *
 * # Safety
 * `cloud` must be a live handle from this API; `path` must be a valid
 * NUL-terminated string.
 */
enum SrmvsStatus srmvs_point_cloud_save(const struct SrmvsPointCloud *cloud, const char *path);

/**
 * Number of points in the cloud; 0 for a null handle.
 *
 * # Safety
 * `cloud` must be null or a live handle from this API.
 */
uintptr_t srmvs_point_cloud_len(const struct SrmvsPointCloud *cloud);

/**
 * Copies point `index` into `xyz[3]` (world coordinates, meters).
 *
 * # Safety
 * `cloud` must be a live handle; `xyz` must point to 3 writable doubles.
 */
enum SrmvsStatus srmvs_point_cloud_get_point(const struct SrmvsPointCloud *cloud,
                                             uintptr_t index,
                                             double *xyz);

/**
 * Releases a point-cloud handle. Null is a no-op.
 *
 * # Safety
 * `cloud` must be null or a handle not freed before.
 */
void srmvs_point_cloud_free(struct SrmvsPointCloud *cloud);

/**
 * Scores `rec` against ground truth `gt` at `n_tolerances` distance
 * tolerances in centimeters; pass `tolerances_cm = NULL` for the default
 * sweep {1, 2, 5, 10, 20, 50}.
 *
 * # Safety
 * `rec` and `gt` must be live handles; `tolerances_cm`, when non-null,
 * must point to `n_tolerances` doubles; `out` must be a valid pointer.
 */
enum SrmvsStatus srmvs_evaluate(const struct SrmvsPointCloud *rec,
                                const struct SrmvsPointCloud *gt,
                                const double *tolerances_cm,
                                uintptr_t n_tolerances,
                                struct SrmvsScores **out);

/**
 * Number of tolerance rows in a score table; 0 for a null handle.
 *
 * # Safety
 * `scores` must be null or a live handle from this API.
 */
uintptr_t srmvs_scores_row_count(const struct SrmvsScores *scores);

/**
 * Copies row `index` as {tau_cm, accuracy, completeness, f1} into `row[4]`.
 *
 * # Safety
 * `scores` must be a live handle; `row` must point to 4 writable doubles.
 */
enum SrmvsStatus srmvs_scores_get_row(const struct SrmvsScores *scores,
                                      uintptr_t index,
                                      double *row);

/**
 * Releases a score-table handle. Null is a no-op.
 *
 * # Safety
 * `scores` must be null or a handle not freed before.
 */
void srmvs_scores_free(struct SrmvsScores *scores);

/**
 * Loads the dataset at `dir` (cameras.txt plus images) and reconstructs a
 * dense point cloud with default settings, `seed`, and `jobs` worker
 * threads (0 = automatic).
 *
 * # Safety
 * `dir` must be a valid NUL-terminated string; `out` must be a valid
 * pointer. On success `*out` owns a new handle.
 */
enum SrmvsStatus srmvs_reconstruct_dataset(const char *dir,
                                           uint64_t seed,
                                           uintptr_t jobs,
                                           struct SrmvsPointCloud **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SRMVS_H */
