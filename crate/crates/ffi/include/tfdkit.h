/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef TFDKIT_H
#define TFDKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum TfdStatus {
  TFD_STATUS_OK = 0,
  TFD_STATUS_INVALID_ARGUMENT = 1,
  TFD_STATUS_ZERO_VARIANCE = 2,
  TFD_STATUS_UNDEFINED_RATE = 3,
  TFD_STATUS_PREDICTION_MISMATCH = 4,
  TFD_STATUS_FORMAT = 5,
  TFD_STATUS_MISSING_FILE = 6,
  TFD_STATUS_IO = 7,
  TFD_STATUS_NULL_POINTER = 8,
  TFD_STATUS_PANIC = 9,
} TfdStatus;

/**
 * Representation to compute or render.
 */
typedef enum TfdKind {
  TFD_KIND_STFT = 0,
  TFD_KIND_CWT = 1,
  TFD_KIND_CHIRPLET = 2,
  TFD_KIND_WVD = 3,
  TFD_KIND_SPWVD = 4,
  TFD_KIND_CWD = 5,
  TFD_KIND_RAW = 6,
  TFD_KIND_LOGRAW = 7,
} TfdKind;

/**
 * A time-frequency grid, row-major with one row per time instant.
 */
typedef struct TfdGrid TfdGrid;

/**
 * An image, interleaved height x width x channels.
 */
typedef struct TfdImage TfdImage;

/**
 * A real signal with its sample rate.
 */
typedef struct TfdSignal TfdSignal;

typedef struct TfdMetrics {
  double acc;
  double se;
  double sp;
  double macc;
} TfdMetrics;

typedef struct TfdMannWhitney {
  double u;
  double p_two_sided;
  /**
   * 1 when the exact distribution was used, 0 for the normal approximation.
   */
  int32_t exact;
} TfdMannWhitney;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *tfd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tfd_version(void);

/**
 * Copy `len` samples into a new signal.
 *
 * # Safety
 * `samples` must point to `len` readable doubles and `out` must be writable.
 */
enum TfdStatus tfd_signal_new(const double *samples,
                              size_t len,
                              double sample_rate,
                              struct TfdSignal **out);

/**
 * # Safety
 * `signal` must come from [`tfd_signal_new`] and not have been freed.
 */
void tfd_signal_free(struct TfdSignal *signal);

/**
 * Compute a time-frequency grid with default parameters. `cwd_sigma` is
 * only used by [`TfdKind::Cwd`]. Raw kinds have no grid and are rejected.
 *
 * # Safety
 * `signal` must be a live handle and `out` writable.
 */
enum TfdStatus tfd_grid_compute(const struct TfdSignal *signal,
                                enum TfdKind kind,
                                double cwd_sigma,
                                struct TfdGrid **out);

/**
 * # Safety
 * `grid` must be a live handle or NULL.
 */
size_t tfd_grid_rows(const struct TfdGrid *grid);

/**
 * # Safety
 * `grid` must be a live handle or NULL.
 */
size_t tfd_grid_cols(const struct TfdGrid *grid);

/**
 * Row-major values, `rows * cols` long, owned by the grid.
 *
 * # Safety
 * `grid` must be a live handle or NULL.
 */
const double *tfd_grid_values(const struct TfdGrid *grid);

/**
 * Time of every row in seconds, `rows` long, owned by the grid.
 *
 * # Safety
 * `grid` must be a live handle or NULL.
 */
const double *tfd_grid_time_axis(const struct TfdGrid *grid);

/**
 * Frequency of every column in Hz, `cols` long, owned by the grid.
 *
 * # Safety
 * `grid` must be a live handle or NULL.
 */
const double *tfd_grid_freq_axis(const struct TfdGrid *grid);

/**
 * # Safety
 * `grid` must come from [`tfd_grid_compute`] and not have been freed.
 */
void tfd_grid_free(struct TfdGrid *grid);

/**
 * 8-bit greyscale raster of a grid, optionally log-compressed.
 *
 * # Safety
 * `grid` must be a live handle and `out` writable.
 */
enum TfdStatus tfd_grid_to_image(const struct TfdGrid *grid,
                                 bool log_compress,
                                 size_t height,
                                 size_t width,
                                 struct TfdImage **out);

/**
 * Normalized network input for one kind (replicated to three channels) or
 * three kinds (stacked). `n_kinds` must be 1 or 3.
 *
 * # Safety
 * `signal` must be a live handle, `kinds` must point to `n_kinds` values and
 * `out` must be writable.
 */
enum TfdStatus tfd_render(const struct TfdSignal *signal,
                          const enum TfdKind *kinds,
                          size_t n_kinds,
                          size_t size,
                          double cwd_sigma,
                          struct TfdImage **out);

/**
 * # Safety
 * `image` must be a live handle; each out pointer may be NULL.
 */
enum TfdStatus tfd_image_shape(const struct TfdImage *image,
                               size_t *height,
                               size_t *width,
                               size_t *channels);

/**
 * Interleaved pixels, `height * width * channels` long, owned by the image.
 *
 * # Safety
 * `image` must be a live handle or NULL.
 */
const double *tfd_image_pixels(const struct TfdImage *image);

/**
 * Write an 8-bit image as PNG. Normalized images are rejected.
 *
 * # Safety
 * `image` must be a live handle and `path` a NUL-terminated UTF-8 string.
 */
enum TfdStatus tfd_image_write_png(const struct TfdImage *image, const char *path);

/**
 * # Safety
 * `image` must come from this library and not have been freed.
 */
void tfd_image_free(struct TfdImage *image);

/**
 * Accuracy, sensitivity, specificity and mean accuracy, with abnormal as
 * the positive class.
 *
 * # Safety
 * `out` must be writable.
 */
enum TfdStatus tfd_metrics(uint64_t tp,
                           uint64_t fp,
                           uint64_t tn,
                           uint64_t fn_,
                           struct TfdMetrics *out);

/**
 * Two-sided Mann-Whitney U test of `a` against `b`. With `exact` set the
 * permutation distribution is used up to 16 pooled values.
 *
 * # Safety
 * `a` and `b` must point to `n1` and `n2` doubles; `out` must be writable.
 */
enum TfdStatus tfd_mann_whitney(const double *a,
                                size_t n1,
                                const double *b,
                                size_t n2,
                                bool exact,
                                struct TfdMannWhitney *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TFDKIT_H */
