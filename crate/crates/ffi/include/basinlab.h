#ifndef BASINLAB_H
#define BASINLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum BasinlabStatus {
  BASINLAB_STATUS_OK = 0,
  BASINLAB_STATUS_NULL_POINTER = 1,
  BASINLAB_STATUS_INVALID_ARGUMENT = 2,
  BASINLAB_STATUS_IO = 3,
  BASINLAB_STATUS_GENERATION = 4,
  BASINLAB_STATUS_METRIC = 5,
  BASINLAB_STATUS_PANIC = 6,
} BasinlabStatus;

/**
 * Opaque basin grid.
 */
typedef struct BasinlabGrid BasinlabGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next basinlab call on the same thread.
 */
const char *basinlab_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *basinlab_version(void);

/**
 * Build a grid from `width * height` row-major labels (255 = unresolved).
 *
 * # Safety
 * `labels` must point to `width * height` readable bytes; `out` must be
 * a valid pointer.
 */
enum BasinlabStatus basinlab_grid_new(size_t width,
                                      size_t height,
                                      const uint8_t *labels,
                                      struct BasinlabGrid **out);

/**
 * Release a grid. NULL is ignored.
 *
 * # Safety
 * `grid` must come from this library and not have been freed.
 */
void basinlab_grid_free(struct BasinlabGrid *grid);

/**
 * Width in pixels, or 0 for NULL.
 *
 * # Safety
 * `grid` must be NULL or a live handle.
 */
size_t basinlab_grid_width(const struct BasinlabGrid *grid);

/**
 * Height in pixels, or 0 for NULL.
 *
 * # Safety
 * `grid` must be NULL or a live handle.
 */
size_t basinlab_grid_height(const struct BasinlabGrid *grid);

/**
 * Number of distinct attractor labels present (unresolved excluded), or
 * 0 for NULL.
 *
 * # Safety
 * `grid` must be NULL or a live handle.
 */
size_t basinlab_grid_num_labels(const struct BasinlabGrid *grid);

/**
 * Copy the row-major labels into `out`, which holds `len` bytes; `len`
 * must equal width * height.
 *
 * # Safety
 * `out` must point to `len` writable bytes.
 */
enum BasinlabStatus basinlab_grid_copy_labels(const struct BasinlabGrid *grid,
                                              uint8_t *out,
                                              size_t len);

/**
 * Load an 8-bit grayscale PNG basin image.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum BasinlabStatus basinlab_grid_read_png(const char *path, struct BasinlabGrid **out);

/**
 * Write a grid as an 8-bit grayscale PNG (pixel value = label).
 *
 * # Safety
 * `grid` must be a live handle; `path` a NUL-terminated string.
 */
enum BasinlabStatus basinlab_grid_write_png(const struct BasinlabGrid *grid, const char *path);

/**
 * Compute a basin. `system_json` describes the system, e.g.
 * `{"system":"duffing","gamma":0.3,"omega":1.0}`; `config_json` is NULL
 * for the per-system integrator defaults or a complete settings object.
 *
 * # Safety
 * String arguments must be NUL-terminated (or NULL where allowed); `out`
 * must be a valid pointer.
 */
enum BasinlabStatus basinlab_compute_basin(const char *system_json,
                                           const char *config_json,
                                           double x_min,
                                           double x_max,
                                           double y_min,
                                           double y_max,
                                           size_t resolution,
                                           struct BasinlabGrid **out);

/**
 * One Monte Carlo estimate of the uncertainty dimension with box sizes
 * 3..=33 step 3 and `boxes_per_size` boxes per size.
 *
 * # Safety
 * `grid` must be a live handle; `out` a valid pointer.
 */
enum BasinlabStatus basinlab_fractal_dimension(const struct BasinlabGrid *grid,
                                               size_t boxes_per_size,
                                               uint64_t seed,
                                               double *out);

/**
 * One Monte Carlo estimate of Sb and Sbb from the same `n_boxes` boxes of
 * side `box_size`. `sbb` is set to NaN when no sampled box contained a
 * boundary.
 *
 * # Safety
 * `grid` must be a live handle; `sb` and `sbb` valid pointers.
 */
enum BasinlabStatus basinlab_basin_entropy(const struct BasinlabGrid *grid,
                                           size_t box_size,
                                           size_t n_boxes,
                                           uint64_t seed,
                                           double *sb,
                                           double *sbb);

/**
 * Wada test by merging with fattening radius `fattening_r`; `is_wada`
 * receives 1 or 0.
 *
 * # Safety
 * `grid` must be a live handle; `is_wada` a valid pointer.
 */
enum BasinlabStatus basinlab_wada(const struct BasinlabGrid *grid,
                                  size_t fattening_r,
                                  int *is_wada);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BASINLAB_H */
