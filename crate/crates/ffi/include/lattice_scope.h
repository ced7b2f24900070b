#ifndef LATTICE_SCOPE_H
#define LATTICE_SCOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LsCountMode {
  LS_COUNT_MODE_SUBSETS = 0,
  LS_COUNT_MODE_PRUNED = 1,
} LsCountMode;

typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_INVALID_INPUT = 2,
  LS_STATUS_CAP_EXCEEDED = 3,
  LS_STATUS_INTERNAL = 4,
} LsStatus;

/**
 * Opaque polynomial family.
 */
typedef struct LsFamily LsFamily;

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next library call on the same thread.
 */
const char *ls_last_error(void);

/**
 * Parses descending coefficients "a_n,...,a_1"; the content is divided out.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable pointer.
 */
enum LsStatus ls_family_parse(const char *spec, struct LsFamily **out);

/**
 * # Safety
 * `family` must come from [`ls_family_parse`] and not be freed already.
 * NULL is ignored.
 */
void ls_family_free(struct LsFamily *family);

/**
 * Degree of the family, 0 for NULL.
 *
 * # Safety
 * `family` must be NULL or a live handle.
 */
size_t ls_family_degree(const struct LsFamily *family);

/**
 * Visibility of `(a, b)`. `out_witness_t` receives the smallest witness, or
 * 0 when the point is visible; it may be NULL.
 *
 * # Safety
 * `family` must be a live handle; `out_visible` writable.
 */
enum LsStatus ls_is_visible(const struct LsFamily *family,
                            uint64_t a,
                            uint64_t b,
                            bool *out_visible,
                            uint64_t *out_witness_t);

/**
 * Visible count over `[1, n]^2` and its density.
 *
 * # Safety
 * `family` must be a live handle; outputs writable.
 */
enum LsStatus ls_density(const struct LsFamily *family,
                         uint64_t n,
                         uint64_t *out_count,
                         double *out_density);

/**
 * Inclusion-exclusion count over `[1, n]^2`.
 *
 * # Safety
 * `family` must be a live handle; `out_count` writable.
 */
enum LsStatus ls_exact_count(const struct LsFamily *family,
                             uint64_t n,
                             enum LsCountMode mode,
                             uint64_t *out_count);

/**
 * Euler product over primes up to `prime_bound`, with its tail bound.
 *
 * # Safety
 * `family` must be a live handle; outputs writable (`out_tail` may be NULL).
 */
enum LsStatus ls_constant_cp(const struct LsFamily *family,
                             uint64_t prime_bound,
                             double *out_value,
                             double *out_tail);

/**
 * First all-hidden `size` x `size` block in `[1, max_x] x [1, max_y]`.
 * `out_found` is false when there is none and the corner is left untouched.
 *
 * # Safety
 * `family` must be a live handle; outputs writable.
 */
enum LsStatus ls_find_block(const struct LsFamily *family,
                            uint64_t size,
                            uint64_t max_x,
                            uint64_t max_y,
                            bool *out_found,
                            uint64_t *out_x,
                            uint64_t *out_y);

/**
 * Layers from `(a, b)` to the nearest visible point; -1 past `max_layers`.
 *
 * # Safety
 * `family` must be a live handle; `out_distance` writable.
 */
enum LsStatus ls_radius(const struct LsFamily *family,
                        uint64_t a,
                        uint64_t b,
                        uint64_t max_layers,
                        int64_t *out_distance);

/**
 * Construction through `(a, b)` as JSON. `prime` of 0 picks the next prime
 * above `max(a, b)`. Free the result with [`ls_string_free`].
 *
 * # Safety
 * `out_json` must be writable.
 */
enum LsStatus ls_construct_json(uint64_t a, uint64_t b, uint64_t prime, char **out_json);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void ls_string_free(char *s);

#endif  /* LATTICE_SCOPE_H */
