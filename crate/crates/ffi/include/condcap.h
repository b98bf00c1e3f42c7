#ifndef CONDCAP_H
#define CONDCAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CondcapStatus {
  CONDCAP_STATUS_OK = 0,
  CONDCAP_STATUS_DOMAIN = 1,
  CONDCAP_STATUS_NO_CONVERGENCE = 2,
  CONDCAP_STATUS_POLE = 3,
  CONDCAP_STATUS_CONSTRAINT = 4,
  CONDCAP_STATUS_NO_ROOT = 5,
  CONDCAP_STATUS_RESOLUTION = 6,
  CONDCAP_STATUS_REDRAW_LIMIT = 7,
  CONDCAP_STATUS_NULL_POINTER = 8,
  CONDCAP_STATUS_PANIC = 9,
} CondcapStatus;

/**
 * Opaque condenser for the grid capacity solver.
 */
typedef struct CondcapCondenser CondcapCondenser;

/**
 * Opaque polygonal ring domain.
 */
typedef struct CondcapRing CondcapRing;

typedef struct CondcapComplex {
  double re;
  double im;
} CondcapComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *condcap_last_error(void);

/**
 * Conformal modulus of the quadrilateral `0, 1, A, B`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CondcapStatus condcap_qm(struct CondcapComplex a, struct CondcapComplex b, double *out);

/**
 * Modulus of the quadrilateral `0, 1, A, B` with `A` on the segment `[1, B]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CondcapStatus condcap_qmt(struct CondcapComplex a, struct CondcapComplex b, double *out);

/**
 * Grötzsch modulus μ(r), `0 < r < 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CondcapStatus condcap_mu(double r, double *out);

/**
 * Capacity of the rectangle `(-a, a) × (0, b)` with the slit `[ic, id]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CondcapStatus condcap_cap_rect_segment(double a, double b, double c, double d, double *out);

/**
 * Builds a ring from `m` outer and `m` inner vertices.
 *
 * # Safety
 * `outer` and `inner` must each point to `m` values; `out` must be valid
 * for writes. Release the handle with [`condcap_ring_free`].
 */
enum CondcapStatus condcap_ring_new(const struct CondcapComplex *outer,
                                    const struct CondcapComplex *inner,
                                    uintptr_t m,
                                    struct CondcapRing **out);

/**
 * # Safety
 * `ring` must come from [`condcap_ring_new`] and not be used afterwards.
 */
void condcap_ring_free(struct CondcapRing *ring);

/**
 * Lower bound for the ring capacity from its quadrilateral decomposition.
 *
 * # Safety
 * `ring` must be a live handle and `out` valid for writes.
 */
enum CondcapStatus condcap_ring_lower_bound(const struct CondcapRing *ring, double *out);

/**
 * Condenser formed by the ring between its two polygons.
 *
 * # Safety
 * `ring` must be a live handle and `out` valid for writes. Release the
 * result with [`condcap_condenser_free`].
 */
enum CondcapStatus condcap_ring_condenser(const struct CondcapRing *ring,
                                          struct CondcapCondenser **out);

/**
 * Condenser (unit disk, polygon) for a polygon with `n` vertices.
 *
 * # Safety
 * `vertices` must point to `n` values and `out` be valid for writes.
 */
enum CondcapStatus condcap_condenser_polygon_in_disk(const struct CondcapComplex *vertices,
                                                     uintptr_t n,
                                                     struct CondcapCondenser **out);

/**
 * # Safety
 * `condenser` must come from this library and not be used afterwards.
 */
void condcap_condenser_free(struct CondcapCondenser *condenser);

/**
 * Grid estimate of the capacity with `levels` (2 or 3) refinements.
 *
 * # Safety
 * `condenser` must be a live handle; `value` and `error_estimate` must be
 * valid for writes.
 */
enum CondcapStatus condcap_condenser_estimate(const struct CondcapCondenser *condenser,
                                              uint32_t levels,
                                              double *value,
                                              double *error_estimate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONDCAP_H */
