#ifndef EQUITANGENT_H
#define EQUITANGENT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum EtStatus {
  ET_STATUS_OK = 0,
  /*
   Malformed or out-of-domain input.
   */
  ET_STATUS_INVALID_INPUT = 1,
  /*
   A mathematical precondition does not hold.
   */
  ET_STATUS_PRECONDITION = 2,
  /*
   A numerical procedure missed its accuracy target.
   */
  ET_STATUS_NUMERICAL = 3,
  /*
   A required pointer argument was null.
   */
  ET_STATUS_NULL_POINTER = 4,
  /*
   Internal panic caught at the boundary.
   */
  ET_STATUS_PANIC = 5,
} EtStatus;

/*
 Oriented chain of tangent circles.
 */
typedef struct EtChain EtChain;

/*
 Polygon with a framing.
 */
typedef struct EtFramedPolygon EtFramedPolygon;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *et_last_error(void);

/*
 Chain from `n` centers (`xy`, `2n` doubles) and signed radii (`n`
 doubles). Tangency is checked against `tol`.
 */
enum EtStatus et_chain_new(const double *xy,
                           const double *radii,
                           size_t n,
                           double tol,
                           struct EtChain **result);

/*
 Random generic chain of `n >= 4` circles.
 */
enum EtStatus et_chain_random(size_t n, uint64_t seed, struct EtChain **result);

/*
 Releases a chain; null is ignored.
 */
void et_chain_free(struct EtChain *chain);

/*
 Number of circles, or 0 for null.
 */
size_t et_chain_len(const struct EtChain *chain);

/*
 Copies the centers (`2n` doubles) and signed radii (`n` doubles).
 */
enum EtStatus et_chain_get(const struct EtChain *chain, double *xy, double *radii);

/*
 Rank of the distribution plus its first brackets (`2n` when bracket
 generating) with commutator step `h`.
 */
enum EtStatus et_chain_bracket_rank(const struct EtChain *chain, double h, size_t *rank);

/*
 The kernel field: vertex velocities (`2n` doubles) and radius rates
 (`n` doubles).
 */
enum EtStatus et_chain_kernel_field(const struct EtChain *chain, double *velocities, double *rates);

/*
 Framed polygon of tangency points.
 */
enum EtStatus et_chain_to_framed(const struct EtChain *chain, struct EtFramedPolygon **result);

/*
 Frames the polygon with vertices `xy` (`2n` doubles): the unique framing
 for odd `n`, the base member of the family for even `n`.
 */
enum EtStatus et_framed_from_polygon(const double *xy,
                                     size_t n,
                                     double tol,
                                     struct EtFramedPolygon **result);

/*
 Framed polygon from vertices (`2n` doubles) and framing directions in
 radians (`n` doubles), validated against `tol`.
 */
enum EtStatus et_framed_new(const double *xy,
                            const double *directions,
                            size_t n,
                            double tol,
                            struct EtFramedPolygon **result);

/*
 Releases a framed polygon; null is ignored.
 */
void et_framed_free(struct EtFramedPolygon *fp);

/*
 Number of vertices, or 0 for null.
 */
size_t et_framed_len(const struct EtFramedPolygon *fp);

/*
 Copies the vertices (`2n` doubles) and framing directions (`n`
 doubles).
 */
enum EtStatus et_framed_get(const struct EtFramedPolygon *fp, double *xy, double *directions);

/*
 Largest framing residual over the sides.
 */
enum EtStatus et_framed_max_residual(const struct EtFramedPolygon *fp, double *residual);

/*
 Chain of circles through consecutive vertex pairs tangent to the
 framing.
 */
enum EtStatus et_framed_to_chain(const struct EtFramedPolygon *fp,
                                 double tol,
                                 struct EtChain **result);

/*
 Framing obstruction of an even polygon (`2n` doubles); zero iff a
 framing exists.
 */
enum EtStatus et_framing_obstruction_even(const double *xy, size_t n, double *obstruction);

/*
 Eigenvalue magnitudes of the linearized flow for odd `n`; writes
 `(n − 1)/2` values into `magnitudes`, whose capacity is `cap`.
 */
enum EtStatus et_spectrum(size_t n, double *magnitudes, size_t cap, size_t *len);

/*
 Closure defect of `n` Poncelet steps from angle `start` between the
 circle of radius `big_r` at the origin and the circle of radius `r`
 centered at `(d, 0)`.
 */
enum EtStatus et_poncelet_closure(size_t n,
                                  double big_r,
                                  double r,
                                  double d,
                                  double start,
                                  double *defect);

/*
 Residual of Euler's (`n = 3`) or Fuss's (`n = 4`) relation.
 */
enum EtStatus et_euler_fuss_residual(size_t n, double big_r, double r, double d, double *residual);

/*
 Rank of the three generators and their two brackets at a bigon state.
 */
enum EtStatus et_bigon_rank(double p,
                            double q,
                            double r,
                            double alpha,
                            double phi,
                            double h,
                            size_t *rank);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQUITANGENT_H */
