/* C interface for the rieszkit toolkit. Generated by cbindgen; do not edit. */

#ifndef RIESZKIT_H
#define RIESZKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum {
  RK_STATUS_OK = 0,
  RK_STATUS_NULL_POINTER = 1,
  RK_STATUS_INVALID_ARGUMENT = 2,
  RK_STATUS_NOT_FOUND = 3,
  RK_STATUS_NUMERIC_ERROR = 4,
  RK_STATUS_BUFFER_TOO_SMALL = 5,
} RkStatus;

/**
 * Opaque handle to a normalized union of closed intervals.
 */
typedef struct RkIntervalSet RkIntervalSet;

/**
 * Witness verification summary (see `rk_witness_box`).
 */
typedef struct {
  double alpha;
  double epsilon;
  double eta;
  uint32_t p;
  uint32_t r;
  int64_t m_tilde;
  double energy_on_s;
  double coeff_energy;
  double bound;
  bool satisfied;
} RkWitnessReport;

/**
 * Approximate arithmetic progression extracted from a separated set.
 */
typedef struct {
  /**
   * Common difference (a positive multiple of the requested factor).
   */
  uint64_t c;
  /**
   * Offset of the fitted progression `c*j + d`.
   */
  double d;
  /**
   * Largest observed deviation `|s(j) - c*j - d|`.
   */
  double max_deviation;
  /**
   * Number of members written to the caller's buffer (`2m + 1`).
   */
  size_t len;
  /**
   * Lattice denominator used by the rounding step.
   */
  uint64_t lattice_n;
} RkApResult;

/**
 * Square-free progression obstruction summary.
 */
typedef struct {
  uint64_t p;
  /**
   * Smallest prime above `p`.
   */
  uint64_t q;
  /**
   * Theoretical cap `q^2 - 1` on the progression length.
   */
  uint64_t cap;
  size_t observed;
  int64_t observed_start;
} RkSquarefreeReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rk_version(void);

/**
 * Human-readable name of a status code (static storage).
 */
const char *rk_status_name(RkStatus status);

/**
 * Builds an interval set from `n_parts` pairs `(lo, hi)` laid out
 * consecutively in `pairs`. The result must be freed with
 * `rk_interval_set_free`.
 *
 * # Safety
 * `pairs` must point to `2 * n_parts` readable doubles and `out` must be a
 * valid writable pointer.
 */
RkStatus rk_interval_set_new(const double *pairs, size_t n_parts, RkIntervalSet **out);

/**
 * Builds the deleted set `V` at the given parameters.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
RkStatus rk_build_v(double alpha, double epsilon, uint32_t depth, RkIntervalSet **out);

/**
 * Builds the kept set `S = [-1/2, 1/2] \ V`.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
RkStatus rk_build_s(double alpha, double epsilon, uint32_t depth, RkIntervalSet **out);

/**
 * Frees a handle returned by this library. NULL is ignored.
 *
 * # Safety
 * `set` must have been produced by this library and not freed before.
 */
void rk_interval_set_free(RkIntervalSet *set);

/**
 * # Safety
 * `set` and `out` must be valid pointers.
 */
RkStatus rk_interval_set_measure(const RkIntervalSet *set, double *out);

/**
 * # Safety
 * `set` and `out` must be valid pointers.
 */
RkStatus rk_interval_set_num_parts(const RkIntervalSet *set, size_t *out);

/**
 * Copies the parts as `(lo, hi)` pairs into `buf`; `cap_pairs` is the number
 * of pairs the buffer can hold.
 *
 * # Safety
 * `buf` must point to `2 * cap_pairs` writable doubles.
 */
RkStatus rk_interval_set_copy_parts(const RkIntervalSet *set, double *buf, size_t cap_pairs);

/**
 * `window \ set` as a new handle over the window `[lo, hi]`.
 *
 * # Safety
 * `set` and `out` must be valid pointers.
 */
RkStatus rk_interval_set_complement_in(const RkIntervalSet *set,
                                       double lo,
                                       double hi,
                                       RkIntervalSet **out);

/**
 * The integral of `e^{2πiθx}` over the set, split into real and imaginary
 * parts.
 *
 * # Safety
 * All pointers must be valid.
 */
RkStatus rk_exp_inner(double theta, const RkIntervalSet *set, double *out_re, double *out_im);

/**
 * Extremal eigenvalues of the Gram matrix of `n` distinct frequencies over
 * the set.
 *
 * # Safety
 * `freqs` must point to `n` readable doubles; out-pointers must be writable.
 */
RkStatus rk_gram_extremal_eigs(const double *freqs,
                               size_t n,
                               const RkIntervalSet *set,
                               double *out_lambda_min,
                               double *out_lambda_max);

/**
 * Runs the box-coefficient witness pipeline on the progression
 * `p*alpha*j + d` against the kept set at the given depth and verifies the
 * energy bound `R*eta/2^p * sum |a_j|^2`.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
RkStatus rk_witness_box(double alpha,
                        double epsilon,
                        double eta,
                        uint32_t r,
                        uint32_t p,
                        double d,
                        uint32_t depth,
                        RkWitnessReport *out);

/**
 * Extracts an approximate arithmetic progression of length `2m + 1` with
 * deviation at most `delta` and common difference a multiple of `lmult`
 * from `n` strictly increasing points. Members are written to `s_buf`.
 *
 * Returns `NotFound` when the finite window holds no progression of the
 * requested length; `out.len` then carries the longest length found.
 *
 * # Safety
 * `points` must hold `n` readable doubles and `s_buf` must hold `s_cap`
 * writable doubles.
 */
RkStatus rk_extract_approx_ap(const double *points,
                              size_t n,
                              uint32_t m,
                              double delta,
                              uint64_t lmult,
                              RkApResult *out,
                              double *s_buf,
                              size_t s_cap);

/**
 * Longest square-free progression with difference `p` up to `limit`,
 * together with the prime-square cap.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
RkStatus rk_squarefree_obstruction(uint64_t p, uint64_t limit, RkSquarefreeReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIESZKIT_H */
