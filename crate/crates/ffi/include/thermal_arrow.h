#ifndef THERMAL_ARROW_H
#define THERMAL_ARROW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero means success.
 */
typedef enum TaStatus {
  TA_STATUS_OK = 0,
  /**
   * A parameter or state failed validation.
   */
  TA_STATUS_INVALID_ARGUMENT = 1,
  /**
   * A required pointer was null.
   */
  TA_STATUS_NULL_POINTER = 2,
  /**
   * An output buffer is shorter than required.
   */
  TA_STATUS_BUFFER_TOO_SMALL = 3,
  /**
   * Unexpected failure inside the library.
   */
  TA_STATUS_INTERNAL = 4,
} TaStatus;

/**
 * Opaque heat maps over a (t, s) grid.
 */
typedef struct TaHeatGrid TaHeatGrid;

/**
 * Opaque multi-qubit density matrix.
 */
typedef struct TaState TaState;

typedef struct TaWitnessVerdict {
  double reverse_flow_magnitude;
  double classical_bound;
  /**
   * 1 when the observed flow exceeds the separable bound.
   */
  int32_t certified_entangled;
} TaWitnessVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ta_version(void);

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL, or
 * 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ta_last_error_message(char *buf, size_t len);

/**
 * Product of single-qubit thermal states with excited populations `lambdas`.
 *
 * # Safety
 * `lambdas` must point to `n` doubles; `out` must be a valid pointer.
 */
enum TaStatus ta_state_product(const double *lambdas, size_t n, struct TaState **out);

/**
 * Correlated A–C pair with thermal marginals, tensored with a thermal B, in
 * qubit order (A, B, C).
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TaStatus ta_state_rho_abc(double lambda_a,
                               double lambda_c,
                               double gamma,
                               double lambda_b,
                               struct TaState **out);

/**
 * # Safety
 * `state` must be null or a handle from this library not yet freed.
 */
void ta_state_free(struct TaState *state);

/**
 * Number of qubits, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t ta_state_num_qubits(const struct TaState *state);

/**
 * Excited population of each qubit.
 *
 * # Safety
 * `state` must be a live handle and `out` must hold `out_len` doubles.
 */
enum TaStatus ta_state_local_energies(const struct TaState *state, double *out, size_t out_len);

/**
 * Mutual information I(A:B) in nats between two disjoint qubit sets.
 *
 * # Safety
 * `state` must be a live handle, the index arrays must hold the given
 * counts and `out` must be valid.
 */
enum TaStatus ta_state_mutual_information(const struct TaState *state,
                                          const size_t *part_a,
                                          size_t len_a,
                                          const size_t *part_b,
                                          size_t len_b,
                                          double *out);

/**
 * Evolve a three-qubit state over a `resolution` x `resolution` grid of
 * t in [0, t_max] and s in [0, s_max], recording the heat into each qubit.
 *
 * # Safety
 * `state` must be a live handle and `out` must be valid.
 */
enum TaStatus ta_heat_grid_sweep(const struct TaState *state,
                                 double t_max,
                                 double s_max,
                                 size_t resolution,
                                 struct TaHeatGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from this library not yet freed.
 */
void ta_heat_grid_free(struct TaHeatGrid *grid);

/**
 * Number of cells (resolution squared), or 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t ta_heat_grid_len(const struct TaHeatGrid *grid);

/**
 * Copy the heat into qubit `site` (0 = A, 1 = B, 2 = C), row-major with t as
 * the slow index.
 *
 * # Safety
 * `grid` must be a live handle and `out` must hold `out_len` doubles.
 */
enum TaStatus ta_heat_grid_heat(const struct TaHeatGrid *grid,
                                size_t site,
                                double *out,
                                size_t out_len);

/**
 * Entanglement witness from the heat into A of a bipartite exchange.
 *
 * # Safety
 * `out` must be valid.
 */
enum TaStatus ta_witness_from_heat(double q_a,
                                   double beta_a,
                                   double beta_b,
                                   size_t dim_small,
                                   struct TaWitnessVerdict *out);

/**
 * Random walk of marginal vectors. Writes `(num_steps + 1) * n` doubles,
 * point-major, to `out`.
 *
 * # Safety
 * `initial` must hold `n` doubles and `out` must hold `out_len` doubles.
 */
enum TaStatus ta_walk_run(const double *initial,
                          size_t n,
                          int32_t constrained,
                          double step_max,
                          size_t num_steps,
                          uint64_t seed,
                          double *out,
                          size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THERMAL_ARROW_H */
