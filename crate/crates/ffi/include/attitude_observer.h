#ifndef ATTITUDE_OBSERVER_H
#define ATTITUDE_OBSERVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AoDegenerate {
  AO_DEGENERATE_NONE = 0,
  AO_DEGENERATE_ALPHA_ZERO = 1,
  AO_DEGENERATE_COLLINEAR = 2,
} AoDegenerate;

typedef enum AoMode {
  /**
   * `v̂ × (ω_m − b̂)` in each vector channel.
   */
  AO_MODE_FILTERED = 0,
  /**
   * `v̂ × ω_m − v_m × b̂` in each vector channel.
   */
  AO_MODE_LINEAR_VARIANT = 1,
} AoMode;

/**
 * Result code of every fallible call.
 */
typedef enum AoStatus {
  AO_STATUS_OK = 0,
  AO_STATUS_NULL_POINTER = 1,
  AO_STATUS_NON_FINITE = 2,
  AO_STATUS_INVALID_GAIN = 3,
  AO_STATUS_DEGENERATE_REFERENCES = 4,
  AO_STATUS_NO_CERTIFICATE = 5,
  AO_STATUS_INVALID_ARGUMENT = 6,
  AO_STATUS_PANIC = 7,
  AO_STATUS_INTERNAL = 8,
} AoStatus;

/**
 * Opaque observer handle.
 */
typedef struct AoObserver AoObserver;

typedef struct AoVec3 {
  double x;
  double y;
  double z;
} AoVec3;

typedef struct AoState {
  struct AoVec3 alpha_hat;
  struct AoVec3 beta_hat;
  struct AoVec3 b_hat;
} AoState;

/**
 * Scalar observer gains.
 */
typedef struct AoGains {
  double k_alpha;
  double k_beta;
  double l_alpha;
  double l_beta;
} AoGains;

/**
 * One sample of gyro and vector readings, all in body axes.
 */
typedef struct AoMeasurement {
  struct AoVec3 omega_m;
  struct AoVec3 alpha_m;
  struct AoVec3 beta_m;
} AoMeasurement;

typedef struct AoReconstruction {
  /**
   * Unprojected estimate, row-major.
   */
  double r_tilde[9];
  /**
   * Nearest rotation, row-major.
   */
  double r_hat[9];
  enum AoDegenerate degenerate;
} AoReconstruction;

typedef struct AoCertificate {
  double c_omega;
  double mu;
  double epsilon;
  double sigma1;
  double sigma2;
  double mu_prime;
  double sigma_1alpha;
  double sigma_1beta;
  double sigma_2alpha;
  double sigma_2beta;
  double sigma_2alphabeta;
  double sigma_2alpha_prime;
  double sigma_2beta_prime;
} AoCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an observer. `mode` is an [`AoMode`] value. On success `*out` owns
 * a new handle.
 *
 * # Safety
 * Pointer arguments are null or valid; `out` is writable.
 */
enum AoStatus ao_observer_new(const struct AoState *initial,
                              const struct AoGains *gains,
                              uint32_t mode,
                              struct AoObserver **out);

/**
 * Releases a handle. Null is accepted and ignored.
 *
 * # Safety
 * `obs` is null or came from [`ao_observer_new`] and was not freed before.
 */
void ao_observer_free(struct AoObserver *obs);

/**
 * Replaces the estimate; gains and mode are kept.
 *
 * # Safety
 * `obs` is a live handle or null; `state` is null or valid.
 */
enum AoStatus ao_observer_reset(struct AoObserver *obs, const struct AoState *state);

/**
 * Advances the observer by `dt` seconds with `m` held over the step. The new
 * estimate is written to `out` when it is not null. A failed step leaves the
 * handle unchanged.
 *
 * # Safety
 * `obs` is a live handle or null; `m` is null or valid; `out` is null or writable.
 */
enum AoStatus ao_observer_step(struct AoObserver *obs,
                               const struct AoMeasurement *m,
                               double dt,
                               struct AoState *out);

/**
 * Copies the current estimate into `out`.
 *
 * # Safety
 * `obs` is a live handle or null; `out` is null or writable.
 */
enum AoStatus ao_observer_state(const struct AoObserver *obs, struct AoState *out);

/**
 * Rebuilds the attitude from estimated body vectors and the inertial references.
 *
 * # Safety
 * Pointer arguments are null or valid; `out` is writable.
 */
enum AoStatus ao_reconstruct(const struct AoVec3 *alpha_i,
                             const struct AoVec3 *beta_i,
                             const struct AoVec3 *alpha_hat,
                             const struct AoVec3 *beta_hat,
                             struct AoReconstruction *out);

/**
 * Computes the strict Lyapunov certificate for scalar gains, references and
 * a body-rate bound `c_omega`.
 *
 * # Safety
 * Pointer arguments are null or valid; `out` is writable.
 */
enum AoStatus ao_certify(const struct AoGains *gains,
                         const struct AoVec3 *alpha_i,
                         const struct AoVec3 *beta_i,
                         double c_omega,
                         struct AoCertificate *out);

/**
 * Static description of a status code.
 */
const char *ao_status_message(enum AoStatus status);

/**
 * Message of the last failed call on this thread, or "" after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *ao_last_error_message(void);

/**
 * Library version, e.g. "0.1.0".
 */
const char *ao_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATTITUDE_OBSERVER_H */
