#ifndef SQZVAC_H
#define SQZVAC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `phi` is the squeezing phase.
 */
#define SQZ_PHASE_CONSTANT 0

/**
 * `phi` is the phase at the atomic frequency; the phase advances by
 * `pi Delta / Omega`.
 */
#define SQZ_PHASE_LINEAR 1

typedef enum {
  SQZ_STATUS_OK = 0,
  SQZ_STATUS_NULL_POINTER = 1,
  SQZ_STATUS_INVALID_PARAMETER = 2,
  SQZ_STATUS_AMPLIFICATION_THRESHOLD = 3,
  SQZ_STATUS_DEGENERATE_DRIVE = 4,
  SQZ_STATUS_SINGULAR_DENOMINATOR = 5,
  /**
   * Integrator or quadrature failure.
   */
  SQZ_STATUS_NUMERICAL_FAILURE = 6,
  SQZ_STATUS_DEGENERATE_CONDITION = 7,
  SQZ_STATUS_UNDEFINED_CONDITION = 8,
  SQZ_STATUS_INVALID_CONFIG = 9,
  /**
   * A Rust panic was caught at the boundary.
   */
  SQZ_STATUS_INTERNAL = 10,
} SqzStatus;

/**
 * Opaque model handle.
 */
typedef struct SqzModel SqzModel;

typedef struct {
  double gamma;
  double epsilon;
  double omega_rabi;
  double delta;
  double xi_abs;
  double delta_n;
  double delta_m;
  /**
   * `SQZ_PHASE_CONSTANT` or `SQZ_PHASE_LINEAR`.
   */
  int32_t phase_model;
  double phi;
} SqzParams;

typedef struct {
  double n_tilde;
  double m_tilde_re;
  double m_tilde_im;
  double delta_eff;
  double beta_re;
  double beta_im;
  double omega_prime;
  double d;
  double phi;
  /**
   * `N~(N~+1) - |M~|^2`.
   */
  double physicality_margin;
} SqzEffectiveParams;

typedef struct {
  double sigma_minus_re;
  double sigma_minus_im;
  double sigma_z;
} SqzBlochState;

typedef struct {
  /**
   * Negative when the model predicts gain.
   */
  double gamma_decay;
  /**
   * `INFINITY` when `gamma_decay` is zero.
   */
  double tau_c;
  double d;
  double alpha;
  double im_m_tilde;
} SqzTimescales;

typedef struct {
  double tau_c;
  double tau_d_exact;
  double tau_d_frequent;
  double ratio;
  bool sustainable;
} SqzZeno;

typedef struct {
  double phi_star;
  double phi_companion;
  double zeta;
  /**
   * `NAN` when `delta_M <= 0`.
   */
  double omega_tilde_required;
  /**
   * 1 feasible, 0 infeasible, -1 not applicable.
   */
  int32_t feasible;
  double residual;
} SqzSustainability;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model from explicit parameters. Free it with [`sqz_model_free`].
 */
SqzStatus sqz_model_new(const SqzParams *params, SqzModel **out);

/**
 * Creates a model from the text of a run configuration.
 */
SqzStatus sqz_model_from_config(const char *text, SqzModel **out);

/**
 * Releases a model. Null is accepted.
 */
void sqz_model_free(SqzModel *model);

/**
 * Reservoir spectra `N(x)` and `|M(x)|`.
 */
SqzStatus sqz_spectra(const SqzModel *model, double x, double *n_out, double *m_abs_out);

SqzStatus sqz_effective_params(const SqzModel *model, SqzEffectiveParams *out);

/**
 * Closed-form steady state.
 */
SqzStatus sqz_steady_state(const SqzModel *model, SqzBlochState *out);

/**
 * Integrates the Bloch equations from `initial` and writes the state at
 * each of the `count` non-decreasing `times` into `out`.
 */
SqzStatus sqz_bloch_trajectory(const SqzModel *model,
                               SqzBlochState initial,
                               const double *times,
                               size_t count,
                               SqzBlochState *out);

SqzStatus sqz_timescales(const SqzModel *model, SqzTimescales *out);

/**
 * Dwell-time figures for decay parameter `gamma_decay` and measurement
 * time `tau_m`.
 */
SqzStatus sqz_zeno(double gamma_decay, double tau_m, SqzZeno *out);

/**
 * Squeezing phase at which `Im M~` vanishes.
 */
SqzStatus sqz_sustainability(const SqzModel *model, SqzSustainability *out);

/**
 * Message for the most recent failure on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *sqz_last_error(void);

/**
 * Static description of a status code.
 */
const char *sqz_status_name(SqzStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQZVAC_H */
