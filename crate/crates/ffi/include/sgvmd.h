#ifndef SGVMD_H
#define SGVMD_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SgvmdStatus {
  SGVMD_STATUS_OK = 0,
  SGVMD_STATUS_NULL_POINTER = 1,
  SGVMD_STATUS_INVALID_INPUT = 2,
  SGVMD_STATUS_INVALID_CONFIG = 3,
  SGVMD_STATUS_NON_REAL_RESULT = 4,
  SGVMD_STATUS_DEGENERATE_SPECTRUM = 5,
  SGVMD_STATUS_CONVERGENCE_FAILURE = 6,
  SGVMD_STATUS_NOT_OSCILLATORY = 7,
  SGVMD_STATUS_FIT_FAILURE = 8,
  SGVMD_STATUS_DOMAIN_ERROR = 9,
  SGVMD_STATUS_OUT_OF_RANGE = 10,
  SGVMD_STATUS_OTHER = 98,
  SGVMD_STATUS_PANIC = 99,
} SgvmdStatus;

typedef enum SgvmdBoundary {
  SGVMD_BOUNDARY_PERIODIC = 0,
  SGVMD_BOUNDARY_MIRROR = 1,
  SGVMD_BOUNDARY_LINEAR_PREDICTION = 2,
} SgvmdBoundary;

/**
 * Forecasting method selector.
 */
typedef enum SgvmdMethod {
  SGVMD_METHOD_ARIMA = 0,
  SGVMD_METHOD_HOLT_WINTERS = 1,
  SGVMD_METHOD_EMD_ARIMA = 2,
  SGVMD_METHOD_SGVMD_ARIMA = 3,
  SGVMD_METHOD_SGVMD_E_ARIMA = 4,
} SgvmdMethod;

/**
 * Decomposition and forecasting settings. Opaque.
 */
typedef struct SgvmdConfig SgvmdConfig;

/**
 * Result of [`sgvmd_decompose`]. Opaque.
 */
typedef struct SgvmdDecomposition SgvmdDecomposition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null if none.
 * Valid until the next failing call on this thread.
 */
const char *sgvmd_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sgvmd_version(void);

/**
 * New configuration with library defaults.
 */
struct SgvmdConfig *sgvmd_config_new(void);

void sgvmd_config_free(struct SgvmdConfig *config);

/**
 * Penalty weights; only their ratio matters.
 */
enum SgvmdStatus sgvmd_config_set_penalties(struct SgvmdConfig *config, double alpha, double beta);

/**
 * Residual-energy stop relative to the input's energy about its mean.
 */
enum SgvmdStatus sgvmd_config_set_epsilon(struct SgvmdConfig *config, double relative);

enum SgvmdStatus sgvmd_config_set_max_modes(struct SgvmdConfig *config, size_t max_modes);

enum SgvmdStatus sgvmd_config_set_boundary(struct SgvmdConfig *config, enum SgvmdBoundary boundary);

/**
 * ARIMA order-search bounds and differencing order.
 */
enum SgvmdStatus sgvmd_config_set_arima_search(struct SgvmdConfig *config,
                                               size_t max_p,
                                               size_t max_q,
                                               size_t d);

/**
 * Enables Holt-Winters with default smoothing and this season length.
 */
enum SgvmdStatus sgvmd_config_set_season_length(struct SgvmdConfig *config, size_t season_length);

/**
 * Sets `*out` to a new decomposition of `data[0..len]`; free it with
 * [`sgvmd_decomposition_free`].
 */
enum SgvmdStatus sgvmd_decompose(const struct SgvmdConfig *config,
                                 const double *data,
                                 size_t len,
                                 struct SgvmdDecomposition **out);

void sgvmd_decomposition_free(struct SgvmdDecomposition *d);

/**
 * Number of extracted modes; 0 for a null handle.
 */
size_t sgvmd_decomposition_mode_count(const struct SgvmdDecomposition *d);

/**
 * Samples per mode (the input length); 0 for a null handle.
 */
size_t sgvmd_decomposition_len(const struct SgvmdDecomposition *d);

/**
 * Whether extraction stopped at the mode cap rather than the energy stop.
 */
bool sgvmd_decomposition_truncated(const struct SgvmdDecomposition *d);

/**
 * Copies mode `index` into `out`, which must hold at least
 * [`sgvmd_decomposition_len`] values.
 */
enum SgvmdStatus sgvmd_decomposition_mode(const struct SgvmdDecomposition *d,
                                          size_t index,
                                          double *out,
                                          size_t out_len);

/**
 * Normalized angular center frequency of mode `index` in `[0, π]`.
 */
enum SgvmdStatus sgvmd_decomposition_center_frequency(const struct SgvmdDecomposition *d,
                                                      size_t index,
                                                      double *out);

enum SgvmdStatus sgvmd_decomposition_residual(const struct SgvmdDecomposition *d,
                                              double *out,
                                              size_t out_len);

/**
 * Fits `method` on `train[0..len]` and writes `horizon` forecasts to `out`.
 */
enum SgvmdStatus sgvmd_forecast(const struct SgvmdConfig *config,
                                enum SgvmdMethod method,
                                const double *train,
                                size_t len,
                                size_t horizon,
                                double *out,
                                size_t out_len);

/**
 * RMSE, MAPE and MAE of `predicted` against `actual`. `mape` is NaN when
 * an actual value is zero; the other two are still written.
 */
enum SgvmdStatus sgvmd_metrics(const double *actual,
                               const double *predicted,
                               size_t len,
                               double *rmse,
                               double *mape,
                               double *mae);

/**
 * Human-readable status name, static.
 */
const char *sgvmd_status_name(enum SgvmdStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SGVMD_H */
