#ifndef SIXLEVEL_H
#define SIXLEVEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SixlevelStatus {
  SIXLEVEL_STATUS_OK = 0,
  SIXLEVEL_STATUS_NULL_POINTER = 1,
  SIXLEVEL_STATUS_INVALID_INPUT = 2,
  SIXLEVEL_STATUS_NUMERICAL = 3,
  SIXLEVEL_STATUS_PANIC = 4,
} SixlevelStatus;

/**
 * Opaque model handle: a validated run configuration.
 */
typedef struct SixlevelModel SixlevelModel;

typedef struct SixlevelComplex {
  double re;
  double im;
} SixlevelComplex;

/**
 * Susceptibility coefficients in SI units.
 */
typedef struct SixlevelSusceptibilities {
  struct SixlevelComplex chi1_p;
  struct SixlevelComplex chi3_ps;
  struct SixlevelComplex chi3_pt;
  struct SixlevelComplex chi5_pst;
  struct SixlevelComplex chi3_sp;
  struct SixlevelComplex chi5_spt;
  struct SixlevelComplex chi5_tps;
} SixlevelSusceptibilities;

/**
 * Total phases of the eight basis rows at one medium length.
 */
typedef struct SixlevelPhases {
  double length_m;
  /**
   * Row order |000> .. |111>, probe bit most significant.
   */
  double row_total[8];
  double total_nonlinear;
  double conditional;
  /**
   * Residual entanglement of the gate output for |+++>.
   */
  double zeta;
} SixlevelPhases;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *sixlevel_last_error(void);

/**
 * Creates a model from a JSON run configuration. A null `config_json` gives
 * the reference scenario.
 *
 * # Safety
 * `config_json` is null or a nul-terminated string; `out` is a valid pointer.
 */
enum SixlevelStatus sixlevel_model_new(const char *config_json, struct SixlevelModel **out);

/**
 * # Safety
 * `model` is null or was returned by [`sixlevel_model_new`] and not yet freed.
 */
void sixlevel_model_free(struct SixlevelModel *model);

/**
 * # Safety
 * `model` is a live handle and `out` a valid pointer.
 */
enum SixlevelStatus sixlevel_susceptibilities(const struct SixlevelModel *model,
                                              struct SixlevelSusceptibilities *out);

/**
 * Group velocities (probe, signal, trigger) in m/s; an unbounded velocity is
 * reported as +infinity.
 *
 * # Safety
 * `model` is a live handle and `out` points to three doubles.
 */
enum SixlevelStatus sixlevel_group_velocities(const struct SixlevelModel *model, double *out);

/**
 * Phase table at `length_m`; a negative length selects the configured one.
 *
 * # Safety
 * `model` is a live handle and `out` a valid pointer.
 */
enum SixlevelStatus sixlevel_phases(const struct SixlevelModel *model,
                                    double length_m,
                                    struct SixlevelPhases *out);

/**
 * Medium length at which the total nonlinear phase reaches `target_rad`.
 *
 * # Safety
 * `model` is a live handle and `out` a valid pointer.
 */
enum SixlevelStatus sixlevel_length_for_phase(const struct SixlevelModel *model,
                                              double target_rad,
                                              double *out);

/**
 * Residual three-way entanglement of a normalized three-qubit state given as
 * eight interleaved (re, im) pairs.
 *
 * # Safety
 * `amplitudes` points to sixteen doubles and `out` is a valid pointer.
 */
enum SixlevelStatus sixlevel_residual_entanglement(const double *amplitudes, double *out);

/**
 * Full reference-scenario report for this model as JSON. Release the string
 * with [`sixlevel_string_free`].
 *
 * # Safety
 * `model` is a live handle and `out` a valid pointer.
 */
enum SixlevelStatus sixlevel_report_json(const struct SixlevelModel *model, char **out);

/**
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void sixlevel_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIXLEVEL_H */
