#ifndef LOOPWALK_H
#define LOOPWALK_H

/* Generated by cbindgen from loopwalk-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum LwStatus {
  LW_STATUS_OK = 0,
  // A required pointer argument was null.
  LW_STATUS_NULL_POINTER = 1,
  // A parameter was out of range or the configuration is inconsistent.
  LW_STATUS_INVALID_ARGUMENT = 2,
  // A numerical contract was violated while running.
  LW_STATUS_NUMERICAL = 3,
  // The state's trace fell below the floor, so the value does not exist.
  LW_STATUS_VANISHED = 4,
  // The requested observable was not recorded at this step.
  LW_STATUS_UNAVAILABLE = 5,
  // The engine panicked; state may be lost but the process survives.
  LW_STATUS_PANIC = 6,
} LwStatus;

// Coin noise channel selector.
typedef enum LwNoiseKind {
  LW_NOISE_KIND_NONE = 0,
  LW_NOISE_KIND_DEPOLARIZING = 1,
  LW_NOISE_KIND_DEPHASING = 2,
} LwNoiseKind;

// An experiment being configured. Opaque.
typedef struct LwExperiment LwExperiment;

// Records from one finished run. Opaque.
typedef struct LwResults LwResults;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the last error message (NUL-terminated) into `buf`. Returns the full
// length of the message including the NUL, regardless of how much fit; a
// null or empty buffer just queries the needed size.
size_t lw_last_error(char *buf, size_t len);

// Create an experiment: `n` ring sites, sink of strength `sink_strength`
// at `sink_site`, symmetric coin, balanced initial coin state at site 0,
// no noise. Returns null (see `lw_last_error`) when the parameters are
// invalid. Free with `lw_experiment_free`.
struct LwExperiment *lw_experiment_new(size_t n, size_t sink_site, double sink_strength);

// Release an experiment handle. Null is ignored.
void lw_experiment_free(struct LwExperiment *exp);

// Use the rotation coin with angle `theta`.
enum LwStatus lw_experiment_set_coin_rotation(struct LwExperiment *exp, double theta);

// Use the built-in symmetric coin (the default).
enum LwStatus lw_experiment_set_coin_symmetric(struct LwExperiment *exp);

// Set the initial coin state cos(delta/2)|up> + e^{i eta} sin(delta/2)|down>
// at `start_site`.
enum LwStatus lw_experiment_set_initial(struct LwExperiment *exp,
                                        double delta_init,
                                        double eta,
                                        size_t start_site);

// Select the coin noise channel applied before each step.
enum LwStatus lw_experiment_set_noise(struct LwExperiment *exp,
                                      enum LwNoiseKind kind,
                                      double strength,
                                      double dephase_angle);

// Record the per-site occupation at every step.
enum LwStatus lw_experiment_record_distribution(struct LwExperiment *exp, bool enable);

// Record MID at every step divisible by `every` (0 means every step).
enum LwStatus lw_experiment_record_mid(struct LwExperiment *exp, bool enable, size_t every);

// Evolve for `t_max` steps with the density-matrix engine. Returns records
// for steps 0..=t_max, or null on failure (see `lw_last_error`). Free with
// `lw_results_free`. The experiment handle stays valid and reusable.
struct LwResults *lw_experiment_run(struct LwExperiment *exp, size_t t_max);

// Release a results handle. Null is ignored.
void lw_results_free(struct LwResults *res);

// Number of recorded steps (t_max + 1), or 0 for a null handle.
size_t lw_results_len(const struct LwResults *res);

// Ring size the results were produced with, or 0 for a null handle.
size_t lw_results_sites(const struct LwResults *res);

// Transport efficiency at step `t`.
enum LwStatus lw_results_te(const struct LwResults *res, size_t t, double *out);

// Survival probability (state trace) at step `t`.
enum LwStatus lw_results_trace(const struct LwResults *res, size_t t, double *out);

// MID at step `t`. `LW_STATUS_UNAVAILABLE` when MID was not recorded at
// this step, `LW_STATUS_VANISHED` when the state had been fully absorbed.
enum LwStatus lw_results_mid(const struct LwResults *res, size_t t, double *out);

// Copy the per-site occupation at step `t` into `buf` (capacity `len`,
// which must be at least the ring size).
enum LwStatus lw_results_distribution(const struct LwResults *res,
                                      size_t t,
                                      double *buf,
                                      size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOOPWALK_H */
