#ifndef CMAB_H
#define CMAB_H

#include <stdbool.h>
#include <stdint.h>

#define CMAB_OK 0

#define CMAB_ERR_NULL_POINTER 1

#define CMAB_ERR_INVALID_UTF8 2

#define CMAB_ERR_INVALID_ARGUMENT 3

#define CMAB_ERR_CONFIG 4

#define CMAB_ERR_IO 5

#define CMAB_ERR_UNSUPPORTED 6

#define CMAB_ERR_PANIC 7

/**
 * A prepared experiment: instance, oracle, gap profile and reward table.
 */
typedef struct CmabExperiment CmabExperiment;

/**
 * One repetition of an experiment, advanced round by round.
 */
typedef struct CmabRun CmabRun;

/**
 * One row of a trajectory.
 */
typedef struct CmabRecord {
  uint32_t run_id;
  uint64_t t;
  uint64_t super_arm;
  double realized_reward;
  double expected_reward;
  double regret;
  double cumulative_regret;
  bool oracle_failed;
} CmabRecord;

/**
 * Library version as a static NUL-terminated string.
 */
const char *cmab_version(void);

/**
 * Message of the last failed call on this thread, or null.
 *
 * The pointer stays valid until the next failing call on the same thread
 * or [`cmab_clear_last_error`].
 */
const char *cmab_last_error_message(void);

void cmab_clear_last_error(void);

/**
 * Builds an experiment from TOML text. Instance files are resolved against
 * the current directory.
 *
 * # Safety
 * `config_toml` must be a NUL-terminated string and `out` a valid pointer.
 */
int32_t cmab_experiment_new(const char *config_toml, struct CmabExperiment **out);

/**
 * # Safety
 * `experiment` must come from [`cmab_experiment_new`] and not be freed yet.
 * Null is ignored.
 */
void cmab_experiment_free(struct CmabExperiment *experiment);

/**
 * # Safety
 * Pointers must be valid; `experiment` must be live.
 */
int32_t cmab_experiment_num_arms(const struct CmabExperiment *experiment, uint64_t *out);

/**
 * # Safety
 * Pointers must be valid; `experiment` must be live.
 */
int32_t cmab_experiment_horizon(const struct CmabExperiment *experiment, uint64_t *out);

/**
 * Expected reward of the best super arm under the true means.
 *
 * # Safety
 * Pointers must be valid; `experiment` must be live.
 */
int32_t cmab_experiment_opt(const struct CmabExperiment *experiment, double *out);

/**
 * Evaluates the named regret bound at horizon `n`.
 *
 * # Safety
 * Pointers must be valid; `name` NUL-terminated; `experiment` live.
 */
int32_t cmab_experiment_bound(const struct CmabExperiment *experiment,
                              const char *name,
                              double n,
                              double *out);

/**
 * Plays repetition `run_id` to the horizon and reports its cumulative regret.
 *
 * # Safety
 * Pointers must be valid; `experiment` must be live.
 */
int32_t cmab_experiment_run(const struct CmabExperiment *experiment,
                            uint32_t run_id,
                            double *out_cumulative_regret);

/**
 * Runs all repetitions and writes the CSV and metadata files under `dir`.
 *
 * # Safety
 * Pointers must be valid; `dir` NUL-terminated; `experiment` live.
 */
int32_t cmab_experiment_write(const struct CmabExperiment *experiment, const char *dir);

/**
 * Starts repetition `run_id`. The run keeps the experiment data alive on
 * its own, so the experiment may be freed first.
 *
 * # Safety
 * Pointers must be valid; `experiment` must be live.
 */
int32_t cmab_run_new(const struct CmabExperiment *experiment,
                     uint32_t run_id,
                     struct CmabRun **out);

/**
 * Plays the next round.
 *
 * # Safety
 * Pointers must be valid; `run` must come from [`cmab_run_new`].
 */
int32_t cmab_run_step(struct CmabRun *run, struct CmabRecord *out);

/**
 * # Safety
 * `run` must come from [`cmab_run_new`] and not be freed yet. Null is ignored.
 */
void cmab_run_free(struct CmabRun *run);

/**
 * Sampling threshold for `f(x) = gamma * x^omega`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t cmab_sampling_threshold(double delta,
                                double p,
                                double n,
                                double gamma,
                                double omega,
                                double *out);

/**
 * Riemann zeta for `c > 1`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t cmab_zeta(double c, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t cmab_hoeffding_tail(uint64_t n, double delta, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t cmab_chernoff_tail(uint64_t n, double mu, double delta, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t cmab_bernstein_tail(uint64_t n, double bound, double variance_sum, double t, double *out);

#endif  /* CMAB_H */
