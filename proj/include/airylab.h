#ifndef AIRYLAB_H
#define AIRYLAB_H

/* C interface to the airylab core: deterministic samplers for Dyson
 * Brownian motion, Brownian melons and nonintersecting bridges, Airy
 * kernel / Tracy-Widom numerics, and the statistical verification
 * harness. All functions return a status code; handles are opaque. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  AIRYLAB_OK = 0,
  AIRYLAB_ERR_CONFIG = 2,    /* invalid configuration or precondition */
  AIRYLAB_ERR_NUMERIC = 3,   /* numerical failure */
  AIRYLAB_ERR_RANGE = 4,     /* argument outside a supported range */
  AIRYLAB_ERR_REJECTION = 5, /* rejection sampler exhausted its budget */
  AIRYLAB_ERR_IO = 6         /* file i/o failure */
};

typedef struct airylab_rng airylab_rng;
typedef struct airylab_ensemble airylab_ensemble;
typedef struct airylab_report airylab_report;

const char* airylab_version(void);

/* Message for the most recent failing call on this thread. */
const char* airylab_last_error(void);

/* ---- deterministic counter-based random stream -------------------------- */

int airylab_rng_create(uint64_t seed, uint64_t stream_id, airylab_rng** out);
void airylab_rng_destroy(airylab_rng* rng);
int airylab_rng_uniform(airylab_rng* rng, double* out); /* (0, 1] */
int airylab_rng_normal(airylab_rng* rng, double* out);

/* ---- deterministic numerics ---------------------------------------------- */

int airylab_airy_ai(double x, double* out);
int airylab_airy_ai_prime(double x, double* out);
int airylab_kernel_eval(double x, double y, double* out);
int airylab_extended_kernel_eval(double x, double s, double y, double t, double* out);
int airylab_tracy_widom_cdf(double s, double* out);
int airylab_expected_count(double a, double* out);

/* ---- sampling ------------------------------------------------------------ */

/* GUE spectrum at time 1, sorted decreasing, written into eigenvalues[n]. */
int airylab_sample_gue(int n, uint64_t seed, uint64_t stream_id, double* eigenvalues);

/* Brownian bridge values on the uniform grid, written into values[steps+1]. */
int airylab_sample_bridge(double start_value, double end_value, double t0, double t1, int steps,
                          double variance, uint64_t seed, uint64_t stream_id, double* values);

int airylab_simulate_dyson(int n, double t0, double t1, int steps, uint64_t seed,
                           uint64_t stream_id, airylab_ensemble** out);
int airylab_simulate_melon(int k, double t, int steps, double variance, uint64_t seed,
                           uint64_t stream_id, airylab_ensemble** out);

/* ---- ensembles ------------------------------------------------------------ */

int airylab_ensemble_lines(const airylab_ensemble* e, int* out);
int airylab_ensemble_points(const airylab_ensemble* e, int* out);
int airylab_ensemble_time(const airylab_ensemble* e, int j, double* out);
int airylab_ensemble_value(const airylab_ensemble* e, int line, int j, double* out);
int airylab_ensemble_write_csv(const airylab_ensemble* e, const char* path);
int airylab_ensemble_read_csv(const char* path, airylab_ensemble** out);
void airylab_ensemble_destroy(airylab_ensemble* e);

/* ---- experiment harness --------------------------------------------------- */

/* kind: dyson | melon | airy-approx | bridge-rep. config_json: flat record
 * (seed, replicas, threads, per-kind parameters); NULL means defaults.
 * Writes ensemble CSVs and manifest.json into out_dir. */
int airylab_simulate(const char* kind, const char* config_json, const char* out_dir);

/* Runs one named verification test; writes report_<id>.json into out_dir
 * when non-NULL. The report handle, when requested, must be destroyed. */
int airylab_verify(const char* test_id, const char* config_json, const char* out_dir,
                   airylab_report** out);

/* kind: tw-cdf | kernel | expected-count. Writes a CSV table. */
int airylab_table(const char* kind, const char* config_json, const char* out_path);

int airylab_report_pass(const airylab_report* r);
const char* airylab_report_json(const airylab_report* r);
void airylab_report_destroy(airylab_report* r);

/* Newline-separated list of verify test ids. */
const char* airylab_verify_ids(void);

#ifdef __cplusplus
}
#endif

#endif /* AIRYLAB_H */
