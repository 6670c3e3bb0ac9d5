/*
 * C interface to the JSSA scheduling simulator.
 *
 * Handles are opaque and owned by the caller; release each with its
 * matching *_destroy function. Every fallible call returns a jssa_status and
 * records a message retrievable with jssa_last_error() on the same thread.
 */
#ifndef JSSA_JSSA_H
#define JSSA_JSSA_H

#include <stddef.h>
#include <stdint.h>

#if defined(JSSA_BUILDING_LIBRARY)
#define JSSA_API __attribute__((visibility("default")))
#else
#define JSSA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jssa_status {
  JSSA_OK = 0,
  JSSA_ERR_INVALID_ARGUMENT = 1, /* null handle, bad enum, malformed input */
  JSSA_ERR_CONFIG = 2,           /* configuration rejected */
  JSSA_ERR_IO = 3,               /* file system failure */
  JSSA_ERR_NUMERIC = 4,          /* singular matrix or non-finite value */
  JSSA_ERR_INTERNAL = 5
} jssa_status;

typedef struct jssa_config jssa_config;
typedef struct jssa_run jssa_run;
typedef struct jssa_sweep jssa_sweep;

typedef struct jssa_run_summary {
  int64_t n_frames;
  int64_t warmup_frames;
  int64_t reconfig_count;
  double reconfig_rate;
  double avg_cost;
  double avg_total_queue_bits;
  double avg_throughput_bps;
  double total_served_bits;
  double total_arrived_bits;
  double final_backlog_bits;
  double wasted_service_bits;
  double audit_satisfied_fraction;
  int64_t slot_inequality_violations;
  double wall_clock_s;
} jssa_run_summary;

/* Called once per verification check. */
typedef void (*jssa_check_callback)(const char* name, int passed,
                                    const char* detail, void* user);

JSSA_API const char* jssa_version(void);
/* Message of the last failed call on this thread; "" when none. */
JSSA_API const char* jssa_last_error(void);
JSSA_API const char* jssa_status_name(jssa_status status);

/* Configuration */
JSSA_API jssa_status jssa_config_default(jssa_config** out);
JSSA_API jssa_status jssa_config_load(const char* path, jssa_config** out);
JSSA_API jssa_status jssa_config_parse(const char* text, jssa_config** out);
/* Sets one key using the config-file syntax and revalidates. */
JSSA_API jssa_status jssa_config_set(jssa_config* cfg, const char* key,
                                     const char* value);
/* Writes the full config text into buf (NUL-terminated, truncated to
 * buf_len). *needed, when non-null, receives the untruncated length + 1. */
JSSA_API jssa_status jssa_config_write(const jssa_config* cfg, char* buf,
                                       size_t buf_len, size_t* needed);
JSSA_API void jssa_config_destroy(jssa_config* cfg);

/* Single run */
JSSA_API jssa_status jssa_run_simulation(const jssa_config* cfg,
                                         jssa_run** out);
JSSA_API jssa_status jssa_run_get_summary(const jssa_run* run,
                                          jssa_run_summary* out);
JSSA_API jssa_status jssa_run_write_outputs(const jssa_run* run,
                                            const char* out_dir);
JSSA_API void jssa_run_destroy(jssa_run* run);

/* Sweep over V with common random numbers; seeds base..base+n_seeds-1.
 * include_mjssa adds one cost-free benchmark run per seed. */
JSSA_API jssa_status jssa_sweep_run(const jssa_config* base,
                                    const double* v_grid, size_t n_v,
                                    int n_seeds, int include_mjssa,
                                    jssa_sweep** out);
JSSA_API size_t jssa_sweep_size(const jssa_sweep* sweep);
JSSA_API jssa_status jssa_sweep_get_summary(const jssa_sweep* sweep,
                                            size_t index,
                                            jssa_run_summary* out,
                                            double* v_param);
/* Trend report text across V (needs >= 3 distinct V among JSSA runs). */
JSSA_API jssa_status jssa_sweep_trend_report(const jssa_sweep* sweep, char* buf,
                                             size_t buf_len, size_t* needed);
JSSA_API jssa_status jssa_sweep_write_outputs(const jssa_sweep* sweep,
                                              const char* out_dir);
JSSA_API void jssa_sweep_destroy(jssa_sweep* sweep);

/* Plot scripts for every run found under in_dir. */
JSSA_API jssa_status jssa_emit_plots(const char* in_dir, const char* out_dir);

/* Runs the self-check suites; *all_passed is 1 when every check passed. */
JSSA_API jssa_status jssa_verify(const jssa_config* cfg,
                                 jssa_check_callback on_check, void* user,
                                 int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* JSSA_JSSA_H */
