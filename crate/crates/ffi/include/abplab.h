#ifndef ABPLAB_H
#define ABPLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AbpStatus {
  ABP_STATUS_OK = 0,
  ABP_STATUS_NULL_POINTER = 1,
  ABP_STATUS_INVALID_UTF8 = 2,
  ABP_STATUS_INVALID_ARGUMENT = 3,
  ABP_STATUS_CONFIG = 4,
  ABP_STATUS_NOT_CONVERGED = 5,
  ABP_STATUS_OUT_OF_RANGE = 6,
  ABP_STATUS_IO = 7,
  ABP_STATUS_PANIC = 8,
} AbpStatus;

typedef enum AbpFormat {
  ABP_FORMAT_JSON = 0,
  ABP_FORMAT_CSV = 1,
} AbpFormat;

typedef enum AbpOperator {
  ABP_OPERATOR_LAPLACE = 0,
  ABP_OPERATOR_MONGE_AMPERE = 1,
  ABP_OPERATOR_PUCCI = 2,
} AbpOperator;

/**
 * Parsed scenario configuration.
 */
typedef struct AbpConfig AbpConfig;

/**
 * Results of one run, with report ids kept as C strings.
 */
typedef struct AbpRun AbpRun;

/**
 * Borrowed view of one report. `id` stays valid until the owning run is freed.
 */
typedef struct AbpReport {
  const char *id;
  double lhs;
  double rhs;
  /**
   * NaN when lhs/rhs is undefined.
   */
  double ratio;
  /**
   * 1 pass, 0 fail, -1 report-only.
   */
  int pass;
} AbpReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call into the library on this thread.
 */
const char *abp_last_error(void);

/**
 * Library version as a static string.
 */
const char *abp_version(void);

/**
 * Built-in scenario registry.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum AbpStatus abp_config_builtin(struct AbpConfig **out);

/**
 * Parses a TOML config from a NUL-terminated string.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` as in [`abp_config_builtin`].
 */
enum AbpStatus abp_config_parse(const char *toml, struct AbpConfig **out);

/**
 * Loads a TOML config file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` as in [`abp_config_builtin`].
 */
enum AbpStatus abp_config_load(const char *path, struct AbpConfig **out);

/**
 * # Safety
 * `cfg` must be null or a handle from this library not yet freed.
 */
void abp_config_free(struct AbpConfig *cfg);

/**
 * Runs a scenario or suite, or every scenario when `name` is null.
 * `resolution` 0 keeps each scenario's own resolutions, `threads` 0 the default pool.
 *
 * # Safety
 * `cfg` must be a live config handle, `name` null or NUL-terminated, `out` writable.
 */
enum AbpStatus abp_run(const struct AbpConfig *cfg,
                       const char *name,
                       size_t resolution,
                       size_t threads,
                       struct AbpRun **out);

/**
 * # Safety
 * `run` must be null or a handle from [`abp_run`] not yet freed.
 */
void abp_run_free(struct AbpRun *run);

/**
 * Number of (scenario, resolution) summaries; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live run handle.
 */
size_t abp_run_len(const struct AbpRun *run);

/**
 * 1 when every scoped report passes, 0 otherwise or for a null handle.
 *
 * # Safety
 * `run` must be null or a live run handle.
 */
int abp_run_passed(const struct AbpRun *run);

/**
 * Scenario name and resolution of summary `index`. The name pointer is
 * written into `name` (may be null to skip) and is freed with [`abp_string_free`].
 *
 * # Safety
 * `run` must be a live run handle; `name` null or writable; `resolution` writable.
 */
enum AbpStatus abp_run_summary(const struct AbpRun *run,
                               size_t index,
                               char **name,
                               size_t *resolution,
                               size_t *report_count);

/**
 * Report `report` of summary `summary`.
 *
 * # Safety
 * `run` must be a live run handle and `out` writable.
 */
enum AbpStatus abp_run_report(const struct AbpRun *run,
                              size_t summary,
                              size_t report,
                              struct AbpReport *out);

/**
 * Serializes a run as JSON or CSV into a new string freed with [`abp_string_free`].
 *
 * # Safety
 * `run` must be a live run handle and `out` writable.
 */
enum AbpStatus abp_run_render(const struct AbpRun *run, enum AbpFormat format, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void abp_string_free(char *s);

/**
 * Principal eigenvalue on a domain given in short form (`disk:1`, `rect:1x2`,
 * `ball:3`). A NaN `alpha` selects Dirichlet, otherwise Robin with that
 * parameter. `theta`/`big_theta` are read for Pucci only.
 *
 * # Safety
 * `domain` must be NUL-terminated and `lambda` writable.
 */
enum AbpStatus abp_principal_eigenvalue(enum AbpOperator op,
                                        const char *domain,
                                        size_t resolution,
                                        double alpha,
                                        double theta,
                                        double big_theta,
                                        double *lambda);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ABPLAB_H */
