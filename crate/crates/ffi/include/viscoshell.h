/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef VISCOSHELL_H
#define VISCOSHELL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VsStatus {
  VS_STATUS_OK = 0,
  VS_STATUS_NULL_ARGUMENT = 1,
  VS_STATUS_INPUT = 2,
  VS_STATUS_IO = 3,
  VS_STATUS_GEOMETRY = 4,
  VS_STATUS_SOLVER = 5,
  VS_STATUS_PANIC = 6,
  VS_STATUS_OUT_OF_RANGE = 7,
} VsStatus;

/**
 * Time series and summary of a finished run.
 */
typedef struct VsRun VsRun;

/**
 * A validated scenario configuration.
 */
typedef struct VsScenario VsScenario;

/**
 * One output row; tensor entries are contravariant components on the
 * current basis.
 */
typedef struct VsRow {
  double t;
  double drive;
  double sigma11;
  double sigma12;
  double sigma22;
  double j;
  double j_el;
  double j_in;
  double kappa;
  double kappa_in;
  double dissipation;
  /**
   * NaN when the case has none.
   */
  double pressure;
  /**
   * NaN for point-driver runs.
   */
  double monitor[3];
} VsRow;

typedef struct VsSummary {
  size_t steps;
  double dt;
  double t_end;
  size_t max_newton_iterations;
  size_t max_local_iterations;
  double max_split_defect;
  bool dissipation_nondecreasing;
  double final_dissipation;
} VsSummary;

typedef struct VsBalloonParams {
  double radius;
  double mu;
  double mu1;
  double eta_s;
  double t_end;
  double lambda_end;
} VsBalloonParams;

/**
 * Inflation pressure split into elastic and viscous parts.
 */
typedef struct VsPressure {
  double lambda;
  double p_el;
  double p_visc;
  double p_total;
  double ahat_ev;
  double bhat_ev;
} VsPressure;

typedef struct VsSphereParams {
  double radius;
  double mu;
  double mu1;
  double c1;
  double k;
  double h0;
  double eta_s;
  double eta_b;
  double t_end;
  double lambda_end;
} VsSphereParams;

typedef struct VsPureBendParams {
  double c;
  double c1;
  double eta_b;
  double t_end;
  double kappa_end;
  double length;
} VsPureBendParams;

typedef struct VsPureBendState {
  double kappa;
  double kappa_in;
  double moment;
  double u_y;
  double pressure;
} VsPureBendState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length including the NUL, or
 * 0 when the last call succeeded.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t vs_last_error_message(char *buf, size_t len);

/**
 * Loads and validates a TOML scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum VsStatus vs_scenario_load(const char *path, struct VsScenario **out);

/**
 * Parses and validates a scenario from TOML text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum VsStatus vs_scenario_from_toml(const char *text, struct VsScenario **out);

/**
 * # Safety
 * `scenario` must be null or a handle from `vs_scenario_load` /
 * `vs_scenario_from_toml` not freed before.
 */
void vs_scenario_free(struct VsScenario *scenario);

/**
 * Overrides the step size and end time; the scenario is left unchanged when
 * the new values fail validation.
 *
 * # Safety
 * `scenario` must be a live handle.
 */
enum VsStatus vs_scenario_set_time(struct VsScenario *scenario, double dt, double t_end);

/**
 * Runs the scenario's case.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum VsStatus vs_scenario_run(const struct VsScenario *scenario, struct VsRun **out);

/**
 * Runs the scenario's homogeneous kinematic program through the material
 * point driver (point and membrane cases only).
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum VsStatus vs_scenario_run_point(const struct VsScenario *scenario, struct VsRun **out);

/**
 * Runs the scenario and writes `<name>.csv` and `<name>_summary.toml` into
 * `out_dir`, creating it if needed.
 *
 * # Safety
 * `scenario` must be a live handle; `out_dir` a NUL-terminated string.
 */
enum VsStatus vs_scenario_write(const struct VsScenario *scenario, const char *out_dir);

/**
 * # Safety
 * `run` must be null or a handle from a run function not freed before.
 */
void vs_run_free(struct VsRun *run);

/**
 * Number of rows, including the initial state; 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t vs_run_row_count(const struct VsRun *run);

/**
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum VsStatus vs_run_row(const struct VsRun *run, size_t index, struct VsRow *out);

/**
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum VsStatus vs_run_summary(const struct VsRun *run, struct VsSummary *out);

/**
 * Pressure of the membrane balloon inflated at an exponential stretch rate.
 *
 * # Safety
 * `params` must be readable and `out` writable.
 */
enum VsStatus vs_balloon_pressure(const struct VsBalloonParams *params,
                                  double t,
                                  struct VsPressure *out);

/**
 * Pressure of the inflated spherical shell with membrane and bending
 * viscosity.
 *
 * # Safety
 * `params` must be readable and `out` writable.
 */
enum VsStatus vs_sphere_pressure(const struct VsSphereParams *params,
                                 double t,
                                 struct VsPressure *out);

/**
 * State of the strip bent at a linearly increasing moment.
 *
 * # Safety
 * `params` must be readable and `out` writable.
 */
enum VsStatus vs_pure_bend_solution(const struct VsPureBendParams *params,
                                    double t,
                                    struct VsPureBendState *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VISCOSHELL_H */
