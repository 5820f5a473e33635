#ifndef PLASTIFLOW_H
#define PLASTIFLOW_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PfStatus {
  PF_STATUS_OK = 0,
  PF_STATUS_NULL_POINTER = 1,
  PF_STATUS_INVALID_ARGUMENT = 2,
  PF_STATUS_VALIDATION = 3,
  PF_STATUS_SOLVER = 4,
  PF_STATUS_BUFFER_TOO_SMALL = 5,
  PF_STATUS_PANIC = 6,
} PfStatus;

typedef struct PfPotential PfPotential;

typedef struct PfRun PfRun;

typedef struct PfScenario PfScenario;

typedef struct PfSurface PfSurface;

// Closed-form fields of the exponential-ramp example at one point.
typedef struct PfEvolutionaryPoint {
  double u;
  double v;
  double sigma;
  double p;
  double p_rate;
  // 0 before onset, 1 elastic, 2 on the interface, 3 plastic.
  int32_t region;
} PfEvolutionaryPoint;

typedef struct PfStationaryPoint {
  double u;
  double sigma;
  // Boundary plastic atom (nonzero only at `x = L` in the plastic regime).
  double atom;
} PfStationaryPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *pf_version(void);

// Copies the calling thread's last error message (NUL-terminated) into
// `buf`. Returns the buffer size needed, including the terminator.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t pf_last_error_message(char *buf, size_t len);

// Interval `[lower, upper]` acting on scalars.
//
// # Safety
// `out` must be a valid pointer.
enum PfStatus pf_surface_interval(double lower, double upper, struct PfSurface **out);

// Von Mises ball of `radius` in the deviatoric `dim x dim` matrices.
//
// # Safety
// `out` must be a valid pointer.
enum PfStatus pf_surface_von_mises(size_t dim, double radius, struct PfSurface **out);

// Unit Hosford surface with exponent `p`.
//
// # Safety
// `out` must be a valid pointer.
enum PfStatus pf_surface_hosford(size_t dim, double p, struct PfSurface **out);

// # Safety
// `surface` must be null or a handle from a `pf_surface_*` constructor.
void pf_surface_free(struct PfSurface *surface);

// Dimension `n` of the matrices the surface acts on.
//
// # Safety
// Pointers must be valid.
enum PfStatus pf_surface_dim(const struct PfSurface *surface, size_t *out);

// Distance from the packed matrix `x` to the set.
//
// # Safety
// `x` must hold `len` values; other pointers must be valid.
enum PfStatus pf_surface_distance(const struct PfSurface *surface,
                                  const double *x,
                                  size_t len,
                                  double *out);

// Projection of the packed matrix `x` onto the set, written to `out`.
//
// # Safety
// `x` and `out` must each hold `len` values.
enum PfStatus pf_surface_project(const struct PfSurface *surface,
                                 const double *x,
                                 size_t len,
                                 double *out);

// Support function of the set at the packed (trace-free) matrix `q`.
//
// # Safety
// `q` must hold `len` values; `out` must be valid.
enum PfStatus pf_surface_support(const struct PfSurface *surface,
                                 const double *q,
                                 size_t len,
                                 double *out);

// Norton-Hoff potential with exponent `alpha` and cap `lambda` over a copy
// of `surface`.
//
// # Safety
// Pointers must be valid.
enum PfStatus pf_potential_new(double alpha,
                               double lambda,
                               const struct PfSurface *surface,
                               struct PfPotential **out);

// # Safety
// `potential` must be null or a handle from [`pf_potential_new`].
void pf_potential_free(struct PfPotential *potential);

// `gamma(x)`.
//
// # Safety
// `x` must hold `len` values; other pointers must be valid.
enum PfStatus pf_potential_gamma(const struct PfPotential *potential,
                                 const double *x,
                                 size_t len,
                                 double *out);

// Fenchel conjugate `gamma*(eta)`.
//
// # Safety
// `eta` must hold `len` values; other pointers must be valid.
enum PfStatus pf_potential_conjugate(const struct PfPotential *potential,
                                     const double *eta,
                                     size_t len,
                                     double *out);

// Gradient `D gamma(x)`, written to `out`.
//
// # Safety
// `x` and `out` must each hold `len` values.
enum PfStatus pf_potential_dgamma(const struct PfPotential *potential,
                                  const double *x,
                                  size_t len,
                                  double *out);

// Implicit relaxation `sigma + tau D gamma(sigma) = sigma_star`.
//
// # Safety
// `sigma_star` and `out` must each hold `len` values.
enum PfStatus pf_potential_relax(const struct PfPotential *potential,
                                 const double *sigma_star,
                                 size_t len,
                                 double tau,
                                 double *out);

// Parses and validates a TOML scenario.
//
// # Safety
// `toml` must be a NUL-terminated UTF-8 string; `out` must be valid.
enum PfStatus pf_scenario_from_toml(const char *toml, struct PfScenario **out);

// # Safety
// `scenario` must be null or a handle from [`pf_scenario_from_toml`].
void pf_scenario_free(struct PfScenario *scenario);

// Number of grid nodes.
//
// # Safety
// Pointers must be valid.
enum PfStatus pf_scenario_nodes(const struct PfScenario *scenario, size_t *out);

// Runs the explicit dynamic scheme with the scenario's own time settings.
//
// # Safety
// Pointers must be valid.
enum PfStatus pf_dynamic_run(const struct PfScenario *scenario, struct PfRun **out);

// # Safety
// `run` must be null or a handle from [`pf_dynamic_run`].
void pf_run_free(struct PfRun *run);

// Final nodal fields. Any output array may be null; non-null ones must
// hold `len` values, which must equal the node count.
//
// # Safety
// See above.
enum PfStatus pf_run_final_fields(const struct PfRun *run,
                                  double *sigma,
                                  double *v,
                                  double *u,
                                  double *p,
                                  size_t len);

// Final time, `sup_t sup_x d(sigma)` and relative energy residual. Null
// outputs are skipped.
//
// # Safety
// `run` must be valid; outputs null or valid.
enum PfStatus pf_run_summary(const struct PfRun *run,
                             double *t_final,
                             double *sup_distance,
                             double *relative_energy_residual);

// Solves the scenario's stationary problem; `sigma` and `u` (either may be
// null) must hold `len` values equal to the node count.
//
// # Safety
// See above.
enum PfStatus pf_stationary_solve(const struct PfScenario *scenario,
                                  double *sigma,
                                  double *u,
                                  size_t len);

// Exponential-ramp closed form on `[0, length]` with amplitude `amplitude`,
// valid up to `horizon`, evaluated at `(t, x)`.
//
// # Safety
// `out` must be valid.
enum PfStatus pf_exact_evolutionary(double length,
                                    double amplitude,
                                    double horizon,
                                    double t,
                                    double x,
                                    struct PfEvolutionaryPoint *out);

// Onset time of plastic flow and boundary jump at `horizon`. Null outputs
// are skipped.
//
// # Safety
// Outputs null or valid.
enum PfStatus pf_exact_evolutionary_summary(double length,
                                            double amplitude,
                                            double horizon,
                                            double *onset_time,
                                            double *boundary_jump);

// Stationary closed form with `u(0) = 0`, `u(length) = boundary_value`.
//
// # Safety
// `out` must be valid.
enum PfStatus pf_exact_stationary(double length,
                                  double boundary_value,
                                  double x,
                                  struct PfStationaryPoint *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLASTIFLOW_H */
