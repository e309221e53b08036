/*
 * erlab: C interface to the relativistic wave-packet laboratory.
 *
 * Natural units (hbar = c = 1). Every function returns an erlab_status; on
 * failure erlab_last_error() gives a message valid until the next call on the
 * same thread. Objects behind opaque handles are owned by the caller and
 * released with the matching *_destroy function (NULL is accepted).
 */

#ifndef ERLAB_ERLAB_H
#define ERLAB_ERLAB_H

#include <stddef.h>

#if defined(ERLAB_BUILDING_LIBRARY)
#define ERLAB_API __attribute__((visibility("default")))
#else
#define ERLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum erlab_status {
  ERLAB_OK = 0,
  ERLAB_ERROR_INVALID_ARGUMENT = 1, /* physics or configuration value out of domain */
  ERLAB_ERROR_NULL_POINTER = 2,
  ERLAB_ERROR_DEGENERATE_FRAME = 3, /* exponent requested at gamma == 1 */
  ERLAB_ERROR_GRID = 4,             /* grid sizing rule violated */
  ERLAB_ERROR_WRAP_AROUND = 5,      /* density reached the box faces */
  ERLAB_ERROR_IO = 6,
  ERLAB_ERROR_OUT_OF_RANGE = 7, /* index past the end of a result list */
  ERLAB_ERROR_INTERNAL = 99
} erlab_status;

ERLAB_API const char* erlab_last_error(void);
/* Name of the offending field for ERLAB_ERROR_INVALID_ARGUMENT, else "". */
ERLAB_API const char* erlab_last_error_field(void);
ERLAB_API const char* erlab_version(void);

/* ---- model ------------------------------------------------------------- */

typedef struct erlab_packet_spec {
  double mass;        /* m > 0 */
  double width;       /* sigma > 0; initial per-axis variance is sigma^2 */
  double momentum[3]; /* mean momentum p */
} erlab_packet_spec;

typedef struct erlab_kinematics {
  double energy;
  double speed;
  double gamma;
  double compton_wavelength;
  double sigma_m_product;
} erlab_kinematics;

typedef enum erlab_validity {
  ERLAB_VALID = 0,    /* sigma m > 3 */
  ERLAB_MARGINAL = 1, /* 1 < sigma m <= 3 */
  ERLAB_INVALID = 2   /* sigma m <= 1 */
} erlab_validity;

ERLAB_API erlab_status erlab_derive_kinematics(const erlab_packet_spec* spec,
                                               erlab_kinematics* out);
ERLAB_API erlab_status erlab_check_validity(const erlab_packet_spec* spec,
                                            erlab_validity* level, double* sigma_m);

/* ---- closed forms ------------------------------------------------------ */

typedef enum erlab_axis_kind { ERLAB_LONGITUDINAL = 0, ERLAB_TRANSVERSE = 1 } erlab_axis_kind;

typedef struct erlab_expansion_factors {
  double a_sq_re[3];
  double a_sq_im[3];
  double axis_velocity[3];
} erlab_expansion_factors;

ERLAB_API erlab_status erlab_rest_dispersion(const erlab_packet_spec* spec, double t, double* out);
ERLAB_API erlab_status erlab_longitudinal_dispersion(const erlab_packet_spec* spec, double t,
                                                     double* out);
ERLAB_API erlab_status erlab_transverse_dispersion(const erlab_packet_spec* spec, double t,
                                                   double* out);
ERLAB_API erlab_status erlab_mean_position(const erlab_packet_spec* spec, double t, double out[3]);
ERLAB_API erlab_status erlab_expansion_factors_at(const erlab_packet_spec* spec, double t,
                                                  erlab_expansion_factors* out);
ERLAB_API erlab_status erlab_retarded_time(double t, double gamma, erlab_axis_kind axis,
                                           double* out);
ERLAB_API erlab_status erlab_dispersion_relation_residual(const erlab_packet_spec* spec,
                                                          const double kprime[3], double* out);

/* ---- moments ----------------------------------------------------------- */

typedef enum erlab_method {
  ERLAB_METHOD_ANALYTIC = 0,
  ERLAB_METHOD_ORACLE = 1,
  ERLAB_METHOD_GRID = 2
} erlab_method;

/* In one-dimensional runs only index 2 is meaningful; the others are NaN. */
typedef struct erlab_moments {
  double time;
  double mean_position[3];
  double sigma_sq[3];
  int method; /* erlab_method */
  int dimension;
} erlab_moments;

/* ---- quadrature oracle ------------------------------------------------- */

typedef struct erlab_oracle erlab_oracle;

typedef struct erlab_oracle_info {
  double norm;
  double mean_momentum[3];
  double mean_velocity[3];
  double velocity_variance[3];
  int converged;
  double max_relative_change;
} erlab_oracle_info;

typedef struct erlab_convergence {
  double sigma_m[3];
  double relative_error[3];
  double exponent;
  int measurable;
} erlab_convergence;

/* order >= 2 per axis, dimension 1 or 3 */
ERLAB_API erlab_status erlab_oracle_create(const erlab_packet_spec* spec, int order, int dimension,
                                           erlab_oracle** out);
ERLAB_API void erlab_oracle_destroy(erlab_oracle* oracle);
ERLAB_API erlab_status erlab_oracle_info_get(const erlab_oracle* oracle, erlab_oracle_info* out);
ERLAB_API erlab_status erlab_oracle_moments(const erlab_oracle* oracle, double t,
                                            erlab_moments* out);
ERLAB_API erlab_status erlab_convergence_order_check(const erlab_packet_spec* spec, double t,
                                                     int order, erlab_convergence* out);

/* ---- grid propagator --------------------------------------------------- */

typedef struct erlab_grid_state erlab_grid_state;
typedef struct erlab_density erlab_density;

typedef struct erlab_grid_options {
  int dimension;          /* 1 or 3 */
  int points_per_axis;    /* power of two */
  double halfwidth_sigma; /* k_halfwidth * sigma, >= 5 */
} erlab_grid_options;

ERLAB_API erlab_grid_options erlab_grid_options_default(void);

/* Builds the grid, checks that the box holds the packet up to |t| = t_max and
 * samples the initial amplitude. */
ERLAB_API erlab_status erlab_grid_create(const erlab_packet_spec* spec,
                                         const erlab_grid_options* options, double t_max,
                                         erlab_grid_state** out);
ERLAB_API void erlab_grid_destroy(erlab_grid_state* state);
/* New state advanced by dt from `state`. */
ERLAB_API erlab_status erlab_grid_evolve(const erlab_grid_state* state, double dt,
                                         erlab_grid_state** out);
ERLAB_API erlab_status erlab_grid_time(const erlab_grid_state* state, double* out);
ERLAB_API erlab_status erlab_grid_norm(const erlab_grid_state* state, double* out);

ERLAB_API erlab_status erlab_grid_density(const erlab_grid_state* state, erlab_density** out);
ERLAB_API void erlab_density_destroy(erlab_density* density);
ERLAB_API erlab_status erlab_density_integral(const erlab_density* density, double* out);
ERLAB_API erlab_status erlab_density_peak(const erlab_density* density, double* out);
ERLAB_API erlab_status erlab_density_wrapped(const erlab_density* density, int* out);
/* Fails with ERLAB_ERROR_WRAP_AROUND when the density is flagged. */
ERLAB_API erlab_status erlab_density_moments(const erlab_density* density, erlab_moments* out);
/* CSV `axis,x,rho`, written atomically. */
ERLAB_API erlab_status erlab_density_write_csv(const erlab_density* density, const char* path);

/* ---- retardation harness ----------------------------------------------- */

typedef struct erlab_sweep erlab_sweep;
typedef struct erlab_report erlab_report;

typedef enum erlab_report_axis {
  ERLAB_AXIS_LONGITUDINAL = 0,
  ERLAB_AXIS_TRANSVERSE_1 = 1,
  ERLAB_AXIS_TRANSVERSE_2 = 2
} erlab_report_axis;

typedef enum erlab_verdict {
  ERLAB_VERDICT_HOLDS = 0,
  ERLAB_VERDICT_FAILS = 1,
  ERLAB_VERDICT_DEGENERATE = 2
} erlab_verdict;

typedef struct erlab_exponent {
  double p;
  double gamma;
  int axis;   /* erlab_report_axis */
  int method; /* erlab_method */
  double alpha;
  double residual;
  int quadratic;
  int verdict; /* erlab_verdict */
} erlab_exponent;

typedef struct erlab_method_delta {
  int reference;
  int candidate;
  int dimension;
  double max_relative_delta;
} erlab_method_delta;

typedef struct erlab_point {
  double p;
  double gamma;
  double sigma_m;
  int validity; /* erlab_validity */
} erlab_point;

/* Fit sigma^2(t) = sigma^2(0) + C t^2 and return
 * alpha = ln(rest_coefficient / C) / (2 ln gamma). */
ERLAB_API erlab_status erlab_fit_retardation_exponent(const double* times, const double* sigma_sq,
                                                      size_t count, double rest_coefficient,
                                                      double gamma, double* alpha,
                                                      double* residual);

/* Defaults: m = 1, sigma = 5, momenta {sqrt 3}, times {0,5,10,20}, analytic
 * method, quadrature order 40, 1D grid of 128 points, verdict tolerance 0.05. */
ERLAB_API erlab_status erlab_sweep_create(erlab_sweep** out);
ERLAB_API void erlab_sweep_destroy(erlab_sweep* sweep);
ERLAB_API erlab_status erlab_sweep_set_packet(erlab_sweep* sweep, double mass, double width);
ERLAB_API erlab_status erlab_sweep_set_momenta(erlab_sweep* sweep, const double* momenta,
                                               size_t count);
ERLAB_API erlab_status erlab_sweep_set_times(erlab_sweep* sweep, const double* times, size_t count);
ERLAB_API erlab_status erlab_sweep_set_methods(erlab_sweep* sweep, const int* methods, size_t count);
ERLAB_API erlab_status erlab_sweep_set_quad_order(erlab_sweep* sweep, int order);
ERLAB_API erlab_status erlab_sweep_set_grid(erlab_sweep* sweep, const erlab_grid_options* options);
ERLAB_API erlab_status erlab_sweep_set_verdict_tolerance(erlab_sweep* sweep, double tolerance);
/* Canonical JSON of the effective configuration; the string lives until the
 * next call on this sweep. */
ERLAB_API erlab_status erlab_sweep_config_json(erlab_sweep* sweep, const char** out);

ERLAB_API erlab_status erlab_sweep_run(const erlab_sweep* sweep, erlab_report** out);
ERLAB_API void erlab_report_destroy(erlab_report* report);

ERLAB_API erlab_status erlab_report_point_count(const erlab_report* report, size_t* out);
ERLAB_API erlab_status erlab_report_point(const erlab_report* report, size_t index,
                                          erlab_point* out);
ERLAB_API erlab_status erlab_report_exponent_count(const erlab_report* report, size_t* out);
ERLAB_API erlab_status erlab_report_exponent(const erlab_report* report, size_t index,
                                             erlab_exponent* out);
ERLAB_API erlab_status erlab_report_delta_count(const erlab_report* report, size_t* out);
ERLAB_API erlab_status erlab_report_delta(const erlab_report* report, size_t index,
                                          erlab_method_delta* out);
ERLAB_API erlab_status erlab_report_row_count(const erlab_report* report, size_t* out);
ERLAB_API erlab_status erlab_report_failure_count(const erlab_report* report, size_t* out);
ERLAB_API erlab_status erlab_report_failure(const erlab_report* report, size_t index,
                                            const char** out);

/* Atomic writes. CSV columns:
 * m,sigma,p,gamma,axis,method,t,sigma_sq,alpha_fit,residual,verdict */
ERLAB_API erlab_status erlab_report_write_csv(const erlab_report* report, const char* path);
ERLAB_API erlab_status erlab_report_write_json(const erlab_report* report, const char* path);
/* Plot files `<tag>_<axis>_<method>.dat` etc. in `dir`; `written` receives the
 * number of files (0 for an empty report). */
ERLAB_API erlab_status erlab_report_write_plotdata(const erlab_report* report, const char* dir,
                                                   const char* tag, size_t* written);

#ifdef __cplusplus
}
#endif

#endif /* ERLAB_ERLAB_H */
