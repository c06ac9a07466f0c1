#ifndef OPTOKERR_H
#define OPTOKERR_H

/* C interface to the optokerr solver library.
 *
 * All rates are angular frequencies in rad/s, powers in W, times in s.
 * Every call returns an optokerr_status; on failure optokerr_last_error()
 * describes the problem (per thread). Handles are opaque and owned by the
 * caller, who releases them with the matching *_destroy function. */

#include <stddef.h>
#include <stdint.h>

#if defined(OPTOKERR_BUILDING_LIBRARY)
#define OPTOKERR_API __attribute__((visibility("default")))
#else
#define OPTOKERR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum optokerr_status {
    OPTOKERR_OK = 0,
    OPTOKERR_E_DOMAIN = 1,        /* invalid or non-finite input */
    OPTOKERR_E_SOLVER = 2,        /* numerical routine failed */
    OPTOKERR_E_STRUCTURAL = 3,    /* drift matrix not physical */
    OPTOKERR_E_NOT_FOUND = 4,     /* no stable branch, no zero crossing, no fold */
    OPTOKERR_E_NOT_CONVERGED = 5, /* settle reached t_end */
    OPTOKERR_E_BUFFER = 6,        /* output buffer too small; required size reported */
    OPTOKERR_E_ARGUMENT = 7,      /* null pointer or index out of range */
    OPTOKERR_E_INTERNAL = 8
} optokerr_status;

typedef enum optokerr_verdict {
    OPTOKERR_STABLE = 0,
    OPTOKERR_UNSTABLE = 1,
    OPTOKERR_MARGINAL = 2
} optokerr_verdict;

typedef struct optokerr_complex {
    double re;
    double im;
} optokerr_complex;

typedef struct optokerr_system_params {
    double omega_a;
    double omega_m;
    double g0;
    double g_ck;
    double kappa;
    double gamma;
} optokerr_system_params;

typedef struct optokerr_drive_params {
    double delta_a;
    double eps_c;
    double eps_p;
    double delta_p;
} optokerr_drive_params;

typedef struct optokerr_model optokerr_model;
typedef struct optokerr_spectrum optokerr_spectrum;
typedef struct optokerr_sweep optokerr_sweep;
typedef struct optokerr_trajectory optokerr_trajectory;

OPTOKERR_API const char* optokerr_version(void);
OPTOKERR_API const char* optokerr_last_error(void);
OPTOKERR_API const char* optokerr_status_name(optokerr_status status);

OPTOKERR_API optokerr_status optokerr_rabi_from_power(double power, double kappa, double omega_field, double* out);
OPTOKERR_API optokerr_status optokerr_thermal_occupancy(double omega_m, double temperature, double* out);

/* ---- model ---------------------------------------------------------- */

OPTOKERR_API optokerr_status optokerr_model_create(const optokerr_system_params* sys,
                                                   const optokerr_drive_params* drive, optokerr_model** out);
OPTOKERR_API void optokerr_model_destroy(optokerr_model* model);
OPTOKERR_API optokerr_status optokerr_model_system(const optokerr_model* model, optokerr_system_params* out);
OPTOKERR_API optokerr_status optokerr_model_drive(const optokerr_model* model, optokerr_drive_params* out);

/* ---- steady states -------------------------------------------------- */

/* Physical coefficients a_0..a_5 of the steady-state polynomial in x. */
OPTOKERR_API optokerr_status optokerr_quintic(const optokerr_model* model, double coefficients[6], int* degree);

typedef struct optokerr_root {
    double n_photon;
    double n_phonon;
    double delta;      /* effective detuning */
    double omega_eff;  /* cross-Kerr shifted mechanical frequency */
    optokerr_complex a0;
    optokerr_complex b0;
    double residual;
    int marginal_root; /* coincides with a neighbour */
    optokerr_verdict verdict;
    double margin;     /* min -Re(lambda) */
    int routh_hurwitz_stable;
    double c[4];       /* c3, c2, c1, c0 */
    optokerr_complex eigenvalues[4];
} optokerr_root;

/* Fills up to capacity roots in ascending photon number; *count receives the
 * number of roots. Returns OPTOKERR_E_BUFFER when capacity is too small. */
OPTOKERR_API optokerr_status optokerr_roots(const optokerr_model* model, optokerr_root* roots, size_t capacity,
                                            size_t* count);

/* ---- probe response ------------------------------------------------- */

typedef struct optokerr_response_options {
    long branch;           /* root index, or -1 for the lowest stable root */
    int aminus_probe_term; /* keep the probe source in the A_- relation */
} optokerr_response_options;

OPTOKERR_API optokerr_response_options optokerr_response_defaults(void);

typedef struct optokerr_consistency {
    size_t points;
    double max_relative_difference;
    double worst_delta_p_reduced;
    double max_residual;
    double tolerance;
    int agrees;
} optokerr_consistency;

/* grid: probe offsets delta_p = Delta_p - omega_m in rad/s, sorted. */
OPTOKERR_API optokerr_status optokerr_spectrum_compute(const optokerr_model* model, const double* grid, size_t n,
                                                       optokerr_response_options opts, optokerr_spectrum** out);
OPTOKERR_API void optokerr_spectrum_destroy(optokerr_spectrum* spectrum);
OPTOKERR_API size_t optokerr_spectrum_size(const optokerr_spectrum* spectrum);
/* delta_p / omega_m and eps_T at point i. */
OPTOKERR_API optokerr_status optokerr_spectrum_point(const optokerr_spectrum* spectrum, size_t i,
                                                     double* delta_p_reduced, optokerr_complex* eps_t);
OPTOKERR_API optokerr_status optokerr_spectrum_operating_point(const optokerr_spectrum* spectrum, size_t* index,
                                                               optokerr_root* root);
OPTOKERR_API optokerr_status optokerr_spectrum_consistency(const optokerr_spectrum* spectrum,
                                                           optokerr_consistency* out);

/* Zero crossing of Re(eps_T) nearest delta_p = 0, in rad/s. half_window is in
 * units of omega_m; points = 0 and half_window = 0 select the defaults. */
OPTOKERR_API optokerr_status optokerr_zero_absorption(const optokerr_model* model, optokerr_response_options opts,
                                                      double half_window, size_t points, double* delta_p0);

typedef struct optokerr_peak {
    double center;
    double height;
    double left;
    double right;
    double width;
    int bounded;
} optokerr_peak;

OPTOKERR_API optokerr_status optokerr_absorption_peaks(const optokerr_model* model, optokerr_response_options opts,
                                                       const double* grid, size_t n, optokerr_peak* peaks,
                                                       size_t capacity, size_t* count);

/* ---- sweeps --------------------------------------------------------- */

/* Uses the model's system and control detuning; eps_c is ignored. */
OPTOKERR_API optokerr_status optokerr_power_sweep(const optokerr_model* model, const double* powers, size_t n,
                                                  double omega_c, optokerr_sweep** out);
OPTOKERR_API void optokerr_sweep_destroy(optokerr_sweep* sweep);
OPTOKERR_API size_t optokerr_sweep_branch_count(const optokerr_sweep* sweep);
OPTOKERR_API optokerr_status optokerr_sweep_branch(const optokerr_sweep* sweep, size_t branch, int* id,
                                                   optokerr_verdict* stability, size_t* points);
OPTOKERR_API optokerr_status optokerr_sweep_branch_point(const optokerr_sweep* sweep, size_t branch, size_t k,
                                                         double* power, double* n_photon);

typedef struct optokerr_fold {
    double power;
    double lower;
    double upper;
    size_t roots_below;
    size_t roots_above;
} optokerr_fold;

OPTOKERR_API size_t optokerr_sweep_fold_count(const optokerr_sweep* sweep);
OPTOKERR_API optokerr_status optokerr_sweep_fold(const optokerr_sweep* sweep, size_t i, optokerr_fold* out);
OPTOKERR_API size_t optokerr_sweep_stability_change_count(const optokerr_sweep* sweep);
OPTOKERR_API optokerr_status optokerr_sweep_stability_change(const optokerr_sweep* sweep, size_t i, double* power);
OPTOKERR_API size_t optokerr_sweep_point_count(const optokerr_sweep* sweep);
OPTOKERR_API optokerr_status optokerr_sweep_point(const optokerr_sweep* sweep, size_t i, double* power,
                                                  size_t* roots);

/* n_phonon against n_photon with g_ck = 0 (plain) and the model's g_ck. */
OPTOKERR_API optokerr_status optokerr_phonon_curve(const optokerr_model* model, const double* x, size_t n,
                                                   double* plain, double* ck);

/* delta_p0 in rad/s per g_ck value; *monotone receives +1, -1 or 0. */
OPTOKERR_API optokerr_status optokerr_ck_shift_scan(const optokerr_model* model, const double* g_ck, size_t n,
                                                    optokerr_response_options opts, double* delta_p0,
                                                    int* monotone);

typedef struct optokerr_robustness_entry {
    double g_ck;
    double fold_power_first;
    double fold_power_second;
    double x_first;
    double x_second;
    double displacement;
    double absolute_displacement;
} optokerr_robustness_entry;

typedef struct optokerr_robustness {
    optokerr_robustness_entry plain;
    optokerr_robustness_entry ck;
    int ck_more_robust;
} optokerr_robustness;

OPTOKERR_API optokerr_status optokerr_detuning_robustness(const optokerr_model* model, const double* powers,
                                                          size_t n, double delta_first, double delta_second,
                                                          optokerr_robustness* out);

/* ---- dynamics ------------------------------------------------------- */

typedef struct optokerr_integrator_options {
    double rtol;
    double atol;
    double max_step;  /* s; 0 for the default */
    size_t max_steps; /* step budget */
} optokerr_integrator_options;

OPTOKERR_API optokerr_integrator_options optokerr_integrator_defaults(void);

OPTOKERR_API optokerr_status optokerr_integrate(const optokerr_model* model, optokerr_complex a0,
                                                optokerr_complex b0, double t_end, const double* sample_times,
                                                size_t n, optokerr_integrator_options opts,
                                                optokerr_trajectory** out);
OPTOKERR_API void optokerr_trajectory_destroy(optokerr_trajectory* traj);
OPTOKERR_API size_t optokerr_trajectory_size(const optokerr_trajectory* traj);
OPTOKERR_API optokerr_status optokerr_trajectory_sample(const optokerr_trajectory* traj, size_t i, double* t,
                                                        optokerr_complex* a, optokerr_complex* b);

typedef struct optokerr_settle_options {
    double t_end;          /* s; 0 for the default */
    double threshold;
    double window_periods;
    double match_tolerance;
    optokerr_integrator_options integrator;
} optokerr_settle_options;

OPTOKERR_API optokerr_settle_options optokerr_settle_defaults(void);

typedef struct optokerr_settle_result {
    int converged;
    int matched;       /* endpoint within match_tolerance of a steady root */
    size_t root_index;
    optokerr_complex a;
    optokerr_complex b;
    double criterion;
    double match_distance;
    double t_final;
} optokerr_settle_result;

/* Returns OPTOKERR_E_NOT_CONVERGED (with *out filled) when t_end is reached first. */
OPTOKERR_API optokerr_status optokerr_settle(const optokerr_model* model, optokerr_complex a0, optokerr_complex b0,
                                             optokerr_settle_options opts, optokerr_settle_result* out);

OPTOKERR_API optokerr_status optokerr_random_initial_states(size_t n, double a_max, double b_max, uint64_t seed,
                                                            optokerr_complex* a, optokerr_complex* b);
OPTOKERR_API uint64_t optokerr_default_seed(void);

#ifdef __cplusplus
}
#endif

#endif
