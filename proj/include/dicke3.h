#ifndef DICKE3_H
#define DICKE3_H

/*
 * C interface to the three-qubit Dicke model solver.
 *
 * Every fallible call returns a dicke3_status; on failure a description is
 * available from dicke3_last_error() (per thread, valid until the next call
 * on that thread). Complex matrices are passed as row-major arrays of
 * interleaved (re, im) doubles, so an 8x8 density matrix takes 128 doubles.
 */

#include <stddef.h>

#if defined(_WIN32)
#  define DICKE3_EXPORT __declspec(dllexport)
#elif defined(DICKE3_BUILDING_LIBRARY)
#  define DICKE3_EXPORT __attribute__((visibility("default")))
#else
#  define DICKE3_EXPORT
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dicke3_status {
    DICKE3_OK = 0,
    DICKE3_ERR_INVALID_ARGUMENT = 1,
    DICKE3_ERR_INVALID_STATE = 2,
    DICKE3_ERR_SOLVER = 3,
    DICKE3_ERR_IO = 4,
    DICKE3_ERR_INTERNAL = 5
} dicke3_status;

typedef enum dicke3_method {
    DICKE3_METHOD_EXACT = 0,
    DICKE3_METHOD_RWA = 1,
    DICKE3_METHOD_ZEROTH = 2,
    DICKE3_METHOD_GRWA = 3
} dicke3_method;

/* Qubit masks for partial transposes: index = 4*qA + 2*qB + qC. */
#define DICKE3_QUBIT_A 4u
#define DICKE3_QUBIT_B 2u
#define DICKE3_QUBIT_C 1u

typedef struct dicke3_params {
    double delta;
    double omega;
    double g;
} dicke3_params;

typedef struct dicke3_eigensystem dicke3_eigensystem;
typedef struct dicke3_trajectory dicke3_trajectory;

DICKE3_EXPORT const char* dicke3_version(void);
DICKE3_EXPORT const char* dicke3_last_error(void);
DICKE3_EXPORT const char* dicke3_status_name(dicke3_status status);

DICKE3_EXPORT const char* dicke3_method_name(dicke3_method method);
DICKE3_EXPORT dicke3_status dicke3_method_parse(const char* name, dicke3_method* out);

/* ---- spectra ---------------------------------------------------------- */

DICKE3_EXPORT dicke3_status dicke3_eigensystem_solve(dicke3_method method, const dicke3_params* params, int n_max,
                                                     dicke3_eigensystem** out);
DICKE3_EXPORT void dicke3_eigensystem_free(dicke3_eigensystem* eig);
DICKE3_EXPORT int dicke3_eigensystem_size(const dicke3_eigensystem* eig);
/* Ascending energies; `capacity` must be at least the size. */
DICKE3_EXPORT dicke3_status dicke3_eigensystem_energies(const dicke3_eigensystem* eig, double* out, size_t capacity);
/* Eigenvector `level` in the rotated-frame composite basis (index s*(n_max+1)+n, m = 3/2 - s),
 * interleaved re/im; needs 2*size doubles. */
DICKE3_EXPORT dicke3_status dicke3_eigensystem_vector(const dicke3_eigensystem* eig, int level, double* out,
                                                      size_t capacity);

/* Lowest `count` energies without keeping eigenvectors. */
DICKE3_EXPORT dicke3_status dicke3_energies(dicke3_method method, const dicke3_params* params, int n_max, double* out,
                                            size_t count);

/*
 * Lowest `k_levels` energies at every g in `g_values` for each listed method.
 * out[(gi * n_methods + mi) * k_levels + level]. point_ok (optional, n_g
 * entries) is set to 1/0 per grid point; failed points leave NaN in `out` and
 * the call returns DICKE3_ERR_SOLVER with every failing point in the error text.
 * threads = 0 uses the hardware concurrency.
 */
DICKE3_EXPORT dicke3_status dicke3_level_sweep(const dicke3_method* methods, size_t n_methods,
                                               const dicke3_params* params, const double* g_values, size_t n_g,
                                               int k_levels, int n_max, unsigned threads, double* out, int* point_ok);

/* ---- dynamics --------------------------------------------------------- */

typedef struct dicke3_dynamics_options {
    double tmax_scaled; /* final Δt/2π */
    int steps;          /* number of intervals; steps + 1 samples */
    int gme_stride;     /* GME solved on every stride-th sample (and the last) */
    int compute_gme;    /* 0 disables the GME column */
    double sdp_tol;
    int sdp_max_iter;
    unsigned threads;
} dicke3_dynamics_options;

typedef struct dicke3_sample {
    double t_scaled;
    double concurrence;
    double negativity_ab_c;
    double gme;
    int gme_computed; /* 0: interpolated between computed neighbours */
    double populations[4]; /* P_m for m = 3/2, 1/2, -1/2, -3/2 */
} dicke3_sample;

DICKE3_EXPORT void dicke3_dynamics_options_default(dicke3_dynamics_options* options);
DICKE3_EXPORT dicke3_status dicke3_dynamics_run(dicke3_method method, const dicke3_params* params, int n_max,
                                                const dicke3_dynamics_options* options, dicke3_trajectory** out);
DICKE3_EXPORT void dicke3_trajectory_free(dicke3_trajectory* traj);
DICKE3_EXPORT int dicke3_trajectory_size(const dicke3_trajectory* traj);
DICKE3_EXPORT dicke3_status dicke3_trajectory_sample(const dicke3_trajectory* traj, int index, dicke3_sample* out);
/* Lab-frame three-qubit state at `index` (128 doubles). */
DICKE3_EXPORT dicke3_status dicke3_trajectory_state(const dicke3_trajectory* traj, int index, double* rho8);

/* ---- single-state measures ------------------------------------------- */

typedef struct dicke3_gme_result {
    double value;
    double optimum;
    double relative_gap;
    int iterations;
} dicke3_gme_result;

/* DICKE3_OK when rho (dim x dim, dim 4 or 8) is a valid density matrix;
 * otherwise DICKE3_ERR_INVALID_STATE with the violated invariant. */
DICKE3_EXPORT dicke3_status dicke3_density_validate(const double* rho, int dim);

/* witness (optional) receives the 8x8 optimal witness (128 doubles). */
DICKE3_EXPORT dicke3_status dicke3_gme(const double* rho8, double tol, int max_iter, dicke3_gme_result* out,
                                       double* witness);
DICKE3_EXPORT dicke3_status dicke3_negativity(const double* rho8, unsigned part, double* out);
/* Pairwise concurrence of a state supported on the symmetric subspace. */
DICKE3_EXPORT dicke3_status dicke3_concurrence(const double* rho8, double* out);

#ifdef __cplusplus
}
#endif

#endif /* DICKE3_H */
