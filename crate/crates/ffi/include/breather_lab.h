#ifndef BREATHER_LAB_H
#define BREATHER_LAB_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_PARAMS = 2,
  BL_STATUS_DOMAIN = 3,
  BL_STATUS_DIMENSION = 4,
  BL_STATUS_SINGULAR_TRANSFORM = 5,
  BL_STATUS_NOT_LOCALIZED = 6,
  BL_STATUS_NO_BOUND_STATE = 7,
  BL_STATUS_NO_CONVERGENCE = 8,
  BL_STATUS_BLOW_UP = 9,
  BL_STATUS_CONFIG = 10,
  BL_STATUS_IO = 11,
  BL_STATUS_BUFFER_TOO_SMALL = 12,
  BL_STATUS_PANIC = 13,
} BlStatus;

/**
 * Lattice parameters.
 */
typedef struct BlParams BlParams;

/**
 * A sampled time evolution.
 */
typedef struct BlTrajectory BlTrajectory;

/**
 * Closed-form end-defect quantities; NaN where undefined.
 */
typedef struct BlDefect {
  double kappa_d;
  double kappa_0;
  double r;
  double gamma_c;
  double a;
  double b;
  double e_d;
  double period;
  double norm_sq;
  double weight;
  double gamma_s_c;
  double gamma_0_c;
  double kappa_s_c;
  double kappa_0_c;
} BlDefect;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bl_last_error(void);

/**
 * # Safety
 * `out` must be a valid pointer to a `BlParams *`.
 */
enum BlStatus bl_params_new(size_t n_cells,
                            double kappa,
                            double nu,
                            double gamma0,
                            double gammas,
                            double i_sat,
                            struct BlParams **out);

/**
 * # Safety
 * `params` must come from `bl_params_new` and not be freed twice.
 */
void bl_params_free(struct BlParams *params);

/**
 * Saturable hopping `gamma(I)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BlStatus bl_gamma_of_intensity(const struct BlParams *params, double intensity, double *out);

/**
 * Critical nonreciprocity `sqrt(kappa^2 - nu^2)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BlStatus bl_gamma_c(const struct BlParams *params, double *out);

/**
 * Evolves the state `re + i im` (length `2 * n_cells`).
 *
 * # Safety
 * `re` and `im` must point to `len` readable doubles; `out` must be valid.
 */
enum BlStatus bl_integrate(const struct BlParams *params,
                           const double *re,
                           const double *im,
                           size_t len,
                           double t_final,
                           double dt,
                           size_t stride,
                           struct BlTrajectory **out);

/**
 * Evolves `sqrt(i_in)` on the first site.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BlStatus bl_integrate_single_site(const struct BlParams *params,
                                       double i_in,
                                       double t_final,
                                       double dt,
                                       size_t stride,
                                       struct BlTrajectory **out);

/**
 * # Safety
 * `traj` must come from `bl_integrate*` and not be freed twice.
 */
void bl_trajectory_free(struct BlTrajectory *traj);

/**
 * Number of stored samples; 0 for NULL.
 *
 * # Safety
 * `traj` must be valid or NULL.
 */
size_t bl_trajectory_len(const struct BlTrajectory *traj);

/**
 * Number of cells; 0 for NULL.
 *
 * # Safety
 * `traj` must be valid or NULL.
 */
size_t bl_trajectory_n_cells(const struct BlTrajectory *traj);

/**
 * Sample times into `out[0 .. len(traj)]`.
 *
 * # Safety
 * `out` must hold `out_len` writable doubles.
 */
enum BlStatus bl_trajectory_times(const struct BlTrajectory *traj, double *out, size_t out_len);

/**
 * Cell intensities of one sample into `out[0 .. n_cells]`.
 *
 * # Safety
 * `out` must hold `out_len` writable doubles.
 */
enum BlStatus bl_trajectory_intensities(const struct BlTrajectory *traj,
                                        size_t sample,
                                        double *out,
                                        size_t out_len);

/**
 * Time averages of `I_n` and `gamma_n` over `[t_start, t_end]`, each into a
 * buffer of `n_cells` doubles.
 *
 * # Safety
 * Pointers must be valid; buffers must hold `out_len` doubles.
 */
enum BlStatus bl_averages(const struct BlTrajectory *traj,
                          const struct BlParams *params,
                          double t_start,
                          double t_end,
                          double *i_bar,
                          double *gamma_bar,
                          size_t out_len);

/**
 * Period of `I_cell(t)` after `t_transient` (0-based cell); NaN when the
 * signal is not periodic.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BlStatus bl_period(const struct BlTrajectory *traj,
                        size_t cell,
                        double t_transient,
                        double *out);

/**
 * Closed-form defect solution for `gamma_1 = gamma_d`, others `gamma_0`.
 *
 * # Safety
 * `out` must be valid.
 */
enum BlStatus bl_analytic_defect(double kappa,
                                 double nu,
                                 double gamma_d,
                                 double gamma_0,
                                 struct BlDefect *out);

/**
 * Ascending eigenvalues of the linear chain with per-cell `gammas`
 * (`n_cells` entries) into `energies[0 .. 2 n_cells]`; `in_gap` may be NULL,
 * otherwise it receives 0/1 flags.
 *
 * # Safety
 * `gammas` must hold `n_cells` doubles; output buffers must hold `out_len`
 * elements.
 */
enum BlStatus bl_spectrum(double kappa,
                          double nu,
                          const double *gammas,
                          size_t n_cells,
                          double *energies,
                          uint8_t *in_gap,
                          size_t out_len);

/**
 * Largest relative cell-intensity deviation between the chain and its
 * Creutz-ladder image for a single-site start.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BlStatus bl_creutz_equivalence(const struct BlParams *params,
                                    double i_in,
                                    double t_final,
                                    double dt,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BREATHER_LAB_H */
