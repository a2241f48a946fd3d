/* mscale: multiscale confidence regions, shape-regularized fits and honest
 * confidence bands for regression on the unit interval.
 *
 * C interface of the shared library. All handles are opaque; functions
 * return MSCALE_OK or an error code, and mscale_last_error() describes the
 * most recent failure on the calling thread. Design indices are 1-based;
 * design points are t_i = i/n.
 */
#ifndef MSCALE_H
#define MSCALE_H

#include <stdint.h>

#if defined(_WIN32)
#define MSCALE_API __declspec(dllexport)
#else
#define MSCALE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
    MSCALE_OK = 0,
    MSCALE_ERR_USAGE = 1,      /* bad arguments or malformed input */
    MSCALE_ERR_MAXITER = 2,    /* iteration budget exhausted */
    MSCALE_ERR_INFEASIBLE = 3, /* constraints admit no function */
    MSCALE_ERR_NUMERIC = 4     /* the solver could not certify an answer */
};
typedef int mscale_status;

typedef struct mscale_sample mscale_sample;
typedef struct mscale_family mscale_family;
typedef struct mscale_fit mscale_fit;
typedef struct mscale_shape mscale_shape;

MSCALE_API const char* mscale_last_error(void);

/* ---- samples on the grid t_i = i/n ---- */

MSCALE_API mscale_status mscale_sample_create(const double* y, int n, mscale_sample** out);
/* fspec: "constant:c", "box:center:halfwidth", "sine:omega" (omega may end
 * in "pi", e.g. "sine:4pi"), "exp:rate", "doppler". */
MSCALE_API mscale_status mscale_sample_generate(const char* fspec, int n, double sigma,
                                                uint64_t seed, mscale_sample** out);
MSCALE_API void mscale_sample_free(mscale_sample* s);
MSCALE_API int mscale_sample_size(const mscale_sample* s);
MSCALE_API mscale_status mscale_sample_values(const mscale_sample* s, double* out);
/* Median absolute successive difference over Phi^{-1}(0.75) sqrt(2). */
MSCALE_API mscale_status mscale_estimate_sigma(const mscale_sample* s, double* out);

/* ---- interval families ---- */

/* kind: "all" or "dyadic:LAMBDA" with LAMBDA > 1 (e.g. "dyadic:2"). */
MSCALE_API mscale_status mscale_family_create(int n, const char* kind, mscale_family** out);
MSCALE_API void mscale_family_free(mscale_family* f);
MSCALE_API int mscale_family_size(const mscale_family* f);

/* ---- multiscale statistic, membership, calibration ---- */

MSCALE_API mscale_status mscale_multiscale_stat(const mscale_sample* s, const double* g,
                                                const mscale_family* fam, double* value,
                                                int* arg_lo, int* arg_hi);
MSCALE_API mscale_status mscale_is_member(const mscale_sample* s, const double* g,
                                          const mscale_family* fam, double sigma, double tau,
                                          int* member);
/* tau_hat = q^2 / log n with q the ceil(alpha * n_sim) order statistic of
 * the simulated max statistic. */
MSCALE_API mscale_status mscale_calibrate_tau(int n, const mscale_family* fam, double alpha,
                                              int n_sim, uint64_t seed, double* tau_hat,
                                              double* quantile);

/* ---- taut string ---- */

/* widths: n+1 tube widths around the cumulative sums, ends pinned to 0. */
MSCALE_API mscale_status mscale_taut_string(const mscale_sample* s, const double* widths,
                                            mscale_fit** out);
/* Tube-squeezing loop. Returns MSCALE_ERR_MAXITER with *out still set when
 * the multiresolution criterion is not met within max_iter fits
 * (mscale_last_error names the worst interval). max_iter <= 0 uses 100. */
MSCALE_API mscale_status mscale_taut_string_multires(const mscale_sample* s, double sigma,
                                                     double tau, const mscale_family* fam,
                                                     int max_iter, mscale_fit** out);
MSCALE_API void mscale_fit_free(mscale_fit* fit);
MSCALE_API mscale_status mscale_fit_values(const mscale_fit* fit, double* out);
MSCALE_API int mscale_fit_iterations(const mscale_fit* fit);
/* Interior local extremes with flat runs counted once. */
MSCALE_API int mscale_fit_extreme_count(const mscale_fit* fit);

/* ---- shape restrictions ---- */

MSCALE_API mscale_status mscale_shape_create(mscale_shape** out);
MSCALE_API void mscale_shape_free(mscale_shape* shape);
MSCALE_API mscale_status mscale_shape_monotone(mscale_shape* shape, int lo, int hi,
                                               int nondecreasing);
MSCALE_API mscale_status mscale_shape_convex(mscale_shape* shape, int lo, int hi, int convex);
MSCALE_API mscale_status mscale_shape_pin(mscale_shape* shape, int index, double value);
MSCALE_API mscale_status mscale_shape_extreme_anchor(mscale_shape* shape, int lo, int hi);
MSCALE_API mscale_status mscale_shape_inflection_anchor(mscale_shape* shape, int lo, int hi);
MSCALE_API mscale_status mscale_shape_first_rising(mscale_shape* shape, int rising);

/* ---- smoothness-regularized fits ---- */

/* objective: "tv" or "sup"; order k >= 0 (k <= 2 well tested). shape may be
 * NULL. fit_out receives n values; objective_out the achieved tv / bound. */
MSCALE_API mscale_status mscale_minimize(const mscale_sample* s, double sigma, double tau,
                                         const mscale_family* fam, const char* objective,
                                         int order, const mscale_shape* shape, double* fit_out,
                                         double* objective_out);

/* ---- confidence bands ---- */

/* method: universal | monotone-lp | monotone-fast | monotone-superfast |
 * convex-lp | convex-fast | convex-superfast | piecewise | smooth-fast |
 * smooth-lp. theta steers the superfast grids, K the smoothness bound.
 * shape may be NULL (piecewise then derives anchors from the squeezed taut
 * string); union_mode != 0 unions bands over the anchor intervals.
 * lb/ub receive n entries (+-infinity possible). Returns
 * MSCALE_ERR_INFEASIBLE, with the arrays still filled, when no function
 * satisfies the constraints. */
MSCALE_API mscale_status mscale_band(const mscale_sample* s, double sigma, double tau,
                                     const mscale_family* fam, const char* method, double theta,
                                     double K, const mscale_shape* shape, int union_mode,
                                     double* lb, double* ub, int* feasible);
/* Smallest K with fast-band lb <= ub everywhere (1e-3 relative). */
MSCALE_API mscale_status mscale_min_consistent_k(const mscale_sample* s, double sigma, double tau,
                                                 double theta, double* k_out);

/* ---- detectability ---- */

typedef struct {
    double lo, hi;
    int lo_closed, hi_closed;
} mscale_interval;

MSCALE_API mscale_status mscale_peak_condition(const char* fspec, double sigma, double tau,
                                               double cq, const mscale_interval* left,
                                               const mscale_interval* center,
                                               const mscale_interval* right, int n, int* holds);
/* *n_out = 0 when no n <= n_max satisfies the condition. */
MSCALE_API mscale_status mscale_min_n_for_peak(const char* fspec, double sigma, double tau,
                                               double cq, const mscale_interval* left,
                                               const mscale_interval* center,
                                               const mscale_interval* right, int n_max,
                                               int* n_out);
/* Default intervals for a box bump: centre = support, flanks one halfwidth
 * wide just outside it. */
MSCALE_API mscale_status mscale_box_min_n_for_peak(double center, double halfwidth, double sigma,
                                                   double tau, double cq, int n_max, int* n_out);
MSCALE_API mscale_status mscale_box_peak_intervals(double center, double halfwidth,
                                                   mscale_interval* left, mscale_interval* middle,
                                                   mscale_interval* right);
MSCALE_API mscale_status mscale_inflection_condition(const char* fspec, double sigma, double tau,
                                                     double cq, const mscale_interval* left,
                                                     const mscale_interval* center,
                                                     const mscale_interval* right, int k,
                                                     int use_analytic, int n, int* holds);

/* ---- coverage simulation ---- */

/* method: "region" or any band method. sigma_auto != 0 re-estimates the
 * noise scale on every replication. */
MSCALE_API mscale_status mscale_simulate_coverage(const char* fspec, int n, double sigma,
                                                  int sigma_auto, double tau,
                                                  const mscale_family* fam, const char* method,
                                                  double theta, double K, int reps, uint64_t seed,
                                                  double* coverage, double* std_error);

#ifdef __cplusplus
}
#endif

#endif /* MSCALE_H */
