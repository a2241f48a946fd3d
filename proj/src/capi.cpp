#include "mscale.h"

#include <cstring>
#include <string>

#include "mscale/bands.hpp"
#include "mscale/detect.hpp"
#include "mscale/grid.hpp"
#include "mscale/multires.hpp"
#include "mscale/polyhedron.hpp"
#include "mscale/regularize.hpp"
#include "mscale/simulate.hpp"
#include "mscale/tautstring.hpp"

using namespace mscale;

struct mscale_sample {
    DesignSample s;
};
struct mscale_family {
    IntervalFamily f;
};
struct mscale_fit {
    std::vector<double> values;
    int iterations = 1;
};
struct mscale_shape {
    ShapeSpec spec;
    bool first_rising_set = false;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <class F>
mscale_status guarded(F&& body) {
    try {
        return body();
    } catch (const infeasible_error& e) {
        set_error(e.what());
        return MSCALE_ERR_INFEASIBLE;
    } catch (const numeric_error& e) {
        set_error(e.what());
        return MSCALE_ERR_NUMERIC;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return MSCALE_ERR_USAGE;
    } catch (const std::exception& e) {
        set_error(e.what());
        return MSCALE_ERR_NUMERIC;
    }
}

mscale_status usage(const char* msg) {
    set_error(msg);
    return MSCALE_ERR_USAGE;
}

RegionSpec region_of(const mscale_sample* s, double sigma, double tau, const mscale_family* fam) {
    return make_region(s->s, sigma, tau, fam->f);
}

RealInterval to_interval(const mscale_interval* iv) {
    return {iv->lo, iv->hi, iv->lo_closed != 0, iv->hi_closed != 0};
}

}  // namespace

extern "C" {

const char* mscale_last_error(void) { return g_last_error.c_str(); }

mscale_status mscale_sample_create(const double* y, int n, mscale_sample** out) {
    if (!y || !out || n < 1) return usage("mscale_sample_create: bad arguments");
    return guarded([&] {
        *out = new mscale_sample{DesignSample(std::vector<double>(y, y + n))};
        return MSCALE_OK;
    });
}

mscale_status mscale_sample_generate(const char* fspec, int n, double sigma, uint64_t seed,
                                     mscale_sample** out) {
    if (!fspec || !out) return usage("mscale_sample_generate: bad arguments");
    return guarded([&] {
        *out = new mscale_sample{generate_data(TestFunction::parse(fspec), n, sigma, seed)};
        return MSCALE_OK;
    });
}

void mscale_sample_free(mscale_sample* s) { delete s; }

int mscale_sample_size(const mscale_sample* s) { return s ? s->s.n() : 0; }

mscale_status mscale_sample_values(const mscale_sample* s, double* out) {
    if (!s || !out) return usage("mscale_sample_values: bad arguments");
    std::memcpy(out, s->s.values().data(), sizeof(double) * s->s.values().size());
    return MSCALE_OK;
}

mscale_status mscale_estimate_sigma(const mscale_sample* s, double* out) {
    if (!s || !out) return usage("mscale_estimate_sigma: bad arguments");
    return guarded([&] {
        *out = estimate_sigma(s->s);
        return MSCALE_OK;
    });
}

mscale_status mscale_family_create(int n, const char* kind, mscale_family** out) {
    if (!kind || !out) return usage("mscale_family_create: bad arguments");
    return guarded([&] {
        const std::string spec(kind);
        if (spec == "all") {
            *out = new mscale_family{IntervalFamily::all(n)};
        } else if (spec.rfind("dyadic", 0) == 0) {
            double lambda = 2.0;
            if (spec.size() > 6) {
                if (spec[6] != ':') throw std::invalid_argument("family kind '" + spec + "'");
                lambda = std::stod(spec.substr(7));
            }
            *out = new mscale_family{IntervalFamily::dyadic(n, lambda)};
        } else {
            throw std::invalid_argument("family kind '" + spec + "' (use all | dyadic:LAMBDA)");
        }
        return MSCALE_OK;
    });
}

void mscale_family_free(mscale_family* f) { delete f; }

int mscale_family_size(const mscale_family* f) {
    return f ? static_cast<int>(f->f.size()) : 0;
}

mscale_status mscale_multiscale_stat(const mscale_sample* s, const double* g,
                                     const mscale_family* fam, double* value, int* arg_lo,
                                     int* arg_hi) {
    if (!s || !g || !fam || !value) return usage("mscale_multiscale_stat: bad arguments");
    return guarded([&] {
        const MultiscaleStat st =
            multiscale_stat(s->s, std::span<const double>(g, static_cast<std::size_t>(s->s.n())),
                            fam->f);
        *value = st.value;
        if (arg_lo) *arg_lo = st.argmax.lo;
        if (arg_hi) *arg_hi = st.argmax.hi;
        return MSCALE_OK;
    });
}

mscale_status mscale_is_member(const mscale_sample* s, const double* g, const mscale_family* fam,
                               double sigma, double tau, int* member) {
    if (!s || !g || !fam || !member) return usage("mscale_is_member: bad arguments");
    return guarded([&] {
        const RegionSpec spec = region_of(s, sigma, tau, fam);
        *member = is_member(
                      s->s, std::span<const double>(g, static_cast<std::size_t>(s->s.n())), spec)
                      ? 1
                      : 0;
        return MSCALE_OK;
    });
}

mscale_status mscale_calibrate_tau(int n, const mscale_family* fam, double alpha, int n_sim,
                                   uint64_t seed, double* tau_hat, double* quantile) {
    if (!fam || !tau_hat) return usage("mscale_calibrate_tau: bad arguments");
    return guarded([&] {
        const TauCalibration cal = calibrate_tau(n, fam->f, alpha, n_sim, seed);
        *tau_hat = cal.tau_hat;
        if (quantile) *quantile = cal.quantile;
        return MSCALE_OK;
    });
}

mscale_status mscale_taut_string(const mscale_sample* s, const double* widths, mscale_fit** out) {
    if (!s || !widths || !out) return usage("mscale_taut_string: bad arguments");
    return guarded([&] {
        TubeSpec tube;
        tube.widths.assign(widths, widths + s->s.n() + 1);
        TautFit fit = taut_string(s->s, tube);
        *out = new mscale_fit{std::move(fit.slopes), fit.iterations};
        return MSCALE_OK;
    });
}

mscale_status mscale_taut_string_multires(const mscale_sample* s, double sigma, double tau,
                                          const mscale_family* fam, int max_iter,
                                          mscale_fit** out) {
    if (!s || !fam || !out) return usage("mscale_taut_string_multires: bad arguments");
    return guarded([&] {
        MultiresFit mf =
            taut_string_multires(s->s, sigma, tau, fam->f, max_iter <= 0 ? 100 : max_iter);
        *out = new mscale_fit{std::move(mf.fit.slopes), mf.fit.iterations};
        if (!mf.converged) {
            set_error("tube squeezing exhausted its iteration budget; worst interval [" +
                      std::to_string(mf.worst.lo) + "," + std::to_string(mf.worst.hi) +
                      "] at statistic " + std::to_string(mf.worst_stat));
            return MSCALE_ERR_MAXITER;
        }
        return MSCALE_OK;
    });
}

void mscale_fit_free(mscale_fit* fit) { delete fit; }

mscale_status mscale_fit_values(const mscale_fit* fit, double* out) {
    if (!fit || !out) return usage("mscale_fit_values: bad arguments");
    std::memcpy(out, fit->values.data(), sizeof(double) * fit->values.size());
    return MSCALE_OK;
}

int mscale_fit_iterations(const mscale_fit* fit) { return fit ? fit->iterations : 0; }

int mscale_fit_extreme_count(const mscale_fit* fit) {
    return fit ? local_extreme_count(fit->values) : 0;
}

mscale_status mscale_shape_create(mscale_shape** out) {
    if (!out) return usage("mscale_shape_create: bad arguments");
    *out = new mscale_shape{};
    return MSCALE_OK;
}

void mscale_shape_free(mscale_shape* shape) { delete shape; }

mscale_status mscale_shape_monotone(mscale_shape* shape, int lo, int hi, int nondecreasing) {
    if (!shape) return usage("mscale_shape_monotone: bad arguments");
    shape->spec.monotone.push_back({{lo, hi}, nondecreasing != 0});
    return MSCALE_OK;
}

mscale_status mscale_shape_convex(mscale_shape* shape, int lo, int hi, int convex) {
    if (!shape) return usage("mscale_shape_convex: bad arguments");
    shape->spec.convex.push_back({{lo, hi}, convex != 0});
    return MSCALE_OK;
}

mscale_status mscale_shape_pin(mscale_shape* shape, int index, double value) {
    if (!shape) return usage("mscale_shape_pin: bad arguments");
    shape->spec.pins.push_back({index, value});
    return MSCALE_OK;
}

mscale_status mscale_shape_extreme_anchor(mscale_shape* shape, int lo, int hi) {
    if (!shape) return usage("mscale_shape_extreme_anchor: bad arguments");
    shape->spec.extreme_anchors.push_back({lo, hi});
    return MSCALE_OK;
}

mscale_status mscale_shape_inflection_anchor(mscale_shape* shape, int lo, int hi) {
    if (!shape) return usage("mscale_shape_inflection_anchor: bad arguments");
    shape->spec.inflection_anchors.push_back({lo, hi});
    return MSCALE_OK;
}

mscale_status mscale_shape_first_rising(mscale_shape* shape, int rising) {
    if (!shape) return usage("mscale_shape_first_rising: bad arguments");
    shape->spec.first_rising = rising != 0;
    shape->first_rising_set = true;
    return MSCALE_OK;
}

mscale_status mscale_minimize(const mscale_sample* s, double sigma, double tau,
                              const mscale_family* fam, const char* objective, int order,
                              const mscale_shape* shape, double* fit_out, double* objective_out) {
    if (!s || !fam || !objective || !fit_out) return usage("mscale_minimize: bad arguments");
    return guarded([&] {
        const RegionSpec spec = region_of(s, sigma, tau, fam);
        const ShapeSpec* sh = shape ? &shape->spec : nullptr;
        const std::string kind(objective);
        RegularizedFit fit;
        if (kind == "tv")
            fit = minimize_tv(s->s, spec, order, sh);
        else if (kind == "sup")
            fit = minimize_supnorm(s->s, spec, order, sh);
        else
            throw std::invalid_argument("objective must be tv or sup");
        std::memcpy(fit_out, fit.g.data(), sizeof(double) * fit.g.size());
        if (objective_out) *objective_out = fit.objective;
        return MSCALE_OK;
    });
}

mscale_status mscale_band(const mscale_sample* s, double sigma, double tau,
                          const mscale_family* fam, const char* method, double theta, double K,
                          const mscale_shape* shape, int union_mode, double* lb, double* ub,
                          int* feasible) {
    if (!s || !fam || !method || !lb || !ub) return usage("mscale_band: bad arguments");
    return guarded([&] {
        const RegionSpec spec = region_of(s, sigma, tau, fam);
        const std::string m(method);
        Band band;
        if (m == "universal") {
            band = universal_band(s->s, spec);
        } else if (m == "monotone-lp") {
            band = lp_band_monotone(s->s, spec).band;
        } else if (m == "monotone-fast") {
            band = fast_band_monotone(s->s, spec);
        } else if (m == "monotone-superfast") {
            band = superfast_band_monotone(s->s, spec, theta);
        } else if (m == "convex-lp") {
            band = lp_band_convex(s->s, spec).band;
        } else if (m == "convex-fast") {
            band = fast_band_convex(s->s, spec);
        } else if (m == "convex-superfast") {
            band = superfast_band_convex(s->s, spec, theta);
        } else if (m == "smooth-fast") {
            band = smoothness_band_fast(s->s, spec, SmoothnessClass{2, K}, theta);
        } else if (m == "smooth-lp") {
            band = smoothness_band_lp(s->s, spec, SmoothnessClass{2, K}).band;
        } else if (m == "piecewise") {
            ShapeSpec sh;
            if (shape) {
                sh = shape->spec;
            } else {
                const MultiresFit mf = taut_string_multires(s->s, sigma, tau, fam->f, 100);
                sh = default_shape_from_fit(mf.fit.slopes, true, false);
            }
            band = piecewise_band(s->s, spec, sh,
                                  union_mode ? PiecewiseMode::UnionOverInterval
                                             : PiecewiseMode::FixedAnchors,
                                  theta);
        } else {
            throw std::invalid_argument("unknown band method '" + m + "'");
        }
        std::memcpy(lb, band.lb.data(), sizeof(double) * band.lb.size());
        std::memcpy(ub, band.ub.data(), sizeof(double) * band.ub.size());
        if (feasible) *feasible = band.feasible ? 1 : 0;
        if (!band.feasible) {
            set_error(band.reason.empty() ? "band is empty" : band.reason);
            return MSCALE_ERR_INFEASIBLE;
        }
        return MSCALE_OK;
    });
}

mscale_status mscale_min_consistent_k(const mscale_sample* s, double sigma, double tau,
                                      double theta, double* k_out) {
    if (!s || !k_out) return usage("mscale_min_consistent_k: bad arguments");
    return guarded([&] {
        // The K search uses only sigma, tau and n from the spec; the family
        // is a placeholder.
        const RegionSpec spec =
            make_region(s->s, sigma, tau, IntervalFamily::dyadic(s->s.n(), 2.0));
        *k_out = min_consistent_k(s->s, spec, theta);
        return MSCALE_OK;
    });
}

mscale_status mscale_peak_condition(const char* fspec, double sigma, double tau, double cq,
                                    const mscale_interval* left, const mscale_interval* center,
                                    const mscale_interval* right, int n, int* holds) {
    if (!fspec || !left || !center || !right || !holds)
        return usage("mscale_peak_condition: bad arguments");
    return guarded([&] {
        PeakQuery q{TestFunction::parse(fspec), sigma,           tau,
                    cq,                         to_interval(left), to_interval(center)};
        q.right = to_interval(right);
        *holds = peak_condition(q, n) ? 1 : 0;
        return MSCALE_OK;
    });
}

mscale_status mscale_min_n_for_peak(const char* fspec, double sigma, double tau, double cq,
                                    const mscale_interval* left, const mscale_interval* center,
                                    const mscale_interval* right, int n_max, int* n_out) {
    if (!fspec || !left || !center || !right || !n_out)
        return usage("mscale_min_n_for_peak: bad arguments");
    return guarded([&] {
        PeakQuery q{TestFunction::parse(fspec), sigma,           tau,
                    cq,                         to_interval(left), to_interval(center)};
        q.right = to_interval(right);
        *n_out = min_n_for_peak(q, n_max).value_or(0);
        return MSCALE_OK;
    });
}

mscale_status mscale_box_min_n_for_peak(double center, double halfwidth, double sigma, double tau,
                                        double cq, int n_max, int* n_out) {
    if (!n_out) return usage("mscale_box_min_n_for_peak: bad arguments");
    return guarded([&] {
        *n_out = min_n_for_peak(box_peak_query(center, halfwidth, sigma, tau, cq), n_max)
                     .value_or(0);
        return MSCALE_OK;
    });
}

mscale_status mscale_box_peak_intervals(double center, double halfwidth, mscale_interval* left,
                                        mscale_interval* middle, mscale_interval* right) {
    if (!left || !middle || !right) return usage("mscale_box_peak_intervals: bad arguments");
    return guarded([&] {
        const PeakQuery q = box_peak_query(center, halfwidth, 1.0);
        auto pack = [](const RealInterval& iv) {
            return mscale_interval{iv.lo, iv.hi, iv.lo_closed ? 1 : 0, iv.hi_closed ? 1 : 0};
        };
        *left = pack(q.left);
        *middle = pack(q.center);
        *right = pack(q.right);
        return MSCALE_OK;
    });
}

mscale_status mscale_inflection_condition(const char* fspec, double sigma, double tau, double cq,
                                          const mscale_interval* left,
                                          const mscale_interval* center,
                                          const mscale_interval* right, int k, int use_analytic,
                                          int n, int* holds) {
    if (!fspec || !left || !center || !right || !holds)
        return usage("mscale_inflection_condition: bad arguments");
    return guarded([&] {
        InflectionQuery q;
        q.f = TestFunction::parse(fspec);
        q.sigma = sigma;
        q.tau = tau;
        q.cq = cq;
        q.left = to_interval(left);
        q.center = to_interval(center);
        q.right = to_interval(right);
        q.k = k;
        q.use_analytic = use_analytic != 0;
        *holds = inflection_condition(q, n) ? 1 : 0;
        return MSCALE_OK;
    });
}

mscale_status mscale_simulate_coverage(const char* fspec, int n, double sigma, int sigma_auto,
                                       double tau, const mscale_family* fam, const char* method,
                                       double theta, double K, int reps, uint64_t seed,
                                       double* coverage, double* std_error) {
    if (!fspec || !fam || !method || !coverage)
        return usage("mscale_simulate_coverage: bad arguments");
    return guarded([&] {
        CoverageConfig cfg{TestFunction::parse(fspec),
                           n,
                           sigma,
                           sigma_auto != 0,
                           tau,
                           fam->f,
                           method,
                           theta,
                           K,
                           reps,
                           seed};
        const CoverageResult res = simulate_coverage(cfg);
        *coverage = res.proportion;
        if (std_error) *std_error = res.std_error;
        return MSCALE_OK;
    });
}

}  // extern "C"
