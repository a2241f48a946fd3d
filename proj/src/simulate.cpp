#include "mscale/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "mscale/parallel.hpp"

namespace mscale {

namespace {

Band band_for_method(const DesignSample& s, const RegionSpec& spec, const CoverageConfig& cfg) {
    const std::string& m = cfg.method;
    if (m == "universal") return universal_band(s, spec);
    if (m == "monotone-fast") return fast_band_monotone(s, spec);
    if (m == "monotone-superfast") return superfast_band_monotone(s, spec, cfg.theta);
    if (m == "convex-fast") return fast_band_convex(s, spec);
    if (m == "convex-superfast") return superfast_band_convex(s, spec, cfg.theta);
    if (m == "smooth-fast")
        return smoothness_band_fast(s, spec, SmoothnessClass{2, cfg.K}, cfg.theta);
    if (m == "monotone-lp") return lp_band_monotone(s, spec).band;
    if (m == "convex-lp") return lp_band_convex(s, spec).band;
    if (m == "smooth-lp")
        return smoothness_band_lp(s, spec, SmoothnessClass{2, cfg.K}).band;
    throw std::invalid_argument("simulate_coverage: unknown method '" + m + "'");
}

}  // namespace

CoverageResult simulate_coverage(const CoverageConfig& cfg) {
    if (cfg.reps < 1) throw std::invalid_argument("simulate_coverage: reps must be >= 1");
    if (cfg.family.n() != cfg.n)
        throw std::invalid_argument("simulate_coverage: family size mismatch");
    if (cfg.method != "region") (void)band_for_method;  // validated per replication

    std::vector<double> fvals(static_cast<std::size_t>(cfg.n));
    for (int i = 1; i <= cfg.n; ++i)
        fvals[static_cast<std::size_t>(i - 1)] = cfg.f(static_cast<double>(i) / cfg.n);

    std::vector<char> hit(static_cast<std::size_t>(cfg.reps), 0);
    parallel_for(cfg.reps, [&](int rep) {
        const DesignSample s =
            generate_data(cfg.f, cfg.n, cfg.sigma, substream_seed(cfg.seed, rep));
        const double sigma_used = cfg.sigma_auto ? estimate_sigma(s) : cfg.sigma;
        RegionSpec spec{sigma_used, cfg.tau, cfg.family, cfg.n};
        bool ok;
        if (cfg.method == "region") {
            ok = is_member(s, fvals, spec);
        } else {
            const Band b = band_for_method(s, spec, cfg);
            ok = b.feasible;
            for (int i = 0; ok && i < cfg.n; ++i)
                ok = b.lb[static_cast<std::size_t>(i)] <= fvals[static_cast<std::size_t>(i)] &&
                     fvals[static_cast<std::size_t>(i)] <= b.ub[static_cast<std::size_t>(i)];
        }
        hit[static_cast<std::size_t>(rep)] = ok ? 1 : 0;
    });

    int count = 0;
    for (char h : hit) count += h;
    const double p = static_cast<double>(count) / cfg.reps;
    return {p, std::sqrt(p * (1.0 - p) / cfg.reps), cfg.reps};
}

}  // namespace mscale
