#include "mscale/multires.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mscale/parallel.hpp"

namespace mscale {

namespace {

void sort_dedup(std::vector<IndexInterval>& iv) {
    std::sort(iv.begin(), iv.end(),
              [](const IndexInterval& a, const IndexInterval& b) {
                  return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
              });
    iv.erase(std::unique(iv.begin(), iv.end()), iv.end());
}

}  // namespace

IntervalFamily IntervalFamily::all(int n) {
    if (n < 1) throw std::invalid_argument("IntervalFamily: n must be >= 1");
    std::vector<IndexInterval> iv;
    iv.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
    for (int lo = 1; lo <= n; ++lo)
        for (int hi = lo; hi <= n; ++hi) iv.push_back({lo, hi});
    return IntervalFamily(n, Kind::All, 0.0, std::move(iv));
}

IntervalFamily IntervalFamily::dyadic(int n, double lambda) {
    if (n < 1) throw std::invalid_argument("IntervalFamily: n must be >= 1");
    if (!(lambda > 1.0)) throw std::invalid_argument("IntervalFamily: lambda must be > 1");
    std::vector<IndexInterval> iv;
    for (int j = 1; j <= n; ++j) iv.push_back({j, j});
    if (n > 1) {
        const int kmax = static_cast<int>(std::ceil(std::log(n) / std::log(lambda)));
        double scale = 1.0;
        for (int k = 1; k <= kmax; ++k) {
            scale *= lambda;
            const int jmax = static_cast<int>(std::ceil(n / scale));
            for (int j = 1; j <= jmax; ++j) {
                const int lo = static_cast<int>(std::floor((j - 1) * scale + 1.0));
                const int hi = std::min(static_cast<int>(std::floor(j * scale)), n);
                if (lo >= 1 && lo <= hi) iv.push_back({lo, hi});
            }
        }
    }
    sort_dedup(iv);
    return IntervalFamily(n, Kind::Dyadic, lambda, std::move(iv));
}

double RegionSpec::threshold() const {
    return sigma * std::sqrt(tau * std::log(static_cast<double>(n)));
}

RegionSpec make_region(const DesignSample& s, double sigma, double tau, IntervalFamily family) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("RegionSpec: sigma must be >= 0");
    if (!(tau > 0.0)) throw std::invalid_argument("RegionSpec: tau must be > 0");
    if (family.n() != s.n()) throw std::invalid_argument("RegionSpec: family size mismatch");
    return RegionSpec{sigma, tau, std::move(family), s.n()};
}

MultiscaleStat multiscale_stat_residuals(std::span<const double> residuals,
                                         const IntervalFamily& fam) {
    const int n = static_cast<int>(residuals.size());
    if (n != fam.n()) throw std::invalid_argument("multiscale_stat: length mismatch");
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i)
        prefix[static_cast<std::size_t>(i)] =
            prefix[static_cast<std::size_t>(i - 1)] + residuals[static_cast<std::size_t>(i - 1)];

    MultiscaleStat best{-1.0, fam.intervals().front()};
    for (const IndexInterval& iv : fam.intervals()) {
        const double sum = prefix[static_cast<std::size_t>(iv.hi)] -
                           prefix[static_cast<std::size_t>(iv.lo - 1)];
        const double w = std::abs(sum) / std::sqrt(static_cast<double>(iv.size()));
        if (w > best.value) best = {w, iv};
    }
    if (best.value < 0.0) best.value = 0.0;
    return best;
}

MultiscaleStat multiscale_stat(const DesignSample& s, std::span<const double> g,
                               const IntervalFamily& fam) {
    if (static_cast<int>(g.size()) != s.n())
        throw std::invalid_argument("multiscale_stat: length mismatch");
    std::vector<double> r(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) r[i] = s.values()[i] - g[i];
    return multiscale_stat_residuals(r, fam);
}

bool is_member(const DesignSample& s, std::span<const double> g, const RegionSpec& spec) {
    if (spec.n != s.n()) throw std::invalid_argument("is_member: spec/sample size mismatch");
    return multiscale_stat(s, g, spec.family).value <= spec.threshold();
}

TauCalibration calibrate_tau(int n, const IntervalFamily& fam, double alpha, int n_sim,
                             std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("calibrate_tau: n must be >= 2 (log n = 0 at n = 1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("calibrate_tau: alpha must be in (0,1)");
    if (n_sim < 100) throw std::invalid_argument("calibrate_tau: need at least 100 simulations");
    if (fam.n() != n) throw std::invalid_argument("calibrate_tau: family size mismatch");

    std::vector<double> maxima(static_cast<std::size_t>(n_sim));
    parallel_for(n_sim, [&](int rep) {
        NormalSampler z(substream_seed(seed, static_cast<std::uint64_t>(rep)));
        std::vector<double> noise(static_cast<std::size_t>(n));
        for (double& v : noise) v = z();
        maxima[static_cast<std::size_t>(rep)] = multiscale_stat_residuals(noise, fam).value;
    });

    // Empirical quantile convention: the order statistic at ceil(alpha*n_sim).
    std::size_t rank = static_cast<std::size_t>(std::ceil(alpha * n_sim));
    rank = std::min(std::max<std::size_t>(rank, 1), maxima.size());
    std::nth_element(maxima.begin(), maxima.begin() + (rank - 1), maxima.end());
    const double q = maxima[rank - 1];
    return {q * q / std::log(static_cast<double>(n)), q};
}

}  // namespace mscale
