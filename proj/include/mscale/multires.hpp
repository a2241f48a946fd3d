#ifndef MSCALE_MULTIRES_HPP
#define MSCALE_MULTIRES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mscale/grid.hpp"

namespace mscale {

/// 1-based inclusive index interval into the design grid.
struct IndexInterval {
    int lo = 1;
    int hi = 1;
    int size() const { return hi - lo + 1; }
    friend bool operator==(const IndexInterval&, const IndexInterval&) = default;
};

/// A duplicate-free, (lo, hi)-sorted list of index intervals. Every family
/// contains all singletons [j,j], j = 1..n.
class IntervalFamily {
public:
    enum class Kind { All, Dyadic };

    /// All n(n+1)/2 intervals.
    static IntervalFamily all(int n);

    /// Geometric multiresolution scheme: intervals [l(j,k), u(j,k)] with
    /// l(j,k) = floor((j-1) lambda^k + 1), u(j,k) = min(floor(j lambda^k), n)
    /// for j = 1..ceil(n lambda^-k), k = 1..ceil(log n / log lambda),
    /// plus all singletons. lambda = 2 reproduces the dyadic scheme.
    static IntervalFamily dyadic(int n, double lambda);

    int n() const { return n_; }
    Kind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    std::span<const IndexInterval> intervals() const { return intervals_; }
    std::size_t size() const { return intervals_.size(); }

private:
    IntervalFamily(int n, Kind kind, double lambda, std::vector<IndexInterval> iv)
        : n_(n), kind_(kind), lambda_(lambda), intervals_(std::move(iv)) {}
    int n_ = 1;
    Kind kind_ = Kind::All;
    double lambda_ = 0.0;
    std::vector<IndexInterval> intervals_;
};

/// The confidence region as testable data: a vector g of n function values
/// is a member iff max_I |sum_{i in I}(y_i - g_i)| / sqrt(|I|) stays below
/// sigma * sqrt(tau * log n).
struct RegionSpec {
    double sigma = 1.0;
    double tau = 3.0;  // default calibrated so coverage >= 0.95 for n >= 500
    IntervalFamily family;
    int n = 1;

    double threshold() const;
};

RegionSpec make_region(const DesignSample& s, double sigma, double tau, IntervalFamily family);

struct MultiscaleStat {
    double value = 0.0;
    IndexInterval argmax;  // first maximizer in family order on ties
};

/// max_I |sum_{i in I} r_i| / sqrt(|I|) over the family, where r = y - g.
MultiscaleStat multiscale_stat(const DesignSample& s, std::span<const double> g,
                               const IntervalFamily& fam);

/// Same statistic evaluated on a raw residual vector (r = y - g already formed).
MultiscaleStat multiscale_stat_residuals(std::span<const double> residuals,
                                         const IntervalFamily& fam);

bool is_member(const DesignSample& s, std::span<const double> g, const RegionSpec& spec);

struct TauCalibration {
    double tau_hat = 0.0;
    double quantile = 0.0;  // the alpha-quantile of the simulated max statistic
};

/// Monte Carlo calibration of tau: simulates n_sim pure-noise samples,
/// takes the order statistic at index ceil(alpha * n_sim) of the max
/// statistic M, and returns tau_hat = q^2 / log n. Replications are keyed
/// by substream_seed(seed, rep) so the result is independent of worker
/// scheduling. Requires n >= 2 (log 1 = 0 leaves tau undefined).
TauCalibration calibrate_tau(int n, const IntervalFamily& fam, double alpha, int n_sim,
                             std::uint64_t seed);

}  // namespace mscale

#endif
