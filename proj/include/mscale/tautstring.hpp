#ifndef MSCALE_TAUTSTRING_HPP
#define MSCALE_TAUTSTRING_HPP

#include <span>
#include <vector>

#include "mscale/grid.hpp"
#include "mscale/multires.hpp"

namespace mscale {

/// Tube widths lambda_0..lambda_n around the integrated data, indexed by
/// the knots of the cumulative-sum polygon. Ends are pinned to zero.
struct TubeSpec {
    std::vector<double> widths;  // n+1 entries, widths[0] == widths[n] == 0

    /// lambda_0 = lambda_n = 0 and constant interior width.
    static TubeSpec pinned(int n, double interior);
};

/// Cumulative sums: Y_0 = 0, Y_k = Y_{k-1} + y_k; length n+1.
std::vector<double> cumulative(const DesignSample& s);

struct TautFit {
    std::vector<double> slopes;  // fitted values f_1..f_n at the design points

    /// Where the string bends: side +1 touches the upper tube boundary,
    /// -1 the lower one, 0 the pinned endpoints.
    struct Knot {
        int index = 0;
        int side = 0;
    };
    std::vector<Knot> knots;

    int iterations = 1;  // taut-string builds performed by the tube-squeezing loop
};

/// Shortest path from (0,0) to (n, Y_n) through the tube around the
/// cumulative sums; slopes of the path are the fitted values. Runs in
/// near-linear time via the two-pointer minorant/majorant walk.
TautFit taut_string(const DesignSample& s, const TubeSpec& tube);

struct MultiresFit {
    TautFit fit;
    bool converged = false;
    IndexInterval worst;       // worst violated interval when !converged
    double worst_stat = 0.0;   // its normalized residual sum
};

/// Tube-squeezing loop: start with pinned ends and interior widths equal
/// to the range of the cumulative sums, fit, test
/// |sum_{i in I}(y_i - f_i)| / sqrt(|I|) <= sigma sqrt(tau log n) for every
/// family interval, halve lambda_i at every interior knot i touched by a
/// violated interval (i in I or i+1 in I), and repeat. Gives up after
/// max_iter fits, returning the last fit with converged == false.
MultiresFit taut_string_multires(const DesignSample& s, double sigma, double tau,
                                 const IntervalFamily& fam, int max_iter = 100);

/// Flat runs count as single plateaus; endpoints are never extremes.
struct Plateau {
    int lo = 1, hi = 1;  // 1-based inclusive index range of the flat run
    bool is_max = false;
};

/// Interior local extremes of a fitted vector, by strict sign changes of
/// successive differences. Differences with |d| <= eps are treated as flat.
std::vector<Plateau> local_extremes(std::span<const double> v, double eps = 0.0);
int local_extreme_count(std::span<const double> v, double eps = 0.0);

}  // namespace mscale

#endif
