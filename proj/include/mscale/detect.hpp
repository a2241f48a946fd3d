#ifndef MSCALE_DETECT_HPP
#define MSCALE_DETECT_HPP

#include <optional>
#include <string>

#include "mscale/grid.hpp"

namespace mscale {

/// Real sub-interval of [0,1] with explicit endpoint openness. Grid
/// counting takes the design points t_i = i/n it contains, with a 1e-6
/// guard on the index scale so decimal boundaries resolve the way they
/// read.
struct RealInterval {
    double lo = 0.0, hi = 1.0;
    bool lo_closed = true, hi_closed = true;

    std::string str() const;
};

/// Design indices i with t_i = i/n inside the interval; throws (naming the
/// interval) when none fall inside.
struct GridRange {
    int lo = 1, hi = 0;
    int count() const { return hi - lo + 1; }
};
GridRange grid_range(const RealInterval& iv, int n);

/// When must every member of the confidence region show a peak: the mean
/// of f over the centre interval, less its noise allowance, has to beat
/// the side means plus theirs. c_q = 2.72 is the 0.99-level constant for
/// the three interval noise terms.
struct PeakQuery {
    TestFunction f = TestFunction::constant(0.0);
    double sigma = 1.0;
    double tau = 3.0;
    double cq = 2.72;
    RealInterval left, center, right;
};

/// Defaults reconstructed for a box bump: centre interval = the bump
/// support, flanks of one halfwidth just outside it, the left flank
/// half-open on the right and the right flank half-open on the left.
PeakQuery box_peak_query(double center, double halfwidth, double sigma, double tau = 3.0,
                         double cq = 2.72);

bool peak_condition(const PeakQuery& q, int n);

/// Smallest n <= n_max satisfying the peak condition, located by
/// exponential-then-binary search on the eventually monotone condition;
/// the returned n and n-1 are verified directly. nullopt when no n <= n_max
/// qualifies.
std::optional<int> min_n_for_peak(const PeakQuery& q, int n_max);

/// The first-derivative analogue over a centre interval of half-width
/// k grid steps: min of f' over the centre beats the side maxima once the
/// 2 sigma (sqrt(tau log n) + c_q/sqrt(2)) / k^{3/2} allowances are paid.
struct InflectionQuery {
    TestFunction f = TestFunction::constant(0.0);
    double sigma = 1.0;
    double tau = 3.0;
    double cq = 2.72;
    RealInterval left, center, right;
    int k = 1;                 // half-width of the centre interval in grid steps
    bool use_analytic = true;  // false = central differences with step 1e-5
};

bool inflection_condition(const InflectionQuery& q, int n);

}  // namespace mscale

#endif
