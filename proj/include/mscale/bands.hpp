#ifndef MSCALE_BANDS_HPP
#define MSCALE_BANDS_HPP

#include <optional>
#include <string>
#include <vector>

#include "mscale/grid.hpp"
#include "mscale/multires.hpp"
#include "mscale/regularize.hpp"

namespace mscale {

/// Pointwise bounds at the design points. +-infinity entries are legal;
/// feasible == true guarantees lb[i] <= ub[i] everywhere. Infeasibility is
/// reported, never clamped away.
struct Band {
    std::vector<double> lb, ub;
    bool feasible = true;
    std::string method;
    std::string reason;  // why feasible == false
    double theta = 0.0;  // 0 when the method takes no theta
    double K = 0.0;      // 0 when the method takes no smoothness bound
};

/// lb = y - sigma sqrt(tau log n), ub = y + sigma sqrt(tau log n): honest
/// for every f whatsoever, and too wide to be useful.
Band universal_band(const DesignSample& s, const RegionSpec& spec);

/// Phase-one feasibility of the region intersected with g_1 <= ... <= g_n.
bool monotone_feasible(const DesignSample& s, const RegionSpec& spec);

/// Per design point, min / max of g(t_i) over the region intersected with
/// the nondecreasing cone: 2n LP solves sharing one lazily grown system.
/// When record_witnesses is set, the extremizing vectors are kept.
struct LpBandResult {
    Band band;
    std::vector<std::vector<double>> lb_witness, ub_witness;
};
LpBandResult lp_band_monotone(const DesignSample& s, const RegionSpec& spec,
                              bool record_witnesses = false);

/// Trailing/leading window means with the sqrt(tau log n / (k+1)) noise
/// allowance; O(n^2). The finalization sweeps enforce monotone bounds;
/// pass sweep = false to read the raw values.
Band fast_band_monotone(const DesignSample& s, const RegionSpec& spec, bool sweep = true);

/// Same bounds restricted to window sizes floor(theta^k - 1) + 1 (always
/// including size 1); O(n log n). theta > 1.
Band superfast_band_monotone(const DesignSample& s, const RegionSpec& spec, double theta,
                             bool sweep = true);

bool convex_feasible(const DesignSample& s, const RegionSpec& spec);
LpBandResult lp_band_convex(const DesignSample& s, const RegionSpec& spec,
                            bool record_witnesses = false);

/// Centered-window upper bound (O(n^2)) and the chord-based lower bound
/// (O(n^3)) for convex approximands.
Band fast_band_convex(const DesignSample& s, const RegionSpec& spec);

/// Theta-grid variant: O(n log n) upper, O(n (log n)^2) lower.
Band superfast_band_convex(const DesignSample& s, const RegionSpec& spec, double theta);

enum class PiecewiseMode { FixedAnchors, UnionOverInterval };

/// Piecewise monotone and/or piecewise convex bounds assembled from the
/// superfast bounds run on each piece. Fixed mode uses the pieces as
/// given; union mode re-anchors each extreme/inflection at every design
/// point of its anchor interval (others held at their midpoints) and takes
/// the pointwise union, honest for extremes anywhere in the intervals.
/// Monotone and convex pieces present together intersect pointwise.
Band piecewise_band(const DesignSample& s, const RegionSpec& spec, const ShapeSpec& shape,
                    PiecewiseMode mode, double theta);

/// Quantitative smoothness class: ||g^{(2)}||_inf <= K.
struct SmoothnessClass {
    int order = 2;  // only the second derivative is supported
    double K = 0.0;
};

/// Centered means with the (k/n)^2 K curvature allowance on a theta-grid
/// of window radii (radius 0 always included).
Band smoothness_band_fast(const DesignSample& s, const RegionSpec& spec,
                          const SmoothnessClass& cls, double theta);

/// Small-n LP reference: min / max g(t_i) over the region with
/// -K <= Delta^2 g <= K.
LpBandResult smoothness_band_lp(const DesignSample& s, const RegionSpec& spec,
                                const SmoothnessClass& cls, bool record_witnesses = false);

/// Smallest K for which the fast smoothness band is nonempty
/// (max_i lb[i] - ub[i] <= 0), by bisection to 1e-3 relative tolerance.
double min_consistent_k(const DesignSample& s, const RegionSpec& spec, double theta);

/// Default anchors and pieces read off a fitted vector (typically the
/// squeezed taut string): extreme anchors are the flat runs at its local
/// extremes with midpoint split points; inflection anchors sit midway
/// between consecutive extremes.
ShapeSpec default_shape_from_fit(std::span<const double> fit, bool monotone_pieces,
                                 bool convex_pieces, double eps = 0.0);

}  // namespace mscale

#endif
