#ifndef MSCALE_REGULARIZE_HPP
#define MSCALE_REGULARIZE_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mscale/grid.hpp"
#include "mscale/multires.hpp"
#include "mscale/polyhedron.hpp"

namespace mscale {

/// The region and a shape restriction have empty intersection. `violated`
/// lists labels of constraints that phase one could not satisfy.
struct infeasible_error : std::runtime_error {
    infeasible_error(const std::string& msg, std::vector<std::string> rows)
        : std::runtime_error(msg), violated(std::move(rows)) {}
    std::vector<std::string> violated;
};

struct MonotonePiece {
    IndexInterval range;
    bool nondecreasing = true;
};

struct ConvexPiece {
    IndexInterval range;
    bool convex = true;  // false = concave
};

struct PinnedValue {
    int index = 1;  // 1-based design index
    double value = 0.0;
};

/// A partition of the grid into shape pieces plus pinned values and
/// candidate intervals for extreme / inflection positions. Pieces within
/// each list must be non-overlapping and inside [1, n].
struct ShapeSpec {
    std::vector<MonotonePiece> monotone;
    std::vector<ConvexPiece> convex;
    std::vector<PinnedValue> pins;
    std::vector<IndexInterval> extreme_anchors;
    std::vector<IndexInterval> inflection_anchors;
    bool first_rising = true;  // direction of the leading piece in anchored modes

    bool empty() const {
        return monotone.empty() && convex.empty() && pins.empty() && extreme_anchors.empty() &&
               inflection_anchors.empty();
    }
};

void validate_shape(const ShapeSpec& shape, int n);

/// Appends the rows a ShapeSpec induces (pieces and pins) to a system over
/// n primary variables.
void add_shape_rows(ConstraintSystem& cs, const ShapeSpec& shape);

/// Total variation of the k-th discrete derivative:
/// sum_{i=k+2..n} |Delta^{k+1} g(i/n)| with Delta^{1} g(i/n) = n (g_i - g_{i-1}).
double tv(std::span<const double> g, int k);

/// max_i |Delta^{k} g(i/n)|; k = 0 gives max |g_i|.
double supnorm_deriv(std::span<const double> g, int k);

struct RegularizedFit {
    std::vector<double> g;
    double objective = 0.0;  // tv(g, k) or the sup-norm bound, measured on g
};

/// Minimizes tv(g, k) over the region (and shape, if given) by LP with the
/// absolute differences split into paired nonnegative variables. The
/// returned vector passes the exact membership test. Throws
/// infeasible_error when the region and shape cannot meet; k >= 3 is
/// accepted but numerically delicate.
RegularizedFit minimize_tv(const DesignSample& s, const RegionSpec& spec, int k,
                           const ShapeSpec* shape = nullptr);

/// Minimizes a single bound B with -B <= Delta^k g <= B over the region
/// (and shape). Returns the minimizer and the measured bound.
RegularizedFit minimize_supnorm(const DesignSample& s, const RegionSpec& spec, int k,
                                const ShapeSpec* shape = nullptr);

}  // namespace mscale

#endif
