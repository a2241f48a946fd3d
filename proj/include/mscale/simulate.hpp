#ifndef MSCALE_SIMULATE_HPP
#define MSCALE_SIMULATE_HPP

#include <cstdint>
#include <string>

#include "mscale/bands.hpp"
#include "mscale/grid.hpp"
#include "mscale/multires.hpp"

namespace mscale {

struct CoverageConfig {
    TestFunction f = TestFunction::constant(0.0);
    int n = 100;
    double sigma = 1.0;       // data-generating noise level
    bool sigma_auto = false;  // true: each replication re-estimates sigma for the region
    double tau = 3.0;
    IntervalFamily family = IntervalFamily::dyadic(100, 2.0);
    std::string method = "region";  // region | universal | monotone-fast | monotone-superfast |
                                    // convex-fast | convex-superfast | smooth-fast |
                                    // monotone-lp | convex-lp | smooth-lp
    double theta = 2.0;
    double K = 0.0;
    int reps = 100;
    std::uint64_t seed = 1;
};

struct CoverageResult {
    double proportion = 0.0;
    double std_error = 0.0;  // binomial, sqrt(p(1-p)/reps)
    int reps = 0;
};

/// Counts the event {f in region} or {lb <= f <= ub pointwise} over seeded
/// replications. Replication r draws its noise from substream_seed(seed, r),
/// so the estimate does not depend on worker scheduling.
CoverageResult simulate_coverage(const CoverageConfig& cfg);

}  // namespace mscale

#endif
