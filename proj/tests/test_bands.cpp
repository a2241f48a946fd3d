#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mscale/bands.hpp"
#include "mscale/grid.hpp"
#include "mscale/multires.hpp"
#include "mscale/regularize.hpp"
#include "mscale/simulate.hpp"
#include "mscale/tautstring.hpp"

using namespace mscale;

namespace {

DesignSample convex_sample(int n, double sigma, std::uint64_t seed) {
    return generate_data(TestFunction::exponential(5.0), n, sigma, seed);
}

bool contains(const Band& b, const std::vector<double>& f, double tol = 0.0) {
    if (!b.feasible) return false;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] < b.lb[i] - tol || f[i] > b.ub[i] + tol) return false;
    return true;
}

bool nondecreasing(const std::vector<double>& v, double tol = 0.0) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1] - tol) return false;
    return true;
}

}  // namespace

TEST_CASE("universal band") {
    SUBCASE("degenerate at sigma = 0") {
        const DesignSample s({1.0, -2.0, 0.5});
        const Band b = universal_band(s, make_region(s, 0.0, 3.0, IntervalFamily::all(3)));
        CHECK(b.lb == s.values());
        CHECK(b.ub == s.values());
        CHECK(b.feasible);
    }
    SUBCASE("two-point width") {
        const DesignSample s({0.0, 0.0});
        const Band b = universal_band(s, make_region(s, 1.0, 3.0, IntervalFamily::all(2)));
        CHECK(b.lb[0] == doctest::Approx(-1.442026886600883).epsilon(1e-12));
        CHECK(b.lb[1] == b.lb[0]);
        CHECK(b.ub[0] - b.lb[0] == doctest::Approx(2 * 1.442026886600883).epsilon(1e-12));
        CHECK(b.ub[1] - b.lb[1] == doctest::Approx(b.ub[0] - b.lb[0]).epsilon(1e-15));
    }
}

TEST_CASE("monotone feasibility checks") {
    std::vector<double> inc(16);
    for (int i = 0; i < 16; ++i) inc[static_cast<std::size_t>(i)] = std::exp(0.2 * i);
    const DesignSample rising(inc);
    CHECK(monotone_feasible(rising, make_region(rising, 1.0, 3.0, IntervalFamily::all(16))));

    const DesignSample cliff({100.0, -100.0});
    CHECK_FALSE(monotone_feasible(cliff, make_region(cliff, 1.0, 3.0, IntervalFamily::all(2))));
}

TEST_CASE("monotone LP band on the hand-solvable instance") {
    const DesignSample s({0.0, 0.0});
    const RegionSpec spec = make_region(s, 1.0, 3.0, IntervalFamily::all(2));
    const LpBandResult r = lp_band_monotone(s, spec, true);
    REQUIRE(r.band.feasible);
    CHECK(r.band.lb[0] == doctest::Approx(-1.442026886600883).epsilon(1e-7));
    CHECK(r.band.ub[1] == doctest::Approx(+1.442026886600883).epsilon(1e-7));
    CHECK(nondecreasing(r.band.lb, 1e-12));
    CHECK(nondecreasing(r.band.ub, 1e-12));
    // every extremizer is itself in the region and monotone
    for (const auto& witness_set : {r.lb_witness, r.ub_witness})
        for (const std::vector<double>& g : witness_set) {
            CHECK(is_member(s, g, spec));
            CHECK(nondecreasing(g, 1e-9));
        }
}

TEST_CASE("fast monotone bounds") {
    SUBCASE("noise-free nondecreasing data collapses to the data") {
        std::vector<double> inc{0.0, 0.5, 0.7, 1.4, 2.0};
        const DesignSample s(inc);
        const Band b = fast_band_monotone(s, make_region(s, 0.0, 3.0, IntervalFamily::all(5)));
        CHECK(b.lb == inc);
        CHECK(b.ub == inc);
    }
    SUBCASE("trailing means on decreasing data") {
        const DesignSample s({4.0, 3.0, 2.0, 1.0});
        const Band raw =
            fast_band_monotone(s, make_region(s, 0.0, 3.0, IntervalFamily::all(4)), false);
        CHECK(raw.lb[3] == doctest::Approx(2.5).epsilon(1e-15));
    }
    SUBCASE("two-point value") {
        const DesignSample s({0.0, 0.0});
        const Band raw =
            fast_band_monotone(s, make_region(s, 1.0, 3.0, IntervalFamily::all(2)), false);
        CHECK(raw.lb[1] == doctest::Approx(-1.019666990168809).epsilon(1e-12));
    }
}

TEST_CASE("superfast monotone bounds") {
    const DesignSample s = generate_data(TestFunction::exponential(5.0), 300, 5.0, 11);
    const RegionSpec spec = make_region(s, 5.0, 3.0, IntervalFamily::dyadic(300, 2.0));

    SUBCASE("window subset never tightens the raw bounds") {
        const Band fast = fast_band_monotone(s, spec, false);
        for (double theta : {1.3, 2.0, 7.0}) {
            const Band sup = superfast_band_monotone(s, spec, theta, false);
            for (int i = 0; i < 300; ++i) {
                CHECK(sup.lb[static_cast<std::size_t>(i)] <= fast.lb[static_cast<std::size_t>(i)]);
                CHECK(sup.ub[static_cast<std::size_t>(i)] >= fast.ub[static_cast<std::size_t>(i)]);
            }
        }
    }
    SUBCASE("a huge theta degenerates to the swept universal band") {
        const Band sup = superfast_band_monotone(s, spec, 1e9, true);
        Band uni = universal_band(s, spec);
        for (int i = 1; i < 300; ++i)
            uni.lb[static_cast<std::size_t>(i)] =
                std::max(uni.lb[static_cast<std::size_t>(i)], uni.lb[static_cast<std::size_t>(i - 1)]);
        for (int i = 298; i >= 0; --i)
            uni.ub[static_cast<std::size_t>(i)] =
                std::min(uni.ub[static_cast<std::size_t>(i)], uni.ub[static_cast<std::size_t>(i + 1)]);
        CHECK(sup.lb == uni.lb);
        CHECK(sup.ub == uni.ub);
    }
    SUBCASE("finalized bounds are nondecreasing") {
        const DesignSample noisy = generate_data(TestFunction::doppler(), 1024, 0.5, 3);
        const Band sup = superfast_band_monotone(
            noisy, make_region(noisy, 0.5, 3.0, IntervalFamily::dyadic(1024, 2.0)), 2.0);
        CHECK(nondecreasing(sup.lb));
        CHECK(nondecreasing(sup.ub));
    }
    SUBCASE("theta must exceed one") {
        CHECK_THROWS_AS(superfast_band_monotone(s, spec, 1.0), std::invalid_argument);
    }
}

TEST_CASE("fast convex bounds") {
    SUBCASE("noise-free convex data: upper bound equals the data") {
        std::vector<double> y(12);
        for (int i = 1; i <= 12; ++i) y[static_cast<std::size_t>(i - 1)] = std::exp(0.4 * i);
        const DesignSample s(y);
        const Band b = fast_band_convex(s, make_region(s, 0.0, 3.0, IntervalFamily::all(12)));
        for (int i = 0; i < 12; ++i)
            CHECK(b.ub[static_cast<std::size_t>(i)] ==
                  doctest::Approx(y[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
    SUBCASE("noise-free linear data: lower bound touches the line") {
        for (double slope : {2.0, -3.0}) {
            std::vector<double> y(16);
            for (int i = 1; i <= 16; ++i)
                y[static_cast<std::size_t>(i - 1)] = slope * i / 16.0 - 1.0;
            const DesignSample s(y);
            const Band b = fast_band_convex(s, make_region(s, 0.0, 3.0, IntervalFamily::all(16)));
            for (int i = 3; i <= 14; ++i)
                CHECK(std::abs(b.lb[static_cast<std::size_t>(i - 1)] -
                               y[static_cast<std::size_t>(i - 1)]) < 1e-9);
        }
    }
}

TEST_CASE("convex feasibility and LP band") {
    const DesignSample s = convex_sample(24, 5.0, 2);
    const RegionSpec spec = make_region(s, 5.0, 3.0, IntervalFamily::all(24));
    REQUIRE(convex_feasible(s, spec));
    const LpBandResult r = lp_band_convex(s, spec, true);
    REQUIRE(r.band.feasible);
    for (const auto& witness_set : {r.lb_witness, r.ub_witness})
        for (const std::vector<double>& g : witness_set) {
            CHECK(is_member(s, g, spec));
            for (std::size_t i = 2; i < g.size(); ++i)
                CHECK(g[i] - 2 * g[i - 1] + g[i - 2] >= -1e-8);
            CHECK(contains(r.band, g, 1e-7));  // feasible candidates stay inside the band
        }

    SUBCASE("fast bounds are conservative against the LP bounds") {
        const Band fast = fast_band_convex(s, spec);
        for (int i = 0; i < 24; ++i) {
            CHECK(fast.lb[static_cast<std::size_t>(i)] <=
                  r.band.lb[static_cast<std::size_t>(i)] + 1e-9);
            CHECK(fast.ub[static_cast<std::size_t>(i)] >=
                  r.band.ub[static_cast<std::size_t>(i)] - 1e-9);
        }
    }
}

TEST_CASE("superfast convex never tightens fast") {
    const DesignSample s = convex_sample(160, 5.0, 6);
    const RegionSpec spec = make_region(s, 5.0, 3.0, IntervalFamily::dyadic(160, 2.0));
    const Band fast = fast_band_convex(s, spec);
    for (double theta : {1.5, 2.5}) {
        const Band sup = superfast_band_convex(s, spec, theta);
        for (int i = 0; i < 160; ++i) {
            CHECK(sup.lb[static_cast<std::size_t>(i)] <= fast.lb[static_cast<std::size_t>(i)]);
            CHECK(sup.ub[static_cast<std::size_t>(i)] >= fast.ub[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("piecewise bands") {
    SUBCASE("single nondecreasing piece reproduces the superfast band") {
        const DesignSample s = convex_sample(80, 5.0, 9);
        const RegionSpec spec = make_region(s, 5.0, 3.0, IntervalFamily::dyadic(80, 2.0));
        ShapeSpec shape;
        shape.monotone.push_back({{1, 80}, true});
        const Band piece = piecewise_band(s, spec, shape, PiecewiseMode::FixedAnchors, 2.0);
        const Band sup = superfast_band_monotone(s, spec, 2.0);
        CHECK(piece.lb == sup.lb);
        CHECK(piece.ub == sup.ub);
    }
    SUBCASE("noise-free unimodal data pinches to the data on each piece") {
        std::vector<double> y(40);
        for (int i = 1; i <= 40; ++i)
            y[static_cast<std::size_t>(i - 1)] = std::sin(3.14159265358979323846 * i / 41.0);
        const DesignSample s(y);
        const RegionSpec spec = make_region(s, 0.0, 3.0, IntervalFamily::all(40));
        ShapeSpec shape;
        shape.monotone.push_back({{1, 20}, true});
        shape.monotone.push_back({{21, 40}, false});
        const Band b = piecewise_band(s, spec, shape, PiecewiseMode::FixedAnchors, 2.0);
        REQUIRE(b.feasible);
        for (int i = 0; i < 40; ++i) {
            CHECK(b.lb[static_cast<std::size_t>(i)] ==
                  doctest::Approx(y[static_cast<std::size_t>(i)]).epsilon(1e-12));
            CHECK(b.ub[static_cast<std::size_t>(i)] ==
                  doctest::Approx(y[static_cast<std::size_t>(i)]).epsilon(1e-12));
        }
    }
    SUBCASE("one-point anchor interval in union mode equals fixed mode") {
        const DesignSample s = generate_data(TestFunction::sine(3.14159265358979323846), 60,
                                             0.2, 13);
        const RegionSpec spec = make_region(s, 0.2, 3.0, IntervalFamily::dyadic(60, 2.0));
        ShapeSpec shape;
        shape.first_rising = true;
        shape.extreme_anchors.push_back({30, 30});
        const Band fixed = piecewise_band(s, spec, shape, PiecewiseMode::FixedAnchors, 1.5);
        const Band unioned = piecewise_band(s, spec, shape, PiecewiseMode::UnionOverInterval, 1.5);
        CHECK(fixed.lb == unioned.lb);
        CHECK(fixed.ub == unioned.ub);
    }
    SUBCASE("union over an interval only widens the band") {
        const DesignSample s = generate_data(TestFunction::sine(3.14159265358979323846), 60,
                                             0.25, 29);
        const RegionSpec spec = make_region(s, 0.25, 3.0, IntervalFamily::dyadic(60, 2.0));
        ShapeSpec shape;
        shape.first_rising = true;
        shape.extreme_anchors.push_back({26, 34});
        const Band unioned = piecewise_band(s, spec, shape, PiecewiseMode::UnionOverInterval, 1.5);
        ShapeSpec mid;
        mid.first_rising = true;
        mid.extreme_anchors.push_back({30, 30});
        const Band fixed = piecewise_band(s, spec, mid, PiecewiseMode::FixedAnchors, 1.5);
        for (int i = 0; i < 60; ++i) {
            CHECK(unioned.lb[static_cast<std::size_t>(i)] <=
                  fixed.lb[static_cast<std::size_t>(i)] + 1e-12);
            CHECK(unioned.ub[static_cast<std::size_t>(i)] >=
                  fixed.ub[static_cast<std::size_t>(i)] - 1e-12);
        }
    }
    SUBCASE("inconsistent anchors are reported") {
        std::vector<double> v(20);
        for (int i = 0; i < 20; ++i) v[static_cast<std::size_t>(i)] = -5.0 * i;  // plunging data
        const DesignSample s(v);
        const RegionSpec spec = make_region(s, 0.1, 3.0, IntervalFamily::all(20));
        ShapeSpec shape;
        shape.first_rising = true;
        shape.extreme_anchors.push_back({18, 18});  // claims a rise over [1,18]
        const Band b = piecewise_band(s, spec, shape, PiecewiseMode::FixedAnchors, 2.0);
        CHECK_FALSE(b.feasible);
        CHECK(b.reason.find("inconsistent") != std::string::npos);
    }
    SUBCASE("derived default shape matches the fit's extremes") {
        const DesignSample s = generate_data(TestFunction::sine(4 * 3.14159265358979323846),
                                             200, 0.15, 3);
        const MultiresFit fit =
            taut_string_multires(s, 0.15, 3.0, IntervalFamily::dyadic(200, 2.0));
        REQUIRE(fit.converged);
        const ShapeSpec shape = default_shape_from_fit(fit.fit.slopes, true, true);
        CHECK_FALSE(shape.monotone.empty());
        CHECK(shape.monotone.size() == shape.extreme_anchors.size() + 1);
        CHECK_NOTHROW(validate_shape(shape, 200));
        const RegionSpec spec = make_region(s, 0.15, 3.0, IntervalFamily::dyadic(200, 2.0));
        const Band b = piecewise_band(s, spec, shape, PiecewiseMode::FixedAnchors, 1.5);
        CHECK(b.feasible);
    }
}

TEST_CASE("smoothness bands") {
    SUBCASE("K=0, sigma=0, constant data pins the band to the data") {
        const DesignSample s({1.5, 1.5, 1.5, 1.5, 1.5, 1.5, 1.5});
        const RegionSpec spec = make_region(s, 0.0, 3.0, IntervalFamily::all(7));
        const Band b = smoothness_band_fast(s, spec, {2, 0.0}, 1.5);
        CHECK(b.lb == s.values());
        CHECK(b.ub == s.values());
    }
    SUBCASE("an enormous K degenerates to the universal band") {
        const DesignSample s = generate_data(TestFunction::sine(9.0), 50, 0.3, 19);
        const RegionSpec spec = make_region(s, 0.3, 3.0, IntervalFamily::dyadic(50, 2.0));
        const Band b = smoothness_band_fast(s, spec, {2, 1e18}, 1.5);
        const Band uni = universal_band(s, spec);
        CHECK(b.lb == uni.lb);
        CHECK(b.ub == uni.ub);
    }
    SUBCASE("LP smoothness band against the sup-norm minimum") {
        const DesignSample s = generate_data(TestFunction::sine(4 * 3.14159265358979323846),
                                             32, 0.2, 23);
        const RegionSpec spec = make_region(s, 0.2, 3.0, IntervalFamily::all(32));
        const RegularizedFit minfit = minimize_supnorm(s, spec, 2);
        const double B = minfit.objective;

        // below the minimum: empty
        const LpBandResult below = smoothness_band_lp(s, spec, {2, 0.8 * B});
        CHECK_FALSE(below.band.feasible);

        // at the minimum: degenerate around the minimizer
        const LpBandResult at = smoothness_band_lp(s, spec, {2, B * (1.0 + 1e-9)});
        REQUIRE(at.band.feasible);
        CHECK(contains(at.band, minfit.g, 1e-6));

        // LP band is inside the fast band at the same K
        const double K = 2.0 * B;
        const LpBandResult lp = smoothness_band_lp(s, spec, {2, K});
        const Band fast = smoothness_band_fast(s, spec, {2, K}, 1.5);
        REQUIRE(lp.band.feasible);
        for (int i = 0; i < 32; ++i) {
            CHECK(fast.lb[static_cast<std::size_t>(i)] <=
                  lp.band.lb[static_cast<std::size_t>(i)] + 1e-9);
            CHECK(fast.ub[static_cast<std::size_t>(i)] >=
                  lp.band.ub[static_cast<std::size_t>(i)] - 1e-9);
        }
    }
    SUBCASE("band width grows with K") {
        const DesignSample s = generate_data(TestFunction::sine(7.0), 90, 0.25, 31);
        const RegionSpec spec = make_region(s, 0.25, 3.0, IntervalFamily::dyadic(90, 2.0));
        const Band narrow = smoothness_band_fast(s, spec, {2, 50.0}, 1.5);
        const Band wide = smoothness_band_fast(s, spec, {2, 500.0}, 1.5);
        for (int i = 0; i < 90; ++i) {
            CHECK(wide.lb[static_cast<std::size_t>(i)] <=
                  narrow.lb[static_cast<std::size_t>(i)] + 1e-12);
            CHECK(wide.ub[static_cast<std::size_t>(i)] >=
                  narrow.ub[static_cast<std::size_t>(i)] - 1e-12);
        }
    }
}

TEST_CASE("minimal consistent smoothness bound") {
    SUBCASE("noise-free constant data needs no curvature") {
        const DesignSample s({2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0});
        const RegionSpec spec = make_region(s, 0.3, 3.0, IntervalFamily::all(8));
        CHECK(min_consistent_k(s, spec, 1.5) == 0.0);
    }
    SUBCASE("stays below the LP sup-norm minimum") {
        const DesignSample s = generate_data(TestFunction::sine(4 * 3.14159265358979323846),
                                             64, 0.2, 41);
        const RegionSpec spec = make_region(s, 0.2, 3.0, IntervalFamily::all(64));
        const double B = minimize_supnorm(s, spec, 2).objective;
        const double Kstar = min_consistent_k(s, spec, 1.5);
        CHECK(Kstar <= B * (1.0 + 2e-3) + 1e-9);
        // bisection returns a K whose band really is nonempty
        const Band b = smoothness_band_fast(s, spec, {2, Kstar}, 1.5);
        CHECK(b.feasible);
    }
}

TEST_CASE("band honesty smoke (monotone LP, small n)") {
    const int n = 48, reps = 60;
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) f[static_cast<std::size_t>(i - 1)] = std::exp(5.0 * i / n);
    int hits = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const DesignSample s =
            generate_data(TestFunction::exponential(5.0), n, 5.0, substream_seed(7000, rep));
        const RegionSpec spec = make_region(s, 5.0, 3.0, IntervalFamily::dyadic(n, 2.0));
        const LpBandResult r = lp_band_monotone(s, spec);
        if (contains(r.band, f)) ++hits;
    }
    CHECK(hits >= 54);  // ~0.9; the acceptance suite runs the full honesty checks
}
