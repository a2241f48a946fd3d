#include "mscale/tautstring.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mscale {

TubeSpec TubeSpec::pinned(int n, double interior) {
    if (n < 1) throw std::invalid_argument("TubeSpec: n must be >= 1");
    if (interior < 0.0) throw std::invalid_argument("TubeSpec: width must be >= 0");
    TubeSpec t;
    t.widths.assign(static_cast<std::size_t>(n) + 1, interior);
    t.widths.front() = 0.0;
    t.widths.back() = 0.0;
    return t;
}

std::vector<double> cumulative(const DesignSample& s) {
    std::vector<double> Y(static_cast<std::size_t>(s.n()) + 1, 0.0);
    for (int i = 1; i <= s.n(); ++i)
        Y[static_cast<std::size_t>(i)] = Y[static_cast<std::size_t>(i - 1)] + s.y(i);
    return Y;
}

TautFit taut_string(const DesignSample& s, const TubeSpec& tube) {
    const int n = s.n();
    if (static_cast<int>(tube.widths.size()) != n + 1)
        throw std::invalid_argument("taut_string: tube needs n+1 widths");
    for (double w : tube.widths)
        if (!(w >= 0.0)) throw std::invalid_argument("taut_string: negative tube width");
    if (tube.widths.front() != 0.0 || tube.widths.back() != 0.0)
        throw std::invalid_argument("taut_string: tube ends must be pinned (width 0)");

    const std::vector<double> Y = cumulative(s);
    std::vector<double> lo(Y), hi(Y);
    for (int i = 0; i <= n; ++i) {
        lo[static_cast<std::size_t>(i)] -= tube.widths[static_cast<std::size_t>(i)];
        hi[static_cast<std::size_t>(i)] += tube.widths[static_cast<std::size_t>(i)];
    }

    TautFit fit;
    fit.slopes.assign(static_cast<std::size_t>(n), 0.0);
    fit.knots.push_back({0, 0});

    // Walk forward keeping the steepest line below the upper boundary and
    // the shallowest line above the lower one. When they cross, the string
    // is forced onto a boundary at the recorded argmin/argmax knot, and the
    // scan restarts there.
    int anchor = 0;
    double anchor_val = 0.0;
    double max_slope = std::numeric_limits<double>::infinity();
    double min_slope = -std::numeric_limits<double>::infinity();
    int upper_idx = 0, lower_idx = 0;

    auto emit = [&](int to, double to_val) {
        const double slope = (to_val - anchor_val) / (to - anchor);
        for (int k = anchor + 1; k <= to; ++k)
            fit.slopes[static_cast<std::size_t>(k - 1)] = slope;
    };

    int i = 1;
    while (true) {
        const double span = static_cast<double>(i - anchor);
        const double slope_up = (hi[static_cast<std::size_t>(i)] - anchor_val) / span;
        const double slope_lo = (lo[static_cast<std::size_t>(i)] - anchor_val) / span;

        if (slope_lo > max_slope) {
            // Must bend downward onto the upper boundary at upper_idx.
            emit(upper_idx, hi[static_cast<std::size_t>(upper_idx)]);
            anchor = upper_idx;
            anchor_val = hi[static_cast<std::size_t>(upper_idx)];
            fit.knots.push_back({anchor, +1});
            max_slope = std::numeric_limits<double>::infinity();
            min_slope = -std::numeric_limits<double>::infinity();
            i = anchor + 1;
            continue;
        }
        if (slope_up < min_slope) {
            emit(lower_idx, lo[static_cast<std::size_t>(lower_idx)]);
            anchor = lower_idx;
            anchor_val = lo[static_cast<std::size_t>(lower_idx)];
            fit.knots.push_back({anchor, -1});
            max_slope = std::numeric_limits<double>::infinity();
            min_slope = -std::numeric_limits<double>::infinity();
            i = anchor + 1;
            continue;
        }
        if (i == n) {
            emit(n, Y[static_cast<std::size_t>(n)]);
            fit.knots.push_back({n, 0});
            break;
        }
        if (slope_up < max_slope) {
            max_slope = slope_up;
            upper_idx = i;
        }
        if (slope_lo > min_slope) {
            min_slope = slope_lo;
            lower_idx = i;
        }
        ++i;
    }

#ifndef NDEBUG
    // Tube containment of the reconstructed string at every knot.
    double F = 0.0;
    for (int k = 1; k <= n; ++k) {
        F += fit.slopes[static_cast<std::size_t>(k - 1)];
        assert(F >= lo[static_cast<std::size_t>(k)] - 1e-9 * (1.0 + std::abs(F)));
        assert(F <= hi[static_cast<std::size_t>(k)] + 1e-9 * (1.0 + std::abs(F)));
    }
#endif
    return fit;
}

MultiresFit taut_string_multires(const DesignSample& s, double sigma, double tau,
                                 const IntervalFamily& fam, int max_iter) {
    const int n = s.n();
    if (!(sigma > 0.0)) throw std::invalid_argument("taut_string_multires: sigma must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("taut_string_multires: tau must be > 0");
    if (fam.n() != n) throw std::invalid_argument("taut_string_multires: family size mismatch");
    if (max_iter < 1) throw std::invalid_argument("taut_string_multires: max_iter must be >= 1");

    const std::vector<double> Y = cumulative(s);
    const auto [ymin, ymax] = std::minmax_element(Y.begin(), Y.end());
    const double range = *ymax - *ymin;
    const double threshold = sigma * std::sqrt(tau * std::log(static_cast<double>(n)));

    TubeSpec tube = TubeSpec::pinned(n, range);
    MultiresFit out;
    std::vector<double> rprefix(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> touch(static_cast<std::size_t>(n) + 2, 0);

    for (int iter = 1; iter <= max_iter; ++iter) {
        out.fit = taut_string(s, tube);
        out.fit.iterations = iter;

        for (int i = 1; i <= n; ++i)
            rprefix[static_cast<std::size_t>(i)] =
                rprefix[static_cast<std::size_t>(i - 1)] + s.y(i) -
                out.fit.slopes[static_cast<std::size_t>(i - 1)];

        std::fill(touch.begin(), touch.end(), 0);
        out.worst_stat = 0.0;
        bool ok = true;
        for (const IndexInterval& iv : fam.intervals()) {
            const double w = std::abs(rprefix[static_cast<std::size_t>(iv.hi)] -
                                      rprefix[static_cast<std::size_t>(iv.lo - 1)]) /
                             std::sqrt(static_cast<double>(iv.size()));
            if (w > threshold) {
                ok = false;
                // Knot i lies between data points i and i+1; it is touched
                // when i or i+1 falls inside the interval.
                const int a = std::max(1, iv.lo - 1);
                const int b = std::min(n - 1, iv.hi);
                if (a <= b) {
                    ++touch[static_cast<std::size_t>(a)];
                    --touch[static_cast<std::size_t>(b) + 1];
                }
                if (w > out.worst_stat) {
                    out.worst_stat = w;
                    out.worst = iv;
                }
            }
        }
        if (ok) {
            out.converged = true;
            return out;
        }
        int acc = 0;
        for (int i = 1; i <= n - 1; ++i) {
            acc += touch[static_cast<std::size_t>(i)];
            if (acc > 0) tube.widths[static_cast<std::size_t>(i)] *= 0.5;
        }
    }
    out.converged = false;
    return out;
}

std::vector<Plateau> local_extremes(std::span<const double> v, double eps) {
    std::vector<Plateau> out;
    const int n = static_cast<int>(v.size());
    if (n < 3) return out;

    // Compress into flat runs, then look at the direction on either side.
    struct Run {
        int lo, hi;
        double val;
    };
    std::vector<Run> runs;
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        if (i == n || std::abs(v[static_cast<std::size_t>(i)] -
                               v[static_cast<std::size_t>(start)]) > eps) {
            runs.push_back({start + 1, i, v[static_cast<std::size_t>(start)]});
            start = i;
        }
    }
    for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
        const double before = runs[k].val - runs[k - 1].val;
        const double after = runs[k + 1].val - runs[k].val;
        if (before > 0.0 && after < 0.0) out.push_back({runs[k].lo, runs[k].hi, true});
        if (before < 0.0 && after > 0.0) out.push_back({runs[k].lo, runs[k].hi, false});
    }
    return out;
}

int local_extreme_count(std::span<const double> v, double eps) {
    return static_cast<int>(local_extremes(v, eps).size());
}

}  // namespace mscale
