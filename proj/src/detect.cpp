#include "mscale/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mscale {

namespace {
constexpr double kIdxEps = 1e-6;  // guard for decimal boundaries on the index scale
}

std::string RealInterval::str() const {
    std::ostringstream os;
    os << (lo_closed ? '[' : '(') << lo << ',' << hi << (hi_closed ? ']' : ')');
    return os.str();
}

GridRange grid_range(const RealInterval& iv, int n) {
    if (!(iv.lo <= iv.hi)) throw std::invalid_argument("interval " + iv.str() + " is empty");
    const double lo_pos = iv.lo * n, hi_pos = iv.hi * n;
    int lo = iv.lo_closed ? static_cast<int>(std::ceil(lo_pos - kIdxEps))
                          : static_cast<int>(std::floor(lo_pos + kIdxEps)) + 1;
    int hi = iv.hi_closed ? static_cast<int>(std::floor(hi_pos + kIdxEps))
                          : static_cast<int>(std::ceil(hi_pos - kIdxEps)) - 1;
    lo = std::max(lo, 1);
    hi = std::min(hi, n);
    if (lo > hi)
        throw std::invalid_argument("interval " + iv.str() + " holds no design point at n = " +
                                    std::to_string(n));
    return {lo, hi};
}

namespace {

double grid_mean(const TestFunction& f, const GridRange& r, int n) {
    double sum = 0.0;
    for (int i = r.lo; i <= r.hi; ++i) sum += f(static_cast<double>(i) / n);
    return sum / r.count();
}

double grid_min_deriv(const TestFunction& f, const GridRange& r, int n, bool analytic) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = r.lo; i <= r.hi; ++i) {
        const double t = static_cast<double>(i) / n;
        const double d = analytic ? f.derivative(t) : (f(t + 1e-5) - f(t - 1e-5)) / 2e-5;
        best = std::min(best, d);
    }
    return best;
}

double grid_max_deriv(const TestFunction& f, const GridRange& r, int n, bool analytic) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = r.lo; i <= r.hi; ++i) {
        const double t = static_cast<double>(i) / n;
        const double d = analytic ? f.derivative(t) : (f(t + 1e-5) - f(t - 1e-5)) / 2e-5;
        best = std::max(best, d);
    }
    return best;
}

}  // namespace

PeakQuery box_peak_query(double center, double halfwidth, double sigma, double tau, double cq) {
    if (!(halfwidth > 0.0)) throw std::invalid_argument("box_peak_query: halfwidth must be > 0");
    PeakQuery q;
    q.f = TestFunction::box(center, halfwidth);
    q.sigma = sigma;
    q.tau = tau;
    q.cq = cq;
    q.left = {center - 2.0 * halfwidth, center - halfwidth, true, false};
    q.center = {center - halfwidth, center + halfwidth, true, true};
    q.right = {center + halfwidth, center + 2.0 * halfwidth, false, true};
    return q;
}

bool peak_condition(const PeakQuery& q, int n) {
    if (n < 1) throw std::invalid_argument("peak_condition: n must be >= 1");
    if (!(q.sigma >= 0.0)) throw std::invalid_argument("peak_condition: sigma must be >= 0");
    const GridRange gl = grid_range(q.left, n);
    const GridRange gc = grid_range(q.center, n);
    const GridRange gr = grid_range(q.right, n);
    if (!(gl.hi < gc.lo && gc.hi < gr.lo))
        throw std::invalid_argument("peak_condition: intervals must be disjoint and ordered");

    const double base = std::sqrt(q.tau * std::log(static_cast<double>(n))) + q.cq;
    auto allowance = [&](const GridRange& r) {
        return q.sigma * base / std::sqrt(static_cast<double>(r.count()));
    };
    const double lhs = grid_mean(q.f, gc, n) - allowance(gc);
    const double rhs = std::max(grid_mean(q.f, gl, n) + allowance(gl),
                                grid_mean(q.f, gr, n) + allowance(gr));
    return lhs >= rhs;
}

std::optional<int> min_n_for_peak(const PeakQuery& q, int n_max) {
    if (n_max < 1) return std::nullopt;
    auto holds = [&](int n) {
        try {
            return peak_condition(q, n);
        } catch (const std::invalid_argument&) {
            return false;  // some interval still empty at this n
        }
    };

    // Exponential probe, then bisection on the eventually monotone range.
    int lo = 0, hi = 1;
    while (!holds(hi)) {
        if (hi >= n_max) return std::nullopt;
        lo = hi;  // known failure
        hi = std::min(n_max, hi * 2);
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (holds(mid) ? hi : lo) = mid;
    }
    // Grid counting wobbles the condition slightly; verify downward.
    while (hi > 1 && holds(hi - 1)) --hi;
    return hi;
}

bool inflection_condition(const InflectionQuery& q, int n) {
    if (n < 1) throw std::invalid_argument("inflection_condition: n must be >= 1");
    if (q.k < 1) throw std::invalid_argument("inflection_condition: k must be >= 1");
    const GridRange gl = grid_range(q.left, n);
    const GridRange gc = grid_range(q.center, n);
    const GridRange gr = grid_range(q.right, n);
    if (!(gl.hi < gc.lo && gc.hi < gr.lo))
        throw std::invalid_argument("inflection_condition: intervals must be disjoint and ordered");

    const bool analytic = q.use_analytic && q.f.has_analytic_derivative();
    const double pen = 2.0 * q.sigma *
                       (std::sqrt(q.tau * std::log(static_cast<double>(n))) +
                        q.cq / std::sqrt(2.0)) /
                       std::pow(static_cast<double>(q.k), 1.5);
    const double lhs = grid_min_deriv(q.f, gc, n, analytic) / n - pen;
    const double rhs = std::max(grid_max_deriv(q.f, gl, n, analytic) / n + pen,
                                grid_max_deriv(q.f, gr, n, analytic) / n + pen);
    return lhs >= rhs;
}

}  // namespace mscale
