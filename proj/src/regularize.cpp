#include "mscale/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mscale {

namespace {

// Signed binomial pattern of the unscaled k-th difference: coefficient of
// g_{i-j} is (-1)^j C(k, j). The discrete derivative carries an extra n^k.
std::vector<double> difference_pattern(int k) {
    std::vector<double> c{1.0};
    for (int level = 1; level <= k; ++level) {
        std::vector<double> next(static_cast<std::size_t>(level) + 1, 0.0);
        for (int j = 0; j <= level; ++j) {
            if (j < level) next[static_cast<std::size_t>(j)] += c[static_cast<std::size_t>(j)];
            if (j > 0) next[static_cast<std::size_t>(j)] -= c[static_cast<std::size_t>(j - 1)];
        }
        c = std::move(next);
    }
    return c;  // c[j] multiplies g_{i-j}
}

double scale_power(int n, int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= n;
    return p;
}

std::vector<std::string> violated_labels(const ConstraintSystem& cs, const LpResult& res) {
    std::vector<std::string> out;
    for (int r : res.infeasible_rows) {
        const auto& row = cs.rows()[static_cast<std::size_t>(r)];
        out.push_back(row.label.empty() ? "row " + std::to_string(r) : row.label);
    }
    return out;
}

[[noreturn]] void report_infeasible(const ConstraintSystem& cs, const LpResult& res) {
    std::vector<std::string> labels = violated_labels(cs, res);
    std::ostringstream msg;
    msg << "region and shape constraints are inconsistent";
    if (!labels.empty()) {
        msg << "; unsatisfied: ";
        for (std::size_t i = 0; i < labels.size() && i < 6; ++i)
            msg << (i ? ", " : "") << labels[i];
        if (labels.size() > 6) msg << ", ...";
    }
    throw infeasible_error(msg.str(), std::move(labels));
}

void check_ranges(const std::vector<IndexInterval>& ranges, int n, const char* what) {
    for (const IndexInterval& r : ranges)
        if (r.lo < 1 || r.hi > n || r.lo > r.hi)
            throw std::invalid_argument(std::string(what) + ": range outside the grid");
    for (std::size_t i = 1; i < ranges.size(); ++i)
        if (ranges[i].lo <= ranges[i - 1].hi)
            throw std::invalid_argument(std::string(what) + ": overlapping pieces");
}

}  // namespace

void validate_shape(const ShapeSpec& shape, int n) {
    std::vector<IndexInterval> mono, cvx;
    for (const auto& p : shape.monotone) mono.push_back(p.range);
    for (const auto& p : shape.convex) cvx.push_back(p.range);
    auto by_lo = [](const IndexInterval& a, const IndexInterval& b) { return a.lo < b.lo; };
    std::sort(mono.begin(), mono.end(), by_lo);
    std::sort(cvx.begin(), cvx.end(), by_lo);
    check_ranges(mono, n, "ShapeSpec monotone");
    check_ranges(cvx, n, "ShapeSpec convex");
    for (const PinnedValue& p : shape.pins)
        if (p.index < 1 || p.index > n || !std::isfinite(p.value))
            throw std::invalid_argument("ShapeSpec: bad pinned value");
    for (const IndexInterval& a : shape.extreme_anchors)
        if (a.lo < 1 || a.hi > n || a.lo > a.hi)
            throw std::invalid_argument("ShapeSpec: bad extreme anchor");
    for (const IndexInterval& a : shape.inflection_anchors)
        if (a.lo < 1 || a.hi > n || a.lo > a.hi)
            throw std::invalid_argument("ShapeSpec: bad inflection anchor");
}

void add_shape_rows(ConstraintSystem& cs, const ShapeSpec& shape) {
    for (const MonotonePiece& p : shape.monotone) add_monotone(cs, p.nondecreasing, p.range);
    for (const ConvexPiece& p : shape.convex) add_convex(cs, p.convex, p.range);
    for (const PinnedValue& p : shape.pins) {
        SparseRow r;
        r.coeffs = {{p.index - 1, 1.0}};
        r.rel = Relation::Equal;
        r.rhs = p.value;
        r.label = "pin(" + std::to_string(p.index) + ")";
        cs.add_row(std::move(r));
    }
}

double tv(std::span<const double> g, int k) {
    if (k < 0) throw std::invalid_argument("tv: order must be >= 0");
    const int n = static_cast<int>(g.size());
    if (n < k + 2) return 0.0;
    const std::vector<double> pat = difference_pattern(k + 1);
    const double scale = scale_power(n, k + 1);
    double total = 0.0;
    for (int i = k + 2; i <= n; ++i) {
        double d = 0.0;
        for (int j = 0; j <= k + 1; ++j)
            d += pat[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(i - 1 - j)];
        total += std::abs(d);
    }
    return total * scale;
}

double supnorm_deriv(std::span<const double> g, int k) {
    if (k < 0) throw std::invalid_argument("supnorm_deriv: order must be >= 0");
    const int n = static_cast<int>(g.size());
    if (n < k + 1) return 0.0;
    const std::vector<double> pat = difference_pattern(k);
    const double scale = scale_power(n, k);
    double best = 0.0;
    for (int i = k + 1; i <= n; ++i) {
        double d = 0.0;
        for (int j = 0; j <= k; ++j)
            d += pat[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(i - 1 - j)];
        best = std::max(best, std::abs(d));
    }
    return best * scale;
}

namespace {

// Shared driver: build the region LP, add shape rows and the derivative
// machinery, solve, and certify exact membership of the g block.
RegularizedFit solve_regularized(const DesignSample& s, const RegionSpec& spec, int k,
                                 const ShapeSpec* shape, bool sup_norm) {
    if (k < 0) throw std::invalid_argument("order must be >= 0");
    if (spec.n != s.n()) throw std::invalid_argument("spec/sample size mismatch");
    const int n = s.n();
    if (shape) validate_shape(*shape, n);

    RegionLp lp(s, spec);
    if (shape) add_shape_rows(lp.system(), *shape);

    std::vector<std::pair<int, double>> objective;
    if (!sup_norm) {
        // Unscaled differences split as d = u - v, u, v >= 0; the objective
        // carries the n^{k+1} derivative scale.
        const std::vector<double> pat = difference_pattern(k + 1);
        for (int i = k + 2; i <= n; ++i) {
            const int u = lp.add_variable("u" + std::to_string(i), 0.0,
                                          std::numeric_limits<double>::infinity());
            const int v = lp.add_variable("v" + std::to_string(i), 0.0,
                                          std::numeric_limits<double>::infinity());
            SparseRow row;
            for (int j = 0; j <= k + 1; ++j)
                row.coeffs.emplace_back(i - 1 - j, pat[static_cast<std::size_t>(j)]);
            row.coeffs.emplace_back(u, -1.0);
            row.coeffs.emplace_back(v, 1.0);
            row.rel = Relation::Equal;
            row.rhs = 0.0;
            row.label = "d" + std::to_string(k + 1) + "(" + std::to_string(i) + ")";
            lp.add_row(std::move(row));
            objective.emplace_back(u, 1.0);
            objective.emplace_back(v, 1.0);
        }
    } else {
        if (n < k + 1)
            throw std::invalid_argument("minimize_supnorm: sample shorter than the order");
        const int bound = lp.add_variable("B", 0.0, std::numeric_limits<double>::infinity());
        const std::vector<double> pat = difference_pattern(k);
        for (int i = k + 1; i <= n; ++i) {
            SparseRow up, down;
            for (int j = 0; j <= k; ++j) {
                up.coeffs.emplace_back(i - 1 - j, pat[static_cast<std::size_t>(j)]);
                down.coeffs.emplace_back(i - 1 - j, -pat[static_cast<std::size_t>(j)]);
            }
            up.coeffs.emplace_back(bound, -1.0);
            down.coeffs.emplace_back(bound, -1.0);
            up.rel = down.rel = Relation::LessEq;
            up.rhs = down.rhs = 0.0;
            up.label = "d" + std::to_string(k) + "(" + std::to_string(i) + ")+";
            down.label = "d" + std::to_string(k) + "(" + std::to_string(i) + ")-";
            lp.add_row(std::move(up));
            lp.add_row(std::move(down));
        }
        objective.emplace_back(bound, 1.0);
    }

    lp.set_objective(std::move(objective), Sense::Minimize);
    LpResult res = lp.solve();
    if (res.status == LpStatus::Infeasible) report_infeasible(lp.solved_system(), res);
    if (res.status != LpStatus::Optimal)
        throw numeric_error("regularized fit: unexpected LP status");

    RegularizedFit fit;
    fit.g.assign(res.solution.begin(), res.solution.begin() + n);

    // Exact membership certificate, not merely LP tolerance. The LP margin
    // makes this pass; if rounding still spoils it and no shape rows pin
    // the geometry, contract toward y (which scales the statistic exactly).
    if (!is_member(s, fit.g, spec)) {
        const double stat = multiscale_stat(s, fit.g, spec.family).value;
        const bool plain = !shape || shape->empty();
        if (plain && stat > 0.0) {
            const double c = spec.threshold() / stat * (1.0 - 1e-12);
            for (int i = 0; i < n; ++i)
                fit.g[static_cast<std::size_t>(i)] =
                    s.y(i + 1) + c * (fit.g[static_cast<std::size_t>(i)] - s.y(i + 1));
        }
        if (!is_member(s, fit.g, spec))
            throw numeric_error("regularized fit: membership certificate failed");
    }
    fit.objective = sup_norm ? supnorm_deriv(fit.g, k) : tv(fit.g, k);
    return fit;
}

}  // namespace

RegularizedFit minimize_tv(const DesignSample& s, const RegionSpec& spec, int k,
                           const ShapeSpec* shape) {
    return solve_regularized(s, spec, k, shape, false);
}

RegularizedFit minimize_supnorm(const DesignSample& s, const RegionSpec& spec, int k,
                                const ShapeSpec* shape) {
    return solve_regularized(s, spec, k, shape, true);
}

}  // namespace mscale
