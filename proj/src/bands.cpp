#include "mscale/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mscale/polyhedron.hpp"
#include "mscale/tautstring.hpp"

namespace mscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> prefix_sums(const DesignSample& s) {
    std::vector<double> S(static_cast<std::size_t>(s.n()) + 1, 0.0);
    for (int i = 1; i <= s.n(); ++i)
        S[static_cast<std::size_t>(i)] = S[static_cast<std::size_t>(i - 1)] + s.y(i);
    return S;
}

double mean(const std::vector<double>& S, int lo, int hi) {
    return (S[static_cast<std::size_t>(hi)] - S[static_cast<std::size_t>(lo - 1)]) /
           static_cast<double>(hi - lo + 1);
}

void require_theta(double theta) {
    if (!(theta > 1.0)) throw std::invalid_argument("theta must be > 1");
}

/// Window sizes floor(theta^k - 1) + 1, deduplicated, capped at max_size.
std::vector<int> monotone_window_sizes(double theta, int max_size) {
    std::vector<int> sizes;
    double p = 1.0;
    while (true) {
        const int w = static_cast<int>(std::floor(p - 1.0)) + 1;
        if (w > max_size) break;
        if (sizes.empty() || sizes.back() != w) sizes.push_back(w);
        if (p > 4.0 * max_size) break;
        p *= theta;
    }
    return sizes;
}

/// Values floor(theta^m) in [1, max_value], deduplicated.
std::vector<int> theta_values(double theta, int max_value) {
    std::vector<int> vals;
    double p = 1.0;
    while (true) {
        const int v = static_cast<int>(std::floor(p));
        if (v > max_value) break;
        if (vals.empty() || vals.back() != v) vals.push_back(v);
        if (p > 4.0 * max_value) break;
        p *= theta;
    }
    return vals;
}

void set_feasibility(Band& b) {
    for (std::size_t i = 0; i < b.lb.size(); ++i) {
        if (b.lb[i] > b.ub[i]) {
            b.feasible = false;
            b.reason = "bounds cross at design point " + std::to_string(i + 1);
            return;
        }
    }
    b.feasible = true;
}

// ---------- monotone pieces ----------

// Bounds for a monotone function on [a,b] using only windows inside the
// piece. sizes == nullptr means every window size (the O(n^2) bound);
// otherwise the theta grid. Writes lb/ub locations a..b.
void monotone_piece_bounds(const std::vector<double>& S, const std::vector<double>& yv, int a,
                           int b, bool nondecreasing, double T, const std::vector<int>* sizes,
                           std::vector<double>& lb, std::vector<double>& ub) {
    auto window_mean = [&](int lo, int hi) {
        return lo == hi ? yv[static_cast<std::size_t>(lo - 1)] : mean(S, lo, hi);
    };
    auto lower_from_left = [&](int i) {
        double best = -kInf;
        const int limit = i - a + 1;
        if (sizes) {
            for (int w : *sizes) {
                if (w > limit) break;
                best = std::max(best, window_mean(i - w + 1, i) - T / std::sqrt(w));
            }
        } else {
            for (int w = 1; w <= limit; ++w)
                best = std::max(best, window_mean(i - w + 1, i) - T / std::sqrt(w));
        }
        return best;
    };
    auto upper_from_right = [&](int i) {
        double best = kInf;
        const int limit = b - i + 1;
        if (sizes) {
            for (int w : *sizes) {
                if (w > limit) break;
                best = std::min(best, window_mean(i, i + w - 1) + T / std::sqrt(w));
            }
        } else {
            for (int w = 1; w <= limit; ++w)
                best = std::min(best, window_mean(i, i + w - 1) + T / std::sqrt(w));
        }
        return best;
    };
    auto lower_from_right = [&](int i) {
        double best = -kInf;
        const int limit = b - i + 1;
        if (sizes) {
            for (int w : *sizes) {
                if (w > limit) break;
                best = std::max(best, window_mean(i, i + w - 1) - T / std::sqrt(w));
            }
        } else {
            for (int w = 1; w <= limit; ++w)
                best = std::max(best, window_mean(i, i + w - 1) - T / std::sqrt(w));
        }
        return best;
    };
    auto upper_from_left = [&](int i) {
        double best = kInf;
        const int limit = i - a + 1;
        if (sizes) {
            for (int w : *sizes) {
                if (w > limit) break;
                best = std::min(best, window_mean(i - w + 1, i) + T / std::sqrt(w));
            }
        } else {
            for (int w = 1; w <= limit; ++w)
                best = std::min(best, window_mean(i - w + 1, i) + T / std::sqrt(w));
        }
        return best;
    };
    for (int i = a; i <= b; ++i) {
        if (nondecreasing) {
            lb[static_cast<std::size_t>(i - 1)] = lower_from_left(i);
            ub[static_cast<std::size_t>(i - 1)] = upper_from_right(i);
        } else {
            lb[static_cast<std::size_t>(i - 1)] = lower_from_right(i);
            ub[static_cast<std::size_t>(i - 1)] = upper_from_left(i);
        }
    }
}

// Directional monotonization sweeps inside a piece.
void monotone_piece_sweep(int a, int b, bool nondecreasing, std::vector<double>& lb,
                          std::vector<double>& ub) {
    if (nondecreasing) {
        for (int i = a + 1; i <= b; ++i)
            lb[static_cast<std::size_t>(i - 1)] =
                std::max(lb[static_cast<std::size_t>(i - 1)], lb[static_cast<std::size_t>(i - 2)]);
        for (int i = b - 1; i >= a; --i)
            ub[static_cast<std::size_t>(i - 1)] =
                std::min(ub[static_cast<std::size_t>(i - 1)], ub[static_cast<std::size_t>(i)]);
    } else {
        for (int i = b - 1; i >= a; --i)
            lb[static_cast<std::size_t>(i - 1)] =
                std::max(lb[static_cast<std::size_t>(i - 1)], lb[static_cast<std::size_t>(i)]);
        for (int i = a + 1; i <= b; ++i)
            ub[static_cast<std::size_t>(i - 1)] =
                std::min(ub[static_cast<std::size_t>(i - 1)], ub[static_cast<std::size_t>(i - 2)]);
    }
}

// ---------- convex pieces ----------

// Upper bound via centered windows, lower bound via chords against the
// upper bound, all within [a,b]. grid == nullptr gives the full O(n^3)
// bound, otherwise offsets and inner windows run over the theta values.
void convex_piece_bounds(const std::vector<double>& S, const std::vector<double>& yv, int a,
                         int b, double T, const std::vector<int>* grid, std::vector<double>& lb,
                         std::vector<double>& ub) {
    for (int i = a; i <= b; ++i) {
        const int kmax = std::min(i - a, b - i);
        double best = yv[static_cast<std::size_t>(i - 1)] + T;
        if (grid) {
            for (int k : *grid) {
                if (k > kmax) break;
                best = std::min(best, mean(S, i - k, i + k) + T / std::sqrt(2.0 * k + 1.0));
            }
        } else {
            for (int k = 1; k <= kmax; ++k)
                best = std::min(best, mean(S, i - k, i + k) + T / std::sqrt(2.0 * k + 1.0));
        }
        ub[static_cast<std::size_t>(i - 1)] = best;
    }

    // lb(t_i, k): the chord from (t_i, g(t_i)) to (t_{i+k}, ub(t_{i+k}))
    // dominates a convex g, so the mean of the j points on the k side obeys
    // mean <= g(t_i)(1 - (j+1)/(2|k|)) + ub (j+1)/(2|k|) + noise. Solving
    // for g(t_i) gives the bound below; the 1/(1 - (j+1)/(2|k|)) factor is
    // what makes it exact on noise-free linear data. |k| = 1 carries no
    // information (the factor degenerates). Mirrored for k < 0.
    auto lower_terms = [&](int i, int k) {
        const int m = std::abs(k);
        const double ubk = ub[static_cast<std::size_t>(i + k - 1)];
        double best = -kInf;
        auto term = [&](int j) {
            const double frac = (j + 1.0) / (2.0 * m);
            if (frac >= 1.0 - 1e-12) return -kInf;
            const double avg = (k > 0) ? mean(S, i + 1, i + j) : mean(S, i - j, i - 1);
            return (avg - ubk * frac - T / std::sqrt(static_cast<double>(j))) / (1.0 - frac);
        };
        if (grid) {
            for (int j : *grid) {
                if (j > m) break;
                best = std::max(best, term(j));
            }
        } else {
            for (int j = 1; j <= m; ++j) best = std::max(best, term(j));
        }
        return best;
    };
    for (int i = a; i <= b; ++i) {
        double best = -kInf;
        if (grid) {
            for (int k : *grid) {
                if (i + k <= b) best = std::max(best, lower_terms(i, k));
                if (i - k >= a) best = std::max(best, lower_terms(i, -k));
            }
        } else {
            for (int k = 1; k <= b - i; ++k) best = std::max(best, lower_terms(i, k));
            for (int k = 1; k <= i - a; ++k) best = std::max(best, lower_terms(i, -k));
        }
        lb[static_cast<std::size_t>(i - 1)] = best;
    }
}

// Concavity is convexity of the negated data: compute on -y and flip.
void concave_piece_bounds(const std::vector<double>& S, const std::vector<double>& yv, int a,
                          int b, double T, const std::vector<int>* grid, std::vector<double>& lb,
                          std::vector<double>& ub) {
    std::vector<double> NS(S.size());
    for (std::size_t i = 0; i < S.size(); ++i) NS[i] = -S[i];
    std::vector<double> ny(yv.size());
    for (std::size_t i = 0; i < yv.size(); ++i) ny[i] = -yv[i];
    std::vector<double> nlb(lb.size(), -kInf), nub(ub.size(), kInf);
    convex_piece_bounds(NS, ny, a, b, T, grid, nlb, nub);
    for (int i = a; i <= b; ++i) {
        lb[static_cast<std::size_t>(i - 1)] = -nub[static_cast<std::size_t>(i - 1)];
        ub[static_cast<std::size_t>(i - 1)] = -nlb[static_cast<std::size_t>(i - 1)];
    }
}

// ---------- LP bands ----------

std::string infeasibility_note(const ConstraintSystem& cs, const LpResult& res) {
    std::ostringstream msg;
    msg << "no function satisfies the constraints";
    if (!res.infeasible_rows.empty()) {
        msg << " (unsatisfied:";
        for (std::size_t i = 0; i < res.infeasible_rows.size() && i < 4; ++i) {
            const auto& row = cs.rows()[static_cast<std::size_t>(res.infeasible_rows[i])];
            msg << ' ' << (row.label.empty() ? "row" : row.label);
        }
        msg << ')';
    }
    return msg.str();
}

template <class AddRows>
LpBandResult lp_band_impl(const DesignSample& s, const RegionSpec& spec, const char* method,
                          AddRows&& add_rows, bool record_witnesses) {
    const int n = s.n();
    LpBandResult out;
    out.band.method = method;
    out.band.lb.assign(static_cast<std::size_t>(n), -kInf);
    out.band.ub.assign(static_cast<std::size_t>(n), kInf);

    RegionLp lp(s, spec);
    add_rows(lp);
    if (record_witnesses) {
        out.lb_witness.resize(static_cast<std::size_t>(n));
        out.ub_witness.resize(static_cast<std::size_t>(n));
    }
    for (int i = 1; i <= n; ++i) {
        for (const Sense sense : {Sense::Minimize, Sense::Maximize}) {
            lp.set_objective({{i - 1, 1.0}}, sense);
            LpResult res = lp.solve();
            if (res.status == LpStatus::Infeasible) {
                out.band.feasible = false;
                out.band.reason = infeasibility_note(lp.solved_system(), res);
                out.band.lb.assign(static_cast<std::size_t>(n), kInf);
                out.band.ub.assign(static_cast<std::size_t>(n), -kInf);
                return out;
            }
            if (res.status != LpStatus::Optimal)
                throw numeric_error("lp band: unexpected LP status");
            std::vector<double> g(res.solution.begin(), res.solution.begin() + n);
            if (sense == Sense::Minimize) {
                out.band.lb[static_cast<std::size_t>(i - 1)] = res.objective;
                if (record_witnesses) out.lb_witness[static_cast<std::size_t>(i - 1)] = std::move(g);
            } else {
                out.band.ub[static_cast<std::size_t>(i - 1)] = res.objective;
                if (record_witnesses) out.ub_witness[static_cast<std::size_t>(i - 1)] = std::move(g);
            }
        }
    }
    set_feasibility(out.band);
    return out;
}

bool shape_feasible(const DesignSample& s, const RegionSpec& spec, bool convex_rows) {
    RegionLp lp(s, spec);
    if (convex_rows)
        add_convex(lp.system(), true, {1, s.n()});
    else
        add_monotone(lp.system(), true, {1, s.n()});
    lp.set_objective({}, Sense::Minimize);
    return lp.solve().status == LpStatus::Optimal;
}

}  // namespace

Band universal_band(const DesignSample& s, const RegionSpec& spec) {
    if (spec.n != s.n()) throw std::invalid_argument("universal_band: size mismatch");
    Band b;
    b.method = "universal";
    const double T = spec.threshold();
    b.lb.resize(static_cast<std::size_t>(s.n()));
    b.ub.resize(static_cast<std::size_t>(s.n()));
    for (int i = 1; i <= s.n(); ++i) {
        b.lb[static_cast<std::size_t>(i - 1)] = s.y(i) - T;
        b.ub[static_cast<std::size_t>(i - 1)] = s.y(i) + T;
    }
    b.feasible = true;
    return b;
}

bool monotone_feasible(const DesignSample& s, const RegionSpec& spec) {
    return shape_feasible(s, spec, false);
}

bool convex_feasible(const DesignSample& s, const RegionSpec& spec) {
    return shape_feasible(s, spec, true);
}

LpBandResult lp_band_monotone(const DesignSample& s, const RegionSpec& spec,
                              bool record_witnesses) {
    return lp_band_impl(
        s, spec, "monotone-lp",
        [&](RegionLp& lp) { add_monotone(lp.system(), true, {1, s.n()}); }, record_witnesses);
}

LpBandResult lp_band_convex(const DesignSample& s, const RegionSpec& spec, bool record_witnesses) {
    return lp_band_impl(
        s, spec, "convex-lp",
        [&](RegionLp& lp) { add_convex(lp.system(), true, {1, s.n()}); }, record_witnesses);
}

Band fast_band_monotone(const DesignSample& s, const RegionSpec& spec, bool sweep) {
    if (spec.n != s.n()) throw std::invalid_argument("fast_band_monotone: size mismatch");
    Band b;
    b.method = "monotone-fast";
    const int n = s.n();
    b.lb.assign(static_cast<std::size_t>(n), -kInf);
    b.ub.assign(static_cast<std::size_t>(n), kInf);
    const std::vector<double> S = prefix_sums(s);
    monotone_piece_bounds(S, s.values(), 1, n, true, spec.threshold(), nullptr, b.lb, b.ub);
    if (sweep) monotone_piece_sweep(1, n, true, b.lb, b.ub);
    set_feasibility(b);
    return b;
}

Band superfast_band_monotone(const DesignSample& s, const RegionSpec& spec, double theta,
                             bool sweep) {
    if (spec.n != s.n()) throw std::invalid_argument("superfast_band_monotone: size mismatch");
    require_theta(theta);
    Band b;
    b.method = "monotone-superfast";
    b.theta = theta;
    const int n = s.n();
    b.lb.assign(static_cast<std::size_t>(n), -kInf);
    b.ub.assign(static_cast<std::size_t>(n), kInf);
    const std::vector<double> S = prefix_sums(s);
    const std::vector<int> sizes = monotone_window_sizes(theta, n);
    monotone_piece_bounds(S, s.values(), 1, n, true, spec.threshold(), &sizes, b.lb, b.ub);
    if (sweep) monotone_piece_sweep(1, n, true, b.lb, b.ub);
    set_feasibility(b);
    return b;
}

Band fast_band_convex(const DesignSample& s, const RegionSpec& spec) {
    if (spec.n != s.n()) throw std::invalid_argument("fast_band_convex: size mismatch");
    Band b;
    b.method = "convex-fast";
    const int n = s.n();
    b.lb.assign(static_cast<std::size_t>(n), -kInf);
    b.ub.assign(static_cast<std::size_t>(n), kInf);
    const std::vector<double> S = prefix_sums(s);
    convex_piece_bounds(S, s.values(), 1, n, spec.threshold(), nullptr, b.lb, b.ub);
    set_feasibility(b);
    return b;
}

Band superfast_band_convex(const DesignSample& s, const RegionSpec& spec, double theta) {
    if (spec.n != s.n()) throw std::invalid_argument("superfast_band_convex: size mismatch");
    require_theta(theta);
    Band b;
    b.method = "convex-superfast";
    b.theta = theta;
    const int n = s.n();
    b.lb.assign(static_cast<std::size_t>(n), -kInf);
    b.ub.assign(static_cast<std::size_t>(n), kInf);
    const std::vector<double> S = prefix_sums(s);
    const std::vector<int> grid = theta_values(theta, n);
    convex_piece_bounds(S, s.values(), 1, n, spec.threshold(), &grid, b.lb, b.ub);
    set_feasibility(b);
    return b;
}

Band smoothness_band_fast(const DesignSample& s, const RegionSpec& spec,
                          const SmoothnessClass& cls, double theta) {
    if (spec.n != s.n()) throw std::invalid_argument("smoothness_band_fast: size mismatch");
    if (cls.order != 2)
        throw std::invalid_argument("smoothness bands support second-derivative classes only");
    if (!(cls.K >= 0.0)) throw std::invalid_argument("smoothness_band_fast: K must be >= 0");
    require_theta(theta);
    Band b;
    b.method = "smooth-fast";
    b.theta = theta;
    b.K = cls.K;
    const int n = s.n();
    const double T = spec.threshold();
    b.lb.assign(static_cast<std::size_t>(n), -kInf);
    b.ub.assign(static_cast<std::size_t>(n), kInf);
    const std::vector<double> S = prefix_sums(s);
    const std::vector<int> grid = theta_values(theta, n);
    for (int i = 1; i <= n; ++i) {
        const int kmax = std::min(i - 1, n - i);
        double lo = s.y(i) - T, hi = s.y(i) + T;  // radius-0 window
        for (int k : grid) {
            if (k > kmax) break;
            const double m = mean(S, i - k, i + k);
            const double pen = (static_cast<double>(k) / n) * (static_cast<double>(k) / n) * cls.K;
            const double noise = T / std::sqrt(2.0 * k + 1.0);
            lo = std::max(lo, m - pen - noise);
            hi = std::min(hi, m + pen + noise);
        }
        b.lb[static_cast<std::size_t>(i - 1)] = lo;
        b.ub[static_cast<std::size_t>(i - 1)] = hi;
    }
    set_feasibility(b);
    return b;
}

LpBandResult smoothness_band_lp(const DesignSample& s, const RegionSpec& spec,
                                const SmoothnessClass& cls, bool record_witnesses) {
    if (cls.order != 2)
        throw std::invalid_argument("smoothness bands support second-derivative classes only");
    if (!(cls.K > 0.0)) throw std::invalid_argument("smoothness_band_lp: K must be > 0");
    const int n = s.n();
    const double unscaled = cls.K / (static_cast<double>(n) * n);
    auto result = lp_band_impl(
        s, spec, "smooth-lp",
        [&](RegionLp& lp) {
            for (int i = 3; i <= n; ++i) {
                SparseRow up, down;
                up.coeffs = {{i - 1, 1.0}, {i - 2, -2.0}, {i - 3, 1.0}};
                down.coeffs = {{i - 1, -1.0}, {i - 2, 2.0}, {i - 3, -1.0}};
                up.rel = down.rel = Relation::LessEq;
                up.rhs = down.rhs = unscaled;
                up.label = "d2(" + std::to_string(i) + ")+";
                down.label = "d2(" + std::to_string(i) + ")-";
                lp.add_row(std::move(up));
                lp.add_row(std::move(down));
            }
        },
        record_witnesses);
    result.band.K = cls.K;
    return result;
}

double min_consistent_k(const DesignSample& s, const RegionSpec& spec, double theta) {
    require_theta(theta);
    auto nonempty = [&](double K) {
        const Band b = smoothness_band_fast(s, spec, SmoothnessClass{2, K}, theta);
        for (std::size_t i = 0; i < b.lb.size(); ++i)
            if (b.lb[i] > b.ub[i]) return false;
        return true;
    };
    if (nonempty(0.0)) return 0.0;
    double hi = 1.0;
    while (!nonempty(hi)) {
        hi *= 2.0;
        if (hi > 1e30) throw numeric_error("min_consistent_k: no finite K closes the band");
    }
    double lo = hi > 1.0 ? hi / 2.0 : 0.0;
    while (hi - lo > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        (nonempty(mid) ? hi : lo) = mid;
    }
    return hi;
}

namespace {

struct MonoConfig {
    std::vector<MonotonePiece> pieces;
};

std::vector<MonotonePiece> pieces_from_extremes(const std::vector<int>& splits, int n,
                                                bool first_rising) {
    std::vector<MonotonePiece> out;
    bool rising = first_rising;
    int start = 1;
    for (int m : splits) {
        if (m >= start) {
            out.push_back({{start, m}, rising});
            start = m + 1;
        }
        rising = !rising;
    }
    if (start <= n) out.push_back({{start, n}, rising});
    return out;
}

std::vector<ConvexPiece> pieces_from_inflections(const std::vector<int>& splits, int n,
                                                 bool first_convex) {
    std::vector<ConvexPiece> out;
    bool cvx = first_convex;
    int start = 1;
    for (int c : splits) {
        if (c >= start) {
            out.push_back({{start, c}, cvx});
            start = c + 1;
        }
        cvx = !cvx;
    }
    if (start <= n) out.push_back({{start, n}, cvx});
    return out;
}

Band assemble_monotone(const DesignSample& s, const RegionSpec& spec,
                       const std::vector<MonotonePiece>& pieces, double theta) {
    Band b;
    const int n = s.n();
    const double T = spec.threshold();
    // Points outside every piece carry only the universal bound.
    b.lb.resize(static_cast<std::size_t>(n));
    b.ub.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        b.lb[static_cast<std::size_t>(i - 1)] = s.y(i) - T;
        b.ub[static_cast<std::size_t>(i - 1)] = s.y(i) + T;
    }
    const std::vector<double> S = prefix_sums(s);
    const std::vector<int> sizes = monotone_window_sizes(theta, n);
    for (const MonotonePiece& p : pieces) {
        monotone_piece_bounds(S, s.values(), p.range.lo, p.range.hi, p.nondecreasing, T, &sizes, b.lb, b.ub);
        monotone_piece_sweep(p.range.lo, p.range.hi, p.nondecreasing, b.lb, b.ub);
    }
    return b;
}

Band assemble_convex(const DesignSample& s, const RegionSpec& spec,
                     const std::vector<ConvexPiece>& pieces, double theta) {
    Band b;
    const int n = s.n();
    const double T = spec.threshold();
    b.lb.resize(static_cast<std::size_t>(n));
    b.ub.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        b.lb[static_cast<std::size_t>(i - 1)] = s.y(i) - T;
        b.ub[static_cast<std::size_t>(i - 1)] = s.y(i) + T;
    }
    const std::vector<double> S = prefix_sums(s);
    const std::vector<int> grid = theta_values(theta, n);
    for (const ConvexPiece& p : pieces) {
        if (p.convex)
            convex_piece_bounds(S, s.values(), p.range.lo, p.range.hi, T, &grid, b.lb, b.ub);
        else
            concave_piece_bounds(S, s.values(), p.range.lo, p.range.hi, T, &grid, b.lb, b.ub);
    }
    return b;
}

void union_into(Band& acc, const Band& b) {
    if (acc.lb.empty()) {
        acc.lb = b.lb;
        acc.ub = b.ub;
        return;
    }
    for (std::size_t i = 0; i < acc.lb.size(); ++i) {
        acc.lb[i] = std::min(acc.lb[i], b.lb[i]);
        acc.ub[i] = std::max(acc.ub[i], b.ub[i]);
    }
}

void intersect_into(Band& acc, const Band& b) {
    for (std::size_t i = 0; i < acc.lb.size(); ++i) {
        acc.lb[i] = std::max(acc.lb[i], b.lb[i]);
        acc.ub[i] = std::min(acc.ub[i], b.ub[i]);
    }
}

std::vector<int> anchor_midpoints(const std::vector<IndexInterval>& anchors) {
    std::vector<int> mids;
    for (const IndexInterval& a : anchors) mids.push_back((a.lo + a.hi) / 2);
    std::sort(mids.begin(), mids.end());
    return mids;
}

}  // namespace

Band piecewise_band(const DesignSample& s, const RegionSpec& spec, const ShapeSpec& shape,
                    PiecewiseMode mode, double theta) {
    if (spec.n != s.n()) throw std::invalid_argument("piecewise_band: size mismatch");
    require_theta(theta);
    validate_shape(shape, s.n());
    const int n = s.n();

    const bool want_monotone = !shape.monotone.empty() || !shape.extreme_anchors.empty();
    const bool want_convex = !shape.convex.empty() || !shape.inflection_anchors.empty();
    if (!want_monotone && !want_convex)
        throw std::invalid_argument("piecewise_band: shape supplies no pieces or anchors");

    Band out;
    out.method = mode == PiecewiseMode::FixedAnchors ? "piecewise" : "piecewise-union";
    out.theta = theta;
    out.lb.assign(static_cast<std::size_t>(n), -kInf);
    out.ub.assign(static_cast<std::size_t>(n), kInf);

    if (want_monotone) {
        const bool first_rising =
            shape.monotone.empty() ? shape.first_rising : shape.monotone.front().nondecreasing;
        Band part;
        if (mode == PiecewiseMode::FixedAnchors || shape.extreme_anchors.empty()) {
            const std::vector<MonotonePiece> pieces =
                !shape.monotone.empty()
                    ? shape.monotone
                    : pieces_from_extremes(anchor_midpoints(shape.extreme_anchors), n,
                                           first_rising);
            part = assemble_monotone(s, spec, pieces, theta);
        } else {
            // Vary one anchor at a time across its interval, others at their
            // midpoints; the union over these is honest for extremes anywhere
            // inside the intervals.
            const std::vector<int> mids = anchor_midpoints(shape.extreme_anchors);
            for (std::size_t a = 0; a < shape.extreme_anchors.size(); ++a) {
                const IndexInterval iv = shape.extreme_anchors[a];
                for (int pos = iv.lo; pos <= iv.hi; ++pos) {
                    std::vector<int> splits = mids;
                    splits[a] = pos;
                    std::sort(splits.begin(), splits.end());
                    union_into(part,
                               assemble_monotone(s, spec,
                                                 pieces_from_extremes(splits, n, first_rising),
                                                 theta));
                }
            }
        }
        intersect_into(out, part);
    }

    if (want_convex) {
        const bool first_convex =
            shape.convex.empty() ? !shape.first_rising : shape.convex.front().convex;
        Band part;
        if (mode == PiecewiseMode::FixedAnchors || shape.inflection_anchors.empty()) {
            const std::vector<ConvexPiece> pieces =
                !shape.convex.empty()
                    ? shape.convex
                    : pieces_from_inflections(anchor_midpoints(shape.inflection_anchors), n,
                                              first_convex);
            part = assemble_convex(s, spec, pieces, theta);
        } else {
            const std::vector<int> mids = anchor_midpoints(shape.inflection_anchors);
            for (std::size_t a = 0; a < shape.inflection_anchors.size(); ++a) {
                const IndexInterval iv = shape.inflection_anchors[a];
                for (int pos = iv.lo; pos <= iv.hi; ++pos) {
                    std::vector<int> splits = mids;
                    splits[a] = pos;
                    std::sort(splits.begin(), splits.end());
                    union_into(part,
                               assemble_convex(s, spec,
                                               pieces_from_inflections(splits, n, first_convex),
                                               theta));
                }
            }
        }
        intersect_into(out, part);
    }

    set_feasibility(out);
    if (!out.feasible)
        out.reason = "anchors are inconsistent with the confidence region (" + out.reason + ")";
    return out;
}

ShapeSpec default_shape_from_fit(std::span<const double> fit, bool monotone_pieces,
                                 bool convex_pieces, double eps) {
    ShapeSpec shape;
    const int n = static_cast<int>(fit.size());
    const std::vector<Plateau> ext = local_extremes(fit, eps);
    shape.first_rising = ext.empty() ? (n >= 2 && fit[static_cast<std::size_t>(n - 1)] >=
                                                     fit[0])
                                     : ext.front().is_max;
    if (monotone_pieces) {
        std::vector<int> splits;
        for (const Plateau& p : ext) {
            shape.extreme_anchors.push_back({p.lo, p.hi});
            splits.push_back((p.lo + p.hi) / 2);
        }
        shape.monotone = pieces_from_extremes(splits, n, shape.first_rising);
    }
    if (convex_pieces) {
        // Inflections sit somewhere on the monotone stretch between
        // consecutive extreme plateaus; default anchor is that stretch.
        std::vector<int> splits;
        for (std::size_t k = 0; k + 1 < ext.size(); ++k) {
            const int lo = ext[k].hi, hi = ext[k + 1].lo;
            shape.inflection_anchors.push_back({lo, hi});
            splits.push_back((lo + hi) / 2);
        }
        shape.convex = pieces_from_inflections(splits, n, !shape.first_rising);
    }
    return shape;
}

}  // namespace mscale
