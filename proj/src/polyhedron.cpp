#include "mscale/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace mscale {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPhaseOneTol = 1e-6;   // infeasibility declaration
constexpr double kRowTol = 1e-7;        // relative post-solve validation
constexpr double kRateTol = 1e-9;       // rates below this do not limit steps
constexpr int kStallLimit = 300;        // non-improving pivots before Bland
constexpr int kRefreshEvery = 256;      // exact recomputation cadence
}  // namespace

ConstraintSystem::ConstraintSystem(int n_primary) : n_primary_(n_primary) {
    if (n_primary < 0) throw std::invalid_argument("ConstraintSystem: negative variable count");
    names_.reserve(static_cast<std::size_t>(n_primary));
    for (int i = 1; i <= n_primary; ++i) names_.push_back("g" + std::to_string(i));
    lower_.assign(static_cast<std::size_t>(n_primary), -kInf);
    upper_.assign(static_cast<std::size_t>(n_primary), kInf);
}

int ConstraintSystem::add_variable(std::string name, double lower, double upper) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
        throw std::invalid_argument("ConstraintSystem: bad bounds for " + name);
    names_.push_back(std::move(name));
    lower_.push_back(lower);
    upper_.push_back(upper);
    return n_vars() - 1;
}

void ConstraintSystem::set_bounds(int var, double lower, double upper) {
    if (var < 0 || var >= n_vars()) throw std::invalid_argument("ConstraintSystem: bad variable");
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
        throw std::invalid_argument("ConstraintSystem: bad bounds");
    lower_[static_cast<std::size_t>(var)] = lower;
    upper_[static_cast<std::size_t>(var)] = upper;
}

void ConstraintSystem::add_row(SparseRow row) {
    for (const auto& [var, coef] : row.coeffs) {
        if (var < 0 || var >= n_vars())
            throw std::invalid_argument("ConstraintSystem: row references undeclared variable");
        if (!std::isfinite(coef))
            throw std::invalid_argument("ConstraintSystem: non-finite coefficient");
    }
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("ConstraintSystem: non-finite rhs");
    rows_.push_back(std::move(row));
}

void ConstraintSystem::dump(std::ostream& os) const {
    for (const SparseRow& r : rows_) {
        bool first = true;
        for (const auto& [var, coef] : r.coeffs) {
            if (!first) os << ' ';
            os << coef << '*' << name(var);
            first = false;
        }
        os << (r.rel == Relation::LessEq ? " <= " : r.rel == Relation::GreaterEq ? " >= " : " = ")
           << r.rhs;
        if (!r.label.empty()) os << "  # " << r.label;
        os << '\n';
    }
}

ConstraintSystem build_region_constraints(const DesignSample& s, const RegionSpec& spec) {
    if (spec.n != s.n())
        throw std::invalid_argument("build_region_constraints: spec/sample size mismatch");
    ConstraintSystem cs(s.n());
    const double T = spec.threshold();
    std::vector<double> prefix(static_cast<std::size_t>(s.n()) + 1, 0.0);
    for (int i = 1; i <= s.n(); ++i)
        prefix[static_cast<std::size_t>(i)] = prefix[static_cast<std::size_t>(i - 1)] + s.y(i);
    for (const IndexInterval& iv : spec.family.intervals()) {
        const double invroot = 1.0 / std::sqrt(static_cast<double>(iv.size()));
        const double ysum = (prefix[static_cast<std::size_t>(iv.hi)] -
                             prefix[static_cast<std::size_t>(iv.lo - 1)]) *
                            invroot;
        SparseRow up, down;
        up.coeffs.reserve(static_cast<std::size_t>(iv.size()));
        down.coeffs.reserve(static_cast<std::size_t>(iv.size()));
        for (int i = iv.lo; i <= iv.hi; ++i) {
            up.coeffs.emplace_back(i - 1, invroot);
            down.coeffs.emplace_back(i - 1, -invroot);
        }
        const std::string tag =
            "I[" + std::to_string(iv.lo) + "," + std::to_string(iv.hi) + "]";
        up.rel = Relation::LessEq;
        up.rhs = ysum + T;
        up.label = tag + "+";
        down.rel = Relation::LessEq;
        down.rhs = -ysum + T;
        down.label = tag + "-";
        cs.add_row(std::move(up));
        cs.add_row(std::move(down));
    }
    return cs;
}

void add_monotone(ConstraintSystem& cs, bool nondecreasing, IndexInterval range) {
    if (range.lo < 1 || range.hi > cs.n_primary())
        throw std::invalid_argument("add_monotone: range outside primary variables");
    for (int i = range.lo; i < range.hi; ++i) {
        SparseRow r;
        if (nondecreasing)
            r.coeffs = {{i - 1, 1.0}, {i, -1.0}};  // g_i - g_{i+1} <= 0
        else
            r.coeffs = {{i - 1, -1.0}, {i, 1.0}};
        r.rel = Relation::LessEq;
        r.rhs = 0.0;
        r.label = std::string(nondecreasing ? "incr(" : "decr(") + std::to_string(i) + ")";
        cs.add_row(std::move(r));
    }
}

void add_convex(ConstraintSystem& cs, bool convex, IndexInterval range) {
    if (range.lo < 1 || range.hi > cs.n_primary())
        throw std::invalid_argument("add_convex: range outside primary variables");
    const double sign = convex ? 1.0 : -1.0;
    for (int i = range.lo + 1; i < range.hi; ++i) {
        SparseRow r;
        r.coeffs = {{i - 2, sign}, {i - 1, -2.0 * sign}, {i, sign}};
        r.rel = Relation::GreaterEq;
        r.rhs = 0.0;
        r.label = std::string(convex ? "cvx(" : "ccv(") + std::to_string(i) + ")";
        cs.add_row(std::move(r));
    }
}

namespace {

enum class VarState : char { Basic, AtLower, AtUpper, FreeZero };

class Simplex {
public:
    Simplex(const ConstraintSystem& cs, std::span<const std::pair<int, double>> objective,
            Sense sense)
        : cs_(cs) {
        build(objective, sense);
    }

    LpResult run();

private:
    const ConstraintSystem& cs_;
    int m_ = 0;       // rows
    int nstruct_ = 0; // structural variables (incl. slacks)
    int ntot_ = 0;    // + artificials
    int stride_ = 0;  // ntot_ + 1, last column holds B^{-1} b
    std::vector<double> tab_;     // m_ x stride_
    std::vector<double> cost1_, cost2_;  // reduced-cost rows, length ntot_
    std::vector<double> lb_, ub_, value_, beta_, c2_;
    std::vector<VarState> state_;
    std::vector<int> basis_;
    std::vector<char> artificial_;
    std::vector<double> b_;
    double z_ = 0.0;
    double sense_sign_ = 1.0;
    bool bland_ = false;
    int stall_ = 0;

    double* row(int r) { return tab_.data() + static_cast<std::size_t>(r) * stride_; }
    const double* row(int r) const { return tab_.data() + static_cast<std::size_t>(r) * stride_; }

    void build(std::span<const std::pair<int, double>> objective, Sense sense);
    void init_costs();
    void refresh();
    double rest_value(int j) const;
    bool price(const std::vector<double>& d, int& enter, int& dir) const;
    bool iterate(int phase);  // one pivot; false when phase optimal
    void eliminate(int prow, int pcol);
    std::vector<double> point() const;
    double objective_at(const std::vector<double>& x) const;
    LpResult finish(LpStatus status);
};

double Simplex::rest_value(int j) const {
    if (std::isfinite(lb_[static_cast<std::size_t>(j)])) return lb_[static_cast<std::size_t>(j)];
    if (std::isfinite(ub_[static_cast<std::size_t>(j)])) return ub_[static_cast<std::size_t>(j)];
    return 0.0;
}

void Simplex::build(std::span<const std::pair<int, double>> objective, Sense sense) {
    const int nvars = cs_.n_vars();
    m_ = static_cast<int>(cs_.rows().size());
    sense_sign_ = (sense == Sense::Maximize) ? -1.0 : 1.0;

    // Structural variables, then one slack per inequality row.
    lb_.assign(static_cast<std::size_t>(nvars), 0.0);
    ub_.assign(static_cast<std::size_t>(nvars), 0.0);
    for (int j = 0; j < nvars; ++j) {
        lb_[static_cast<std::size_t>(j)] = cs_.lower(j);
        ub_[static_cast<std::size_t>(j)] = cs_.upper(j);
    }
    std::vector<int> slack_of(static_cast<std::size_t>(m_), -1);
    int next_slack = nvars;
    for (int r = 0; r < m_; ++r) {
        const Relation rel = cs_.rows()[static_cast<std::size_t>(r)].rel;
        if (rel == Relation::Equal) continue;
        slack_of[static_cast<std::size_t>(r)] = next_slack++;
        if (rel == Relation::LessEq) {
            lb_.push_back(0.0);
            ub_.push_back(kInf);
        } else {
            lb_.push_back(-kInf);
            ub_.push_back(0.0);
        }
    }
    nstruct_ = static_cast<int>(lb_.size());

    c2_.assign(static_cast<std::size_t>(nstruct_), 0.0);
    for (const auto& [var, coef] : objective)
        c2_[static_cast<std::size_t>(var)] += sense_sign_ * coef;

    value_.resize(static_cast<std::size_t>(nstruct_));
    state_.assign(static_cast<std::size_t>(nstruct_), VarState::AtLower);
    for (int j = 0; j < nstruct_; ++j) {
        const double l = lb_[static_cast<std::size_t>(j)], u = ub_[static_cast<std::size_t>(j)];
        if (std::isfinite(l)) state_[static_cast<std::size_t>(j)] = VarState::AtLower;
        else if (std::isfinite(u)) state_[static_cast<std::size_t>(j)] = VarState::AtUpper;
        else state_[static_cast<std::size_t>(j)] = VarState::FreeZero;
        value_[static_cast<std::size_t>(j)] = rest_value(j);
    }

    // Residuals at the rest point decide the crash basis and artificials.
    b_.assign(static_cast<std::size_t>(m_), 0.0);
    std::vector<double> resid(static_cast<std::size_t>(m_), 0.0);
    std::vector<int> col_count(static_cast<std::size_t>(nstruct_), 0);
    for (int r = 0; r < m_; ++r) {
        const SparseRow& sr = cs_.rows()[static_cast<std::size_t>(r)];
        double dot = 0.0;
        for (const auto& [var, coef] : sr.coeffs) {
            dot += coef * value_[static_cast<std::size_t>(var)];
            ++col_count[static_cast<std::size_t>(var)];
        }
        const int sc = slack_of[static_cast<std::size_t>(r)];
        if (sc >= 0) {
            ++col_count[static_cast<std::size_t>(sc)];
            dot += value_[static_cast<std::size_t>(sc)];
        }
        b_[static_cast<std::size_t>(r)] = sr.rhs;
        resid[static_cast<std::size_t>(r)] = sr.rhs - dot;
    }

    basis_.assign(static_cast<std::size_t>(m_), -1);
    std::vector<std::pair<int, double>> crash(static_cast<std::size_t>(m_), {-1, 0.0});
    int n_art = 0;
    for (int r = 0; r < m_; ++r) {
        const SparseRow& sr = cs_.rows()[static_cast<std::size_t>(r)];
        int pick = -1;
        double pick_coef = 0.0;
        auto consider = [&](int var, double coef) {
            if (pick >= 0 || col_count[static_cast<std::size_t>(var)] != 1) return;
            if (std::abs(coef) < 1e-9) return;
            const double cand = value_[static_cast<std::size_t>(var)] +
                                resid[static_cast<std::size_t>(r)] / coef;
            if (cand >= lb_[static_cast<std::size_t>(var)] - 1e-12 &&
                cand <= ub_[static_cast<std::size_t>(var)] + 1e-12) {
                pick = var;
                pick_coef = coef;
            }
        };
        const int sc = slack_of[static_cast<std::size_t>(r)];
        if (sc >= 0) consider(sc, 1.0);
        for (const auto& [var, coef] : sr.coeffs) consider(var, coef);
        crash[static_cast<std::size_t>(r)] = {pick, pick_coef};
        if (pick < 0) ++n_art;
    }

    ntot_ = nstruct_ + n_art;
    stride_ = ntot_ + 1;
    tab_.assign(static_cast<std::size_t>(m_) * stride_, 0.0);
    artificial_.assign(static_cast<std::size_t>(ntot_), 0);
    lb_.resize(static_cast<std::size_t>(ntot_), 0.0);
    ub_.resize(static_cast<std::size_t>(ntot_), kInf);
    value_.resize(static_cast<std::size_t>(ntot_), 0.0);
    state_.resize(static_cast<std::size_t>(ntot_), VarState::AtLower);
    c2_.resize(static_cast<std::size_t>(ntot_), 0.0);

    beta_.assign(static_cast<std::size_t>(m_), 0.0);
    int next_art = nstruct_;
    for (int r = 0; r < m_; ++r) {
        double* tr = row(r);
        const SparseRow& sr = cs_.rows()[static_cast<std::size_t>(r)];
        for (const auto& [var, coef] : sr.coeffs) tr[var] += coef;
        const int sc = slack_of[static_cast<std::size_t>(r)];
        if (sc >= 0) tr[sc] = 1.0;
        tr[ntot_] = b_[static_cast<std::size_t>(r)];

        auto [pick, coef] = crash[static_cast<std::size_t>(r)];
        if (pick >= 0) {
            if (coef != 1.0)
                for (int j = 0; j <= ntot_; ++j) tr[j] /= coef;
            basis_[static_cast<std::size_t>(r)] = pick;
            beta_[static_cast<std::size_t>(r)] = value_[static_cast<std::size_t>(pick)] +
                                                 resid[static_cast<std::size_t>(r)] / coef;
            state_[static_cast<std::size_t>(pick)] = VarState::Basic;
        } else {
            const double sgn = resid[static_cast<std::size_t>(r)] >= 0.0 ? 1.0 : -1.0;
            const int aj = next_art++;
            if (sgn < 0.0)
                for (int j = 0; j <= ntot_; ++j) tr[j] = -tr[j];
            tr[aj] = 1.0;
            artificial_[static_cast<std::size_t>(aj)] = 1;
            basis_[static_cast<std::size_t>(r)] = aj;
            beta_[static_cast<std::size_t>(r)] = std::abs(resid[static_cast<std::size_t>(r)]);
            state_[static_cast<std::size_t>(aj)] = VarState::Basic;
        }
    }
    init_costs();
}

void Simplex::init_costs() {
    cost1_.assign(static_cast<std::size_t>(ntot_), 0.0);
    cost2_.assign(static_cast<std::size_t>(ntot_), 0.0);
    for (int j = 0; j < ntot_; ++j) {
        if (artificial_[static_cast<std::size_t>(j)]) cost1_[static_cast<std::size_t>(j)] = 1.0;
        cost2_[static_cast<std::size_t>(j)] = c2_[static_cast<std::size_t>(j)];
    }
    for (int r = 0; r < m_; ++r) {
        const int bv = basis_[static_cast<std::size_t>(r)];
        const double cb1 = artificial_[static_cast<std::size_t>(bv)] ? 1.0 : 0.0;
        const double cb2 = c2_[static_cast<std::size_t>(bv)];
        if (cb1 == 0.0 && cb2 == 0.0) continue;
        const double* tr = row(r);
        for (int j = 0; j < ntot_; ++j) {
            cost1_[static_cast<std::size_t>(j)] -= cb1 * tr[j];
            cost2_[static_cast<std::size_t>(j)] -= cb2 * tr[j];
        }
    }
}

std::vector<double> Simplex::point() const {
    std::vector<double> x(value_.begin(), value_.end());
    for (int r = 0; r < m_; ++r)
        x[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] =
            beta_[static_cast<std::size_t>(r)];
    return x;
}

double Simplex::objective_at(const std::vector<double>& x) const {
    double z = 0.0;
    for (int j = 0; j < ntot_; ++j) z += c2_[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    return z;
}

// Recompute basic values exactly from the tableau to cancel drift.
void Simplex::refresh() {
    for (int r = 0; r < m_; ++r) {
        const double* tr = row(r);
        double v = tr[ntot_];
        for (int j = 0; j < ntot_; ++j) {
            if (state_[static_cast<std::size_t>(j)] == VarState::Basic) continue;
            const double xv = value_[static_cast<std::size_t>(j)];
            if (xv != 0.0) v -= tr[j] * xv;
        }
        beta_[static_cast<std::size_t>(r)] = v;
    }
}

bool Simplex::price(const std::vector<double>& d, int& enter, int& dir) const {
    double cmax = 1.0;
    for (int j = 0; j < ntot_; ++j) cmax = std::max(cmax, std::abs(d[static_cast<std::size_t>(j)]));
    const double dtol = 1e-9 * cmax;
    enter = -1;
    dir = 0;
    double best = dtol;
    for (int j = 0; j < ntot_; ++j) {
        const VarState st = state_[static_cast<std::size_t>(j)];
        if (st == VarState::Basic) continue;
        if (artificial_[static_cast<std::size_t>(j)]) continue;
        if (lb_[static_cast<std::size_t>(j)] == ub_[static_cast<std::size_t>(j)]) continue;
        const double dj = d[static_cast<std::size_t>(j)];
        int cand_dir = 0;
        if (st == VarState::AtLower && dj < -best) cand_dir = 1;
        else if (st == VarState::AtUpper && dj > best) cand_dir = -1;
        else if (st == VarState::FreeZero && std::abs(dj) > best) cand_dir = dj < 0.0 ? 1 : -1;
        if (cand_dir != 0) {
            enter = j;
            dir = cand_dir;
            if (bland_) return true;  // first eligible index
            best = std::abs(dj);
        }
    }
    return enter >= 0;
}

void Simplex::eliminate(int prow, int pcol) {
    double* pr = row(prow);
    const double piv = pr[pcol];
    const double inv = 1.0 / piv;
    for (int j = 0; j <= ntot_; ++j) pr[j] *= inv;
    pr[pcol] = 1.0;
    for (int r = 0; r < m_; ++r) {
        if (r == prow) continue;
        double* tr = row(r);
        const double f = tr[pcol];
        if (f == 0.0) continue;
        for (int j = 0; j <= ntot_; ++j) tr[j] -= f * pr[j];
        tr[pcol] = 0.0;
    }
    for (auto* d : {&cost1_, &cost2_}) {
        const double f = (*d)[static_cast<std::size_t>(pcol)];
        if (f == 0.0) continue;
        for (int j = 0; j < ntot_; ++j) (*d)[static_cast<std::size_t>(j)] -= f * pr[j];
        (*d)[static_cast<std::size_t>(pcol)] = 0.0;
    }
}

bool Simplex::iterate(int phase) {
    const std::vector<double>& d = (phase == 1) ? cost1_ : cost2_;
    int enter, dir;
    if (!price(d, enter, dir)) return false;

    // Ratio test: how far can x_enter move before a basic variable or the
    // entering variable's own opposite bound stops it.
    double cap = kInf;
    if (std::isfinite(lb_[static_cast<std::size_t>(enter)]) &&
        std::isfinite(ub_[static_cast<std::size_t>(enter)]))
        cap = ub_[static_cast<std::size_t>(enter)] - lb_[static_cast<std::size_t>(enter)];
    int leave_row = -1;
    double leave_bound = 0.0;
    double best_piv = 0.0;
    for (int r = 0; r < m_; ++r) {
        const double a = row(r)[enter];
        const double rate = -a * dir;  // d beta_r / d step
        if (std::abs(rate) <= kRateTol) continue;
        const int bv = basis_[static_cast<std::size_t>(r)];
        const double br = beta_[static_cast<std::size_t>(r)];
        double room, bound;
        if (rate > 0.0) {
            if (!std::isfinite(ub_[static_cast<std::size_t>(bv)])) continue;
            room = (ub_[static_cast<std::size_t>(bv)] - br) / rate;
            bound = ub_[static_cast<std::size_t>(bv)];
        } else {
            if (!std::isfinite(lb_[static_cast<std::size_t>(bv)])) continue;
            room = (br - lb_[static_cast<std::size_t>(bv)]) / (-rate);
            bound = lb_[static_cast<std::size_t>(bv)];
        }
        if (room < 0.0) room = 0.0;
        bool take = false;
        if (room < cap - 1e-10) {
            take = true;
        } else if (room < cap + 1e-10 && leave_row >= 0) {
            // Near tie: prefer the stabler pivot, or the lowest basis index
            // under Bland's rule.
            take = bland_ ? bv < basis_[static_cast<std::size_t>(leave_row)]
                          : std::abs(a) > std::abs(best_piv);
        }
        if (take) {
            cap = std::min(cap, room);
            leave_row = r;
            leave_bound = bound;
            best_piv = a;
        }
    }

    if (!std::isfinite(cap)) throw numeric_error("simplex: unbounded direction");

    const double step = cap;
    const double delta = dir * step;
    if (delta != 0.0) {
        for (int r = 0; r < m_; ++r) {
            const double a = row(r)[enter];
            if (a != 0.0) beta_[static_cast<std::size_t>(r)] -= a * delta;
        }
        z_ += d[static_cast<std::size_t>(enter)] * delta;
    }
    const double improved = std::abs(d[static_cast<std::size_t>(enter)] * delta);
    if (improved <= 1e-12 * (1.0 + std::abs(z_))) {
        if (++stall_ > kStallLimit) bland_ = true;
    } else {
        stall_ = 0;
    }

    if (leave_row < 0) {
        // Bound flip: the entering variable runs to its other bound.
        value_[static_cast<std::size_t>(enter)] += delta;
        state_[static_cast<std::size_t>(enter)] =
            dir > 0 ? VarState::AtUpper : VarState::AtLower;
        return true;
    }

    if (std::abs(best_piv) < 1e-11)
        throw numeric_error("simplex: pivot element too small");

    const int leave_var = basis_[static_cast<std::size_t>(leave_row)];
    value_[static_cast<std::size_t>(leave_var)] = leave_bound;
    state_[static_cast<std::size_t>(leave_var)] =
        (leave_bound == lb_[static_cast<std::size_t>(leave_var)]) ? VarState::AtLower
                                                                  : VarState::AtUpper;
    const double enter_value = value_[static_cast<std::size_t>(enter)] + delta;
    basis_[static_cast<std::size_t>(leave_row)] = enter;
    state_[static_cast<std::size_t>(enter)] = VarState::Basic;
    beta_[static_cast<std::size_t>(leave_row)] = enter_value;
    eliminate(leave_row, enter);
    return true;
}

LpResult Simplex::run() {
    // Phase 1 runs only when the crash left artificials behind.
    bool need_phase1 = false;
    for (int r = 0; r < m_; ++r)
        if (artificial_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])])
            need_phase1 = true;

    const long iter_cap = 20000L + 60L * m_ + 4L * ntot_;
    long iters = 0;
    if (need_phase1) {
        z_ = 0.0;
        for (int r = 0; r < m_; ++r)
            if (artificial_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])])
                z_ += beta_[static_cast<std::size_t>(r)];
        while (iterate(1)) {
            if (++iters % kRefreshEvery == 0) refresh();
            if (iters > iter_cap) throw numeric_error("simplex: phase-one iteration limit");
        }
        refresh();
        double infeas = 0.0;
        std::vector<int> bad;
        for (int r = 0; r < m_; ++r) {
            const int bv = basis_[static_cast<std::size_t>(r)];
            if (artificial_[static_cast<std::size_t>(bv)]) {
                const double v = std::abs(beta_[static_cast<std::size_t>(r)]);
                infeas += v;
                if (v > kPhaseOneTol) bad.push_back(r);
            }
        }
        if (infeas > kPhaseOneTol) {
            LpResult res;
            res.status = LpStatus::Infeasible;
            res.infeasible_rows = std::move(bad);
            return res;
        }
        // Pin the artificials at zero for phase 2; basic ones simply stay
        // at zero because their bounds collapse.
        for (int j = nstruct_; j < ntot_; ++j) {
            lb_[static_cast<std::size_t>(j)] = 0.0;
            ub_[static_cast<std::size_t>(j)] = 0.0;
            if (state_[static_cast<std::size_t>(j)] != VarState::Basic) {
                state_[static_cast<std::size_t>(j)] = VarState::AtLower;
                value_[static_cast<std::size_t>(j)] = 0.0;
            }
        }
    }

    bland_ = false;
    stall_ = 0;
    z_ = objective_at(point());
    try {
        while (iterate(2)) {
            if (++iters % kRefreshEvery == 0) refresh();
            if (iters > iter_cap) throw numeric_error("simplex: iteration limit");
        }
    } catch (const numeric_error& e) {
        if (std::string(e.what()).find("unbounded") != std::string::npos)
            return finish(LpStatus::Unbounded);
        throw;
    }
    refresh();
    return finish(LpStatus::Optimal);
}

LpResult Simplex::finish(LpStatus status) {
    LpResult res;
    res.status = status;
    if (status != LpStatus::Optimal) return res;
    const std::vector<double> x = point();
    res.solution.assign(x.begin(), x.begin() + cs_.n_vars());
    for (int j = 0; j < cs_.n_vars(); ++j) {
        double& v = res.solution[static_cast<std::size_t>(j)];
        const double l = cs_.lower(j), u = cs_.upper(j);
        const double slack = 1e-9 * (1.0 + std::abs(v));
        if (v < l - slack || v > u + slack)
            throw numeric_error("simplex: optimal point failed bound validation (" +
                                cs_.name(j) + ")");
        v = std::min(std::max(v, l), u);
    }
    res.objective = sense_sign_ * objective_at(x);

    // Contract: an optimal answer satisfies every row to 1e-7 relative.
    for (std::size_t r = 0; r < cs_.rows().size(); ++r) {
        const SparseRow& sr = cs_.rows()[r];
        double dot = 0.0, scale = std::max(1.0, std::abs(sr.rhs));
        for (const auto& [var, coef] : sr.coeffs) {
            const double term = coef * res.solution[static_cast<std::size_t>(var)];
            dot += term;
            scale = std::max(scale, std::abs(term));
        }
        const double viol = sr.rel == Relation::LessEq      ? dot - sr.rhs
                            : sr.rel == Relation::GreaterEq ? sr.rhs - dot
                                                            : std::abs(dot - sr.rhs);
        if (viol > kRowTol * scale)
            throw numeric_error("simplex: optimal point failed row validation (" +
                                (sr.label.empty() ? std::string("row ") + std::to_string(r)
                                                  : sr.label) +
                                ")");
    }
    return res;
}

}  // namespace

LpResult solve(const ConstraintSystem& cs,
               std::span<const std::pair<int, double>> objective, Sense sense) {
    for (const auto& [var, coef] : objective) {
        if (var < 0 || var >= cs.n_vars())
            throw std::invalid_argument("solve: objective references undeclared variable");
        if (!std::isfinite(coef)) throw std::invalid_argument("solve: non-finite objective");
    }
    Simplex s(cs, objective, sense);
    return s.run();
}

RegionLp::RegionLp(const DesignSample& s, const RegionSpec& spec)
    : s_(s), spec_(spec), cs_(s.n()), work_(0) {
    if (spec.n != s.n()) throw std::invalid_argument("RegionLp: spec/sample size mismatch");
    const double T = spec.threshold();
    threshold_lp_ = T * (1.0 - 1e-9);
    // Singletons enter as variable bounds, never as rows.
    for (int i = 1; i <= s.n(); ++i)
        cs_.set_bounds(i - 1, s.y(i) - threshold_lp_, s.y(i) + threshold_lp_);
    prefix_y_.assign(static_cast<std::size_t>(s.n()) + 1, 0.0);
    for (int i = 1; i <= s.n(); ++i)
        prefix_y_[static_cast<std::size_t>(i)] = prefix_y_[static_cast<std::size_t>(i - 1)] + s.y(i);
}

int RegionLp::add_variable(std::string name, double lb, double ub) {
    return cs_.add_variable(std::move(name), lb, ub);
}

void RegionLp::add_row(SparseRow row) { cs_.add_row(std::move(row)); }

void RegionLp::set_objective(std::vector<std::pair<int, double>> objective, Sense sense) {
    objective_ = std::move(objective);
    sense_ = sense;
}

double RegionLp::interval_stat(std::size_t family_index, const std::vector<double>& prefix_g) const {
    const IndexInterval iv = spec_.family.intervals()[family_index];
    const double rsum = (prefix_y_[static_cast<std::size_t>(iv.hi)] -
                         prefix_y_[static_cast<std::size_t>(iv.lo - 1)]) -
                        (prefix_g[static_cast<std::size_t>(iv.hi)] -
                         prefix_g[static_cast<std::size_t>(iv.lo - 1)]);
    return std::abs(rsum) / std::sqrt(static_cast<double>(iv.size()));
}

void RegionLp::append_interval_rows(ConstraintSystem& cs, std::size_t family_index) const {
    const IndexInterval iv = spec_.family.intervals()[family_index];
    const double invroot = 1.0 / std::sqrt(static_cast<double>(iv.size()));
    const double ysum = (prefix_y_[static_cast<std::size_t>(iv.hi)] -
                         prefix_y_[static_cast<std::size_t>(iv.lo - 1)]) *
                        invroot;
    SparseRow up, down;
    for (int i = iv.lo; i <= iv.hi; ++i) {
        up.coeffs.emplace_back(i - 1, invroot);
        down.coeffs.emplace_back(i - 1, -invroot);
    }
    const std::string tag = "I[" + std::to_string(iv.lo) + "," + std::to_string(iv.hi) + "]";
    up.rel = down.rel = Relation::LessEq;
    up.rhs = ysum + threshold_lp_;
    down.rhs = -ysum + threshold_lp_;
    up.label = tag + "+";
    down.label = tag + "-";
    cs.add_row(std::move(up));
    cs.add_row(std::move(down));
}

LpResult RegionLp::solve() {
    const auto intervals = spec_.family.intervals();
    const double slack_tol = 1e-10 * (1.0 + threshold_lp_);
    const std::size_t batch = 64;  // worst offenders admitted per round

    // Cuts the previous objective left slack rarely matter for the next
    // one; keep only those near-active at the last optimum.
    if (!last_g_.empty() && !pool_.empty()) {
        std::vector<double> prefix_g(static_cast<std::size_t>(s_.n()) + 1, 0.0);
        for (int i = 1; i <= s_.n(); ++i)
            prefix_g[static_cast<std::size_t>(i)] =
                prefix_g[static_cast<std::size_t>(i - 1)] + last_g_[static_cast<std::size_t>(i - 1)];
        std::vector<std::size_t> kept;
        for (std::size_t k : pool_)
            if (interval_stat(k, prefix_g) >= threshold_lp_ * (1.0 - 1e-6) - slack_tol)
                kept.push_back(k);
        pool_ = std::move(kept);
    }

    std::vector<char> in_pool(intervals.size(), 0);
    for (std::size_t k : pool_) in_pool[k] = 1;

    const int max_rounds = 800;
    for (int round = 0; round < max_rounds; ++round) {
        work_ = cs_;
        for (std::size_t k : pool_) append_interval_rows(work_, k);
        LpResult res = mscale::solve(work_, objective_, sense_);
        if (res.status != LpStatus::Optimal) return res;

        // Exact separation over the whole family; admit the worst batch.
        std::vector<double> prefix_g(static_cast<std::size_t>(s_.n()) + 1, 0.0);
        for (int i = 1; i <= s_.n(); ++i)
            prefix_g[static_cast<std::size_t>(i)] =
                prefix_g[static_cast<std::size_t>(i - 1)] +
                res.solution[static_cast<std::size_t>(i - 1)];
        std::vector<std::pair<double, std::size_t>> violated;
        for (std::size_t k = 0; k < intervals.size(); ++k) {
            if (in_pool[k] || intervals[k].size() == 1) continue;
            const double w = interval_stat(k, prefix_g);
            if (w > threshold_lp_ + slack_tol) violated.emplace_back(w, k);
        }
        if (violated.empty()) {
            last_g_.assign(res.solution.begin(), res.solution.begin() + s_.n());
            return res;
        }
        std::sort(violated.begin(), violated.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t j = 0; j < violated.size() && j < batch; ++j) {
            pool_.push_back(violated[j].second);
            in_pool[violated[j].second] = 1;
        }
    }
    throw numeric_error("RegionLp: row generation did not settle");
}

}  // namespace mscale
