#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "lp_oracle.hpp"
#include "mscale/grid.hpp"
#include "mscale/multires.hpp"
#include "mscale/polyhedron.hpp"

using namespace mscale;

namespace {

bool satisfies(const ConstraintSystem& cs, const std::vector<double>& x, double tol) {
    for (const SparseRow& r : cs.rows()) {
        double dot = 0.0;
        for (const auto& [var, coef] : r.coeffs) dot += coef * x[static_cast<std::size_t>(var)];
        switch (r.rel) {
            case Relation::LessEq:
                if (dot > r.rhs + tol) return false;
                break;
            case Relation::GreaterEq:
                if (dot < r.rhs - tol) return false;
                break;
            case Relation::Equal:
                if (std::abs(dot - r.rhs) > tol) return false;
                break;
        }
    }
    for (int j = 0; j < cs.n_vars(); ++j) {
        if (x[static_cast<std::size_t>(j)] < cs.lower(j) - tol) return false;
        if (x[static_cast<std::size_t>(j)] > cs.upper(j) + tol) return false;
    }
    return true;
}

// Re-encode a ConstraintSystem (must be bound-free) for the reference solver.
lp_oracle::Problem reencode(const ConstraintSystem& cs,
                            const std::vector<std::pair<int, double>>& objective) {
    lp_oracle::Problem p;
    p.nvars = cs.n_vars();
    p.c.assign(static_cast<std::size_t>(p.nvars), 0.0);
    for (const auto& [var, coef] : objective) p.c[static_cast<std::size_t>(var)] += coef;
    auto push = [&](const SparseRow& r, double sign) {
        std::vector<double> row(static_cast<std::size_t>(p.nvars), 0.0);
        for (const auto& [var, coef] : r.coeffs) row[static_cast<std::size_t>(var)] += sign * coef;
        p.A.push_back(std::move(row));
        p.b.push_back(sign * r.rhs);
    };
    for (const SparseRow& r : cs.rows()) {
        if (r.rel == Relation::LessEq) push(r, 1.0);
        if (r.rel == Relation::GreaterEq) push(r, -1.0);
        if (r.rel == Relation::Equal) {
            push(r, 1.0);
            push(r, -1.0);
        }
    }
    for (int j = 0; j < cs.n_vars(); ++j) {
        if (std::isfinite(cs.upper(j))) {
            SparseRow r;
            r.coeffs = {{j, 1.0}};
            r.rhs = cs.upper(j);
            push(r, 1.0);
        }
        if (std::isfinite(cs.lower(j))) {
            SparseRow r;
            r.coeffs = {{j, 1.0}};
            r.rhs = cs.lower(j);
            push(r, -1.0);
        }
    }
    return p;
}

}  // namespace

TEST_CASE("toy linear programs") {
    SUBCASE("min over a segment") {
        ConstraintSystem cs(1);
        cs.add_row({{{0, 1.0}}, Relation::GreaterEq, 0.0, ""});
        cs.add_row({{{0, 1.0}}, Relation::LessEq, 1.0, ""});
        const std::vector<std::pair<int, double>> obj{{0, 1.0}};
        const LpResult lo = solve(cs, obj, Sense::Minimize);
        CHECK(lo.status == LpStatus::Optimal);
        CHECK(lo.objective == doctest::Approx(0.0).scale(1.0));
        const LpResult hi = solve(cs, obj, Sense::Maximize);
        CHECK(hi.objective == doctest::Approx(1.0));
    }
    SUBCASE("infeasible pair") {
        ConstraintSystem cs(1);
        cs.add_row({{{0, 1.0}}, Relation::LessEq, 0.0, "low"});
        cs.add_row({{{0, 1.0}}, Relation::GreaterEq, 1.0, "high"});
        const LpResult r = solve(cs, std::vector<std::pair<int, double>>{{0, 1.0}},
                                 Sense::Minimize);
        CHECK(r.status == LpStatus::Infeasible);
        CHECK_FALSE(r.infeasible_rows.empty());
    }
    SUBCASE("unbounded") {
        ConstraintSystem cs(1);
        cs.add_row({{{0, 1.0}}, Relation::LessEq, 5.0, ""});
        const LpResult r = solve(cs, std::vector<std::pair<int, double>>{{0, 1.0}},
                                 Sense::Minimize);
        CHECK(r.status == LpStatus::Unbounded);
    }
    SUBCASE("bad objective") {
        ConstraintSystem cs(1);
        CHECK_THROWS_AS(solve(cs, std::vector<std::pair<int, double>>{{3, 1.0}},
                              Sense::Minimize),
                        std::invalid_argument);
    }
}

TEST_CASE("region constraint assembly") {
    const DesignSample s({0.5});
    RegionSpec spec = make_region(s, 2.0, 3.0, IntervalFamily::all(1));
    const ConstraintSystem cs = build_region_constraints(s, spec);
    REQUIRE(cs.rows().size() == 2);  // exactly 2 |family| one-sided rows
    CHECK(satisfies(cs, {0.5}, 1e-12));
    // threshold is zero at n=1, so the rows pin g1 = y1
    CHECK_FALSE(satisfies(cs, {0.6}, 1e-12));
}

TEST_CASE("hand-solvable two-point region") {
    const DesignSample s({0.0, 0.0});
    const RegionSpec spec = make_region(s, 1.0, 3.0, IntervalFamily::all(2));
    ConstraintSystem cs = build_region_constraints(s, spec);
    CHECK(cs.rows().size() == 6);
    add_monotone(cs, true, {1, 2});
    CHECK(cs.rows().size() == 7);
    const LpResult r = solve(cs, std::vector<std::pair<int, double>>{{0, 1.0}}, Sense::Minimize);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-1.442026886600883).epsilon(1e-9));
    CHECK(satisfies(cs, r.solution, 1e-9));
}

TEST_CASE("row counts for shape constraints") {
    ConstraintSystem cs(5);
    add_monotone(cs, true, {1, 3});
    CHECK(cs.rows().size() == 2);
    add_monotone(cs, true, {3, 3});  // empty range: no-op
    CHECK(cs.rows().size() == 2);
    add_convex(cs, true, {1, 5});
    CHECK(cs.rows().size() == 2 + 3);
    add_convex(cs, false, {1, 3});
    CHECK(cs.rows().back().rel == Relation::GreaterEq);
    CHECK(cs.rows().back().coeffs[0].second == -1.0);  // concave flips signs
}

TEST_CASE("membership equivalence with the explicit rows") {
    NormalSampler z(55);
    std::vector<double> y(8);
    for (double& v : y) v = z();
    const DesignSample s(y);
    const RegionSpec spec = make_region(s, 0.8, 3.0, IntervalFamily::all(8));
    const ConstraintSystem cs = build_region_constraints(s, spec);
    int both = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> g(8);
        for (double& v : g) v = z() * (trial % 3 == 0 ? 0.3 : 1.2);
        const bool by_rows = satisfies(cs, g, 0.0);
        const bool by_stat = is_member(s, g, spec);
        CHECK(by_rows == by_stat);
        both += by_rows;
    }
    CHECK(both > 0);  // the probe actually exercises members and non-members
    CHECK(both < 200);
}

TEST_CASE("solve agrees with the independent re-encoding") {
    std::mt19937_64 eng(404);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 3 + static_cast<int>(eng() % 5);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = nd(eng);
        const DesignSample s(y);
        const RegionSpec spec = make_region(s, 1.0, 3.0, IntervalFamily::all(n));
        ConstraintSystem cs = build_region_constraints(s, spec);
        if (trial % 2 == 0) add_monotone(cs, true, {1, n});
        std::vector<std::pair<int, double>> obj;
        for (int j = 0; j < n; ++j) obj.emplace_back(j, nd(eng));
        const LpResult mine = solve(cs, obj, Sense::Minimize);
        const lp_oracle::Solution ref = lp_oracle::solve(reencode(cs, obj));
        REQUIRE(mine.status == LpStatus::Optimal);
        REQUIRE(ref.feasible);
        REQUIRE(ref.bounded);
        CHECK(mine.objective == doctest::Approx(ref.objective).epsilon(1e-7));
    }
}

TEST_CASE("solve is bit-deterministic") {
    const DesignSample s({0.3, -0.4, 1.1, 0.0, -2.0});
    const RegionSpec spec = make_region(s, 1.0, 3.0, IntervalFamily::all(5));
    ConstraintSystem cs = build_region_constraints(s, spec);
    add_monotone(cs, true, {1, 5});
    const std::vector<std::pair<int, double>> obj{{0, 1.0}, {2, -0.5}};
    const LpResult a = solve(cs, obj, Sense::Minimize);
    const LpResult b = solve(cs, obj, Sense::Minimize);
    CHECK(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
    CHECK(a.solution == b.solution);
}

TEST_CASE("weak duality against hit-and-run samples") {
    // Sample the region polytope uniformly-ish starting from y (which is
    // strictly interior) and verify no sample beats the LP optimum.
    NormalSampler z(808);
    for (int inst = 0; inst < 4; ++inst) {
        const int n = 3 + inst;
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = z();
        const DesignSample s(y);
        const RegionSpec spec = make_region(s, 1.0, 3.0, IntervalFamily::all(n));
        const ConstraintSystem cs = build_region_constraints(s, spec);
        std::vector<std::pair<int, double>> obj;
        for (int j = 0; j < n; ++j) obj.emplace_back(j, z());
        const LpResult r = solve(cs, obj, Sense::Minimize);
        REQUIRE(r.status == LpStatus::Optimal);

        std::vector<double> x(y);
        std::mt19937_64 eng(1234 + static_cast<unsigned>(inst));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        auto objective_at = [&](const std::vector<double>& v) {
            double val = 0.0;
            for (const auto& [j, c] : obj) val += c * v[static_cast<std::size_t>(j)];
            return val;
        };
        for (int step = 0; step < 1000; ++step) {
            std::vector<double> dir(static_cast<std::size_t>(n));
            double norm = 0.0;
            for (double& d : dir) {
                d = z();
                norm += d * d;
            }
            norm = std::sqrt(norm);
            for (double& d : dir) d /= norm;
            // chord of the polytope through x along dir
            double tlo = -1e18, thi = 1e18;
            for (const SparseRow& row : cs.rows()) {
                double a = 0.0, b = row.rhs;
                for (const auto& [var, coef] : row.coeffs) {
                    a += coef * dir[static_cast<std::size_t>(var)];
                    b -= coef * x[static_cast<std::size_t>(var)];
                }
                if (std::abs(a) < 1e-14) continue;
                const double t = b / a;
                if (a > 0)
                    thi = std::min(thi, t);
                else
                    tlo = std::max(tlo, t);
            }
            if (tlo > thi) continue;
            const double t = tlo + uni(eng) * (thi - tlo);
            for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] += t * dir[static_cast<std::size_t>(j)];
            CHECK(objective_at(x) >= r.objective - 1e-9);
        }
    }
}

TEST_CASE("region LP with generated rows matches the full explicit system") {
    NormalSampler z(99);
    for (int inst = 0; inst < 6; ++inst) {
        const int n = 4 + inst;
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = z();
        const DesignSample s(y);
        const RegionSpec spec = make_region(s, 1.0, 3.0, IntervalFamily::all(n));
        for (int target = 0; target < n; target += 2) {
            RegionLp lp(s, spec);
            lp.set_objective({{target, 1.0}}, Sense::Minimize);
            const LpResult lazy = lp.solve();
            const ConstraintSystem full = build_region_constraints(s, spec);
            const LpResult exact = solve(full, std::vector<std::pair<int, double>>{{target, 1.0}},
                                         Sense::Minimize);
            REQUIRE(lazy.status == LpStatus::Optimal);
            REQUIRE(exact.status == LpStatus::Optimal);
            CHECK(lazy.objective == doctest::Approx(exact.objective).epsilon(1e-7));
            // the lazily solved point really is a member
            std::vector<double> g(lazy.solution.begin(), lazy.solution.begin() + n);
            CHECK(is_member(s, g, spec));
        }
    }
}

TEST_CASE("debug dump format") {
    ConstraintSystem cs(2);
    cs.add_row({{{0, 1.0}, {1, -2.0}}, Relation::LessEq, 0.25, "demo"});
    std::ostringstream os;
    cs.dump(os);
    CHECK(os.str() == "1*g1 -2*g2 <= 0.25  # demo\n");
}

TEST_CASE("constraint system validation") {
    ConstraintSystem cs(2);
    CHECK_THROWS_AS(cs.add_row({{{5, 1.0}}, Relation::LessEq, 0.0, ""}), std::invalid_argument);
    CHECK_THROWS_AS(
        cs.add_row({{{0, std::numeric_limits<double>::infinity()}}, Relation::LessEq, 0.0, ""}),
        std::invalid_argument);
    CHECK_THROWS_AS(cs.set_bounds(0, 2.0, 1.0), std::invalid_argument);
    const int aux = cs.add_variable("slack_u", 0.0, 10.0);
    CHECK(aux == 2);
    CHECK(cs.name(aux) == "slack_u");
}
