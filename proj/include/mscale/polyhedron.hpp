#ifndef MSCALE_POLYHEDRON_HPP
#define MSCALE_POLYHEDRON_HPP

#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mscale/grid.hpp"
#include "mscale/multires.hpp"

namespace mscale {

/// Raised when the LP engine cannot certify an answer (iteration limit,
/// unusable pivot, failed post-solve validation).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Relation { LessEq, GreaterEq, Equal };
enum class Sense { Minimize, Maximize };

struct SparseRow {
    std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
    std::string label;  // optional, shows up in dumps and infeasibility reports
};

/// Sparse linear inequalities over n primary variables g_1..g_n (the
/// function values) plus named auxiliaries, with per-variable bounds.
class ConstraintSystem {
public:
    explicit ConstraintSystem(int n_primary);

    int n_vars() const { return static_cast<int>(names_.size()); }
    int n_primary() const { return n_primary_; }

    /// Appends a variable; returns its index. Bounds may be +-infinity.
    int add_variable(std::string name, double lower, double upper);
    void set_bounds(int var, double lower, double upper);
    double lower(int var) const { return lower_[static_cast<std::size_t>(var)]; }
    double upper(int var) const { return upper_[static_cast<std::size_t>(var)]; }
    const std::string& name(int var) const { return names_[static_cast<std::size_t>(var)]; }

    /// Validates indices and finiteness of coefficients.
    void add_row(SparseRow row);
    const std::vector<SparseRow>& rows() const { return rows_; }

    /// Plain-text dump, one row per line: `coef*var coef*var ... REL rhs`
    /// with an optional trailing `# label`.
    void dump(std::ostream& os) const;

private:
    int n_primary_;
    std::vector<std::string> names_;
    std::vector<double> lower_, upper_;
    std::vector<SparseRow> rows_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> solution;        // size n_vars when Optimal
    std::vector<int> infeasible_rows;    // rows left violated by phase one
};

/// The region as explicit one-sided rows: for every interval I in the
/// family, +-sum_{i in I} g_i / sqrt(|I|) <= +-sum_{i in I} y_i / sqrt(|I|)
/// + threshold (2 |family| rows in total). Primary variables are free;
/// the feasible set equals {g : is_member(s, g, spec)}.
ConstraintSystem build_region_constraints(const DesignSample& s, const RegionSpec& spec);

/// Appends g_i <= g_{i+1} (nondecreasing) or g_i >= g_{i+1} over the range.
/// A range of size <= 1 is a no-op.
void add_monotone(ConstraintSystem& cs, bool nondecreasing, IndexInterval range);

/// Appends second-difference rows g_{i+1} - 2 g_i + g_{i-1} >= 0 (convex,
/// reversed for concave) for interior points of the range.
void add_convex(ConstraintSystem& cs, bool convex, IndexInterval range);

/// Bounded-variable primal two-phase simplex on a dense tableau. Dantzig
/// pricing with a permanent switch to Bland's rule after a stall, so it
/// terminates. Deterministic: identical inputs give bit-identical output.
/// Feasibility is validated to 1e-7 relative to row scale before a result
/// is declared optimal; infeasibility is declared when the phase-one
/// objective exceeds 1e-6. Throws numeric_error instead of returning a
/// doubtful answer.
LpResult solve(const ConstraintSystem& cs,
               std::span<const std::pair<int, double>> objective, Sense sense);

/// LP over the confidence region with lazily generated interval rows.
///
/// Variables g_1..g_n carry the singleton bounds [y_i - T, y_i + T];
/// auxiliary variables and rows (shape, pins, derivative splits) are added
/// by the caller. Only interval rows that the current optimum violates are
/// materialised (a capped batch of the worst offenders per round), which
/// keeps the tableau small; the final point is checked against every
/// interval of the family. Thresholds are shrunk by a 1e-9 relative margin
/// so returned vertices pass the exact membership test. Cuts persist
/// across set_objective/solve calls but rows left slack by the previous
/// optimum are dropped before the next objective.
class RegionLp {
public:
    RegionLp(const DesignSample& s, const RegionSpec& spec);

    int add_variable(std::string name, double lb, double ub);
    void add_row(SparseRow row);
    void set_objective(std::vector<std::pair<int, double>> objective, Sense sense);

    LpResult solve();

    /// Base system: the caller's variables and rows, without generated cuts.
    const ConstraintSystem& system() const { return cs_; }
    ConstraintSystem& system() { return cs_; }
    /// System of the most recent solve, including generated interval rows
    /// (row indices in LpResult::infeasible_rows refer to this one).
    const ConstraintSystem& solved_system() const { return work_; }
    double lp_threshold() const { return threshold_lp_; }

private:
    const DesignSample& s_;
    const RegionSpec& spec_;
    ConstraintSystem cs_;
    ConstraintSystem work_;
    std::vector<std::pair<int, double>> objective_;
    Sense sense_ = Sense::Minimize;
    double threshold_lp_ = 0.0;
    std::vector<std::size_t> pool_;  // family indices of materialised cuts
    std::vector<double> prefix_y_;
    std::vector<double> last_g_;  // g block of the previous optimum

    double interval_stat(std::size_t family_index, const std::vector<double>& g) const;
    void append_interval_rows(ConstraintSystem& cs, std::size_t family_index) const;
};

}  // namespace mscale

#endif
