#ifndef MSCALE_GRID_HPP
#define MSCALE_GRID_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mscale {

/// Observations on the equispaced design grid t_i = i/n, i = 1..n.
/// The design points are implicit and never stored. Immutable after
/// construction.
class DesignSample {
public:
    /// Throws std::invalid_argument if y is empty or contains non-finite
    /// entries.
    explicit DesignSample(std::vector<double> y);

    int n() const { return static_cast<int>(y_.size()); }
    const std::vector<double>& values() const { return y_; }
    /// 1-based access, y(i) is the observation at t_i = i/n.
    double y(int i) const { return y_[static_cast<std::size_t>(i - 1)]; }
    double t(int i) const { return static_cast<double>(i) / n(); }

private:
    std::vector<double> y_;
};

/// A catalogue of test signals on [0,1] plus user-supplied tables.
class TestFunction {
public:
    static TestFunction constant(double c);
    /// Indicator of |t - center| <= halfwidth (closed, with a 1e-12 guard
    /// so grid points landing on the decimal boundary are included).
    static TestFunction box(double center, double halfwidth);
    /// sin(omega * t); sine(4*pi) is the usual two-period signal.
    static TestFunction sine(double omega);
    /// exp(rate * t).
    static TestFunction exponential(double rate);
    /// Donoho-Johnstone doppler: sqrt(t(1-t)) * sin(2*pi*1.05/(t+0.05)).
    static TestFunction doppler();
    /// Piecewise-linear interpolation of (t_k, v_k) knots, constant outside.
    static TestFunction table(std::vector<double> knots_t, std::vector<double> knots_v);

    /// Parses "constant:0", "box:0.5:0.01", "sine:4pi", "exp:5", "doppler".
    /// Numeric tokens may carry a trailing "pi" multiplier. Throws
    /// std::invalid_argument on anything else.
    static TestFunction parse(const std::string& spec);

    double operator()(double t) const;

    /// Analytic first derivative where one exists (all built-ins; for box
    /// the derivative is 0 away from the jumps). Tables fall back to a
    /// central difference with step 1e-5.
    double derivative(double t) const;
    bool has_analytic_derivative() const;

    std::string describe() const;

private:
    enum class Kind { Constant, Box, Sine, Exponential, Doppler, Table };
    TestFunction(Kind kind, double a, double b);
    Kind kind_;
    double a_ = 0.0, b_ = 0.0;
    std::vector<double> tt_, tv_;
};

/// Inverse of the standard normal distribution function, accurate to
/// full double precision (Wichura's PPND16). Throws on p outside (0,1).
double normal_quantile(double p);

/// Phi^{-1}(0.75), used by the default scale estimate.
inline constexpr double kNormalQuantile075 = 0.6744897501960817;

/// Deterministic standard-normal stream. mt19937_64 (fully specified by
/// the standard) drives the inverse CDF, so a given seed reproduces the
/// identical sample bytes on every platform.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : eng_(seed) {}
    double operator()() {
        // (x >> 11) + 0.5 maps to the open interval (0, 2^53), so u is
        // strictly inside (0,1) and the quantile is always finite.
        const double u = (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
        return normal_quantile(u);
    }

private:
    std::mt19937_64 eng_;
};

/// Seed for replication `index` of a run keyed by `seed` (splitmix64 mix).
/// Replications drawing from substream_seed(seed, i) are independent of
/// scheduling order.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// y[i] = f(i/n) + sigma * z_i with z_i i.i.d. standard normal from the
/// seeded stream. Identical (f, n, sigma, seed) give byte-identical output.
DesignSample generate_data(const TestFunction& f, int n, double sigma, std::uint64_t seed);

/// Default noise-scale estimate: median of |successive differences|
/// divided by Phi^{-1}(0.75)*sqrt(2). The median of an even count is the
/// midpoint of the two central order statistics. Requires n >= 2.
double estimate_sigma(const DesignSample& s);

/// Median with the midpoint convention above; used by estimate_sigma and
/// exposed for reuse. Throws on empty input.
double median(std::vector<double> v);

}  // namespace mscale

#endif
