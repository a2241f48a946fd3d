#include "mscale/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace mscale {

DesignSample::DesignSample(std::vector<double> y) : y_(std::move(y)) {
    if (y_.empty())
        throw std::invalid_argument("DesignSample: need at least one observation");
    for (double v : y_)
        if (!std::isfinite(v))
            throw std::invalid_argument("DesignSample: non-finite observation");
}

TestFunction::TestFunction(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

TestFunction TestFunction::constant(double c) { return {Kind::Constant, c, 0.0}; }

TestFunction TestFunction::box(double center, double halfwidth) {
    if (halfwidth < 0.0) throw std::invalid_argument("box: halfwidth must be >= 0");
    return {Kind::Box, center, halfwidth};
}

TestFunction TestFunction::sine(double omega) { return {Kind::Sine, omega, 0.0}; }

TestFunction TestFunction::exponential(double rate) { return {Kind::Exponential, rate, 0.0}; }

TestFunction TestFunction::doppler() { return {Kind::Doppler, 0.0, 0.0}; }

TestFunction TestFunction::table(std::vector<double> knots_t, std::vector<double> knots_v) {
    if (knots_t.size() != knots_v.size() || knots_t.empty())
        throw std::invalid_argument("table: need matching, nonempty knot vectors");
    for (std::size_t i = 1; i < knots_t.size(); ++i)
        if (!(knots_t[i] > knots_t[i - 1]))
            throw std::invalid_argument("table: knots must be strictly increasing");
    TestFunction f(Kind::Table, 0.0, 0.0);
    f.tt_ = std::move(knots_t);
    f.tv_ = std::move(knots_v);
    return f;
}

namespace {

// Accepts "0.5", "4pi", "-2pi", "pi".
double parse_number(const std::string& tok) {
    std::size_t pi = tok.find("pi");
    double mult = 1.0;
    std::string head = tok;
    if (pi != std::string::npos) {
        if (pi + 2 != tok.size()) throw std::invalid_argument("bad numeric token: " + tok);
        mult = 3.14159265358979323846;
        head = tok.substr(0, pi);
        if (head.empty() || head == "-" || head == "+") head += "1";
    }
    std::size_t used = 0;
    double v = std::stod(head, &used);
    if (used != head.size()) throw std::invalid_argument("bad numeric token: " + tok);
    return v * mult;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t p = s.find(sep, start);
        out.push_back(s.substr(start, p == std::string::npos ? p : p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return out;
}

}  // namespace

TestFunction TestFunction::parse(const std::string& spec) {
    const auto parts = split(spec, ':');
    const std::string& name = parts[0];
    const auto arity = parts.size() - 1;
    try {
        if (name == "constant" && arity == 1) return constant(parse_number(parts[1]));
        if (name == "box" && arity == 2) return box(parse_number(parts[1]), parse_number(parts[2]));
        if ((name == "sine" || name == "sin") && arity == 1) return sine(parse_number(parts[1]));
        if ((name == "exp" || name == "exponential") && arity == 1)
            return exponential(parse_number(parts[1]));
        if (name == "doppler" && arity == 0) return doppler();
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse test function '" + spec + "'");
    }
    throw std::invalid_argument("cannot parse test function '" + spec + "'");
}

double TestFunction::operator()(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return a_;
        case Kind::Box:
            // Tolerance keeps grid points such as 49/100 inside box(1/2,0.01)
            // despite the binary representation of the decimal boundary.
            return std::abs(t - a_) <= b_ + 1e-12 ? 1.0 : 0.0;
        case Kind::Sine:
            return std::sin(a_ * t);
        case Kind::Exponential:
            return std::exp(a_ * t);
        case Kind::Doppler: {
            const double s = t * (1.0 - t);
            return (s <= 0.0) ? 0.0
                              : std::sqrt(s) * std::sin(2.0 * 3.14159265358979323846 * 1.05 / (t + 0.05));
        }
        case Kind::Table: {
            if (t <= tt_.front()) return tv_.front();
            if (t >= tt_.back()) return tv_.back();
            auto it = std::upper_bound(tt_.begin(), tt_.end(), t);
            std::size_t k = static_cast<std::size_t>(it - tt_.begin());
            const double w = (t - tt_[k - 1]) / (tt_[k] - tt_[k - 1]);
            return tv_[k - 1] + w * (tv_[k] - tv_[k - 1]);
        }
    }
    return 0.0;
}

double TestFunction::derivative(double t) const {
    constexpr double kPi = 3.14159265358979323846;
    switch (kind_) {
        case Kind::Constant:
            return 0.0;
        case Kind::Box:
            return 0.0;  // zero away from the jumps, which carry no derivative
        case Kind::Sine:
            return a_ * std::cos(a_ * t);
        case Kind::Exponential:
            return a_ * std::exp(a_ * t);
        case Kind::Doppler: {
            const double s = t * (1.0 - t);
            if (s <= 0.0) return 0.0;
            const double root = std::sqrt(s);
            const double theta = 2.0 * kPi * 1.05 / (t + 0.05);
            const double dtheta = -2.0 * kPi * 1.05 / ((t + 0.05) * (t + 0.05));
            return (1.0 - 2.0 * t) / (2.0 * root) * std::sin(theta) + root * std::cos(theta) * dtheta;
        }
        case Kind::Table: {
            const double h = 1e-5;
            return ((*this)(t + h) - (*this)(t - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

bool TestFunction::has_analytic_derivative() const { return kind_ != Kind::Table; }

std::string TestFunction::describe() const {
    switch (kind_) {
        case Kind::Constant:
            return "constant:" + std::to_string(a_);
        case Kind::Box:
            return "box:" + std::to_string(a_) + ":" + std::to_string(b_);
        case Kind::Sine:
            return "sine:" + std::to_string(a_);
        case Kind::Exponential:
            return "exp:" + std::to_string(a_);
        case Kind::Doppler:
            return "doppler";
        case Kind::Table:
            return "table[" + std::to_string(tt_.size()) + "]";
    }
    return "?";
}

// Wichura's algorithm AS 241, PPND16: maximal relative error about 1e-16,
// far below the 1e-10 needed for the scale-estimate constant.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) *
                        r +
                    4.5921953931549871457e+4) *
                       r +
                   1.3731693765509461125e+4) *
                      r +
                  1.9715909503065514427e+3) *
                     r +
                 1.3314166789178437745e+2) *
                    r +
                3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) *
                        r +
                    2.1213794301586595867e+4) *
                       r +
                   5.3941960214247511077e+3) *
                      r +
                  6.8718700749205790830e+2) *
                     r +
                 4.2313330701600911252e+1) *
                    r +
                1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) *
                       r +
                   1.27045825245236838258e+0) *
                      r +
                  3.64784832476320460504e+0) *
                     r +
                 5.76949722146069140550e+0) *
                    r +
                4.63033784615654529590e+0) *
                   r +
               1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) *
                       r +
                   1.48103976427480074590e-1) *
                      r +
                  6.89767334985100004550e-1) *
                     r +
                 1.67638483018380384940e+0) *
                    r +
                2.05319162663775882187e+0) *
                   r +
               1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) *
                       r +
                   2.65321895265761230930e-2) *
                      r +
                  2.96560571828504891230e-1) *
                     r +
                 1.78482653991729133580e+0) *
                    r +
                5.46378491116411436990e+0) *
                   r +
               6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) *
                       r +
                   7.86869131145613259100e-4) *
                      r +
                  1.48753612908506148525e-2) *
                     r +
                 1.36929880922735805310e-1) *
                    r +
                5.99832206555887937690e-1) *
                   r +
              1.0);
    }
    return (q < 0.0) ? -val : val;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 applied to seed xor a stride of the golden-ratio constant.
    std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

DesignSample generate_data(const TestFunction& f, int n, double sigma, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_data: n must be >= 1");
    if (sigma < 0.0) throw std::invalid_argument("generate_data: sigma must be >= 0");
    NormalSampler z(seed);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const double noise = z();  // drawn even when sigma == 0 to keep streams aligned
        y[static_cast<std::size_t>(i - 1)] = f(static_cast<double>(i) / n) + sigma * noise;
    }
    return DesignSample(std::move(y));
}

double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median: empty input");
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + m);
    return 0.5 * (lo + hi);
}

double estimate_sigma(const DesignSample& s) {
    if (s.n() < 2) throw std::invalid_argument("insufficient data for scale estimate");
    std::vector<double> d(static_cast<std::size_t>(s.n() - 1));
    for (int i = 2; i <= s.n(); ++i)
        d[static_cast<std::size_t>(i - 2)] = std::abs(s.y(i) - s.y(i - 1));
    return median(std::move(d)) / (kNormalQuantile075 * std::sqrt(2.0));
}

}  // namespace mscale
