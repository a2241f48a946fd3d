// Command-line front end; talks to the library exclusively through the C
// interface in mscale.h. Exit codes: 0 success, 1 usage error, 2 iteration
// budget exhausted, 3 infeasible constraints, 4 numerical failure.
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "mscale.h"

namespace {

using json = nlohmann::json;

int fail(mscale_status st) {
    std::cerr << "error: " << mscale_last_error() << "\n";
    return st;
}

struct FamilyHandle {
    mscale_family* f = nullptr;
    ~FamilyHandle() { mscale_family_free(f); }
};
struct SampleHandle {
    mscale_sample* s = nullptr;
    ~SampleHandle() { mscale_sample_free(s); }
};
struct FitHandle {
    mscale_fit* f = nullptr;
    ~FitHandle() { mscale_fit_free(f); }
};
struct ShapeHandle {
    mscale_shape* s = nullptr;
    ~ShapeHandle() { mscale_shape_free(s); }
};

std::vector<double> grid_points(int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) t[static_cast<std::size_t>(i - 1)] = static_cast<double>(i) / n;
    return t;
}

/// "auto" or a number; resolves against the sample and leaves a metadata note.
struct SigmaChoice {
    std::string raw = "auto";

    int resolve(const mscale_sample* s, double& out, std::string& note) const {
        if (raw == "auto") {
            const mscale_status st = mscale_estimate_sigma(s, &out);
            if (st != MSCALE_OK) return fail(st);
            note = "# sigma_n = " + csvio::format_value(out) + " (estimated)";
            return 0;
        }
        try {
            out = std::stod(raw);
        } catch (const std::exception&) {
            std::cerr << "error: --sigma expects a number or 'auto'\n";
            return MSCALE_ERR_USAGE;
        }
        if (out < 0.0) {
            std::cerr << "error: sigma must be >= 0\n";
            return MSCALE_ERR_USAGE;
        }
        note = "# sigma = " + csvio::format_value(out) + " (fixed)";
        return 0;
    }
};

int load_observations(const std::string& path, SampleHandle& sample, int& n) {
    std::vector<double> y;
    try {
        y = csvio::read_observations(path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return MSCALE_ERR_USAGE;
    }
    n = static_cast<int>(y.size());
    const mscale_status st = mscale_sample_create(y.data(), n, &sample.s);
    return st == MSCALE_OK ? 0 : fail(st);
}

int load_shape_file(const std::string& path, ShapeHandle& out) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open shape file '" << path << "'\n";
        return MSCALE_ERR_USAGE;
    }
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        std::cerr << "error: bad shape file: " << e.what() << "\n";
        return MSCALE_ERR_USAGE;
    }
    mscale_status st = mscale_shape_create(&out.s);
    if (st != MSCALE_OK) return fail(st);
    try {
        for (const auto& p : doc.value("monotone", json::array())) {
            st = mscale_shape_monotone(out.s, p.at("lo"), p.at("hi"),
                                       p.value("direction", "nondecreasing") == "nondecreasing");
            if (st != MSCALE_OK) return fail(st);
        }
        for (const auto& p : doc.value("convex", json::array())) {
            st = mscale_shape_convex(out.s, p.at("lo"), p.at("hi"),
                                     p.value("sense", "convex") == "convex");
            if (st != MSCALE_OK) return fail(st);
        }
        for (const auto& p : doc.value("pins", json::array())) {
            st = mscale_shape_pin(out.s, p.at("index"), p.at("value"));
            if (st != MSCALE_OK) return fail(st);
        }
        for (const auto& p : doc.value("extreme_anchors", json::array())) {
            st = mscale_shape_extreme_anchor(out.s, p.at("lo"), p.at("hi"));
            if (st != MSCALE_OK) return fail(st);
        }
        for (const auto& p : doc.value("inflection_anchors", json::array())) {
            st = mscale_shape_inflection_anchor(out.s, p.at("lo"), p.at("hi"));
            if (st != MSCALE_OK) return fail(st);
        }
        if (doc.contains("first_rising")) {
            st = mscale_shape_first_rising(out.s, doc["first_rising"].get<bool>() ? 1 : 0);
            if (st != MSCALE_OK) return fail(st);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: bad shape file: " << e.what() << "\n";
        return MSCALE_ERR_USAGE;
    }
    return 0;
}

bool parse_interval(const std::string& text, mscale_interval& iv) {
    const auto a = text.find(':');
    if (a == std::string::npos) return false;
    const auto b = text.find(':', a + 1);
    try {
        iv.lo = std::stod(text.substr(0, a));
        iv.hi = std::stod(text.substr(a + 1, b == std::string::npos ? b : b - a - 1));
    } catch (const std::exception&) {
        return false;
    }
    const std::string mode = b == std::string::npos ? "cc" : text.substr(b + 1);
    if (mode.size() != 2 || (mode[0] != 'c' && mode[0] != 'o') ||
        (mode[1] != 'c' && mode[1] != 'o'))
        return false;
    iv.lo_closed = mode[0] == 'c';
    iv.hi_closed = mode[1] == 'c';
    return true;
}

std::string show_interval(const mscale_interval& iv) {
    std::string s(iv.lo_closed ? "[" : "(");
    s += csvio::format_value(iv.lo) + "," + csvio::format_value(iv.hi);
    s += iv.hi_closed ? "]" : ")";
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "multiscale confidence regions, shape-regularized fits and honest confidence "
        "bands on the unit interval"};
    app.require_subcommand(1);

    // ---- gen-data ----
    std::string gd_f = "sine:4pi", gd_out = "data.csv";
    int gd_n = 100;
    double gd_sigma = 1.0;
    std::uint64_t gd_seed = 1;
    auto* gen = app.add_subcommand("gen-data", "sample a test function with Gaussian noise");
    gen->add_option("--f", gd_f, "test function, e.g. box:0.5:0.01, sine:4pi, exp:5, doppler")
        ->capture_default_str();
    gen->add_option("--n", gd_n, "sample size")->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--sigma", gd_sigma, "noise level")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    gen->add_option("--seed", gd_seed, "random seed")->capture_default_str();
    gen->add_option("--output", gd_out, "output CSV (t,y)")->capture_default_str();

    // ---- shared fit options ----
    struct FitOpts {
        std::string input, output = "fit.csv", sigma = "auto", family = "dyadic:2";
        double tau = 3.0;
        int max_iter = 100;
        std::string objective = "tv", shape_file;
        int order = 0;
    } fo;

    auto* taut = app.add_subcommand("tautstring", "taut-string fit with tube squeezing");
    taut->add_option("--input", fo.input, "input CSV: (y) or (t,y)")->required();
    taut->add_option("--sigma", fo.sigma, "noise level or 'auto'")->capture_default_str();
    taut->add_option("--tau", fo.tau, "multiscale constant")->capture_default_str();
    taut->add_option("--family", fo.family, "interval family: all | dyadic:LAMBDA")
        ->capture_default_str();
    taut->add_option("--max-iter", fo.max_iter, "tube-squeezing budget")->capture_default_str();
    taut->add_option("--output", fo.output, "output CSV (t,fit)")->capture_default_str();

    auto* minimize = app.add_subcommand("minimize", "smoothness-regularized fit inside the region");
    minimize->add_option("--objective", fo.objective, "tv | sup")
        ->check(CLI::IsMember({"tv", "sup"}))
        ->capture_default_str();
    minimize->add_option("--order", fo.order, "derivative order k")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    minimize->add_option("--input", fo.input, "input CSV")->required();
    minimize->add_option("--shape", fo.shape_file, "shape restrictions (JSON)");
    minimize->add_option("--sigma", fo.sigma, "noise level or 'auto'")->capture_default_str();
    minimize->add_option("--tau", fo.tau, "multiscale constant")->capture_default_str();
    minimize->add_option("--family", fo.family, "interval family")->capture_default_str();
    minimize->add_option("--output", fo.output, "output CSV (t,fit)")->capture_default_str();

    // ---- bands ----
    struct BandOpts {
        std::string input, output = "band.csv", sigma = "auto", family = "dyadic:2";
        std::string method = "monotone-superfast", shape_file;
        double tau = 3.0, theta = 0.0, K = 0.0;
        bool union_mode = false;
    } bo;
    auto* bands = app.add_subcommand("bands", "honest confidence bands at the design points");
    bands
        ->add_option("--method", bo.method,
                     "universal | monotone-lp | monotone-fast | monotone-superfast | convex-lp | "
                     "convex-fast | convex-superfast | piecewise | smooth-fast | smooth-lp")
        ->capture_default_str();
    bands->add_option("--input", bo.input, "input CSV")->required();
    bands->add_option("--theta", bo.theta,
                      "grid ratio (> 1); defaults to 2 for monotone, 1.5 otherwise");
    bands->add_option("--K", bo.K, "second-derivative bound for smooth-*");
    bands->add_option("--shape", bo.shape_file, "shape restrictions (JSON, piecewise)");
    bands->add_flag("--union", bo.union_mode, "union bands over the anchor intervals");
    bands->add_option("--sigma", bo.sigma, "noise level or 'auto'")->capture_default_str();
    bands->add_option("--tau", bo.tau, "multiscale constant")->capture_default_str();
    bands->add_option("--family", bo.family, "interval family")->capture_default_str();
    bands->add_option("--output", bo.output, "output CSV (t,lb,ub)")->capture_default_str();

    // ---- min-k ----
    struct MinKOpts {
        std::string input, sigma = "auto";
        double tau = 3.0, theta = 1.5;
    } mk;
    auto* mink = app.add_subcommand(
        "min-k", "smallest second-derivative bound with a nonempty fast band");
    mink->add_option("--input", mk.input, "input CSV")->required();
    mink->add_option("--sigma", mk.sigma, "noise level or 'auto'")->capture_default_str();
    mink->add_option("--tau", mk.tau, "multiscale constant")->capture_default_str();
    mink->add_option("--theta", mk.theta, "grid ratio")->capture_default_str();

    // ---- calibrate-tau ----
    struct CalOpts {
        int n = 500, sims = 10000;
        std::string family = "dyadic:2";
        double alpha = 0.95;
        std::uint64_t seed = 1;
    } co;
    auto* cal = app.add_subcommand("calibrate-tau", "Monte Carlo calibration of tau");
    cal->add_option("--n", co.n, "sample size")->check(CLI::PositiveNumber)->capture_default_str();
    cal->add_option("--family", co.family, "interval family: all | dyadic:LAMBDA")
        ->capture_default_str();
    cal->add_option("--alpha", co.alpha, "target coverage")->capture_default_str();
    cal->add_option("--sims", co.sims, "simulation count")->capture_default_str();
    cal->add_option("--seed", co.seed, "random seed")->capture_default_str();

    // ---- detect ----
    struct DetectOpts {
        std::string f = "box:0.5:0.01";
        double sigma = 1.0, tau = 3.0, cq = 2.72;
        int nmax = 100000, n = 0, k = 0;
        std::string il, ic, ir;
        bool numeric_deriv = false;
    } det;
    auto* detect = app.add_subcommand("detect", "deterministic detectability conditions");
    detect->require_subcommand(1);
    auto* peak = detect->add_subcommand("peak", "local-maximum detectability");
    auto* infl = detect->add_subcommand("inflection", "first-derivative peak detectability");
    for (auto* sub : {peak, infl}) {
        sub->add_option("--f", det.f, "test function")->capture_default_str();
        sub->add_option("--sigma", det.sigma, "noise level")->capture_default_str();
        sub->add_option("--tau", det.tau, "multiscale constant")->capture_default_str();
        sub->add_option("--cq", det.cq, "noise-event quantile constant")->capture_default_str();
        sub->add_option("--il", det.il, "left interval lo:hi[:cc|co|oc|oo]");
        sub->add_option("--ic", det.ic, "centre interval");
        sub->add_option("--ir", det.ir, "right interval");
    }
    peak->add_option("--nmax", det.nmax, "search bound for the minimal n")->capture_default_str();
    peak->add_option("--n", det.n, "evaluate the condition at this n only");
    infl->add_option("--n", det.n, "sample size")->required();
    infl->add_option("--k", det.k, "centre half-width in grid steps")->required();
    infl->add_flag("--numeric-deriv", det.numeric_deriv, "use central differences for f'");

    // ---- simulate-coverage ----
    struct SimOpts {
        std::string f = "sine:4pi", family = "dyadic:2", method = "region";
        int n = 500, reps = 1000;
        double sigma = 0.2, tau = 3.0, theta = 0.0, K = 0.0;
        bool sigma_auto = false;
        std::uint64_t seed = 1;
    } sim;
    auto* scov = app.add_subcommand("simulate-coverage", "empirical coverage of a method");
    scov->add_option("--f", sim.f, "test function")->capture_default_str();
    scov->add_option("--n", sim.n, "sample size")->check(CLI::PositiveNumber)
        ->capture_default_str();
    scov->add_option("--sigma", sim.sigma, "data noise level")->capture_default_str();
    scov->add_flag("--sigma-auto", sim.sigma_auto, "re-estimate sigma per replication");
    scov->add_option("--tau", sim.tau, "multiscale constant")->capture_default_str();
    scov->add_option("--family", sim.family, "interval family")->capture_default_str();
    scov->add_option("--method", sim.method, "region or a band method")->capture_default_str();
    scov->add_option("--theta", sim.theta, "grid ratio for superfast methods");
    scov->add_option("--K", sim.K, "smoothness bound for smooth-*");
    scov->add_option("--reps", sim.reps, "replications")->check(CLI::PositiveNumber)
        ->capture_default_str();
    scov->add_option("--seed", sim.seed, "random seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    auto default_theta = [](const std::string& method, double theta) {
        if (theta > 0.0) return theta;
        return method.rfind("monotone", 0) == 0 ? 2.0 : 1.5;
    };

    if (gen->parsed()) {
        std::printf("# gen-data f=%s n=%d sigma=%s seed=%" PRIu64 " output=%s\n", gd_f.c_str(),
                    gd_n, csvio::format_value(gd_sigma).c_str(), gd_seed, gd_out.c_str());
        SampleHandle sample;
        const mscale_status st =
            mscale_sample_generate(gd_f.c_str(), gd_n, gd_sigma, gd_seed, &sample.s);
        if (st != MSCALE_OK) return fail(st);
        std::vector<double> y(static_cast<std::size_t>(gd_n));
        mscale_sample_values(sample.s, y.data());
        const std::vector<double> t = grid_points(gd_n);
        try {
            csvio::write_table(gd_out, {"t", "y"}, {&t, &y});
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return MSCALE_ERR_USAGE;
        }
        return 0;
    }

    if (taut->parsed() || minimize->parsed()) {
        SampleHandle sample;
        int n = 0;
        if (int rc = load_observations(fo.input, sample, n)) return rc;
        double sigma;
        std::string note;
        if (int rc = SigmaChoice{fo.sigma}.resolve(sample.s, sigma, note)) return rc;
        FamilyHandle fam;
        mscale_status st = mscale_family_create(n, fo.family.c_str(), &fam.f);
        if (st != MSCALE_OK) return fail(st);

        std::vector<double> fit(static_cast<std::size_t>(n));
        std::vector<std::string> meta{note};
        int exit_code = 0;
        if (taut->parsed()) {
            std::printf("# tautstring input=%s n=%d sigma=%s tau=%s family=%s max_iter=%d\n",
                        fo.input.c_str(), n, fo.sigma.c_str(),
                        csvio::format_value(fo.tau).c_str(), fo.family.c_str(), fo.max_iter);
            FitHandle handle;
            st = mscale_taut_string_multires(sample.s, sigma, fo.tau, fam.f, fo.max_iter,
                                             &handle.f);
            if (st != MSCALE_OK && st != MSCALE_ERR_MAXITER) return fail(st);
            if (st == MSCALE_ERR_MAXITER) {
                std::cerr << "warning: " << mscale_last_error() << "\n";
                exit_code = MSCALE_ERR_MAXITER;
            }
            mscale_fit_values(handle.f, fit.data());
            meta.push_back("# iterations = " + std::to_string(mscale_fit_iterations(handle.f)));
            meta.push_back("# modality = " +
                           std::to_string(mscale_fit_extreme_count(handle.f)));
        } else {
            std::printf("# minimize objective=%s order=%d input=%s n=%d sigma=%s tau=%s "
                        "family=%s shape=%s\n",
                        fo.objective.c_str(), fo.order, fo.input.c_str(), n, fo.sigma.c_str(),
                        csvio::format_value(fo.tau).c_str(), fo.family.c_str(),
                        fo.shape_file.empty() ? "-" : fo.shape_file.c_str());
            ShapeHandle shape;
            if (!fo.shape_file.empty())
                if (int rc = load_shape_file(fo.shape_file, shape)) return rc;
            double objective = 0.0;
            st = mscale_minimize(sample.s, sigma, fo.tau, fam.f, fo.objective.c_str(), fo.order,
                                 shape.s, fit.data(), &objective);
            if (st != MSCALE_OK) return fail(st);
            meta.push_back("# objective " + fo.objective + "(k=" + std::to_string(fo.order) +
                           ") = " + csvio::format_value(objective));
        }
        const std::vector<double> t = grid_points(n);
        try {
            csvio::write_table(fo.output, {"t", "fit"}, {&t, &fit}, meta);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return MSCALE_ERR_USAGE;
        }
        return exit_code;
    }

    if (bands->parsed()) {
        SampleHandle sample;
        int n = 0;
        if (int rc = load_observations(bo.input, sample, n)) return rc;
        double sigma;
        std::string note;
        if (int rc = SigmaChoice{bo.sigma}.resolve(sample.s, sigma, note)) return rc;
        FamilyHandle fam;
        mscale_status st = mscale_family_create(n, bo.family.c_str(), &fam.f);
        if (st != MSCALE_OK) return fail(st);
        const double theta = default_theta(bo.method, bo.theta);
        std::printf("# bands method=%s input=%s n=%d sigma=%s tau=%s family=%s theta=%s K=%s "
                    "union=%d\n",
                    bo.method.c_str(), bo.input.c_str(), n, bo.sigma.c_str(),
                    csvio::format_value(bo.tau).c_str(), bo.family.c_str(),
                    csvio::format_value(theta).c_str(), csvio::format_value(bo.K).c_str(),
                    bo.union_mode ? 1 : 0);
        ShapeHandle shape;
        if (!bo.shape_file.empty())
            if (int rc = load_shape_file(bo.shape_file, shape)) return rc;
        std::vector<double> lb(static_cast<std::size_t>(n)), ub(static_cast<std::size_t>(n));
        int feasible = 0;
        st = mscale_band(sample.s, sigma, bo.tau, fam.f, bo.method.c_str(), theta, bo.K, shape.s,
                         bo.union_mode ? 1 : 0, lb.data(), ub.data(), &feasible);
        if (st != MSCALE_OK && st != MSCALE_ERR_INFEASIBLE) return fail(st);
        std::vector<std::string> meta{note, "# method = " + bo.method,
                                      "# feasible = " + std::to_string(feasible)};
        const std::vector<double> t = grid_points(n);
        try {
            csvio::write_table(bo.output, {"t", "lb", "ub"}, {&t, &lb, &ub}, meta);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return MSCALE_ERR_USAGE;
        }
        if (st == MSCALE_ERR_INFEASIBLE) {
            std::cerr << "infeasible: " << mscale_last_error() << "\n";
            return MSCALE_ERR_INFEASIBLE;
        }
        return 0;
    }

    if (mink->parsed()) {
        SampleHandle sample;
        int n = 0;
        if (int rc = load_observations(mk.input, sample, n)) return rc;
        double sigma;
        std::string note;
        if (int rc = SigmaChoice{mk.sigma}.resolve(sample.s, sigma, note)) return rc;
        std::printf("# min-k input=%s n=%d sigma=%s tau=%s theta=%s\n", mk.input.c_str(), n,
                    mk.sigma.c_str(), csvio::format_value(mk.tau).c_str(),
                    csvio::format_value(mk.theta).c_str());
        double kmin = 0.0;
        const mscale_status st =
            mscale_min_consistent_k(sample.s, sigma, mk.tau, mk.theta, &kmin);
        if (st != MSCALE_OK) return fail(st);
        std::printf("%s\n", note.c_str());
        std::printf("min_K = %s\n", csvio::format_value(kmin).c_str());
        return 0;
    }

    if (cal->parsed()) {
        std::printf("# calibrate-tau n=%d family=%s alpha=%s sims=%d seed=%" PRIu64 "\n", co.n,
                    co.family.c_str(), csvio::format_value(co.alpha).c_str(), co.sims, co.seed);
        FamilyHandle fam;
        mscale_status st = mscale_family_create(co.n, co.family.c_str(), &fam.f);
        if (st != MSCALE_OK) return fail(st);
        double tau_hat = 0.0, quantile = 0.0;
        st = mscale_calibrate_tau(co.n, fam.f, co.alpha, co.sims, co.seed, &tau_hat, &quantile);
        if (st != MSCALE_OK) return fail(st);
        std::printf("tau_hat = %s\nquantile = %s\n", csvio::format_value(tau_hat).c_str(),
                    csvio::format_value(quantile).c_str());
        return 0;
    }

    if (detect->parsed()) {
        const bool is_peak = peak->parsed();
        mscale_interval il{}, ic{}, ir{};
        const bool have_all = !det.il.empty() && !det.ic.empty() && !det.ir.empty();
        if (have_all) {
            if (!parse_interval(det.il, il) || !parse_interval(det.ic, ic) ||
                !parse_interval(det.ir, ir)) {
                std::cerr << "error: intervals must look like 0.48:0.49:co\n";
                return MSCALE_ERR_USAGE;
            }
        } else if (det.f.rfind("box:", 0) == 0) {
            // Reconstructed defaults for a box bump.
            double c = 0.0, h = 0.0;
            if (std::sscanf(det.f.c_str(), "box:%lf:%lf", &c, &h) != 2) {
                std::cerr << "error: cannot read box parameters from --f\n";
                return MSCALE_ERR_USAGE;
            }
            const mscale_status st = mscale_box_peak_intervals(c, h, &il, &ic, &ir);
            if (st != MSCALE_OK) return fail(st);
        } else {
            std::cerr << "error: --il/--ic/--ir are required unless --f is a box\n";
            return MSCALE_ERR_USAGE;
        }
        std::printf("# detect %s f=%s sigma=%s tau=%s cq=%s\n", is_peak ? "peak" : "inflection",
                    det.f.c_str(), csvio::format_value(det.sigma).c_str(),
                    csvio::format_value(det.tau).c_str(), csvio::format_value(det.cq).c_str());
        std::printf("# I_l=%s I_c=%s I_r=%s\n", show_interval(il).c_str(),
                    show_interval(ic).c_str(), show_interval(ir).c_str());
        if (is_peak) {
            if (det.n > 0) {
                int holds = 0;
                const mscale_status st = mscale_peak_condition(
                    det.f.c_str(), det.sigma, det.tau, det.cq, &il, &ic, &ir, det.n, &holds);
                if (st != MSCALE_OK) return fail(st);
                std::printf("condition(n=%d) = %s\n", det.n, holds ? "true" : "false");
                return 0;
            }
            int n_min = 0;
            mscale_status st = mscale_min_n_for_peak(det.f.c_str(), det.sigma, det.tau, det.cq,
                                                     &il, &ic, &ir, det.nmax, &n_min);
            if (st != MSCALE_OK) return fail(st);
            if (n_min == 0) {
                std::printf("no n <= %d satisfies the condition\n", det.nmax);
                return 0;
            }
            for (int probe : {n_min, n_min - 1}) {
                if (probe < 1) continue;
                int holds = 0;
                st = mscale_peak_condition(det.f.c_str(), det.sigma, det.tau, det.cq, &il, &ic,
                                           &ir, probe, &holds);
                std::printf("condition(n=%d) = %s\n", probe,
                            st == MSCALE_OK ? (holds ? "true" : "false") : "undefined");
            }
            std::printf("minimal n = %d\n", n_min);
            return 0;
        }
        int holds = 0;
        const mscale_status st = mscale_inflection_condition(
            det.f.c_str(), det.sigma, det.tau, det.cq, &il, &ic, &ir, det.k,
            det.numeric_deriv ? 0 : 1, det.n, &holds);
        if (st != MSCALE_OK) return fail(st);
        std::printf("condition(n=%d, k=%d) = %s\n", det.n, det.k, holds ? "true" : "false");
        return 0;
    }

    if (scov->parsed()) {
        const double theta = default_theta(sim.method, sim.theta);
        std::printf("# simulate-coverage f=%s n=%d sigma=%s sigma_auto=%d tau=%s family=%s "
                    "method=%s theta=%s K=%s reps=%d seed=%" PRIu64 "\n",
                    sim.f.c_str(), sim.n, csvio::format_value(sim.sigma).c_str(),
                    sim.sigma_auto ? 1 : 0, csvio::format_value(sim.tau).c_str(),
                    sim.family.c_str(), sim.method.c_str(), csvio::format_value(theta).c_str(),
                    csvio::format_value(sim.K).c_str(), sim.reps, sim.seed);
        FamilyHandle fam;
        mscale_status st = mscale_family_create(sim.n, sim.family.c_str(), &fam.f);
        if (st != MSCALE_OK) return fail(st);
        double coverage = 0.0, se = 0.0;
        st = mscale_simulate_coverage(sim.f.c_str(), sim.n, sim.sigma, sim.sigma_auto ? 1 : 0,
                                      sim.tau, fam.f, sim.method.c_str(), theta, sim.K, sim.reps,
                                      sim.seed, &coverage, &se);
        if (st != MSCALE_OK) return fail(st);
        std::printf("coverage = %s\nstd_error = %s\n", csvio::format_value(coverage).c_str(),
                    csvio::format_value(se).c_str());
        return 0;
    }

    return MSCALE_ERR_USAGE;
}
