// hoqc: command-line driver. Every run is first resolved into a JSON config,
// then executed from that config alone, so `--replay config.json` repeats a
// run exactly.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hoqc/certify.hpp"
#include "hoqc/energy.hpp"
#include "hoqc/errors.hpp"
#include "hoqc/field_io.hpp"
#include "hoqc/korn.hpp"
#include "hoqc/qctest.hpp"
#include "hoqc/report.hpp"
#include "hoqc/rng.hpp"
#include "hoqc/search.hpp"
#include "hoqc/sweep.hpp"

using nlohmann::json;
using namespace hoqc;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kNumerical = 3 };

struct Result {
    json report;
    json rows = json::array();  ///< flat table for csv/text output
    int exit = kOk;
};

// Output files derived from --out.
std::string sibling(const std::string& out, const std::string& suffix) {
    return out.empty() ? std::string() : out + suffix;
}

ModelParams params_from(const json& c) {
    ModelParams m;
    m.p = c.at("p").get<double>();
    m.mu = c.value("mu", 0.0);
    m.nu = c.value("nu", 1.0);
    return m;
}

// ---------------------------------------------------------------- constants

Result run_constants(const json& c) {
    const ConstantsTable t = constants_for(params_from(c));
    Result r;
    r.report = report_json(t);
    r.rows.push_back(r.report);
    return r;
}

// ---------------------------------------------------------------- lemmas

Result run_verify_lemmas(const json& c) {
    SweepConfig s;
    s.p_grid = c.at("p_grid").get<std::vector<double>>();
    s.mu_grid = c.at("mu_grid").get<std::vector<double>>();
    s.eps_grid = c.at("eps_grid").get<std::vector<double>>();
    s.beta_grid = c.at("beta_grid").get<std::vector<double>>();
    s.samples = c.at("samples").get<long>();
    s.min_dim = c.at("min_dim").get<int>();
    s.max_dim = c.at("max_dim").get<int>();
    s.quad_nodes = c.at("quad_nodes").get<int>();
    s.seed = c.at("seed").get<std::uint64_t>();
    const SweepReport sweep = run_lemma_sweep(s);
    Result r;
    r.report = report_json(sweep);
    r.rows = r.report["cells"];
    if (sweep.failures() > 0)
        r.exit = kViolation;
    else if (sweep.numerical_errors() > 0)
        r.exit = kNumerical;
    return r;
}

// ---------------------------------------------------------------- korn

Result run_korn(const json& c, const std::string& out) {
    KornSettings k;
    k.dim = c.at("dim");
    k.p = c.at("p");
    k.mu = c.at("mu");
    k.mode = parse_korn_mode(c.at("mode"));
    k.samples = c.at("samples");
    k.max_wavenumber = c.at("max_wavenumber");
    k.optimizer_steps = c.at("optimizer_steps");
    k.grid_n = c.at("grid_n");
    k.seed = c.at("seed");
    const KornEstimate est = estimate_constant(k);
    std::string field_path;
    if (est.argmax_field && !out.empty()) {
        field_path = sibling(out, ".field");
        save_field(field_path, *est.argmax_field, "Korn argmax field");
    }
    Result r;
    r.report = report_json(est, field_path);
    r.rows.push_back(r.report);
    return r;
}

// ---------------------------------------------------------------- shared qc plumbing

OptimizerSettings optimizer_from(const json& c) {
    OptimizerSettings o;
    o.restarts = c.at("restarts");
    o.max_iterations = c.at("max_iterations");
    o.gradient_tolerance = c.at("gradient_tolerance");
    o.seed = c.at("seed");
    return o;
}

ProbeConfig probes_from(const json& c, EnergyDomain domain, std::uint64_t seed_offset = 0) {
    ProbeConfig probes;
    const int dim = c.at("dim");
    probes.base_points = standard_base_points(dim, c.at("base_points"), c.at("seed").get<std::uint64_t>() + seed_offset,
                                              domain);
    probes.grid_n = c.at("grid_n");
    probes.optimizer = optimizer_from(c);
    probes.optimizer.seed += seed_offset;
    probes.eps = c.value("eps", 0.1);
    return probes;
}

// Random symmetric matrices with log-uniform norms in [1e-3, 1e3].
std::vector<Mat> random_matrices(int dim, int count, std::uint64_t seed, bool symmetric) {
    auto gen = make_stream(seed, 99);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> logr(std::log(1e-3), std::log(1e3));
    std::vector<Mat> out;
    for (int i = 0; i < count; ++i) {
        Mat m(dim, dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                m(a, b) = normal(gen);
        if (symmetric)
            m = sym(m);
        out.push_back(m * (std::exp(logr(gen)) / m.norm()));
    }
    return out;
}

// ---------------------------------------------------------------- extend

Result run_extend(const json& c) {
    const EnergyFunction f = catalog(c.at("energy"), params_from(c));
    const ExtensionPath path = parse_extension_path(c.at("path"));
    if (path == ExtensionPath::p_ge_2 && f.params().p < 2.0)
        throw ParameterError("path p-ge-2 needs p >= 2");
    if (path == ExtensionPath::envelope && !(f.params().p < 2.0))
        throw ParameterError("path envelope needs 1 < p < 2");
    const ProbeConfig probes = probes_from(c, EnergyDomain::full);

    BetaSelection sel;
    const std::string beta_spec = c.at("beta");
    if (beta_spec == "auto") {
        sel = select_beta(f, path, probes, c.value("beta0", 1.0), c.value("max_doublings", 20));
    } else {
        const double beta = std::stod(beta_spec);
        sel.history.push_back(probe_extension(f, path, beta, probes));
        sel.beta = beta;
        sel.certified = sel.history.back().violations == 0;
    }
    const EnergyFunction F = build_extension(f, path, sel.beta);
    const int dim = c.at("dim");
    const double p = f.params().p, mu = f.params().mu;

    Result r;
    json history = json::array();
    for (const auto& h : sel.history)
        history.push_back({{"beta", h.beta}, {"violations", h.violations}, {"worst_deficit", h.worst_deficit}});
    r.report["extension"] = {{"energy", c.at("energy")}, {"params", report_json(f.params())},
                             {"path", to_string(path)}, {"beta", sel.beta}};
    r.report["certified"] = sel.certified;
    r.report["doublings"] = sel.doublings;
    r.report["probe_budget"] = {{"base_points", probes.base_points.size()},
                                {"restarts", probes.optimizer.restarts},
                                {"max_iterations", probes.optimizer.max_iterations},
                                {"grid_n", probes.grid_n}};
    r.report["history"] = history;
    r.report["final_probe"] = report_json(sel.history.back());
    r.rows = r.report["final_probe"]["reports"];

    // F restricted to symmetric matrices is f.
    double restriction = 0.0;
    for (const Mat& s : random_matrices(dim, 1000, c.at("seed"), true))
        restriction = std::max(restriction, std::abs(F(s) - f(s)) / (1.0 + std::abs(f(s))));
    r.report["restriction_max_rel_error"] = restriction;

    // Growth constant c_f in |F(A)| <= c_f (1 + |A|^p).
    double cf = 0.0;
    for (const Mat& a : random_matrices(dim, 10000, c.at("seed").get<std::uint64_t>() + 1, false))
        cf = std::max(cf, std::abs(F(a)) / (1.0 + std::pow(a.norm(), p)));
    r.report["growth_fit_c_f"] = cf;

    if (path == ExtensionPath::p_ge_2) {
        const double lambda = f.certificates().strict_nu.value_or(0.0) / Theta_p(p);
        r.report["lambda"] = lambda;
        if (c.at("energy") == "power" && p == 2.0) {
            double gap = 0.0;
            for (const Mat& a : random_matrices(dim, 1000, c.at("seed").get<std::uint64_t>() + 2, false)) {
                const double closed = mu * mu + sym(a).squaredNorm() + lambda * sel.beta * sel.beta * antisym(a).squaredNorm();
                gap = std::max(gap, std::abs(F(a) - closed) / (1.0 + std::abs(closed)));
            }
            r.report["closed_form"] = "mu^2 + |A^s|^2 + lambda beta^2 |A^a|^2";
            r.report["closed_form_max_rel_error"] = gap;
        }
    }
    if (!sel.certified)
        r.exit = kViolation;
    return r;
}

// ---------------------------------------------------------------- qc-test

Result run_qc_test(const json& c, const std::string& out) {
    std::optional<EnergyFunction> F;
    json source;
    if (c.contains("from_extension")) {
        std::ifstream in(c.at("from_extension").get<std::string>());
        if (!in)
            throw ParameterError("cannot read extension report " + c.at("from_extension").get<std::string>());
        const json ext = json::parse(in);
        const json& e = ext.contains("report") ? ext.at("report").at("extension") : ext.at("extension");
        const EnergyFunction f = catalog(e.at("energy"), params_from(e.at("params")));
        F = build_extension(f, parse_extension_path(e.at("path")), e.at("beta"));
        source = e;
    } else {
        EnergyFunction f = catalog(c.at("energy"), params_from(c));
        if (c.contains("shift")) {
            const std::string s = c.at("shift");
            const double bound = f.certificates().strict_nu.value_or(0.0) / Theta_p(f.params().p);
            f = lemma11_shift(f, s == "max" ? bound : std::stod(s));
        }
        F = f;
        source = {{"energy", c.at("energy")}, {"params", report_json(f.params())}};
    }
    const bool second_order = F->domain() == EnergyDomain::symmetric;
    const ProbeConfig probes =
        probes_from(c, second_order ? EnergyDomain::symmetric : EnergyDomain::full, 7);
    std::optional<double> strict_nu;
    if (c.contains("strict_nu"))
        strict_nu = c.at("strict_nu").get<double>();

    Result r;
    r.report["source"] = source;
    r.report["test"] = second_order ? "qc2" : "qc";
    json reports = json::array();
    int violations = 0;
    bool diverged = false;
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.base_points.size(); ++i) {
        const Mat& a = probes.base_points[i];
        const PeriodicGrid grid(static_cast<int>(a.rows()), probes.grid_n);
        OptimizerSettings opt = probes.optimizer;
        opt.seed = splitmix64(probes.optimizer.seed + i);
        std::optional<DeficitReport> rep;
        json extra;
        try {
            rep = second_order ? qc2_deficit(*F, a, grid, opt, strict_nu) : qc_deficit(*F, a, grid, opt);
        } catch (const DivergenceError& e) {
            rep = e.report();
            diverged = true;
            extra["error"] = e.what();
        }
        const std::string witness = sibling(out, ".witness" + std::to_string(i));
        if (!witness.empty())
            save_field(witness, rep->witness, "deficit witness for base point " + std::to_string(i));
        json j = report_json(*rep, witness);
        if (!extra.is_null())
            j.update(extra);
        reports.push_back(j);
        r.rows.push_back({{"index", i},
                          {"deficit", j["deficit"]},
                          {"aliasing_error", j["aliasing_error"]},
                          {"violation", rep->violation}});
        violations += rep->violation;
        worst = std::min(worst, rep->deficit);
    }
    r.report["reports"] = reports;
    r.report["violations"] = violations;
    r.report["worst_deficit"] = worst;
    r.report["diverged"] = diverged;
    r.exit = diverged ? kNumerical : violations > 0 ? kViolation : kOk;
    return r;
}

// ---------------------------------------------------------------- envelope

Result run_envelope(const json& c) {
    const EnergyFunction f = catalog(c.at("energy"), params_from(c));
    const double beta = std::stod(c.at("beta").get<std::string>());
    const EnergyFunction G = extend_envelope_source_small_p(f, beta);
    const ProbeConfig probes = probes_from(c, EnergyDomain::full);
    const double p = f.params().p, mu = f.params().mu, eps = probes.eps;
    Result r;
    json points = json::array();
    int below = 0;
    for (std::size_t i = 0; i < probes.base_points.size(); ++i) {
        const Mat& a = probes.base_points[i];
        const PeriodicGrid grid(static_cast<int>(a.rows()), probes.grid_n);
        OptimizerSettings opt = probes.optimizer;
        opt.seed = splitmix64(probes.optimizer.seed + i);
        const EnvelopeEstimate env = quasiconvexify(G, a, grid, opt);
        const double w2 = antisym(a).squaredNorm();
        const double lower = env.energy - (w2 > 0.0 ? eps * std::pow(mu * mu + w2, (p - 2.0) / 2.0) * w2 : 0.0);
        const bool ok = env.upper_bound >= lower - (env.report.aliasing_error + kViolationSlack);
        below += !ok;
        json row{{"index", i},          {"upper_bound", env.upper_bound}, {"energy", env.energy},
                 {"eps_lower", lower},  {"within_eps_band", ok},          {"aliasing_error", env.report.aliasing_error}};
        r.rows.push_back(row);
        row["base_point"] = matrix_json(a);
        points.push_back(row);
    }
    r.report["beta"] = beta;
    r.report["eps"] = eps;
    r.report["points"] = points;
    r.report["below_eps_band"] = below;
    r.exit = below > 0 ? kViolation : kOk;
    return r;
}

// ---------------------------------------------------------------- sandwich

Result run_sandwich(const json& c) {
    const EnergyFunction f = catalog(c.at("energy"), params_from(c));
    const std::vector<int> ks = c.at("k_list");
    const double beta0 = c.at("beta0");
    // lambda_k is fitted on one probe set and checked on held-out base points.
    ProbeConfig fit_probes = probes_from(c, EnergyDomain::full, 1000);
    fit_probes.base_points.resize(std::min<std::size_t>(fit_probes.base_points.size(), c.at("fit_points")));
    const ProbeConfig check = probes_from(c, EnergyDomain::full);
    const std::vector<Mat> sym_points = standard_base_points(c.at("dim"), c.at("base_points"), c.at("seed"),
                                                             EnergyDomain::symmetric);
    const double p = f.params().p;

    Result r;
    json per_k = json::array();
    int inconsistent = 0;
    double previous_gap = std::numeric_limits<double>::infinity();
    bool gaps_decreasing = true;
    double previous_lambda = 0.0;
    for (int k : ks) {
        const double beta_k = beta_schedule(beta0, k);
        const LambdaFit fit = fit_lambda_k(f, beta_k, k, fit_probes);
        const double lambda_k = std::max(fit.lambda, previous_lambda);
        previous_lambda = lambda_k;
        json verdicts = json::array();
        int bad = 0;
        auto check_at = [&](const Mat& a, std::size_t i, bool symmetric) {
            const PeriodicGrid grid(static_cast<int>(a.rows()), check.grid_n);
            OptimizerSettings opt = check.optimizer;
            opt.seed = splitmix64(check.optimizer.seed + i + (symmetric ? 5000 : 0));
            SandwichVerdict v = sandwich_check_theorem1(f, beta_k, lambda_k, k, a, grid, opt);
            bad += !(v.upper_ok && v.consistent);
            json j = report_json(v);
            j["symmetric"] = symmetric;
            if (symmetric) {
                const double gap = f(sym(a)) - v.upper;
                const double bound = std::pow(a.norm(), p) / k + 1.0 / k;
                j["gap_to_f"] = gap;
                j["gap_bound"] = bound;
                j["within_gap_bound"] = std::abs(gap) <= bound + v.report.aliasing_error + kViolationSlack;
                bad += !j["within_gap_bound"].get<bool>();
            }
            r.rows.push_back({{"k", k}, {"index", i}, {"symmetric", symmetric}, {"upper", j["upper"]},
                              {"lower", j["lower"]}, {"energy", j["energy"]}, {"consistent", v.consistent}});
            verdicts.push_back(j);
            return symmetric ? f(sym(a)) - v.upper : 0.0;
        };
        for (std::size_t i = 0; i < check.base_points.size(); ++i)
            check_at(check.base_points[i], i, false);
        double max_gap = 0.0;
        for (std::size_t i = 0; i < sym_points.size(); ++i)
            max_gap = std::max(max_gap, check_at(sym_points[i], i, true));
        if (max_gap > previous_gap + kViolationSlack)
            gaps_decreasing = false;
        previous_gap = max_gap;
        inconsistent += bad;
        per_k.push_back({{"k", k},
                         {"beta_k", beta_k},
                         {"lambda_k", lambda_k},
                         {"lambda_fit_raw", fit.raw},
                         {"fit_probes", fit.probes},
                         {"max_symmetric_gap", max_gap},
                         {"failures", bad},
                         {"verdicts", verdicts}});
    }
    r.report["per_k"] = per_k;
    r.report["inconsistent"] = inconsistent;
    r.report["symmetric_gap_nonincreasing"] = gaps_decreasing;
    r.exit = inconsistent > 0 || !gaps_decreasing ? kViolation : kOk;
    return r;
}

Result execute(const json& config, const std::string& out) {
    const std::string cmd = config.at("subcommand");
    if (cmd == "constants")
        return run_constants(config);
    if (cmd == "verify-lemmas")
        return run_verify_lemmas(config);
    if (cmd == "korn")
        return run_korn(config, out);
    if (cmd == "extend")
        return run_extend(config);
    if (cmd == "qc-test")
        return run_qc_test(config, out);
    if (cmd == "envelope")
        return run_envelope(config);
    if (cmd == "sandwich")
        return run_sandwich(config);
    throw ParameterError("unknown subcommand '" + cmd + "'");
}

// ---------------------------------------------------------------- output

std::string scalar_text(const json& v) {
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_float()) {
        std::ostringstream s;
        s << std::setprecision(17) << v.get<double>();
        return s.str();
    }
    return v.dump();
}

void write_csv(std::ostream& os, const json& rows) {
    if (rows.empty())
        return;
    std::vector<std::string> keys;
    for (auto it = rows[0].begin(); it != rows[0].end(); ++it)
        if (!it->is_structured())
            keys.push_back(it.key());
    for (std::size_t i = 0; i < keys.size(); ++i)
        os << (i ? "," : "") << keys[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < keys.size(); ++i)
            os << (i ? "," : "") << (row.contains(keys[i]) ? scalar_text(row[keys[i]]) : "");
        os << '\n';
    }
}

void write_text(std::ostream& os, const json& report, const json& rows) {
    std::size_t width = 0;
    for (auto it = report.begin(); it != report.end(); ++it)
        width = std::max(width, it.key().size());
    for (auto it = report.begin(); it != report.end(); ++it)
        if (!it->is_structured())
            os << std::left << std::setw(static_cast<int>(width) + 2) << it.key() << scalar_text(*it) << '\n';
    if (!rows.empty() && !(rows.size() == 1 && rows[0] == report)) {
        os << '\n';
        write_csv(os, rows);
    }
}

void emit(const Result& result, const json& config, const std::string& out, const std::string& format) {
    json doc{{"schema_version", kReportSchema}, {"config", config}, {"report", result.report},
             {"exit_code", result.exit}};
    std::ostringstream body;
    if (format == "json")
        body << doc.dump(2) << '\n';
    else if (format == "csv")
        write_csv(body, result.rows.empty() ? json::array({result.report}) : result.rows);
    else
        write_text(body, result.report, result.rows);
    if (out.empty()) {
        std::cout << body.str();
        return;
    }
    std::ofstream(out) << body.str();
    std::ofstream(out + ".config.json") << config.dump(2) << '\n';
    if (format != "json")
        std::ofstream(out + ".json") << doc.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(std::stod(item));
    if (out.empty())
        throw ParameterError("empty list '" + s + "'");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasiconvex extension toolkit: constants, lemma checks, Korn ratios and quasiconvexity searches"};
    app.fallthrough();  // global options may follow the subcommand
    std::uint64_t seed = 1;
    int grid_n = 32;
    std::string out, format = "json", replay;
    app.add_option("--seed", seed, "run seed")->capture_default_str();
    app.add_option("--grid-n", grid_n, "grid points per axis (power of two, >= 8)")->capture_default_str();
    app.add_option("--out", out, "report path (stdout when empty)");
    app.add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    app.add_option("--replay", replay, "re-run a stored config file");

    // Model parameters shared by most subcommands.
    struct Model {
        double p = 2.0, mu = 0.0, nu = 1.0;
    };
    auto add_model = [](CLI::App* sub, Model& m, double default_p) {
        m.p = default_p;
        sub->add_option("--p", m.p, "growth exponent p > 1")->capture_default_str();
        sub->add_option("--mu", m.mu, "offset mu >= 0")->capture_default_str();
        sub->add_option("--nu", m.nu, "ellipticity nu > 0")->capture_default_str();
    };
    struct Search {
        int dim = 2, base_points = 20, restarts = 20, max_iterations = 5000;
        double tolerance = 1e-8;
    };
    auto add_search = [](CLI::App* sub, Search& s, int default_points) {
        s.base_points = default_points;
        sub->add_option("--dim", s.dim, "matrix size n (2 or 3)")->capture_default_str();
        sub->add_option("--base-points", s.base_points, "number of base points")->capture_default_str();
        sub->add_option("--restarts", s.restarts, "restarts per base point")->capture_default_str();
        sub->add_option("--max-iterations", s.max_iterations, "optimizer iterations per restart")
            ->capture_default_str();
        sub->add_option("--tolerance", s.tolerance, "preconditioned gradient tolerance")->capture_default_str();
    };

    Model cm;
    auto* constants = app.add_subcommand("constants", "closed-form constants kappa_p, K_p, theta_p, Theta_p, lambda");
    add_model(constants, cm, 2.0);

    auto* lemmas = app.add_subcommand("verify-lemmas", "randomized certified sweep of the scalar inequalities");
    std::string p_grid = "1.1,1.5,2,3,4", mu_grid = "0,0.5,2", eps_grid = "0.1,0.5,0.9", beta_grid = "0.5,1,4";
    long samples = 10000;
    int min_dim = 2, max_dim = 6, quad_nodes = 16;
    lemmas->add_option("--p-grid", p_grid)->capture_default_str();
    lemmas->add_option("--mu-grid", mu_grid)->capture_default_str();
    lemmas->add_option("--eps-grid", eps_grid)->capture_default_str();
    lemmas->add_option("--beta-grid", beta_grid)->capture_default_str();
    lemmas->add_option("--samples", samples, "samples per (p, mu) cell")->capture_default_str();
    lemmas->add_option("--min-dim", min_dim)->capture_default_str();
    lemmas->add_option("--max-dim", max_dim)->capture_default_str();
    lemmas->add_option("--quad-nodes", quad_nodes)->capture_default_str();

    auto* korn = app.add_subcommand("korn", "empirical lower bound for a Korn-type constant");
    Model km;
    add_model(korn, km, 2.0);
    int korn_dim = 2, korn_samples = 20, korn_band = 4, korn_steps = 50;
    std::string korn_mode = "lemma1";
    korn->add_option("--dim", korn_dim)->capture_default_str();
    korn->add_option("--mode", korn_mode, "lemma1 or lemma5")->capture_default_str();
    korn->add_option("--restarts,--samples", korn_samples, "random starts")->capture_default_str();
    korn->add_option("--max-wavenumber", korn_band)->capture_default_str();
    korn->add_option("--steps", korn_steps, "ascent steps per start")->capture_default_str();

    auto* extend = app.add_subcommand("extend", "build the extension F and certify beta");
    Model em;
    add_model(extend, em, 3.0);
    Search es;
    add_search(extend, es, 50);
    std::string energy = "power", path, beta = "auto";
    double eps = 0.1, beta0 = 1.0;
    int max_doublings = 20;
    extend->add_option("--energy", energy)->capture_default_str();
    extend->add_option("--path", path, "p-ge-2 or envelope (default from p)");
    extend->add_option("--beta", beta, "auto or a positive value")->capture_default_str();
    extend->add_option("--beta0", beta0, "start of the doubling search")->capture_default_str();
    extend->add_option("--max-doublings", max_doublings)->capture_default_str();
    extend->add_option("--eps", eps, "envelope path tolerance")->capture_default_str();

    auto* qc = app.add_subcommand("qc-test", "search for quasiconvexity violations");
    Model qm;
    add_model(qc, qm, 2.0);
    Search qs;
    add_search(qc, qs, 20);
    std::string qc_energy = "det", from_extension, shift;
    double strict_nu = -1.0;
    qc->add_option("--energy", qc_energy, "catalog energy (symmetric-only ones get the second-order test)")
        ->capture_default_str();
    qc->add_option("--from-extension", from_extension, "extend report to test");
    qc->add_option("--shift", shift, "apply f - lambda g first: 'max' or a value");
    qc->add_option("--strict-nu", strict_nu, "test the strict margin with this nu");

    auto* env = app.add_subcommand("envelope", "envelope upper bounds for the p < 2 construction");
    Model vm;
    add_model(env, vm, 1.5);
    Search vs;
    add_search(env, vs, 20);
    std::string env_energy = "power", env_beta = "1";
    double env_eps = 0.1;
    env->add_option("--energy", env_energy)->capture_default_str();
    env->add_option("--beta", env_beta)->capture_default_str();
    env->add_option("--eps", env_eps)->capture_default_str();

    auto* sand = app.add_subcommand("sandwich", "check the G_k envelope sandwich over a k schedule");
    Model sm;
    add_model(sand, sm, 1.5);
    Search ss;
    add_search(sand, ss, 20);
    std::string sand_energy = "power", k_list = "1,2,4,8";
    double sand_beta0 = 1.0;
    int fit_points = 10;
    sand->add_option("--energy", sand_energy)->capture_default_str();
    sand->add_option("--k-list", k_list)->capture_default_str();
    sand->add_option("--beta0", sand_beta0, "beta_k = beta0 2^k")->capture_default_str();
    sand->add_option("--fit-points", fit_points, "probe base points for the lambda_k fit")->capture_default_str();

    app.require_subcommand(0, 1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        json config;
        if (!replay.empty()) {
            std::ifstream in(replay);
            if (!in)
                throw ParameterError("cannot read replay config " + replay);
            config = json::parse(in);
            if (config.contains("config"))
                config = config.at("config");
        } else {
            auto model = [](const Model& m) { return json{{"p", m.p}, {"mu", m.mu}, {"nu", m.nu}}; };
            auto search = [&](const Search& s) {
                return json{{"dim", s.dim},
                            {"base_points", s.base_points},
                            {"restarts", s.restarts},
                            {"max_iterations", s.max_iterations},
                            {"gradient_tolerance", s.tolerance},
                            {"grid_n", grid_n},
                            {"seed", seed}};
            };
            if (constants->parsed()) {
                config = model(cm);
                config["subcommand"] = "constants";
            } else if (lemmas->parsed()) {
                if (samples < 1)
                    throw ParameterError("--samples must be at least 1");
                config = {{"subcommand", "verify-lemmas"},
                          {"p_grid", parse_list(p_grid)},
                          {"mu_grid", parse_list(mu_grid)},
                          {"eps_grid", parse_list(eps_grid)},
                          {"beta_grid", parse_list(beta_grid)},
                          {"samples", samples},
                          {"min_dim", min_dim},
                          {"max_dim", max_dim},
                          {"quad_nodes", quad_nodes},
                          {"seed", seed}};
            } else if (korn->parsed()) {
                config = model(km);
                config.update({{"subcommand", "korn"},
                               {"dim", korn_dim},
                               {"mode", korn_mode},
                               {"samples", korn_samples},
                               {"max_wavenumber", korn_band},
                               {"optimizer_steps", korn_steps},
                               {"grid_n", grid_n},
                               {"seed", seed}});
            } else if (extend->parsed()) {
                config = model(em);
                config.update(search(es));
                config.update({{"subcommand", "extend"},
                               {"energy", energy},
                               {"path", path.empty() ? (em.p >= 2.0 ? "p-ge-2" : "envelope") : path},
                               {"beta", beta},
                               {"beta0", beta0},
                               {"max_doublings", max_doublings},
                               {"eps", eps}});
            } else if (qc->parsed()) {
                config = model(qm);
                config.update(search(qs));
                config["subcommand"] = "qc-test";
                config["energy"] = qc_energy;
                if (!from_extension.empty())
                    config["from_extension"] = from_extension;
                if (!shift.empty())
                    config["shift"] = shift;
                if (strict_nu >= 0.0)
                    config["strict_nu"] = strict_nu;
            } else if (env->parsed()) {
                config = model(vm);
                config.update(search(vs));
                config.update({{"subcommand", "envelope"}, {"energy", env_energy}, {"beta", env_beta},
                               {"eps", env_eps}});
            } else if (sand->parsed()) {
                std::vector<int> ks;
                for (double k : parse_list(k_list))
                    ks.push_back(static_cast<int>(k));
                config = model(sm);
                config.update(search(ss));
                config.update({{"subcommand", "sandwich"}, {"energy", sand_energy}, {"k_list", ks},
                               {"beta0", sand_beta0}, {"fit_points", fit_points}});
            } else {
                std::cerr << app.help();
                return kUsage;
            }
        }
        const Result result = execute(config, out);
        emit(result, config, out, format);
        return result.exit;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const QuadratureError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const SingularPointError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed config: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad number: " << e.what() << '\n';
        return kUsage;
    }
}
