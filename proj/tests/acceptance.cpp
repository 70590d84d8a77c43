// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hoqc/energy.hpp"
#include "hoqc/errors.hpp"
#include "hoqc/korn.hpp"
#include "hoqc/params.hpp"
#include "hoqc/qctest.hpp"
#include "hoqc/rng.hpp"
#include "hoqc/search.hpp"
#include "hoqc/sweep.hpp"

using namespace hoqc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ModelParams params(double p, double mu, double nu = 1.0) {
    ModelParams m;
    m.p = p;
    m.mu = mu;
    m.nu = nu;
    return m;
}

Mat gaussian_mat(std::mt19937_64& gen, int n, bool symmetric) {
    std::normal_distribution<double> normal;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = normal(gen);
    return symmetric ? Mat(sym(m)) : m;
}

Outcome constants_anchor() {
    const ConstantsTable t = constants_for(params(2.0, 0.0, 1.0));
    const bool ok = t.kappa_p == 0.5 && t.K_p == 1.0 && t.theta_p == 1.0 && t.Theta_p == 2.0 && t.lambda == 0.5;
    return {ok, fmt("kappa=%.17g K=%.17g theta=%.17g Theta=%.17g lambda=%.17g", t.kappa_p, t.K_p, t.theta_p,
                    t.Theta_p, t.lambda)};
}

Outcome lemma_sweeps() {
    const SweepReport r = run_lemma_sweep(SweepConfig{});
    const bool ok = r.passed() && r.failures() == 0 && r.worst_margin() >= -1e-12;
    return {ok, fmt("cells=%zu failures=%ld numerical=%ld worst_margin=%.3e", r.cells.size(), r.failures(),
                    r.numerical_errors(), r.worst_margin())};
}

Outcome korn_golden() {
    double worst = 0.0;
    for (int dim : {2, 3}) {
        const KornEstimate e = estimate_constant({.dim = dim, .p = 2.0, .mode = KornMode::lemma1, .grid_n = 64});
        worst = std::max(worst, std::abs(e.max_ratio - 2.0));
        const PeriodicGrid grid(dim, 64);
        for (int s = 0; s < 20; ++s) {
            const auto seed = make_stream(1, static_cast<std::uint64_t>(s))();
            worst = std::max(worst, std::abs(korn_ratio(random_vector_field(grid, 4, seed, true), 2.0) - 2.0));
        }
    }
    return {worst < 1e-9, fmt("max |ratio - 2| = %.3e", worst)};
}

Outcome korn_identity() {
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        const int dim = 2 + s % 2;
        const VectorField psi = random_vector_field(PeriodicGrid(dim, 32), 1 + s % 10, 7000 + s, true);
        worst = std::max(worst, identity_residual(psi));
    }
    return {worst < 1e-10, fmt("max relative residual = %.3e over 100 fields", worst)};
}

Outcome helmholtz_check() {
    double res = 0.0, div = 0.0, idem = 0.0;
    int fields = 0;
    for (int n : {32, 64})
        for (int dim : {2, 3})
            for (int s = 0; s < 100; ++s, ++fields) {
                const PeriodicGrid grid(dim, n);
                const VectorField v = random_vector_field(grid, 1 + s % grid.max_band(), 100 * n + 10 * dim + s, false);
                const HelmholtzParts parts = helmholtz(v);
                const double norm = spectral_norm(v);
                res = std::max(res, spectral_norm(v - gradient(parts.potential) - parts.solenoidal) / norm);
                div = std::max(div, spectral_norm(divergence(parts.solenoidal)) / norm);
                const HelmholtzParts again = helmholtz(parts.solenoidal);
                idem = std::max(idem, spectral_norm(again.solenoidal - parts.solenoidal) / norm);
                idem = std::max(idem, spectral_norm(again.potential) / norm);
            }
    return {res < 1e-12 && div < 1e-10 && idem < 1e-12,
            fmt("%d fields: residual %.3e, div %.3e, idempotence %.3e", fields, res, div, idem)};
}

Outcome null_lagrangian() {
    const EnergyFunction det = catalog("det", params(2.0, 0.0));
    const PeriodicGrid grid(2, 32);
    auto gen = make_stream(2024, 0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Mat a = gaussian_mat(gen, 2, false);
        OptimizerSettings opt;
        opt.restarts = 20;
        opt.seed = gen();
        worst = std::max(worst, std::abs(qc_deficit(det, a, grid, opt).deficit));
    }
    return {worst <= 1e-8, fmt("max |deficit| = %.3e over 20 base points", worst)};
}

Outcome explicit_extension() {
    bool ok = true;
    std::string detail;
    for (double p : {2.0, 3.0}) {
        const EnergyFunction f = catalog("power", params(p, 1.0));
        ProbeConfig probes;
        probes.base_points = standard_base_points(2, 50, 1, EnergyDomain::full);
        probes.grid_n = 32;
        probes.optimizer.restarts = 20;
        const BetaSelection sel = select_beta(f, ExtensionPath::p_ge_2, probes);
        const ProbeOutcome& last = sel.history.back();
        const EnergyFunction F = build_extension(f, ExtensionPath::p_ge_2, sel.beta);

        auto gen = make_stream(31, static_cast<std::uint64_t>(p));
        double restriction = 0.0, closed = 0.0;
        const double lambda = theta_p(p) / Theta_p(p);
        for (int i = 0; i < 1000; ++i) {
            const Mat s = std::pow(10.0, i % 3 - 1.0) * gaussian_mat(gen, 2, true);
            restriction = std::max(restriction, std::abs(F(s) - f(s)) / std::max(std::abs(f(s)), 1e-300));
            if (p == 2.0) {
                const Mat a = std::pow(10.0, i % 3 - 1.0) * gaussian_mat(gen, 2, false);
                const double expect =
                    1.0 + sym(a).squaredNorm() + lambda * sel.beta * sel.beta * antisym(a).squaredNorm();
                closed = std::max(closed, std::abs(F(a) - expect) / expect);
            }
        }
        const bool this_ok = sel.certified && last.worst_deficit >= -1e-6 && restriction <= 4 * 2.2e-16 &&
                             closed <= 1e-12;
        ok = ok && this_ok;
        detail += fmt("p=%g: beta=%g worst_deficit=%.3e restriction=%.2e closed_form=%.2e; ", p, sel.beta,
                      last.worst_deficit, restriction, closed);
    }
    return {ok, detail};
}

Outcome sandwich() {
    const EnergyFunction f = catalog("power", params(1.5, 1.0));
    const double p = 1.5, beta0 = 1.0;
    ProbeConfig fit;
    fit.base_points = standard_base_points(2, 10, 1001, EnergyDomain::full);
    fit.grid_n = 32;
    fit.optimizer.restarts = 20;
    fit.optimizer.seed = 1001;
    const std::vector<Mat> full = standard_base_points(2, 20, 1, EnergyDomain::full);
    const std::vector<Mat> symmetric = standard_base_points(2, 20, 1, EnergyDomain::symmetric);
    const PeriodicGrid grid(2, 32);

    int failures = 0;
    bool decreasing = true;
    double previous_gap = std::numeric_limits<double>::infinity(), lambda_prev = 0.0;
    std::string detail;
    for (int k : {1, 2, 4, 8}) {
        const double beta_k = beta_schedule(beta0, k);
        const double lambda_k = std::max(fit_lambda_k(f, beta_k, k, fit).lambda, lambda_prev);
        lambda_prev = lambda_k;
        double max_gap = 0.0;
        auto check = [&](const Mat& a, std::size_t i, bool is_sym) {
            OptimizerSettings opt;
            opt.restarts = 20;
            opt.seed = splitmix64(1 + i + (is_sym ? 5000 : 0));
            const SandwichVerdict v = sandwich_check_theorem1(f, beta_k, lambda_k, k, a, grid, opt);
            failures += !(v.upper_ok && v.consistent);
            if (is_sym) {
                const double gap = f(sym(a)) - v.upper;
                const double bound = std::pow(a.norm(), p) / k + 1.0 / k;
                failures += std::abs(gap) > bound + v.report.aliasing_error + kViolationSlack;
                max_gap = std::max(max_gap, gap);
            }
        };
        for (std::size_t i = 0; i < full.size(); ++i)
            check(full[i], i, false);
        for (std::size_t i = 0; i < symmetric.size(); ++i)
            check(symmetric[i], i, true);
        decreasing = decreasing && max_gap <= previous_gap + kViolationSlack;
        previous_gap = max_gap;
        detail += fmt("k=%d lambda=%.3g gap=%.2e; ", k, lambda_k, max_gap);
    }
    return {failures == 0 && decreasing, fmt("failures=%d nonincreasing=%d; ", failures, int(decreasing)) + detail};
}

Outcome violation_detection() {
    const EnergyFunction neg = catalog("neg-quadratic", params(2.0, 0.0));
    const PeriodicGrid grid(2, 32);
    OptimizerSettings opt;
    opt.max_iterations = 100;
    opt.restarts = 1;
    double deficit = 0.0;
    bool diverged = false;
    try {
        deficit = qc_deficit(neg, Mat::Identity(2, 2), grid, opt).deficit;
    } catch (const DivergenceError& e) {
        diverged = true;
        deficit = e.report().deficit;
    }
    auto gen = make_stream(77, 0);
    std::normal_distribution<double> normal;
    int flagged = 0;
    for (int i = 0; i < 100; ++i) {
        Vec u(2), v(2);
        u << normal(gen), normal(gen);
        v << normal(gen), normal(gen);
        flagged += !rank_one_probe(neg, gaussian_mat(gen, 2, false), u, v, -1.0, 1.0, 21).convex;
    }
    return {(diverged || deficit < -0.5) && flagged == 100,
            fmt("deficit=%.3e diverged=%d rank-one flagged %d/100", deficit, int(diverged), flagged)};
}

Outcome shifted_energy() {
    bool ok = true;
    std::string detail;
    for (double p : {1.5, 2.0, 3.0}) {
        const EnergyFunction f = catalog("power", params(p, 1.0));
        const EnergyFunction shifted = lemma11_shift(f, *f.certificates().strict_nu / Theta_p(p));
        const PeriodicGrid grid(2, 32);
        double worst = 0.0;
        const std::vector<Mat> points = standard_base_points(2, 20, 3, EnergyDomain::symmetric);
        for (std::size_t i = 0; i < points.size(); ++i) {
            OptimizerSettings opt;
            opt.restarts = 20;
            opt.seed = splitmix64(i);
            worst = std::min(worst, qc2_deficit(shifted, points[i], grid, opt).deficit);
        }
        ok = ok && worst >= -1e-6;
        detail += fmt("p=%g worst=%.3e; ", p, worst);
    }
    return {ok, detail};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"constants anchor", 1, constants_anchor},
        {"lemma sweeps", 120, lemma_sweeps},
        {"Korn golden value", 60, korn_golden},
        {"Korn identity residual", 30, korn_identity},
        {"Helmholtz decomposition", 30, helmholtz_check},
        {"null Lagrangian", 120, null_lagrangian},
        {"explicit extension p >= 2", 900, explicit_extension},
        {"envelope sandwich p = 1.5", 1200, sandwich},
        {"violation detection", 30, violation_detection},
        {"shifted energy stays 2-quasiconvex", 300, shifted_energy},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs < criteria[i].budget_seconds;
        const bool pass = o.pass && in_budget;
        failed += !pass;
        std::printf("%s %zu %s (%.2fs%s) %s\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                    in_budget ? "" : ", over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
