#include "hoqc/search.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "hoqc/rng.hpp"

namespace hoqc {

namespace {

constexpr double kNorms[] = {0.1, 1.0, 10.0};

bool violates(const EnergyFunction& f, ExtensionPath path, const DeficitReport& r, double eps) {
    if (path == ExtensionPath::p_ge_2)
        return r.violation;
    const double p = f.params().p, mu = f.params().mu;
    const double w2 = antisym(r.base_point).squaredNorm();
    const double allowed = w2 > 0.0 ? eps * std::pow(mu * mu + w2, (p - 2.0) / 2.0) * w2 : 0.0;
    return r.deficit < -(allowed + r.aliasing_error + kViolationSlack);
}

} // namespace

std::vector<Mat> standard_base_points(int dim, int count, std::uint64_t seed, EnergyDomain domain) {
    std::vector<Mat> shapes;
    Mat id = Mat::Identity(dim, dim);
    shapes.push_back(id);
    Mat diag = Mat::Zero(dim, dim);
    diag(0, 0) = 1.0;
    diag(1, 1) = -1.0;
    shapes.push_back(diag);
    Mat off = Mat::Zero(dim, dim);
    off(0, 1) = 1.0;
    shapes.push_back(sym(off));
    if (domain == EnergyDomain::full) {
        shapes.push_back(off);
        shapes.push_back(antisym(off));
    }
    std::vector<Mat> points{Mat::Zero(dim, dim)};
    for (const Mat& s : shapes)
        for (double r : kNorms)
            points.push_back(s * (r / s.norm()));
    auto gen = make_stream(seed, 0);
    std::normal_distribution<double> normal;
    for (int i = 0; static_cast<int>(points.size()) < count; ++i) {
        Mat m(dim, dim);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                m(a, b) = normal(gen);
        if (domain == EnergyDomain::symmetric)
            m = sym(m);
        points.push_back(m * (kNorms[i % 3] / m.norm()));
    }
    points.resize(static_cast<std::size_t>(count), Mat::Zero(dim, dim));
    return points;
}

ExtensionPath parse_extension_path(const std::string& name) {
    if (name == "p-ge-2")
        return ExtensionPath::p_ge_2;
    if (name == "envelope")
        return ExtensionPath::envelope;
    throw ParameterError("unknown extension path '" + name + "' (expected p-ge-2 or envelope)");
}

std::string to_string(ExtensionPath path) { return path == ExtensionPath::p_ge_2 ? "p-ge-2" : "envelope"; }

EnergyFunction build_extension(const EnergyFunction& f, ExtensionPath path, double beta) {
    return path == ExtensionPath::p_ge_2 ? extend_p_ge_2(f, beta) : extend_envelope_source_small_p(f, beta);
}

ProbeOutcome probe_extension(const EnergyFunction& f, ExtensionPath path, double beta, const ProbeConfig& probes) {
    const EnergyFunction F = build_extension(f, path, beta);
    ProbeOutcome out;
    out.beta = beta;
    for (std::size_t i = 0; i < probes.base_points.size(); ++i) {
        const Mat& a = probes.base_points[i];
        const PeriodicGrid grid(static_cast<int>(a.rows()), probes.grid_n);
        OptimizerSettings opt = probes.optimizer;
        opt.seed = splitmix64(probes.optimizer.seed + i);
        try {
            DeficitReport r = qc_deficit(F, a, grid, opt);
            out.worst_deficit = std::min(out.worst_deficit, r.deficit);
            if (violates(f, path, r, probes.eps))
                ++out.violations;
            out.reports.push_back(std::move(r));
        } catch (const DivergenceError& e) {
            ++out.violations;
            out.worst_deficit = std::min(out.worst_deficit, e.report().deficit);
            out.reports.push_back(e.report());
        }
    }
    return out;
}

BetaSelection select_beta(const EnergyFunction& f, ExtensionPath path, const ProbeConfig& probes, double beta0,
                          int max_doublings) {
    if (!(beta0 > 0.0) || max_doublings < 0)
        throw ParameterError("select_beta: need beta0 > 0 and max_doublings >= 0");
    BetaSelection sel;
    double beta = beta0;
    for (int d = 0; d <= max_doublings; ++d, beta *= 2.0) {
        sel.history.push_back(probe_extension(f, path, beta, probes));
        sel.beta = beta;
        sel.doublings = d;
        if (sel.history.back().violations == 0) {
            sel.certified = true;
            break;
        }
    }
    return sel;
}

double beta_schedule(double beta0, int k) { return beta0 * std::ldexp(1.0, k); }

LambdaFit fit_lambda_k(const EnergyFunction& f, double beta_k, int k, const ProbeConfig& probes) {
    if (k < 1)
        throw ParameterError("fit_lambda_k: k must be at least 1");
    const EnergyFunction G = extend_theorem1_G_k(f, beta_k);
    const double p = f.params().p;
    LambdaFit fit;
    fit.raw = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probes.base_points.size(); ++i) {
        const Mat& a = probes.base_points[i];
        const PeriodicGrid grid(static_cast<int>(a.rows()), probes.grid_n);
        OptimizerSettings opt = probes.optimizer;
        opt.seed = splitmix64(probes.optimizer.seed + i);
        DeficitReport r = qc_deficit(G, a, grid, opt);
        const double wp = std::pow(antisym(a).norm(), p);
        if (wp > 0.0) {
            ++fit.probes;
            const double need = (-r.deficit - std::pow(sym(a).norm(), p) / k - 1.0 / k) / wp;
            fit.raw = std::max(fit.raw, need);
        }
        fit.reports.push_back(std::move(r));
    }
    fit.lambda = std::max(fit.raw, 0.0);
    return fit;
}

} // namespace hoqc
