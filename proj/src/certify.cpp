#include "hoqc/certify.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "hoqc/rng.hpp"

namespace hoqc {

namespace {

constexpr double kTie = 1e-12;

Mat random_matrix(std::mt19937_64& gen, int dim, EnergyDomain domain, double norm) {
    std::normal_distribution<double> normal;
    Mat m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            m(i, j) = normal(gen);
    if (domain == EnergyDomain::symmetric)
        m = sym(m);
    const double r = m.norm();
    return r > 0.0 ? Mat(m * (norm / r)) : m;
}

double log_uniform(std::mt19937_64& gen, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(gen));
}

CertificateReport check_gradlip(const EnergyFunction& f, const CertifyConfig& cfg) {
    if (!f.has_gradient())
        throw MissingGradientError(f.name() + " has no analytic gradient");
    const auto lip = f.certificates().lipschitz ? f.certificates().lipschitz : f.params().lip;
    if (!lip)
        throw ParameterError(f.name() + " claims no gradient Lipschitz constant");
    const double p = f.params().p, mu2 = f.params().mu * f.params().mu;
    CertificateReport rep{.kind = CertKind::gradlip, .energy = f.name(), .constant = *lip, .samples = cfg.samples};
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (long s = 0; s < cfg.samples; ++s) {
        auto gen = make_stream(cfg.seed, static_cast<std::uint64_t>(s));
        const Mat a = random_matrix(gen, cfg.dim, f.domain(), log_uniform(gen, 1e-2, 1e3));
        const Mat b = random_matrix(gen, cfg.dim, f.domain(), log_uniform(gen, 1e-2, 1e3));
        const double b2 = b.squaredNorm();
        const double bound = *lip * std::pow(mu2 + a.squaredNorm() + b2, (p - 2.0) / 2.0) * std::sqrt(b2);
        const Mat ga = f.gradient(a);
        const double lhs = (f.gradient(a + b) - ga).norm();
        // |grad f(a)| enters the scale: the difference cancels against it.
        const double scale = std::max({bound, lhs, ga.norm(), 1e-300});
        rep.worst_margin = std::min(rep.worst_margin, (bound - lhs) / scale);
    }
    rep.holds = rep.worst_margin >= -kTie;
    return rep;
}

CertificateReport check_growth(const EnergyFunction& f, const CertifyConfig& cfg) {
    const auto m = f.certificates().growth ? f.certificates().growth : f.params().growth;
    if (!m)
        throw ParameterError(f.name() + " claims no growth constant");
    const double p = f.params().p;
    CertificateReport rep{.kind = CertKind::growth, .energy = f.name(), .constant = *m, .samples = cfg.samples};
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (long s = 0; s < cfg.samples; ++s) {
        auto gen = make_stream(cfg.seed, static_cast<std::uint64_t>(s));
        const Mat a = random_matrix(gen, cfg.dim, f.domain(), log_uniform(gen, 1e-3, 1e3));
        const double bound = *m * (1.0 + std::pow(a.norm(), p));
        const double lhs = std::abs(f(a));
        rep.worst_margin = std::min(rep.worst_margin, (bound - lhs) / std::max(bound, lhs));
    }
    rep.holds = rep.worst_margin >= -kTie;
    return rep;
}

CertificateReport check_strict(const EnergyFunction& f, const CertifyConfig& cfg) {
    if (f.domain() != EnergyDomain::symmetric)
        throw ParameterError("strict 2-quasiconvexity is certified for symmetric-only energies");
    const auto nu = f.certificates().strict_nu;
    if (!nu)
        throw ParameterError(f.name() + " claims no strict 2-quasiconvexity constant");
    const PeriodicGrid grid(cfg.dim, cfg.grid_n);
    const int band = std::min(4, grid.max_band());
    static constexpr double kNorms[] = {0.1, 1.0, 10.0};
    CertificateReport rep{.kind = CertKind::strict2qc, .energy = f.name(), .constant = *nu, .samples = cfg.samples};
    rep.worst_margin = 0.0;
    rep.worst_ratio = *nu > 0.0 ? std::numeric_limits<double>::infinity() : std::nan("");
    double slack = kViolationSlack;
    for (long s = 0; s < cfg.samples; ++s) {
        auto gen = make_stream(cfg.seed, static_cast<std::uint64_t>(s));
        const Mat a = random_matrix(gen, cfg.dim, EnergyDomain::symmetric, kNorms[s % 3]);
        ScalarField phi = random_scalar_field(grid, band, gen());
        const MatrixField h = hessian(phi);
        const double h2 = h.values().square().rowwise().sum().mean();
        phi = (log_uniform(gen, 1e-2, 1e2) / std::sqrt(h2)) * phi;

        const double deficit = qc2_objective(f, a, phi);
        if (*nu > 0.0) {
            const double weighted = strict_weight_integral(f.params(), a, phi);
            rep.worst_ratio = std::min(rep.worst_ratio, deficit / (*nu * weighted));
        }
        OptimizerSettings opt = cfg.optimizer;
        opt.seed = gen();
        try {
            const DeficitReport r = qc2_deficit(f, a, grid, opt, *nu);
            rep.worst_margin = std::min(rep.worst_margin, r.deficit);
            slack = std::max(slack, r.aliasing_error + kViolationSlack);
        } catch (const DivergenceError& e) {
            rep.worst_margin = std::min(rep.worst_margin, e.report().deficit);
        }
        if (*nu == 0.0)
            rep.worst_margin = std::min(rep.worst_margin, deficit);
    }
    rep.holds = rep.worst_margin >= -slack && (!(*nu > 0.0) || rep.worst_ratio >= 1.0 - 1e-9);
    return rep;
}

} // namespace

CertKind parse_cert_kind(const std::string& name) {
    if (name == "strict2qc")
        return CertKind::strict2qc;
    if (name == "gradlip")
        return CertKind::gradlip;
    if (name == "growth")
        return CertKind::growth;
    throw ParameterError("unknown certificate '" + name + "'");
}

std::string to_string(CertKind kind) {
    switch (kind) {
    case CertKind::strict2qc: return "strict2qc";
    case CertKind::gradlip: return "gradlip";
    default: return "growth";
    }
}

double strict_weight_integral(const ModelParams& params, const Mat& a, const ScalarField& phi) {
    const double r = (params.p - 2.0) / 2.0;
    const double b0 = params.mu * params.mu + a.squaredNorm();
    const Eigen::ArrayXd h2 = hessian(phi).values().square().rowwise().sum();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < h2.size(); ++i)
        if (h2[i] > 0.0)
            sum += std::pow(b0 + h2[i], r) * h2[i];
    return sum / double(h2.size());
}

CertificateReport certify(const EnergyFunction& f, CertKind kind, const CertifyConfig& config) {
    if (config.samples < 1)
        throw ParameterError("certify: samples must be at least 1");
    switch (kind) {
    case CertKind::strict2qc: return check_strict(f, config);
    case CertKind::gradlip: return check_gradlip(f, config);
    default: return check_growth(f, config);
    }
}

} // namespace hoqc
