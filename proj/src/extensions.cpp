#include "hoqc/energy.hpp"

#include <cmath>

#include "hoqc/errors.hpp"

namespace hoqc {

namespace {

void require_symmetric_source(const EnergyFunction& f) {
    if (f.domain() != EnergyDomain::symmetric)
        throw ParameterError("extension source must be a symmetric-only energy");
}

// f evaluated on A^s, which is exactly symmetric by construction.
double source_value(const EnergyFunction& f, const Mat& s) { return f.eval_unchecked(s); }

Mat source_gradient(const EnergyFunction& f, const Mat& s) { return sym(f.gradient_unchecked(s)); }

EnergyFunction::Grad maybe(const EnergyFunction& f, EnergyFunction::Grad g) {
    return f.has_gradient() ? std::move(g) : EnergyFunction::Grad{};
}

} // namespace

EnergyFunction extend_p_ge_2(const EnergyFunction& f, double beta) {
    require_symmetric_source(f);
    const double p = f.params().p, mu = f.params().mu;
    if (p < 2.0)
        throw ParameterError("the explicit extension needs p >= 2");
    if (!(beta > 0.0))
        throw ParameterError("extension: beta must be positive");
    const auto nu = f.certificates().strict_nu;
    if (!nu || !(*nu > 0.0))
        throw ParameterError("the explicit extension needs a strict 2-quasiconvexity certificate");
    const double lambda = *nu / Theta_p(p);
    const double mu2 = mu * mu, beta2 = beta * beta;

    auto eval = [f, lambda, mu, mu2, beta2, p](const Mat& a) {
        const Mat s = sym(a), w = antisym(a);
        return source_value(f, s) - lambda * power_energy(s, mu, p) +
               lambda * std::pow(mu2 + s.squaredNorm() + beta2 * w.squaredNorm(), p / 2.0);
    };
    auto grad = [f, lambda, mu, mu2, beta2, p](const Mat& a) -> Mat {
        const Mat s = sym(a), w = antisym(a);
        Mat g = source_gradient(f, s) - lambda * power_energy_gradient(s, mu, p);
        const double h = mu2 + s.squaredNorm() + beta2 * w.squaredNorm();
        if (h > 0.0)
            g += lambda * p * std::pow(h, (p - 2.0) / 2.0) * (s + beta2 * w);
        return g;
    };
    return EnergyFunction(f.name() + "/extended(beta=" + std::to_string(beta) + ")", EnergyDomain::full,
                          f.params(), eval, maybe(f, grad));
}

EnergyFunction extend_envelope_source_small_p(const EnergyFunction& f, double beta) {
    require_symmetric_source(f);
    const double p = f.params().p, mu = f.params().mu;
    if (!(p > 1.0 && p < 2.0))
        throw ParameterError("the envelope construction needs 1 < p < 2");
    if (!(beta > 0.0))
        throw ParameterError("extension: beta must be positive");
    const double mup = std::pow(mu, p);
    auto eval = [f, beta, mu, mup, p](const Mat& a) {
        return source_value(f, sym(a)) + beta * (power_energy(antisym(a), mu, p) - mup);
    };
    auto grad = [f, beta, mu, p](const Mat& a) -> Mat {
        return source_gradient(f, sym(a)) + beta * power_energy_gradient(antisym(a), mu, p);
    };
    return EnergyFunction(f.name() + "/envelope-source(beta=" + std::to_string(beta) + ")", EnergyDomain::full,
                          f.params(), eval, maybe(f, grad));
}

EnergyFunction extend_theorem1_G_k(const EnergyFunction& f, double beta_k) {
    require_symmetric_source(f);
    const double p = f.params().p;
    if (!(beta_k > 0.0))
        throw ParameterError("G_k: beta_k must be positive");
    auto eval = [f, beta_k, p](const Mat& a) {
        return source_value(f, sym(a)) + beta_k * std::pow(antisym(a).norm(), p);
    };
    auto grad = [f, beta_k, p](const Mat& a) -> Mat {
        const Mat w = antisym(a);
        Mat g = source_gradient(f, sym(a));
        const double r = w.norm();
        if (r > 0.0)
            g += beta_k * p * std::pow(r, p - 2.0) * w;
        return g;
    };
    return EnergyFunction(f.name() + "/G_k(beta=" + std::to_string(beta_k) + ")", EnergyDomain::full, f.params(),
                          eval, maybe(f, grad));
}

EnergyFunction lemma11_shift(const EnergyFunction& f, double lambda) {
    require_symmetric_source(f);
    const double p = f.params().p, mu = f.params().mu;
    const double nu = f.certificates().strict_nu.value_or(0.0);
    const double bound = nu / Theta_p(p);
    if (!(lambda >= 0.0) || lambda > bound)
        throw ParameterError("lemma11_shift: needs 0 <= lambda <= nu / Theta_p");
    auto eval = [f, lambda, mu, p](const Mat& a) { return f.eval_unchecked(a) - lambda * power_energy(a, mu, p); };
    auto grad = [f, lambda, mu, p](const Mat& a) -> Mat {
        return f.gradient_unchecked(a) - lambda * power_energy_gradient(a, mu, p);
    };
    Certificates c = f.certificates();
    c.strict_nu = std::max(nu - lambda * Theta_p(p), 0.0);
    if (c.lipschitz)
        *c.lipschitz += lambda * Theta_p(p);
    if (c.growth)
        *c.growth += lambda * std::pow(2.0, std::max(p / 2.0 - 1.0, 0.0)) * std::max(1.0, std::pow(mu, p));
    c.hessian_bound = std::nullopt;
    return EnergyFunction(f.name() + "/shifted(lambda=" + std::to_string(lambda) + ")", EnergyDomain::symmetric,
                          f.params(), eval, maybe(f, grad), c);
}

} // namespace hoqc
