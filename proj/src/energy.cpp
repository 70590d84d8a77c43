#include "hoqc/energy.hpp"

#include <cmath>

#include <Eigen/LU>

#include "hoqc/errors.hpp"

namespace hoqc {

std::string to_string(EnergyDomain domain) { return domain == EnergyDomain::symmetric ? "symmetric" : "full"; }

EnergyFunction::EnergyFunction(std::string name, EnergyDomain domain, ModelParams params, Eval eval, Grad grad,
                               Certificates certificates)
    : name_(std::move(name)), domain_(domain), params_(params), eval_(std::move(eval)), grad_(std::move(grad)),
      certificates_(certificates) {}

double EnergyFunction::operator()(const Mat& a) const {
    if (domain_ == EnergyDomain::symmetric && !is_symmetric(a))
        throw DomainError(name_ + " is defined on symmetric matrices only");
    return eval_(a);
}

Mat EnergyFunction::gradient(const Mat& a) const {
    if (!grad_)
        throw MissingGradientError(name_ + " has no analytic gradient");
    if (domain_ == EnergyDomain::symmetric && !is_symmetric(a))
        throw DomainError(name_ + " is defined on symmetric matrices only");
    return grad_(a);
}

double power_energy(const Mat& a, double mu, double p) {
    return std::pow(mu * mu + a.squaredNorm(), p / 2.0);
}

Mat power_energy_gradient(const Mat& a, double mu, double p) {
    const double b = mu * mu + a.squaredNorm();
    if (b == 0.0)
        return Mat::Zero(a.rows(), a.cols());
    return p * std::pow(b, (p - 2.0) / 2.0) * a;
}

namespace {

Mat cofactor(const Mat& a) {
    const auto n = a.rows();
    Mat c(n, n);
    if (n == 2) {
        c << a(1, 1), -a(1, 0), -a(0, 1), a(0, 0);
    } else if (n == 3) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
                c(i, j) = a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1);
            }
    } else {
        throw ParameterError("cofactor: only 2x2 and 3x3 matrices are supported");
    }
    return c;
}

void require_2x2(const Mat& a) {
    if (a.rows() != 2 || a.cols() != 2)
        throw ParameterError("polyconvex-minor is defined for n = 2");
}

} // namespace

std::vector<std::string> catalog_names() {
    return {"power", "convex-quadratic", "polyconvex-minor", "linear", "det", "neg-quadratic", "full-quadratic",
            "double-well"};
}

EnergyFunction catalog(const std::string& name, const ModelParams& params) {
    params.validate();
    const double p = params.p, mu = params.mu;
    auto sym_domain = EnergyDomain::symmetric;
    auto full_domain = EnergyDomain::full;

    if (name == "power") {
        Certificates c;
        c.strict_nu = theta_p(p);
        c.hessian_bound = p * std::max(p - 1.0, 1.0);
        c.lipschitz = K_p(p) * *c.hessian_bound;
        c.growth = std::pow(2.0, std::max(p / 2.0 - 1.0, 0.0)) * std::max(1.0, std::pow(mu, p));
        ModelParams q = params;
        q.nu = *c.strict_nu;
        q.lip = c.lipschitz;
        q.growth = c.growth;
        return EnergyFunction(
            name, sym_domain, q, [mu, p](const Mat& a) { return power_energy(a, mu, p); },
            [mu, p](const Mat& a) { return power_energy_gradient(a, mu, p); }, c);
    }
    if (name == "convex-quadratic") {
        ModelParams q = params;
        q.p = 2.0;
        q.nu = 1.0;
        q.lip = 2.0;
        q.growth = 1.0;
        return EnergyFunction(
            name, sym_domain, q, [](const Mat& a) { return a.squaredNorm(); },
            [](const Mat& a) -> Mat { return 2.0 * a; }, Certificates{1.0, 2.0, 1.0, 2.0});
    }
    if (name == "polyconvex-minor") {
        return EnergyFunction(
            name, sym_domain, params,
            [](const Mat& a) {
                require_2x2(a);
                const double d = a.determinant();
                return d * d;
            },
            [](const Mat& a) -> Mat {
                require_2x2(a);
                return 2.0 * a.determinant() * cofactor(a);
            });
    }
    if (name == "linear") {
        Certificates c;
        c.strict_nu = 0.0;
        c.lipschitz = 0.0;
        return EnergyFunction(
            name, sym_domain, params, [](const Mat& a) { return a.trace(); },
            [](const Mat& a) -> Mat { return Mat::Identity(a.rows(), a.cols()); }, c);
    }
    if (name == "det") {
        return EnergyFunction(
            name, full_domain, params, [](const Mat& a) { return a.determinant(); },
            [](const Mat& a) { return cofactor(a); });
    }
    if (name == "neg-quadratic") {
        return EnergyFunction(
            name, full_domain, params, [](const Mat& a) { return -a.squaredNorm(); },
            [](const Mat& a) -> Mat { return -2.0 * a; });
    }
    if (name == "full-quadratic") {
        return EnergyFunction(
            name, full_domain, params, [](const Mat& a) { return a.squaredNorm(); },
            [](const Mat& a) -> Mat { return 2.0 * a; });
    }
    if (name == "double-well") {
        return EnergyFunction(
            name, full_domain, params,
            [](const Mat& a) {
                const double s = a.squaredNorm() - 1.0;
                return s * s;
            },
            [](const Mat& a) -> Mat { return 4.0 * (a.squaredNorm() - 1.0) * a; });
    }
    throw UnknownEnergyError("unknown energy '" + name + "'");
}

} // namespace hoqc
