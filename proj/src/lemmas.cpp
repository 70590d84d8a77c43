#include "hoqc/lemmas.hpp"

#include <algorithm>
#include <cmath>

#include "hoqc/errors.hpp"
#include "hoqc/power.hpp"

namespace hoqc {

namespace {

// s^r * z2 with the convention that the product vanishes when z2 does.
double weighted(double s, double r, double z2) {
    if (z2 == 0.0)
        return 0.0;
    return std::pow(s, r) * z2;
}

double max_abs(std::initializer_list<double> values) {
    double m = 0.0;
    for (double v : values)
        m = std::max(m, std::abs(v));
    return m;
}

void require_small_p(double p, const char* what) {
    if (!(p > 1.0 && p <= 2.0))
        throw ParameterError(std::string(what) + ": requires 1 < p <= 2");
}

void require_eps(double eps, const char* what) {
    if (!(eps > 0.0 && eps < 1.0))
        throw ParameterError(std::string(what) + ": requires 0 < eps < 1");
}

SegmentIntegrand segment(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p) {
    return {x.squaredNorm(), x.dot(y), y.squaredNorm(), mu, p};
}

} // namespace

ScalarPotential power_potential(double mu, double p, double scale) {
    ScalarPotential f;
    f.value = [=](const Eigen::VectorXd& x) { return scale * power_g(x, mu, p); };
    f.grad = [=](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        if (mu == 0.0 && x.squaredNorm() == 0.0)
            return Eigen::VectorXd::Zero(x.size());
        return scale * grad_power_g(x, mu, p);
    };
    f.hessian_bound = scale * p * std::max(p - 1.0, 1.0);
    return f;
}

Verdict check_prima(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p, int quad_nodes) {
    if (quad_nodes < 16)
        throw ParameterError("check_prima: quad_nodes must be >= 16");
    const double r = (p - 2.0) / 2.0;
    const double total = mu * mu + x.squaredNorm() + y.squaredNorm();
    if (total == 0.0)
        return {};  // both sides vanish (p > 2) or diverge together (p < 2)
    QuadOptions opt;
    opt.nodes = quad_nodes;
    const QuadResult lhs = integrate_segment(segment(x, y, mu, p), SegmentWeight::one_minus_t, opt);
    const double rhs = kappa_p(p) * std::pow(total, r);
    return {lhs.value - rhs, lhs.error_bound, max_abs({lhs.value, rhs})};
}

Verdict check_seconda(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p, int quad_nodes) {
    if (quad_nodes < 16)
        throw ParameterError("check_seconda: quad_nodes must be >= 16");
    const double r = (p - 2.0) / 2.0;
    const double total = mu * mu + x.squaredNorm() + y.squaredNorm();
    if (total == 0.0)
        return {};
    QuadOptions opt;
    opt.nodes = quad_nodes;
    const QuadResult lhs = integrate_segment(segment(x, y, mu, p), SegmentWeight::one, opt);
    const double rhs = K_p(p) * std::pow(total, r);
    return {rhs - lhs.value, lhs.error_bound, max_abs({lhs.value, rhs})};
}

PairVerdict check_taylor_bounds(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p) {
    if (p < 2.0 && mu == 0.0 && x.squaredNorm() == 0.0)
        throw SingularPointError("check_taylor_bounds: gradient undefined at x = 0 for mu = 0, p < 2");
    const double r = (p - 2.0) / 2.0;
    const double remainder = taylor_remainder(x, y, mu, p);
    const double w = weighted(mu * mu + x.squaredNorm() + y.squaredNorm(), r, y.squaredNorm());
    const double lower = theta_p(p) * w;
    const double upper = Theta_p(p) * w;
    const double scale = max_abs({remainder, upper});
    PairVerdict out;
    out.first = {remainder - lower, 0.0, scale};
    out.second = Verdict{upper - remainder, 0.0, scale};
    return out;
}

PairVerdict check_product_taylor(const Eigen::VectorXd& x, const Eigen::VectorXd& xi, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& eta, double mu, double p, double beta) {
    if (!(p > 1.0) || !(beta >= 0.0))
        throw ParameterError("check_product_taylor: requires p > 1 and beta >= 0");
    // g_beta(x, y) = g_1(x, beta y) on the product space.
    Eigen::VectorXd base(x.size() + y.size());
    Eigen::VectorXd step(xi.size() + eta.size());
    base << x, beta * y;
    step << xi, beta * eta;
    const double r = (p - 2.0) / 2.0;
    const double theta = theta_p(p);
    const double remainder = taylor_remainder(base, step, mu, p);

    const double xi2 = xi.squaredNorm();
    const double eta2 = eta.squaredNorm();
    const double b2 = beta * beta;
    const double lower = theta * weighted(mu * mu + x.squaredNorm() + xi2 + b2 * y.squaredNorm() + b2 * eta2, r,
                                          xi2 + b2 * eta2);
    PairVerdict out;
    out.first = {remainder - lower, 0.0, max_abs({remainder, lower})};
    if (p >= 2.0) {
        const double a2 = mu * mu + x.squaredNorm();
        const double split = theta * weighted(a2 + xi2, r, xi2) + 0.5 * theta * b2 * weighted(a2, r, eta2) +
                             0.5 * theta * std::pow(beta, p) * std::pow(eta2, p / 2.0);
        out.second = Verdict{remainder - split, 0.0, max_abs({remainder, split})};
    }
    return out;
}

PairVerdict check_lemma10(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p, double eps) {
    require_small_p(p, "check_lemma10");
    require_eps(eps, "check_lemma10");
    const double r = (p - 2.0) / 2.0;
    const double m2 = mu * mu;
    const double x2 = x.squaredNorm();
    const double y2 = y.squaredNorm();
    const double s2 = (x + y).squaredNorm();
    const double vx = weighted(m2 + x2, r, x2);
    const double vy = weighted(m2 + y2, r, y2);
    const double vs = weighted(m2 + s2, r, s2);
    PairVerdict out;
    out.first = {2.0 * vx + 2.0 * vy - vs, 0.0, max_abs({vs, 2.0 * vx + 2.0 * vy})};
    const double lhs = std::pow(eps, (2.0 - p) / 2.0) * vy;
    const double rhs = weighted(m2 + x2 + y2, r, y2) + eps * vx;
    out.second = Verdict{rhs - lhs, 0.0, max_abs({lhs, rhs})};
    return out;
}

Verdict check_lemma12(double a, double b, double mu, double p, double eps) {
    require_small_p(p, "check_lemma12");
    require_eps(eps, "check_lemma12");
    if (a < 0.0 || b < 0.0 || mu < 0.0)
        throw ParameterError("check_lemma12: requires a, b, mu >= 0");
    const double r = (p - 2.0) / 2.0;
    const double lhs = std::pow(b, p);
    const double rhs = 8.0 * std::pow(eps, (p - 2.0) / p) * weighted(mu * mu + a * a + b * b, r, b * b) +
                       eps * std::pow(a, p) + eps * std::pow(mu, p);
    return {rhs - lhs, 0.0, max_abs({lhs, rhs})};
}

Verdict check_gradient_lipschitz(const ScalarPotential& f, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                 double mu, double p) {
    if (!f.grad)
        throw MissingGradientError("check_gradient_lipschitz: potential has no gradient");
    if (!f.hessian_bound)
        throw ParameterError("check_gradient_lipschitz: potential has no Hessian bound");
    const double lhs = (f.grad(x + y) - f.grad(x)).norm();
    const double r = (p - 2.0) / 2.0;
    const double y2 = y.squaredNorm();
    const double rhs = K_p(p) * *f.hessian_bound *
                       (y2 == 0.0 ? 0.0 : std::pow(mu * mu + x.squaredNorm() + y2, r) * std::sqrt(y2));
    return {rhs - lhs, 0.0, max_abs({lhs, rhs, f.grad(x).norm()})};
}

double lemma4_constant(double eps, double p) {
    if (!(eps > 0.0) || !(p > 1.0))
        throw ParameterError("lemma4_constant: requires eps > 0 and p > 1");
    if (p <= 2.0) {
        // |z| <= mu branch gives 1/eps, |z| > mu branch gives the Young constant
        // 1/(p (q eps)^{p-1}) times 2^{(2-p)/2}; plus 1 from the first term.
        const double q = p / (p - 1.0);
        const double young = std::pow(2.0, (2.0 - p) / 2.0) / (p * std::pow(q * eps, p - 1.0));
        return 1.0 + std::max(1.0 / eps, young);
    }
    const double r = (p - 2.0) / 2.0;
    const double k = std::max(1.0, std::pow(2.0, r - 1.0)) / (2.0 * eps);
    const double c_mixed = std::pow(6.0, r) + k;  // coefficient of |y|^{p-2} |z|^2
    const double s = p / (p - 2.0);
    const double t = p / 2.0;
    const double eta = std::pow(s * eps / (2.0 * c_mixed), 1.0 / s);
    const double z_p = std::pow(3.0, r) + c_mixed / (t * std::pow(eta, t));
    return std::max(c_mixed, z_p);
}

Verdict check_lemma4(const ScalarPotential& f, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& z, double mu, double p, double eps) {
    if (!f.value || !f.grad)
        throw MissingGradientError("check_lemma4: potential needs value and gradient");
    const double r = (p - 2.0) / 2.0;
    const double m2 = mu * mu;
    auto unit_lipschitz = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        const double lhs = (f.grad(a + b) - f.grad(a)).norm();
        const double b2 = b.squaredNorm();
        const double rhs = b2 == 0.0 ? 0.0 : std::pow(m2 + a.squaredNorm() + b2, r) * std::sqrt(b2);
        const double slack = 1e-10 * std::max({lhs, rhs, f.grad(a).norm()});
        if (lhs > rhs + slack)
            throw NormalizationError("check_lemma4: potential violates the unit gradient-Lipschitz bound");
    };
    unit_lipschitz(x, y);
    unit_lipschitz(x + y, z);
    unit_lipschitz(x, z);

    const double c = lemma4_constant(eps, p);
    const double f_xyz = f.value(x + y + z);
    const double f_xy = f.value(x + y);
    const double linear = f.grad(x).dot(z);
    const double lhs = std::abs(f_xyz - f_xy - linear);
    const double y2 = y.squaredNorm();
    const double z2 = z.squaredNorm();
    double rhs = eps * weighted(m2 + x.squaredNorm() + y2, r, y2);
    if (p <= 2.0) {
        rhs += c * weighted(m2 + z2, r, z2);
    } else {
        rhs += c * weighted(m2 + x.squaredNorm(), r, z2) + c * std::pow(z2, p / 2.0);
    }
    return {rhs - lhs, 0.0, max_abs({f_xyz, f_xy, linear, rhs})};
}

} // namespace hoqc
