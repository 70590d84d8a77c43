#pragma once

// Pointwise checks of the scalar inequalities satisfied by the power kernel
// g(x) = (mu^2+|x|^2)^{p/2} on a Hilbert space (here R^d).

#include <functional>
#include <optional>

#include <Eigen/Core>

#include "hoqc/params.hpp"
#include "hoqc/quadrature.hpp"

namespace hoqc {

/// Magnitudes below this fraction of the inequality's scale count as ties.
inline constexpr double kTieTolerance = 1e-12;

/// Outcome of checking one inequality "lhs <= rhs" (or its mirror).
/// margin is signed so that margin >= 0 means the inequality holds.
struct Verdict {
    double margin = 0.0;
    double error_bound = 0.0;  ///< quadrature error folded into the certificate
    double scale = 0.0;        ///< magnitude of the largest term

    bool holds() const { return margin >= -(error_bound + kTieTolerance * scale); }
    bool tight() const { return std::abs(margin) <= kTieTolerance * scale; }
    double relative() const { return scale > 0.0 ? margin / scale : margin; }
    /// Relative margin after crediting the quadrature error bound.
    double certified_relative() const {
        return scale > 0.0 ? (margin + error_bound) / scale : margin + error_bound;
    }
};

/// Verdict for the conjunction of two inequalities.
struct PairVerdict {
    Verdict first;
    std::optional<Verdict> second;
    bool holds() const { return first.holds() && (!second || second->holds()); }
};

/// A C^1 function on R^d with analytic gradient and, optionally, the constant C
/// of a Hessian bound |grad^2 f(x)| <= C (mu^2+|x|^2)^{(p-2)/2}.
struct ScalarPotential {
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
    std::optional<double> hessian_bound;
};

/// scale * g with its exact Hessian bound p max(p-1,1) scale.
ScalarPotential power_potential(double mu, double p, double scale = 1.0);

Verdict check_prima(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p,
                    int quad_nodes = 16);
Verdict check_seconda(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p,
                      int quad_nodes = 16);

/// first: lower Taylor bound with theta_p, second: upper bound with Theta_p.
PairVerdict check_taylor_bounds(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p);

/// Product-space Taylor bounds for g_beta(x, y) = g(x, beta y); the second
/// (split) inequality is only checked for p >= 2.
PairVerdict check_product_taylor(const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                                 const Eigen::VectorXd& y, const Eigen::VectorXd& eta, double mu,
                                 double p, double beta);

/// Both inequalities of the 1 < p <= 2 comparison lemma.
PairVerdict check_lemma10(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double mu, double p,
                          double eps);

Verdict check_lemma12(double a, double b, double mu, double p, double eps);

/// |grad f(x+y) - grad f(x)| <= K_p C (mu^2+|x|^2+|y|^2)^{(p-2)/2} |y|.
Verdict check_gradient_lipschitz(const ScalarPotential& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, double mu, double p);

/// Explicit constant c_{eps,p} of the three-point estimate.
double lemma4_constant(double eps, double p);

/// Three-point estimate for f normalized to unit gradient-Lipschitz constant.
/// Throws NormalizationError when f fails that normalization at the probe points.
Verdict check_lemma4(const ScalarPotential& f, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& z, double mu, double p, double eps);

} // namespace hoqc
