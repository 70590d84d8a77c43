#pragma once

// Pointwise matrix energies with structural certificates, and the extension
// constructions that carry a symmetric-only energy to full matrices.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hoqc/matrix.hpp"
#include "hoqc/params.hpp"

namespace hoqc {

enum class EnergyDomain { symmetric, full };

std::string to_string(EnergyDomain domain);

/// Analytically known structural constants. Absent means "not claimed".
struct Certificates {
    std::optional<double> strict_nu;      ///< strict 2-quasiconvexity constant
    std::optional<double> lipschitz;      ///< L in |grad f(A+B) - grad f(A)| <= L W |B|
    std::optional<double> growth;         ///< M in |f(A)| <= M (1 + |A|^p)
    std::optional<double> hessian_bound;  ///< C in |hess f(A)| <= C (mu^2+|A|^2)^{(p-2)/2}
};

class EnergyFunction {
public:
    using Eval = std::function<double(const Mat&)>;
    using Grad = std::function<Mat(const Mat&)>;

    EnergyFunction(std::string name, EnergyDomain domain, ModelParams params, Eval eval, Grad grad = {},
                   Certificates certificates = {});

    const std::string& name() const { return name_; }
    EnergyDomain domain() const { return domain_; }
    const ModelParams& params() const { return params_; }
    const Certificates& certificates() const { return certificates_; }
    bool has_gradient() const { return static_cast<bool>(grad_); }

    /// Throws DomainError for a non-symmetric argument of a symmetric-only energy.
    double operator()(const Mat& a) const;
    /// Throws MissingGradientError when no analytic gradient exists.
    Mat gradient(const Mat& a) const;

    /// Unchecked evaluation for callers that already guarantee the domain.
    double eval_unchecked(const Mat& a) const { return eval_(a); }
    Mat gradient_unchecked(const Mat& a) const { return grad_(a); }

private:
    std::string name_;
    EnergyDomain domain_;
    ModelParams params_;
    Eval eval_;
    Grad grad_;
    Certificates certificates_;
};

/// Symmetric-only: power, convex-quadratic, polyconvex-minor (2x2), linear.
/// Full-matrix: det, neg-quadratic, full-quadratic, double-well.
/// Throws UnknownEnergyError for any other name.
EnergyFunction catalog(const std::string& name, const ModelParams& params);
std::vector<std::string> catalog_names();

/// g(A) = (mu^2 + |A|^2)^{p/2} and its gradient (zero at the singular point).
double power_energy(const Mat& a, double mu, double p);
Mat power_energy_gradient(const Mat& a, double mu, double p);

/// Explicit extension for p >= 2:
///   F(A) = f(A^s) - lambda g(A^s) + lambda (mu^2 + |A^s|^2 + beta^2 |A^a|^2)^{p/2}
/// with lambda = nu / Theta_p taken from f's strict certificate.
EnergyFunction extend_p_ge_2(const EnergyFunction& f, double beta);

/// Pre-envelope energy for 1 < p < 2:
///   G(A) = f(A^s) + beta ((mu^2 + |A^a|^2)^{p/2} - mu^p).
EnergyFunction extend_envelope_source_small_p(const EnergyFunction& f, double beta);

/// G_k(A) = f(A^s) + beta_k |A^a|^p.
EnergyFunction extend_theorem1_G_k(const EnergyFunction& f, double beta_k);

/// f_lambda = f - lambda g for 0 <= lambda <= nu / Theta_p. The strict
/// constant drops to nu - lambda Theta_p.
EnergyFunction lemma11_shift(const EnergyFunction& f, double lambda);

} // namespace hoqc
