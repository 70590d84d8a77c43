#pragma once

#include <optional>

namespace hoqc {

/// Structural constants shared by every inequality and construction.
struct ModelParams {
    double p = 2.0;   ///< growth exponent, p > 1
    double mu = 0.0;  ///< regularization offset, mu >= 0
    double nu = 1.0;  ///< ellipticity constant, nu > 0
    std::optional<double> lip;     ///< gradient Lipschitz constant L >= nu
    std::optional<double> growth;  ///< growth constant M > 0

    /// Throws ParameterError when an invariant fails.
    void validate() const;
};

/// Closed-form constants of the Taylor/integral estimates for g(x) = (mu^2+|x|^2)^{p/2}.
struct ConstantsTable {
    double kappa_p = 0.0;  ///< lower integral constant
    double K_p = 0.0;      ///< upper integral constant
    double theta_p = 0.0;  ///< lower Taylor remainder constant
    double Theta_p = 0.0;  ///< upper Taylor remainder constant
    double lambda = 0.0;   ///< shift nu / Theta_p
};

double kappa_p(double p);
double K_p(double p);
double theta_p(double p);
double Theta_p(double p);

/// Requires p > 1; validates the whole parameter set.
ConstantsTable constants_for(const ModelParams& params);

} // namespace hoqc
