#include "hoqc/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hoqc/errors.hpp"

namespace hoqc {

namespace {

void require_p(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) {
        std::ostringstream msg;
        msg << "exponent p must satisfy p > 1 (got " << p << ")";
        throw ParameterError(msg.str());
    }
}

} // namespace

void ModelParams::validate() const {
    require_p(p);
    if (!(mu >= 0.0))
        throw ParameterError("mu must be >= 0");
    if (!(nu > 0.0))
        throw ParameterError("nu must be > 0");
    if (lip && !(*lip >= nu))
        throw ParameterError("Lipschitz constant L must satisfy L >= nu");
    if (growth && !(*growth > 0.0))
        throw ParameterError("growth constant M must be > 0");
}

double kappa_p(double p) {
    require_p(p);
    if (p <= 2.0)
        return std::pow(2.0, p / 2.0 - 2.0);
    // Smaller of the two case bounds (|y|^2 <= 4(mu^2+|x|^2) and its complement).
    return std::pow(5.0, (2.0 - p) / 2.0) / (4.0 * p * (p - 1.0));
}

double K_p(double p) {
    require_p(p);
    if (p >= 2.0)
        return std::pow(2.0, (p - 2.0) / 2.0);
    const double b_le_a = std::pow(2.0, (2.0 - p) / 2.0);
    const double a_lt_b = std::pow(2.0, 1.5 * (2.0 - p));
    return std::max(b_le_a, a_lt_b) / (p - 1.0);
}

double theta_p(double p) { return p * std::min(p - 1.0, 1.0) * kappa_p(p); }

double Theta_p(double p) { return p * std::max(p - 1.0, 1.0) * K_p(p); }

ConstantsTable constants_for(const ModelParams& params) {
    params.validate();
    ConstantsTable table;
    table.kappa_p = kappa_p(params.p);
    table.K_p = K_p(params.p);
    table.theta_p = theta_p(params.p);
    table.Theta_p = Theta_p(params.p);
    table.lambda = params.nu / table.Theta_p;
    return table;
}

} // namespace hoqc
