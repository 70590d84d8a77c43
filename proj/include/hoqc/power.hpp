#pragma once

// Power kernels g(x) = (mu^2 + |x|^2)^{p/2} on any Eigen dense type. Matrices
// use the Frobenius norm, so the same code covers vectors and M^{n x n}.

#include <cmath>

#include <Eigen/Core>

#include "hoqc/errors.hpp"

namespace hoqc {

template <typename Derived>
typename Derived::Scalar power_g(const Eigen::MatrixBase<Derived>& x,
                                 typename Derived::Scalar mu,
                                 typename Derived::Scalar p) {
    using std::pow;
    return pow(mu * mu + x.squaredNorm(), p / 2);
}

/// p (mu^2+|x|^2)^{(p-2)/2} x. Throws SingularPointError at mu = 0, x = 0, p < 2.
template <typename Derived>
typename Derived::PlainObject grad_power_g(const Eigen::MatrixBase<Derived>& x,
                                           typename Derived::Scalar mu,
                                           typename Derived::Scalar p) {
    using std::pow;
    const auto s = mu * mu + x.squaredNorm();
    if (s == 0) {
        if (p < 2)
            throw SingularPointError("grad_power_g: singular point (mu = 0, x = 0, p < 2)");
        return Derived::PlainObject::Zero(x.rows(), x.cols());
    }
    return (p * pow(s, (p - 2) / 2)) * x.derived();
}

namespace detail {

// expm1(z) - z without cancellation.
template <typename Scalar>
Scalar expm1_minus_id(Scalar z) {
    using std::abs;
    if (abs(z) > Scalar(0.5))
        return std::expm1(z) - z;
    Scalar term = z * z / 2;
    Scalar sum = term;
    for (int k = 3; k < 40; ++k) {
        term *= z / k;
        sum += term;
        if (abs(term) <= abs(sum) * Scalar(1e-18))
            break;
    }
    return sum;
}

// log1p(u) - u without cancellation.
template <typename Scalar>
Scalar log1p_minus_id(Scalar u) {
    using std::abs;
    if (abs(u) > Scalar(0.25))
        return std::log1p(u) - u;
    Scalar power = u * u;
    Scalar sum = 0;
    for (int k = 2; k < 80; ++k) {
        const Scalar term = ((k % 2 == 0) ? -power : power) / k;
        sum += term;
        if (abs(term) <= abs(sum) * Scalar(1e-18))
            break;
        power *= u;
    }
    return sum;
}

} // namespace detail

/// Taylor remainder g(x+y) - g(x) - grad g(x).y, evaluated without the
/// catastrophic cancellation of the naive three-term difference.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar taylor_remainder(const Eigen::MatrixBase<DerivedX>& x,
                                           const Eigen::MatrixBase<DerivedY>& y,
                                           typename DerivedX::Scalar mu,
                                           typename DerivedX::Scalar p) {
    using Scalar = typename DerivedX::Scalar;
    using std::pow;
    const Scalar xy = x.cwiseProduct(y).sum();
    const Scalar yy = y.squaredNorm();
    const Scalar b = mu * mu + x.squaredNorm();
    if (b == 0) {
        // Expansion point at the origin with mu = 0: g(y) exactly.
        return pow(yy, p / 2);
    }
    const Scalar half_p = p / 2;
    const Scalar u = (2 * xy + yy) / b;  // a/b - 1, a = mu^2 + |x+y|^2
    if (u <= Scalar(-1)) {
        // x + y sits at the origin (mu = 0) up to rounding.
        return -pow(b, half_p) - p * pow(b, half_p - 1) * xy;
    }
    const Scalar log_ratio = std::log1p(u);
    // b^{p/2}[expm1(s L) - s u] + (p/2) b^{p/2-1} |y|^2, and
    // expm1(sL) - s u = [expm1(sL) - sL] + s [L - u].
    const Scalar bracket = detail::expm1_minus_id(half_p * log_ratio) + half_p * detail::log1p_minus_id(u);
    return pow(b, half_p) * bracket + half_p * pow(b, half_p - 1) * yy;
}

} // namespace hoqc
