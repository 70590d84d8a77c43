#pragma once

#include <Eigen/Core>

namespace hoqc {

/// Small dense matrix (n <= 3) stored inline, no heap allocation.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

template <typename Derived>
typename Derived::PlainObject sym(const Eigen::MatrixBase<Derived>& a) {
    return (a + a.transpose()) / 2;
}

template <typename Derived>
typename Derived::PlainObject antisym(const Eigen::MatrixBase<Derived>& a) {
    return (a - a.transpose()) / 2;
}

/// Frobenius inner product A : B.
template <typename DA, typename DB>
typename DA::Scalar frobenius(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    return a.cwiseProduct(b).sum();
}

/// True when |A - A^t| <= tol (1 + |A|).
template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& a, double tol = 1e-12) {
    return a.rows() == a.cols() && (a - a.transpose()).norm() <= tol * (1.0 + a.norm());
}

} // namespace hoqc
