#pragma once

// Q-periodic scalar, vector and matrix fields sampled on a PeriodicGrid, with
// spectral calculus. Fields are values: every operation returns a new field.

#include <cstdint>

#include <Eigen/Core>

#include "hoqc/grid.hpp"
#include "hoqc/matrix.hpp"

namespace hoqc {

class ScalarField {
public:
    ScalarField(PeriodicGrid grid, Eigen::ArrayXd values);
    static ScalarField zeros(const PeriodicGrid& grid);
    /// Samples f at every node.
    template <typename F>
    static ScalarField sample(const PeriodicGrid& grid, F&& f);

    const PeriodicGrid& grid() const { return grid_; }
    const Eigen::ArrayXd& values() const { return values_; }
    double operator[](std::size_t node) const { return values_[static_cast<Eigen::Index>(node)]; }

private:
    PeriodicGrid grid_;
    Eigen::ArrayXd values_;
};

/// n components per node; column i of values() holds component i.
class VectorField {
public:
    VectorField(PeriodicGrid grid, Eigen::ArrayXXd values);
    static VectorField zeros(const PeriodicGrid& grid);

    const PeriodicGrid& grid() const { return grid_; }
    const Eigen::ArrayXXd& values() const { return values_; }
    ScalarField component(int i) const;
    Vec at(std::size_t node) const;

private:
    PeriodicGrid grid_;
    Eigen::ArrayXXd values_;
};

/// n x n entries per node; column i*n + j of values() holds entry (i, j). A
/// jacobian has entry (i, j) = d psi_i / d x_j.
class MatrixField {
public:
    MatrixField(PeriodicGrid grid, Eigen::ArrayXXd values);
    static MatrixField zeros(const PeriodicGrid& grid);

    const PeriodicGrid& grid() const { return grid_; }
    const Eigen::ArrayXXd& values() const { return values_; }
    ScalarField entry(int i, int j) const;
    Mat at(std::size_t node) const;

private:
    PeriodicGrid grid_;
    Eigen::ArrayXXd values_;
};

template <typename F>
ScalarField ScalarField::sample(const PeriodicGrid& grid, F&& f) {
    Eigen::ArrayXd v(grid.nodes());
    Eigen::VectorXd x(grid.dim());
    for (std::size_t node = 0; node < grid.nodes(); ++node) {
        const auto idx = grid.node_index(node);
        for (int a = 0; a < grid.dim(); ++a)
            x[a] = idx[a] * grid.spacing();
        v[static_cast<Eigen::Index>(node)] = f(x);
    }
    return ScalarField(grid, std::move(v));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
MatrixField operator-(const MatrixField& a, const MatrixField& b);

VectorField gradient(const ScalarField& phi);
MatrixField jacobian(const VectorField& v);
/// Exactly symmetric at every node.
MatrixField hessian(const ScalarField& phi);
ScalarField divergence(const VectorField& v);
/// Row-by-row divergence: (div M)_i = sum_j d M_ij / d x_j.
VectorField divergence(const MatrixField& m);
ScalarField laplacian(const ScalarField& phi);
VectorField laplacian(const VectorField& v);

/// Zero-mean periodic solution of laplacian(u) = rhs. Throws ParameterError
/// if rhs has nonzero mean (relative tolerance 1e-10).
ScalarField solve_poisson(const ScalarField& rhs);

struct HelmholtzParts {
    ScalarField potential;    ///< zero mean
    VectorField solenoidal;   ///< divergence free
};

/// varphi = gradient(potential) + solenoidal.
HelmholtzParts helmholtz(const VectorField& varphi);

MatrixField sym_part(const MatrixField& m);
MatrixField antisym_part(const MatrixField& m);

/// Grid mean (cell volume 1/N^n over a unit cube).
double integrate(const ScalarField& f);

/// Nodewise Frobenius/Euclidean norms.
ScalarField pointwise_norm(const VectorField& v);
ScalarField pointwise_norm(const MatrixField& m);

/// Root mean square via Parseval.
double spectral_norm(const ScalarField& f);
double spectral_norm(const VectorField& v);

/// Keep only modes with max_a |k_a| <= kmax (and drop the mean when asked).
ScalarField band_limit(const ScalarField& f, int kmax, bool zero_mean = false);
VectorField band_limit(const VectorField& v, int kmax, bool zero_mean = false);
/// Spectral interpolation onto another grid of the same dimension.
ScalarField resample(const ScalarField& f, const PeriodicGrid& to);
VectorField resample(const VectorField& v, const PeriodicGrid& to);

enum class FieldKind { scalar, vector, divfree_vector };

/// Band-limited random trigonometric polynomial with grid mean |f|^2 = 1.
/// The amplitudes depend only on (dim, kmax, seed, kind), so the same seed
/// gives the same polynomial on every grid that resolves it. Requires
/// kmax <= N/3.
ScalarField random_scalar_field(const PeriodicGrid& grid, int max_wavenumber, std::uint64_t seed);
VectorField random_vector_field(const PeriodicGrid& grid, int max_wavenumber, std::uint64_t seed,
                                bool divergence_free);

} // namespace hoqc
