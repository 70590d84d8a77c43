#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace hoqc {

/// Uniform grid on the unit cube Q = (0,1)^n with N points per axis. Node
/// (i_0, ..., i_{n-1}) sits at x = i / N and has row-major index
/// ((i_0 N) + i_1) N + i_2.
class PeriodicGrid {
public:
    /// dim in {2, 3}; N >= 8 and a power of two.
    PeriodicGrid(int dim, int points_per_axis);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    std::size_t nodes() const;
    /// Length of the half spectrum (last axis keeps N/2 + 1 modes).
    std::size_t spectral_size() const;
    /// Largest wave number a band-limited test field may carry (N/3).
    int max_band() const { return n_ / 3; }

    /// Integer multi-index of a node.
    std::vector<int> node_index(std::size_t node) const;

    bool operator==(const PeriodicGrid& other) const = default;

private:
    int dim_;
    int n_;
};

using Spectrum = Eigen::ArrayXcd;

/// Wave-number tables for the half spectrum of a grid.
struct SpectralTables {
    PeriodicGrid grid;
    /// Integer wave numbers, one array per axis.
    std::vector<Eigen::ArrayXi> k;
    /// 2 pi k with Nyquist wave numbers zeroed: the symbol of d/dx_a is i * deriv[a].
    std::vector<Eigen::ArrayXd> deriv;
    /// Symbol of the spectral laplacian, -sum_a deriv[a]^2.
    Eigen::ArrayXd laplace;
    /// Multiplicity of each stored mode in the full spectrum (1 or 2).
    Eigen::ArrayXd weight;
    /// max_a |k_a| per mode.
    Eigen::ArrayXi kmax;
};

/// Cached tables for a grid; thread-safe.
std::shared_ptr<const SpectralTables> spectral_tables(const PeriodicGrid& grid);

/// Fourier amplitudes c_k with f(x) = sum_k c_k exp(2 pi i k.x) (forward
/// transform divided by the node count).
Spectrum forward(const PeriodicGrid& grid, const Eigen::ArrayXd& values);
Eigen::ArrayXd inverse(const PeriodicGrid& grid, const Spectrum& spectrum);

/// Grid mean of |f|^2 computed from amplitudes.
double spectral_energy(const PeriodicGrid& grid, const Spectrum& spectrum);

/// Amplitudes of the same trigonometric polynomial on another grid. Modes not
/// representable on the target are dropped.
Spectrum resample_spectrum(const PeriodicGrid& from, const Spectrum& spectrum, const PeriodicGrid& to);

} // namespace hoqc
