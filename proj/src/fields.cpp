#include "hoqc/fields.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "hoqc/errors.hpp"
#include "hoqc/rng.hpp"

namespace hoqc {

namespace {

constexpr std::complex<double> I(0.0, 1.0);

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b) {
    if (!(a == b))
        throw ParameterError("fields live on different grids");
}

Eigen::ArrayXd derive(const PeriodicGrid& grid, const SpectralTables& t, const Spectrum& s, int axis) {
    return inverse(grid, (I * t.deriv[axis]) * s);
}

Eigen::ArrayXd derive2(const PeriodicGrid& grid, const SpectralTables& t, const Spectrum& s, int a, int b) {
    return inverse(grid, (-(t.deriv[a] * t.deriv[b])) * s);
}

std::size_t spectral_index(const PeriodicGrid& grid, const std::vector<int>& k) {
    const int n = grid.n();
    std::size_t idx = 0;
    for (int a = 0; a < grid.dim(); ++a) {
        if (a == grid.dim() - 1)
            idx = idx * (n / 2 + 1) + k[a];
        else
            idx = idx * n + (k[a] >= 0 ? k[a] : k[a] + n);
    }
    return idx;
}

Spectrum masked(const SpectralTables& t, const Spectrum& s, int kmax, bool zero_mean) {
    Spectrum out = (t.kmax <= kmax).select(s, Spectrum::Zero(s.size()));
    if (zero_mean)
        out[0] = 0.0;
    return out;
}

// Visits every wave vector in [-kmax, kmax]^dim whose first nonzero entry is
// positive, in lexicographic order.
template <typename F>
void for_each_positive_mode(int dim, int kmax, F&& f) {
    std::vector<int> k(dim, -kmax);
    while (true) {
        int first = 0;
        for (int a = 0; a < dim; ++a)
            if (k[a] != 0) {
                first = k[a];
                break;
            }
        if (first > 0)
            f(k);
        int a = dim - 1;
        while (a >= 0 && k[a] == kmax) {
            k[a] = -kmax;
            --a;
        }
        if (a < 0)
            break;
        ++k[a];
    }
}

// Fills amplitudes for `components` fields from one random stream.
std::vector<Spectrum> random_spectra(const PeriodicGrid& grid, int kmax, std::uint64_t seed, int components,
                                     bool divergence_free) {
    if (kmax < 1 || kmax > grid.max_band())
        throw ParameterError("random field: max_wavenumber must lie in [1, N/3]");
    std::mt19937_64 gen = make_stream(seed, 0);
    std::normal_distribution<double> normal;
    std::vector<Spectrum> spectra(components, Spectrum::Zero(grid.spectral_size()));
    const int dim = grid.dim();
    for_each_positive_mode(dim, kmax, [&](const std::vector<int>& k) {
        double k2 = 0.0;
        for (int v : k)
            k2 += double(v) * v;
        const double amplitude = 1.0 / std::sqrt(k2);
        Eigen::VectorXcd c(components);
        for (int i = 0; i < components; ++i) {
            const double re = normal(gen);
            const double im = normal(gen);
            c[i] = amplitude * std::complex<double>(re, im);
        }
        if (divergence_free) {
            std::complex<double> kc = 0.0;
            for (int a = 0; a < dim; ++a)
                kc += double(k[a]) * c[a];
            for (int a = 0; a < dim; ++a)
                c[a] -= kc * double(k[a]) / k2;
        }
        std::vector<int> neg(k);
        for (int& v : neg)
            v = -v;
        const int last = k[dim - 1];
        for (int i = 0; i < components; ++i) {
            if (last > 0) {
                spectra[i][spectral_index(grid, k)] = c[i];
            } else if (last < 0) {
                spectra[i][spectral_index(grid, neg)] = std::conj(c[i]);
            } else {
                spectra[i][spectral_index(grid, k)] = c[i];
                spectra[i][spectral_index(grid, neg)] = std::conj(c[i]);
            }
        }
    });
    double energy = 0.0;
    for (const auto& s : spectra)
        energy += spectral_energy(grid, s);
    for (auto& s : spectra)
        s /= std::sqrt(energy);
    return spectra;
}

} // namespace

ScalarField::ScalarField(PeriodicGrid grid, Eigen::ArrayXd values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.nodes())
        throw ParameterError("ScalarField: value count does not match grid");
}

ScalarField ScalarField::zeros(const PeriodicGrid& grid) {
    return ScalarField(grid, Eigen::ArrayXd::Zero(grid.nodes()));
}

VectorField::VectorField(PeriodicGrid grid, Eigen::ArrayXXd values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.rows()) != grid_.nodes() || values_.cols() != grid_.dim())
        throw ParameterError("VectorField: shape does not match grid");
}

VectorField VectorField::zeros(const PeriodicGrid& grid) {
    return VectorField(grid, Eigen::ArrayXXd::Zero(grid.nodes(), grid.dim()));
}

ScalarField VectorField::component(int i) const { return ScalarField(grid_, values_.col(i)); }

Vec VectorField::at(std::size_t node) const {
    return values_.row(static_cast<Eigen::Index>(node)).transpose().matrix();
}

MatrixField::MatrixField(PeriodicGrid grid, Eigen::ArrayXXd values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.rows()) != grid_.nodes() || values_.cols() != grid_.dim() * grid_.dim())
        throw ParameterError("MatrixField: shape does not match grid");
}

MatrixField MatrixField::zeros(const PeriodicGrid& grid) {
    return MatrixField(grid, Eigen::ArrayXXd::Zero(grid.nodes(), grid.dim() * grid.dim()));
}

ScalarField MatrixField::entry(int i, int j) const { return ScalarField(grid_, values_.col(i * grid_.dim() + j)); }

Mat MatrixField::at(std::size_t node) const {
    const int n = grid_.dim();
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = values_(static_cast<Eigen::Index>(node), i * n + j);
    return m;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid());
    return ScalarField(a.grid(), a.values() + b.values());
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid());
    return ScalarField(a.grid(), a.values() - b.values());
}

ScalarField operator*(double s, const ScalarField& a) { return ScalarField(a.grid(), s * a.values()); }

VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid());
    return VectorField(a.grid(), a.values() + b.values());
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid());
    return VectorField(a.grid(), a.values() - b.values());
}

VectorField operator*(double s, const VectorField& a) { return VectorField(a.grid(), s * a.values()); }

MatrixField operator-(const MatrixField& a, const MatrixField& b) {
    require_same_grid(a.grid(), b.grid());
    return MatrixField(a.grid(), a.values() - b.values());
}

VectorField gradient(const ScalarField& phi) {
    const auto& grid = phi.grid();
    const auto t = spectral_tables(grid);
    const Spectrum s = forward(grid, phi.values());
    Eigen::ArrayXXd out(grid.nodes(), grid.dim());
    for (int a = 0; a < grid.dim(); ++a)
        out.col(a) = derive(grid, *t, s, a);
    return VectorField(grid, std::move(out));
}

MatrixField jacobian(const VectorField& v) {
    const auto& grid = v.grid();
    const int n = grid.dim();
    const auto t = spectral_tables(grid);
    Eigen::ArrayXXd out(grid.nodes(), n * n);
    for (int i = 0; i < n; ++i) {
        const Spectrum s = forward(grid, v.values().col(i));
        for (int j = 0; j < n; ++j)
            out.col(i * n + j) = derive(grid, *t, s, j);
    }
    return MatrixField(grid, std::move(out));
}

MatrixField hessian(const ScalarField& phi) {
    const auto& grid = phi.grid();
    const int n = grid.dim();
    const auto t = spectral_tables(grid);
    const Spectrum s = forward(grid, phi.values());
    Eigen::ArrayXXd out(grid.nodes(), n * n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            out.col(i * n + j) = derive2(grid, *t, s, i, j);
            if (j != i)
                out.col(j * n + i) = out.col(i * n + j);
        }
    }
    return MatrixField(grid, std::move(out));
}

ScalarField divergence(const VectorField& v) {
    const auto& grid = v.grid();
    const auto t = spectral_tables(grid);
    Spectrum acc = Spectrum::Zero(grid.spectral_size());
    for (int a = 0; a < grid.dim(); ++a)
        acc += (I * t->deriv[a]) * forward(grid, v.values().col(a));
    return ScalarField(grid, inverse(grid, acc));
}

VectorField divergence(const MatrixField& m) {
    const auto& grid = m.grid();
    const int n = grid.dim();
    const auto t = spectral_tables(grid);
    Eigen::ArrayXXd out(grid.nodes(), n);
    for (int i = 0; i < n; ++i) {
        Spectrum acc = Spectrum::Zero(grid.spectral_size());
        for (int j = 0; j < n; ++j)
            acc += (I * t->deriv[j]) * forward(grid, m.values().col(i * n + j));
        out.col(i) = inverse(grid, acc);
    }
    return VectorField(grid, std::move(out));
}

ScalarField laplacian(const ScalarField& phi) {
    const auto& grid = phi.grid();
    const auto t = spectral_tables(grid);
    return ScalarField(grid, inverse(grid, t->laplace * forward(grid, phi.values())));
}

VectorField laplacian(const VectorField& v) {
    const auto& grid = v.grid();
    const auto t = spectral_tables(grid);
    Eigen::ArrayXXd out(grid.nodes(), grid.dim());
    for (int a = 0; a < grid.dim(); ++a)
        out.col(a) = inverse(grid, t->laplace * forward(grid, v.values().col(a)));
    return VectorField(grid, std::move(out));
}

ScalarField solve_poisson(const ScalarField& rhs) {
    const auto& grid = rhs.grid();
    const auto t = spectral_tables(grid);
    Spectrum s = forward(grid, rhs.values());
    const double rms = std::sqrt(spectral_energy(grid, s));
    if (std::abs(s[0]) > 1e-10 * rms)
        throw ParameterError("solve_poisson: right-hand side has nonzero mean");
    for (Eigen::Index i = 0; i < s.size(); ++i)
        s[i] = t->laplace[i] != 0.0 ? s[i] / t->laplace[i] : 0.0;
    return ScalarField(grid, inverse(grid, s));
}

HelmholtzParts helmholtz(const VectorField& varphi) {
    const auto& grid = varphi.grid();
    const int n = grid.dim();
    const auto t = spectral_tables(grid);
    std::vector<Spectrum> comps;
    Spectrum div = Spectrum::Zero(grid.spectral_size());
    for (int a = 0; a < n; ++a) {
        comps.push_back(forward(grid, varphi.values().col(a)));
        div += (I * t->deriv[a]) * comps.back();
    }
    Spectrum pot(div.size());
    for (Eigen::Index i = 0; i < div.size(); ++i)
        pot[i] = t->laplace[i] != 0.0 ? div[i] / t->laplace[i] : 0.0;
    Eigen::ArrayXXd sol(grid.nodes(), n);
    for (int a = 0; a < n; ++a)
        sol.col(a) = inverse(grid, comps[a] - (I * t->deriv[a]) * pot);
    return {ScalarField(grid, inverse(grid, pot)), VectorField(grid, std::move(sol))};
}

MatrixField sym_part(const MatrixField& m) {
    const int n = m.grid().dim();
    Eigen::ArrayXXd out(m.values().rows(), n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.col(i * n + j) = 0.5 * (m.values().col(i * n + j) + m.values().col(j * n + i));
    return MatrixField(m.grid(), std::move(out));
}

MatrixField antisym_part(const MatrixField& m) {
    const int n = m.grid().dim();
    Eigen::ArrayXXd out(m.values().rows(), n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.col(i * n + j) = 0.5 * (m.values().col(i * n + j) - m.values().col(j * n + i));
    return MatrixField(m.grid(), std::move(out));
}

double integrate(const ScalarField& f) { return f.values().mean(); }

ScalarField pointwise_norm(const VectorField& v) {
    return ScalarField(v.grid(), v.values().square().rowwise().sum().sqrt());
}

ScalarField pointwise_norm(const MatrixField& m) {
    return ScalarField(m.grid(), m.values().square().rowwise().sum().sqrt());
}

double spectral_norm(const ScalarField& f) {
    return std::sqrt(spectral_energy(f.grid(), forward(f.grid(), f.values())));
}

double spectral_norm(const VectorField& v) {
    double energy = 0.0;
    for (int a = 0; a < v.grid().dim(); ++a)
        energy += spectral_energy(v.grid(), forward(v.grid(), v.values().col(a)));
    return std::sqrt(energy);
}

ScalarField band_limit(const ScalarField& f, int kmax, bool zero_mean) {
    const auto t = spectral_tables(f.grid());
    return ScalarField(f.grid(), inverse(f.grid(), masked(*t, forward(f.grid(), f.values()), kmax, zero_mean)));
}

VectorField band_limit(const VectorField& v, int kmax, bool zero_mean) {
    const auto& grid = v.grid();
    const auto t = spectral_tables(grid);
    Eigen::ArrayXXd out(grid.nodes(), grid.dim());
    for (int a = 0; a < grid.dim(); ++a)
        out.col(a) = inverse(grid, masked(*t, forward(grid, v.values().col(a)), kmax, zero_mean));
    return VectorField(grid, std::move(out));
}

ScalarField resample(const ScalarField& f, const PeriodicGrid& to) {
    return ScalarField(to, inverse(to, resample_spectrum(f.grid(), forward(f.grid(), f.values()), to)));
}

VectorField resample(const VectorField& v, const PeriodicGrid& to) {
    if (v.grid().dim() != to.dim())
        throw ParameterError("resample: dimension mismatch");
    Eigen::ArrayXXd out(to.nodes(), to.dim());
    for (int a = 0; a < to.dim(); ++a)
        out.col(a) = inverse(to, resample_spectrum(v.grid(), forward(v.grid(), v.values().col(a)), to));
    return VectorField(to, std::move(out));
}

ScalarField random_scalar_field(const PeriodicGrid& grid, int max_wavenumber, std::uint64_t seed) {
    auto spectra = random_spectra(grid, max_wavenumber, seed, 1, false);
    return ScalarField(grid, inverse(grid, spectra[0]));
}

VectorField random_vector_field(const PeriodicGrid& grid, int max_wavenumber, std::uint64_t seed,
                                bool divergence_free) {
    auto spectra = random_spectra(grid, max_wavenumber, seed, grid.dim(), divergence_free);
    Eigen::ArrayXXd out(grid.nodes(), grid.dim());
    for (int a = 0; a < grid.dim(); ++a)
        out.col(a) = inverse(grid, spectra[a]);
    return VectorField(grid, std::move(out));
}

} // namespace hoqc
