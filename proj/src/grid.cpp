#include "hoqc/grid.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include <fftw3.h>

#include "hoqc/errors.hpp"

namespace hoqc {

PeriodicGrid::PeriodicGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
    if (dim != 2 && dim != 3)
        throw ParameterError("PeriodicGrid: dim must be 2 or 3");
    if (points_per_axis < 8 || (points_per_axis & (points_per_axis - 1)) != 0)
        throw ParameterError("PeriodicGrid: points per axis must be a power of two >= 8");
}

std::size_t PeriodicGrid::nodes() const {
    std::size_t total = 1;
    for (int a = 0; a < dim_; ++a)
        total *= static_cast<std::size_t>(n_);
    return total;
}

std::size_t PeriodicGrid::spectral_size() const { return nodes() / n_ * (n_ / 2 + 1); }

std::vector<int> PeriodicGrid::node_index(std::size_t node) const {
    std::vector<int> idx(dim_);
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(node % n_);
        node /= n_;
    }
    return idx;
}

namespace {

using Key = std::pair<int, int>;

struct Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    ~Plans() {
        if (r2c)
            fftw_destroy_plan(r2c);
        if (c2r)
            fftw_destroy_plan(c2r);
    }
};

std::mutex& planner_lock() {
    static std::mutex lock;
    return lock;
}

const Plans& plans_for(const PeriodicGrid& grid) {
    static std::map<Key, std::unique_ptr<Plans>> cache;
    std::lock_guard<std::mutex> guard(planner_lock());
    const Key key{grid.dim(), grid.n()};
    auto it = cache.find(key);
    if (it != cache.end())
        return *it->second;

    auto plans = std::make_unique<Plans>();
    std::vector<int> dims(grid.dim(), grid.n());
    double* real = fftw_alloc_real(grid.nodes());
    fftw_complex* cplx = fftw_alloc_complex(grid.spectral_size());
    // ESTIMATE keeps the plan, and hence every rounding pattern, identical
    // from run to run.
    const unsigned flags = FFTW_ESTIMATE;
    plans->r2c = fftw_plan_dft_r2c(grid.dim(), dims.data(), real, cplx, flags);
    plans->c2r = fftw_plan_dft_c2r(grid.dim(), dims.data(), cplx, real, flags);
    fftw_free(real);
    fftw_free(cplx);
    return *cache.emplace(key, std::move(plans)).first->second;
}

// Plans are made on fftw_alloc buffers without FFTW_UNALIGNED, so the
// new-array execute functions need the same SIMD alignment. Eigen's heap
// arrays normally have it; otherwise the data goes through aligned scratch.
bool aligned(double* a, void* b) {
    return fftw_alignment_of(a) == 0 && fftw_alignment_of(static_cast<double*>(b)) == 0;
}

struct Scratch {
    double* real;
    fftw_complex* cplx;
    explicit Scratch(const PeriodicGrid& g)
        : real(fftw_alloc_real(g.nodes())), cplx(fftw_alloc_complex(g.spectral_size())) {}
    ~Scratch() {
        fftw_free(real);
        fftw_free(cplx);
    }
    Scratch(const Scratch&) = delete;
    Scratch& operator=(const Scratch&) = delete;
};

std::shared_ptr<const SpectralTables> build_tables(const PeriodicGrid& grid) {
    auto t = std::make_shared<SpectralTables>(SpectralTables{grid, {}, {}, {}, {}, {}});
    const std::size_t size = grid.spectral_size();
    const int n = grid.n();
    const int half = n / 2 + 1;
    t->k.assign(grid.dim(), Eigen::ArrayXi(size));
    t->deriv.assign(grid.dim(), Eigen::ArrayXd(size));
    t->laplace = Eigen::ArrayXd::Zero(size);
    t->weight = Eigen::ArrayXd(size);
    t->kmax = Eigen::ArrayXi::Zero(size);
    for (std::size_t idx = 0; idx < size; ++idx) {
        std::size_t rest = idx;
        for (int a = grid.dim() - 1; a >= 0; --a) {
            int j;
            int k;
            if (a == grid.dim() - 1) {
                j = static_cast<int>(rest % half);
                rest /= half;
                k = j;
            } else {
                j = static_cast<int>(rest % n);
                rest /= n;
                k = (j <= n / 2) ? j : j - n;
            }
            t->k[a][idx] = k;
            const bool nyquist = std::abs(k) == n / 2;
            t->deriv[a][idx] = nyquist ? 0.0 : 2.0 * std::numbers::pi * k;
            t->laplace[idx] -= t->deriv[a][idx] * t->deriv[a][idx];
            t->kmax[idx] = std::max(t->kmax[idx], std::abs(k));
            if (a == grid.dim() - 1)
                t->weight[idx] = (j == 0 || j == n / 2) ? 1.0 : 2.0;
        }
    }
    return t;
}

} // namespace

std::shared_ptr<const SpectralTables> spectral_tables(const PeriodicGrid& grid) {
    static std::mutex lock;
    static std::map<Key, std::shared_ptr<const SpectralTables>> cache;
    std::lock_guard<std::mutex> guard(lock);
    const Key key{grid.dim(), grid.n()};
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, build_tables(grid)).first;
    return it->second;
}

Spectrum forward(const PeriodicGrid& grid, const Eigen::ArrayXd& values) {
    if (static_cast<std::size_t>(values.size()) != grid.nodes())
        throw ParameterError("forward: value count does not match grid");
    const Plans& plans = plans_for(grid);
    Spectrum out(grid.spectral_size());
    // r2c leaves its input intact; FFTW's signature is non-const regardless.
    Eigen::ArrayXd in = values;
    if (aligned(in.data(), out.data())) {
        fftw_execute_dft_r2c(plans.r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    } else {
        Scratch tmp(grid);
        std::memcpy(tmp.real, in.data(), sizeof(double) * grid.nodes());
        fftw_execute_dft_r2c(plans.r2c, tmp.real, tmp.cplx);
        std::memcpy(out.data(), tmp.cplx, sizeof(fftw_complex) * grid.spectral_size());
    }
    out /= static_cast<double>(grid.nodes());
    return out;
}

Eigen::ArrayXd inverse(const PeriodicGrid& grid, const Spectrum& spectrum) {
    if (static_cast<std::size_t>(spectrum.size()) != grid.spectral_size())
        throw ParameterError("inverse: spectrum size does not match grid");
    const Plans& plans = plans_for(grid);
    Spectrum in = spectrum;  // c2r destroys its input
    Eigen::ArrayXd out(grid.nodes());
    if (aligned(out.data(), in.data())) {
        fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    } else {
        Scratch tmp(grid);
        std::memcpy(tmp.cplx, in.data(), sizeof(fftw_complex) * grid.spectral_size());
        fftw_execute_dft_c2r(plans.c2r, tmp.cplx, tmp.real);
        std::memcpy(out.data(), tmp.real, sizeof(double) * grid.nodes());
    }
    return out;
}

double spectral_energy(const PeriodicGrid& grid, const Spectrum& spectrum) {
    const auto tables = spectral_tables(grid);
    return (tables->weight * spectrum.abs2()).sum();
}

Spectrum resample_spectrum(const PeriodicGrid& from, const Spectrum& spectrum, const PeriodicGrid& to) {
    if (from.dim() != to.dim())
        throw ParameterError("resample: dimension mismatch");
    const auto target = spectral_tables(to);
    const int limit = std::min(from.n(), to.n()) / 2;  // strictly below both Nyquist limits
    const int n_from = from.n();
    const int half_from = n_from / 2 + 1;
    Spectrum out = Spectrum::Zero(to.spectral_size());
    for (std::size_t idx = 0; idx < to.spectral_size(); ++idx) {
        if (target->kmax[idx] >= limit)
            continue;
        std::size_t src = 0;
        for (int a = 0; a < to.dim(); ++a) {
            const int k = target->k[a][idx];
            if (a == to.dim() - 1)
                src = src * half_from + k;
            else
                src = src * n_from + (k >= 0 ? k : k + n_from);
        }
        out[idx] = spectrum[src];
    }
    return out;
}

} // namespace hoqc
