#include "hoqc/korn.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "hoqc/errors.hpp"
#include "hoqc/rng.hpp"

namespace hoqc {

namespace {

constexpr double kDivTolerance = 1e-10;

// phi(s) and phi'(s) for the integrand phi(|M|^2).
struct Integrand {
    double p, mu;
    bool weighted;

    double value(double s) const {
        if (s == 0.0)
            return 0.0;
        return weighted ? std::pow(mu * mu + s, (p - 2.0) / 2.0) * s : std::pow(s, p / 2.0);
    }
    double derivative(double s) const {
        const double r = (p - 2.0) / 2.0;
        if (weighted) {
            const double b = mu * mu + s;
            if (b == 0.0)
                return 0.0;
            return std::pow(b, r) + r * std::pow(b, r - 1.0) * s;
        }
        return s == 0.0 ? 0.0 : (p / 2.0) * std::pow(s, r);
    }
};

struct RatioParts {
    double top = 0.0, bottom = 0.0;
    double ratio() const { return top / bottom; }
};

Integrand integrand_for(KornMode mode, double p, double mu) {
    return mode == KornMode::lemma1 ? Integrand{p, 0.0, false} : Integrand{p, mu, true};
}

// Numerator uses the full gradient (lemma1) or the symmetric part (lemma5).
RatioParts ratio_parts(const MatrixField& grad, KornMode mode, const Integrand& phi) {
    const MatrixField top = mode == KornMode::lemma1 ? grad : sym_part(grad);
    const MatrixField bottom = antisym_part(grad);
    const Eigen::ArrayXd ts = top.values().square().rowwise().sum();
    const Eigen::ArrayXd bs = bottom.values().square().rowwise().sum();
    RatioParts r;
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        r.top += phi.value(ts[i]);
        r.bottom += phi.value(bs[i]);
    }
    r.top /= double(ts.size());
    r.bottom /= double(ts.size());
    return r;
}

void check_admissible(const VectorField& psi, const MatrixField& grad) {
    const double scale = std::sqrt(grad.values().square().colwise().mean().sum());
    ScalarField trace = ScalarField::zeros(psi.grid());
    for (int a = 0; a < psi.grid().dim(); ++a)
        trace = trace + grad.entry(a, a);
    if (spectral_norm(trace) > kDivTolerance * std::max(scale, 1e-300) && spectral_norm(trace) > 0.0)
        throw ParameterError("Korn ratio: field is not divergence free");
    if (identity_residual(psi) > kDivTolerance)
        throw ParameterError("Korn ratio: identity laplacian = 2 div(antisym grad) fails");
}

double checked_ratio(const RatioParts& r) {
    if (!(r.bottom > 0.0) || r.bottom <= 1e-24 * r.top)
        throw DegenerateFieldError("Korn ratio: antisymmetric gradient vanishes");
    return r.ratio();
}

// L2 gradient of mean phi(|P grad psi|^2) with P the projection onto the
// symmetric or antisymmetric part (or identity): -div(2 phi'(|PM|^2) PM).
VectorField functional_gradient(const MatrixField& part, const Integrand& phi) {
    const Eigen::ArrayXd s = part.values().square().rowwise().sum();
    Eigen::ArrayXd w(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        w[i] = 2.0 * phi.derivative(s[i]);
    MatrixField flux(part.grid(), part.values().colwise() * w);
    return -1.0 * divergence(flux);
}

VectorField project(const VectorField& v, int kmax) {
    return band_limit(helmholtz(v).solenoidal, kmax, true);
}

double rms(const VectorField& v) { return std::sqrt(v.values().square().colwise().mean().sum()); }

} // namespace

KornMode parse_korn_mode(const std::string& name) {
    if (name == "lemma1")
        return KornMode::lemma1;
    if (name == "lemma5")
        return KornMode::lemma5;
    throw ParameterError("unknown Korn mode '" + name + "' (expected lemma1 or lemma5)");
}

std::string to_string(KornMode mode) { return mode == KornMode::lemma1 ? "lemma1" : "lemma5"; }

double identity_residual(const VectorField& psi) {
    const VectorField residual = laplacian(psi) - 2.0 * divergence(antisym_part(jacobian(psi)));
    const double norm = spectral_norm(psi);
    return norm == 0.0 ? 0.0 : spectral_norm(residual) / norm;
}

double korn_ratio(const VectorField& psi, double p) {
    if (!(p > 1.0))
        throw ParameterError("Korn ratio requires p > 1");
    const MatrixField grad = jacobian(psi);
    check_admissible(psi, grad);
    return checked_ratio(ratio_parts(grad, KornMode::lemma1, integrand_for(KornMode::lemma1, p, 0.0)));
}

double weighted_korn_ratio(const VectorField& psi, double p, double mu) {
    if (!(p > 1.0) || !(mu >= 0.0))
        throw ParameterError("weighted Korn ratio requires p > 1 and mu >= 0");
    const MatrixField grad = jacobian(psi);
    check_admissible(psi, grad);
    return checked_ratio(ratio_parts(grad, KornMode::lemma5, integrand_for(KornMode::lemma5, p, mu)));
}

void KornSettings::validate() const {
    if (dim != 2 && dim != 3)
        throw ParameterError("Korn estimate: dim must be 2 or 3");
    if (!(p > 1.0) || !(mu >= 0.0))
        throw ParameterError("Korn estimate: need p > 1 and mu >= 0");
    if (samples < 1)
        throw ParameterError("Korn estimate: samples must be at least 1");
    if (optimizer_steps < 0)
        throw ParameterError("Korn estimate: optimizer_steps must be nonnegative");
    const PeriodicGrid grid(dim, grid_n);
    if (max_wavenumber < 1 || max_wavenumber > grid.max_band())
        throw ParameterError("Korn estimate: max_wavenumber must lie in [1, N/3]");
}

KornEstimate estimate_constant(const KornSettings& s) {
    s.validate();
    const PeriodicGrid grid(s.dim, s.grid_n);
    const Integrand phi = integrand_for(s.mode, s.p, s.mu);
    // The plain ratio is scale invariant, so iterates are renormalized; the
    // weighted ratio at mu > 0 is not, and keeps its scale.
    const bool renormalize = s.mode == KornMode::lemma1 || s.mu == 0.0;

    KornEstimate est;
    est.settings = s;
    est.max_ratio = -std::numeric_limits<double>::infinity();
    est.min_start_ratio = std::numeric_limits<double>::infinity();

    for (int sample = 0; sample < s.samples; ++sample) {
        auto gen = make_stream(s.seed, static_cast<std::uint64_t>(sample));
        VectorField psi = random_vector_field(grid, s.max_wavenumber, gen(), true);

        auto evaluate = [&](const VectorField& f, MatrixField* grad_out) {
            MatrixField grad = jacobian(f);
            check_admissible(f, grad);
            const double r = checked_ratio(ratio_parts(grad, s.mode, phi));
            if (grad_out)
                *grad_out = std::move(grad);
            return r;
        };

        double ratio;
        MatrixField grad = MatrixField::zeros(grid);
        try {
            ratio = evaluate(psi, &grad);
        } catch (const DegenerateFieldError&) {
            ++est.degenerate;
            continue;
        }
        est.min_start_ratio = std::min(est.min_start_ratio, ratio);
        double step = 1e-2;

        for (int it = 0; it < s.optimizer_steps; ++it) {
            const MatrixField top = s.mode == KornMode::lemma1 ? grad : sym_part(grad);
            const RatioParts parts = ratio_parts(grad, s.mode, phi);
            const VectorField g_top = functional_gradient(top, phi);
            const VectorField g_bottom = functional_gradient(antisym_part(grad), phi);
            VectorField ascent = project((1.0 / parts.bottom) * (g_top - ratio * g_bottom), s.max_wavenumber);
            const double gnorm = rms(ascent);
            // Stationary up to rounding in the two competing gradients.
            if (!(gnorm > 1e-10 * rms(g_top) / parts.bottom))
                break;
            const double psi_norm = rms(psi);
            ascent = (psi_norm / gnorm) * ascent;

            bool accepted = false;
            for (int bt = 0; bt < 30 && !accepted; ++bt, step *= 0.5) {
                VectorField trial = psi + step * ascent;
                if (renormalize)
                    trial = (1.0 / rms(trial)) * trial;
                MatrixField trial_grad = MatrixField::zeros(grid);
                double r;
                try {
                    r = evaluate(trial, &trial_grad);
                } catch (const DegenerateFieldError&) {
                    continue;
                }
                if (r > ratio && r >= ratio + 1e-4 * step * gnorm * psi_norm) {
                    psi = std::move(trial);
                    grad = std::move(trial_grad);
                    ratio = r;
                    accepted = true;
                }
            }
            if (!accepted)
                break;
            step = std::min(step * 4.0, 1.0);
        }
        if (ratio > est.max_ratio) {
            est.max_ratio = ratio;
            est.argmax_sample = sample;
            est.argmax_field = psi;
        }
    }
    if (est.argmax_sample < 0)
        est.max_ratio = 0.0;
    return est;
}

} // namespace hoqc
