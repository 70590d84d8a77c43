#pragma once

// Korn-type ratios for divergence-free periodic fields and empirical lower
// bounds for their constants.

#include <cstdint>
#include <optional>
#include <string>

#include "hoqc/fields.hpp"

namespace hoqc {

enum class KornMode { lemma1, lemma5 };

KornMode parse_korn_mode(const std::string& name);
std::string to_string(KornMode mode);

/// Relative residual |laplacian(psi) - 2 div(antisym(grad psi))| / |psi| in
/// the spectral (RMS) norm. Zero for divergence-free psi.
double identity_residual(const VectorField& psi);

/// integrate(|grad psi|^p) / integrate(|antisym(grad psi)|^p). Throws
/// ParameterError if psi is not divergence free or fails the residual check,
/// DegenerateFieldError if the denominator vanishes.
double korn_ratio(const VectorField& psi, double p);

/// Weighted ratio with w(s) = (mu^2 + s)^{(p-2)/2} s, s = |sym|^2 on top and
/// s = |antisym|^2 below. Same error contract as korn_ratio.
double weighted_korn_ratio(const VectorField& psi, double p, double mu);

struct KornSettings {
    int dim = 2;
    double p = 2.0;
    double mu = 0.0;
    KornMode mode = KornMode::lemma1;
    int samples = 20;
    int max_wavenumber = 4;
    int optimizer_steps = 50;
    int grid_n = 32;
    std::uint64_t seed = 1;

    void validate() const;
};

struct KornEstimate {
    KornSettings settings;
    int degenerate = 0;        ///< skipped samples
    double max_ratio = 0.0;    ///< empirical lower bound for the constant
    double min_start_ratio = 0.0;
    int argmax_sample = -1;
    std::optional<VectorField> argmax_field;
};

/// Projected gradient ascent of the ratio from random divergence-free
/// starts. The result is a running maximum, so it never decreases when
/// samples or optimizer_steps grow.
KornEstimate estimate_constant(const KornSettings& settings);

} // namespace hoqc
