#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hoqc {

struct SweepConfig {
    std::vector<double> p_grid{1.1, 1.5, 2.0, 3.0, 4.0};
    std::vector<double> mu_grid{0.0, 0.5, 2.0};
    long samples = 10000;  ///< per (p, mu) cell
    int min_dim = 2;
    int max_dim = 6;
    std::vector<double> eps_grid{0.1, 0.5, 0.9};
    std::vector<double> beta_grid{0.5, 1.0, 4.0};
    int quad_nodes = 16;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Aggregate for one lemma inequality over one (p, mu) cell.
struct LemmaCell {
    std::string lemma;
    double p = 0.0;
    double mu = 0.0;
    long samples = 0;
    long failures = 0;          ///< uncertified: margin below -(quadrature error + tie tolerance)
    long tight = 0;
    long numerical_errors = 0;  ///< quadrature depth exceeded
    double worst_margin = 0.0;  ///< smallest relative margin, quadrature error credited
    double max_quad_error = 0.0;
};

struct SweepReport {
    std::vector<LemmaCell> cells;
    bool passed() const;
    long failures() const;
    long numerical_errors() const;
    double worst_margin() const;
};

SweepReport run_lemma_sweep(const SweepConfig& config);

} // namespace hoqc
