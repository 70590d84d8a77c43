#pragma once

// Probe-driven choices for the constants the proofs leave implicit: the
// antisymmetric weight beta of the extensions and the lambda_k of the
// envelope sandwich.

#include <cstdint>
#include <string>
#include <vector>

#include "hoqc/energy.hpp"
#include "hoqc/qctest.hpp"

namespace hoqc {

/// The fixed shapes (0, identity, diag(1,-1), the symmetric and plain
/// off-diagonal units and, for full matrices, the rotation generator) scaled
/// to norms {0.1, 1, 10}, followed by seeded random draws cycling through the
/// same norms. Symmetric lists contain symmetric matrices only.
std::vector<Mat> standard_base_points(int dim, int count, std::uint64_t seed, EnergyDomain domain);

enum class ExtensionPath { p_ge_2, envelope };

ExtensionPath parse_extension_path(const std::string& name);
std::string to_string(ExtensionPath path);

/// The extension of f along a path with weight beta.
EnergyFunction build_extension(const EnergyFunction& f, ExtensionPath path, double beta);

struct ProbeConfig {
    std::vector<Mat> base_points;
    int grid_n = 32;
    OptimizerSettings optimizer;
    double eps = 0.1;  ///< envelope path: allowed deficit eps (mu^2+|A^a|^2)^{(p-2)/2} |A^a|^2
};

struct ProbeOutcome {
    double beta = 0.0;
    int violations = 0;
    double worst_deficit = 0.0;
    std::vector<DeficitReport> reports;
};

/// Runs the violation search for one beta over every probe base point.
ProbeOutcome probe_extension(const EnergyFunction& f, ExtensionPath path, double beta, const ProbeConfig& probes);

struct BetaSelection {
    double beta = 0.0;
    bool certified = false;
    int doublings = 0;
    std::vector<ProbeOutcome> history;  ///< one entry per beta tried
};

/// Doubling search from beta0 until the probe set shows no violation.
BetaSelection select_beta(const EnergyFunction& f, ExtensionPath path, const ProbeConfig& probes,
                          double beta0 = 1.0, int max_doublings = 20);

/// beta_k = beta0 2^k.
double beta_schedule(double beta0, int k);

struct LambdaFit {
    double lambda = 0.0;         ///< max(0, largest requirement)
    double raw = 0.0;            ///< largest requirement, may be negative
    int probes = 0;              ///< base points with A^a != 0
    std::vector<DeficitReport> reports;
};

/// Smallest lambda_k for which every probe deficit of G_k satisfies
/// deficit >= -|A^s|^p / k - lambda_k |A^a|^p - 1/k.
LambdaFit fit_lambda_k(const EnergyFunction& f, double beta_k, int k, const ProbeConfig& probes);

} // namespace hoqc
