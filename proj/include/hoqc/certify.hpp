#pragma once

// Sample-based verification of the structural certificates an energy claims.

#include <cstdint>
#include <string>

#include "hoqc/energy.hpp"
#include "hoqc/qctest.hpp"

namespace hoqc {

enum class CertKind { strict2qc, gradlip, growth };

CertKind parse_cert_kind(const std::string& name);
std::string to_string(CertKind kind);

struct CertifyConfig {
    long samples = 10000;
    int dim = 2;
    std::uint64_t seed = 1;
    /// strict2qc only: grid and optimizer for the per-base-point search.
    int grid_n = 16;
    OptimizerSettings optimizer{.max_iterations = 200, .restarts = 2};
};

struct CertificateReport {
    CertKind kind = CertKind::growth;
    std::string energy;
    double constant = 0.0;      ///< nu, L or M being checked
    long samples = 0;
    /// gradlip / growth: smallest (bound - lhs) / bound. strict2qc: smallest
    /// strict margin found by the search.
    double worst_margin = 0.0;
    /// strict2qc: smallest deficit / (nu * weighted integral) over random
    /// fields (1 means the bound is attained); NaN when nu = 0.
    double worst_ratio = 0.0;
    bool holds = true;
};

/// mean (mu^2 + |A|^2 + |hess phi|^2)^{(p-2)/2} |hess phi|^2.
double strict_weight_integral(const ModelParams& params, const Mat& a, const ScalarField& phi);

CertificateReport certify(const EnergyFunction& f, CertKind kind, const CertifyConfig& config = {});

} // namespace hoqc
