#pragma once

// Quasiconvexity tests: minimize the cell-average deficit of an energy over
// band-limited periodic test fields, estimate quasiconvex envelopes, probe
// rank-one lines and check the envelope sandwich for G_k.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hoqc/energy.hpp"
#include "hoqc/errors.hpp"
#include "hoqc/field_io.hpp"
#include "hoqc/fields.hpp"

namespace hoqc {

struct OptimizerSettings {
    int max_iterations = 5000;
    double gradient_tolerance = 1e-8;  ///< Sobolev-preconditioned gradient norm
    double initial_step = 1.0;
    double armijo = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 40;
    int stall_iterations = 5;
    /// A step counts as stalled when it lowers the objective by at most
    /// stall_tolerance (1 + |F(A)|).
    double stall_tolerance = 1e-12;
    /// Curvature pairs kept by L-BFGS; 0 gives preconditioned steepest descent.
    int lbfgs_memory = 8;
    int restarts = 20;
    int init_wavenumber = 4;  ///< band of the random starts, clipped to N/3
    double init_energy = 1.0; ///< mean |grad phi|^2 (or |hess phi|^2) of a start
    double divergence_floor = 1e6;
    std::uint64_t seed = 1;

    void validate() const;
};

struct RestartLog {
    std::uint64_t seed = 0;
    int iterations = 0;
    bool converged = false;
    std::string termination;  ///< gradient, max-iterations, stalled, line-search
    double value = 0.0;
};

enum class DeficitKind { qc, qc2 };

struct DeficitReport {
    DeficitKind kind = DeficitKind::qc;
    Mat base_point;
    double deficit = 0.0;         ///< objective at the witness, <= 0
    double energy_at_base = 0.0;  ///< F(A)
    AnyField witness;
    int restarts = 0;
    std::vector<RestartLog> runs;
    PeriodicGrid grid;
    double aliasing_error = 0.0;  ///< |E_N - E_2N| at the witness
    bool violation = false;       ///< deficit < -(aliasing_error + 1e-7)
    std::optional<double> strict_nu;
    /// Smallest nodal |A + D phi| of the witness, for p < 2 and mu = 0.
    std::optional<double> nonsmooth_proximity;

    explicit DeficitReport(const PeriodicGrid& g);
};

/// Raised when the objective falls below -floor (1 + |F(A)|): F is unbounded
/// below along test fields. The report carries the field reached.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, DeficitReport report);
    const DeficitReport& report() const { return report_; }

private:
    DeficitReport report_;
};

constexpr double kViolationSlack = 1e-7;

/// integrate(F(A + grad phi)) - F(A).
double qc_objective(const EnergyFunction& F, const Mat& a, const VectorField& phi);
/// integrate(f(A + hess phi)) - f(A), minus nu integrate(W |hess phi|^2) when
/// strict_nu is given.
double qc2_objective(const EnergyFunction& f, const Mat& a, const ScalarField& phi,
                     std::optional<double> strict_nu = std::nullopt);

/// Minimizes qc_objective over zero-mean fields band-limited to N/3. A warm
/// start is resampled onto the grid and added as one extra restart.
DeficitReport qc_deficit(const EnergyFunction& F, const Mat& a, const PeriodicGrid& grid,
                         const OptimizerSettings& settings, const std::optional<AnyField>& warm_start = std::nullopt);

/// A must be symmetric; f may be symmetric-only.
DeficitReport qc2_deficit(const EnergyFunction& f, const Mat& a, const PeriodicGrid& grid,
                          const OptimizerSettings& settings, std::optional<double> strict_nu = std::nullopt,
                          const std::optional<AnyField>& warm_start = std::nullopt);

/// Re-evaluates a report's witness on its grid.
double replay(const EnergyFunction& F, const DeficitReport& report);

struct EnvelopeEstimate {
    double upper_bound;  ///< G(A) + deficit
    double energy;       ///< G(A)
    DeficitReport report;
};

EnvelopeEstimate quasiconvexify(const EnergyFunction& G, const Mat& a, const PeriodicGrid& grid,
                                const OptimizerSettings& settings);

struct RankOneVerdict {
    bool convex = true;
    int violations = 0;
    double worst_second_difference = 0.0;  ///< most negative, relative to the section scale
    double t_at_worst = 0.0;
};

/// Samples t -> f(A + t D) on [t_min, t_max], D = a (x) b for full-matrix
/// energies and a (x) b + b (x) a for symmetric-only ones, and checks
/// midpoint convexity of every consecutive triple.
RankOneVerdict rank_one_probe(const EnergyFunction& f, const Mat& a, const Vec& u, const Vec& v, double t_min,
                              double t_max, int samples);

struct SandwichVerdict {
    int k = 0;
    double beta_k = 0.0;
    double lambda_k = 0.0;
    double upper = 0.0;        ///< envelope upper bound U
    double energy = 0.0;       ///< G_k(A)
    double lower = 0.0;        ///< G_k - |A^s|^p / k - lambda_k |A^a|^p - 1/k
    bool upper_ok = true;      ///< U <= G_k(A)
    bool consistent = true;    ///< U >= lower - slack
    DeficitReport report;
};

SandwichVerdict sandwich_check_theorem1(const EnergyFunction& f, double beta_k, double lambda_k, int k,
                                        const Mat& a, const PeriodicGrid& grid, const OptimizerSettings& settings);

} // namespace hoqc
