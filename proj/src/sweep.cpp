#include "hoqc/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "hoqc/errors.hpp"
#include "hoqc/lemmas.hpp"
#include "hoqc/rng.hpp"

namespace hoqc {

void SweepConfig::validate() const {
    if (samples < 1)
        throw ParameterError("sweep: samples must be >= 1");
    if (min_dim < 1 || max_dim < min_dim)
        throw ParameterError("sweep: invalid dimension range");
    if (p_grid.empty() || mu_grid.empty())
        throw ParameterError("sweep: empty parameter grid");
    for (double p : p_grid)
        if (!(p > 1.0))
            throw ParameterError("sweep: every p must exceed 1");
    for (double mu : mu_grid)
        if (!(mu >= 0.0))
            throw ParameterError("sweep: every mu must be >= 0");
    for (double eps : eps_grid)
        if (!(eps > 0.0 && eps < 1.0))
            throw ParameterError("sweep: eps must lie in (0, 1)");
    if (quad_nodes < 16)
        throw ParameterError("sweep: quad_nodes must be >= 16");
}

bool SweepReport::passed() const { return failures() == 0 && numerical_errors() == 0; }

long SweepReport::failures() const {
    long total = 0;
    for (const auto& c : cells)
        total += c.failures;
    return total;
}

long SweepReport::numerical_errors() const {
    long total = 0;
    for (const auto& c : cells)
        total += c.numerical_errors;
    return total;
}

double SweepReport::worst_margin() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : cells)
        worst = std::min(worst, c.worst_margin);
    return worst;
}

namespace {

class CellAccumulator {
public:
    CellAccumulator(double p, double mu) : p_(p), mu_(mu) {}

    void record(const std::string& lemma, const Verdict& v) {
        LemmaCell& c = cell(lemma);
        ++c.samples;
        if (!v.holds())
            ++c.failures;
        if (v.tight())
            ++c.tight;
        c.worst_margin = std::min(c.worst_margin, v.certified_relative());
        c.max_quad_error = std::max(c.max_quad_error, v.error_bound);
    }

    void record_error(const std::string& lemma) {
        LemmaCell& c = cell(lemma);
        ++c.samples;
        ++c.numerical_errors;
    }

    void flush(std::vector<LemmaCell>& out) {
        for (auto& [name, c] : cells_)
            out.push_back(c);
    }

private:
    LemmaCell& cell(const std::string& lemma) {
        auto it = cells_.find(lemma);
        if (it == cells_.end()) {
            LemmaCell c;
            c.lemma = lemma;
            c.p = p_;
            c.mu = mu_;
            c.worst_margin = std::numeric_limits<double>::infinity();
            it = cells_.emplace(lemma, c).first;
        }
        return it->second;
    }

    double p_, mu_;
    std::map<std::string, LemmaCell> cells_;
};

// Gaussian direction with log-uniform magnitude in [1e-2, 1e2].
Eigen::VectorXd random_vector(std::mt19937_64& gen, int dim) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> exponent(-2.0, 2.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i)
        v[i] = normal(gen);
    const double n = v.norm();
    if (n == 0.0)
        v[0] = 1.0;
    return v * (std::pow(10.0, exponent(gen)) / std::max(n, 1e-300));
}

} // namespace

SweepReport run_lemma_sweep(const SweepConfig& config) {
    config.validate();
    SweepReport report;
    std::uint64_t cell_index = 0;
    for (double p : config.p_grid) {
        for (double mu : config.mu_grid) {
            CellAccumulator acc(p, mu);
            const ScalarPotential power = power_potential(mu, p);
            const ScalarPotential normalized = power_potential(mu, p, 1.0 / Theta_p(p));
            const ScalarPotential quadratic{
                [](const Eigen::VectorXd& x) { return x.squaredNorm(); },
                [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * x; }, 2.0};
            std::mt19937_64 gen = make_stream(config.seed, cell_index++);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const int dims = config.max_dim - config.min_dim + 1;

            for (long i = 0; i < config.samples; ++i) {
                const int dim = config.min_dim + static_cast<int>(i % dims);
                Eigen::VectorXd x = random_vector(gen, dim);
                Eigen::VectorXd y = random_vector(gen, dim);
                // Every 8th sample puts the origin (near) the segment [x, x+y].
                if (i % 8 == 7)
                    y = -(0.5 + 2.5 * unit(gen)) * x;
                const Eigen::VectorXd z = random_vector(gen, dim);
                const double eps = config.eps_grid[i % config.eps_grid.size()];
                const double beta = config.beta_grid[i % config.beta_grid.size()];

                try {
                    acc.record("prima", check_prima(x, y, mu, p, config.quad_nodes));
                } catch (const QuadratureError&) {
                    acc.record_error("prima");
                }
                try {
                    acc.record("seconda", check_seconda(x, y, mu, p, config.quad_nodes));
                } catch (const QuadratureError&) {
                    acc.record_error("seconda");
                }

                const PairVerdict taylor = check_taylor_bounds(x, y, mu, p);
                acc.record("taylor_lower", taylor.first);
                acc.record("taylor_upper", *taylor.second);

                const PairVerdict product = check_product_taylor(x, y, z, x - z, mu, p, beta);
                acc.record("product_taylor", product.first);
                if (product.second)
                    acc.record("product_split", *product.second);

                if (p <= 2.0) {
                    const PairVerdict l10 = check_lemma10(x, y, mu, p, eps);
                    acc.record("lemma10_sum", l10.first);
                    acc.record("lemma10_eps", *l10.second);
                    acc.record("lemma12", check_lemma12(x.norm(), y.norm(), mu, p, eps));
                }

                acc.record("gradient_lipschitz", check_gradient_lipschitz(power, x, y, mu, p));
                if (p == 2.0)
                    acc.record("gradient_lipschitz", check_gradient_lipschitz(quadratic, x, y, 0.0, 2.0));
                acc.record("lemma4", check_lemma4(normalized, x, y, z, mu, p, eps));
            }
            acc.flush(report.cells);
        }
    }
    return report;
}

} // namespace hoqc
