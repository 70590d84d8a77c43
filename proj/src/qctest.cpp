#include "hoqc/qctest.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "hoqc/rng.hpp"

namespace hoqc {

namespace {

constexpr std::complex<double> I(0.0, 1.0);

Mat pointwise_gradient(const EnergyFunction& F, const Mat& m) {
    if (F.has_gradient())
        return F.gradient_unchecked(m);
    // Slow path: central differences entry by entry.
    Mat g(m.rows(), m.cols());
    const double h = 1e-6 * (1.0 + m.norm());
    Mat probe = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            probe(i, j) = m(i, j) + h;
            const double up = F.eval_unchecked(probe);
            probe(i, j) = m(i, j) - h;
            const double down = F.eval_unchecked(probe);
            probe(i, j) = m(i, j);
            g(i, j) = (up - down) / (2.0 * h);
        }
    return g;
}

// Test-field search problem on the nodal values of a band-limited field.
// `order` is the number of derivatives the energy sees (1: grad phi of a
// vector field, 2: hess phi of a scalar field).
class Problem {
public:
    Problem(const EnergyFunction& F, const Mat& a, const PeriodicGrid& grid, int order,
            std::optional<double> strict_nu)
        : F_(F), a_(a), grid_(grid), tables_(spectral_tables(grid)), order_(order), strict_nu_(strict_nu),
          n_(grid.dim()), base_(F.eval_unchecked(a)) {
        const auto band = grid.max_band();
        mask_ = (tables_->kmax <= band).cast<double>();
        mask_[0] = 0.0;
        Eigen::ArrayXd d2 = -tables_->laplace;
        precond_ = Eigen::ArrayXd::Zero(d2.size());
        for (Eigen::Index i = 0; i < d2.size(); ++i)
            if (mask_[i] != 0.0 && d2[i] > 0.0)
                precond_[i] = 1.0 / std::pow(d2[i], order_);
        mu2a2_ = F.params().mu * F.params().mu + a.squaredNorm();
    }

    int components() const { return order_ == 1 ? n_ : 1; }
    double base() const { return base_; }

    // Projects onto zero-mean fields band-limited to N/3.
    Eigen::ArrayXXd project(const Eigen::ArrayXXd& x) const {
        Eigen::ArrayXXd out(x.rows(), x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c)
            out.col(c) = inverse(grid_, mask_ * forward(grid_, x.col(c)));
        return out;
    }

    // Nodal derivative entries: column i*n+j holds d_j x_i (order 1) or
    // d_i d_j x (order 2).
    Eigen::ArrayXXd derivatives(const Eigen::ArrayXXd& x) const {
        Eigen::ArrayXXd d(grid_.nodes(), n_ * n_);
        if (order_ == 1) {
            for (int i = 0; i < n_; ++i) {
                const Spectrum s = forward(grid_, x.col(i));
                for (int j = 0; j < n_; ++j)
                    d.col(i * n_ + j) = inverse(grid_, (I * tables_->deriv[j]) * s);
            }
        } else {
            const Spectrum s = forward(grid_, x.col(0));
            for (int i = 0; i < n_; ++i)
                for (int j = i; j < n_; ++j) {
                    d.col(i * n_ + j) = inverse(grid_, (-(tables_->deriv[i] * tables_->deriv[j])) * s);
                    if (j != i)
                        d.col(j * n_ + i) = d.col(i * n_ + j);
                }
        }
        return d;
    }

    Mat node_matrix(const Eigen::ArrayXXd& d, Eigen::Index node) const {
        Mat m(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                m(i, j) = a_(i, j) + d(node, i * n_ + j);
        return m;
    }

    // (mu^2 + |A|^2 + |H|^2)^{(p-2)/2} |H|^2 and its derivative in H.
    double strict_term(double h2) const {
        const double b = mu2a2_ + h2;
        if (h2 == 0.0)
            return 0.0;
        return std::pow(b, (F_.params().p - 2.0) / 2.0) * h2;
    }
    double strict_slope(double h2) const {
        const double r = (F_.params().p - 2.0) / 2.0;
        const double b = mu2a2_ + h2;
        if (b == 0.0)
            return 0.0;
        return 2.0 * (std::pow(b, r) + r * std::pow(b, r - 1.0) * h2);
    }

    double value(const Eigen::ArrayXXd& x) const {
        const Eigen::ArrayXXd d = derivatives(x);
        double sum = 0.0;
        for (Eigen::Index node = 0; node < d.rows(); ++node) {
            sum += F_.eval_unchecked(node_matrix(d, node));
            if (strict_nu_)
                sum -= *strict_nu_ * strict_term(d.row(node).square().sum());
        }
        return sum / double(d.rows()) - base_;
    }

    // Value and L2 gradient.
    double value_gradient(const Eigen::ArrayXXd& x, Eigen::ArrayXXd& g) const {
        const Eigen::ArrayXXd d = derivatives(x);
        Eigen::ArrayXXd flux(d.rows(), d.cols());
        double sum = 0.0;
        for (Eigen::Index node = 0; node < d.rows(); ++node) {
            const Mat m = node_matrix(d, node);
            sum += F_.eval_unchecked(m);
            const Mat gm = pointwise_gradient(F_, m);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    flux(node, i * n_ + j) = gm(i, j);
            if (strict_nu_) {
                const double h2 = d.row(node).square().sum();
                sum -= *strict_nu_ * strict_term(h2);
                flux.row(node) -= *strict_nu_ * strict_slope(h2) * d.row(node);
            }
        }
        g.resize(x.rows(), x.cols());
        if (order_ == 1) {
            // -div of the flux, row by row.
            for (int i = 0; i < n_; ++i) {
                Spectrum acc = Spectrum::Zero(grid_.spectral_size());
                for (int j = 0; j < n_; ++j)
                    acc -= (I * tables_->deriv[j]) * forward(grid_, flux.col(i * n_ + j));
                g.col(i) = inverse(grid_, acc);
            }
        } else {
            // Double divergence.
            Spectrum acc = Spectrum::Zero(grid_.spectral_size());
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    acc -= (tables_->deriv[i] * tables_->deriv[j]) * forward(grid_, flux.col(i * n_ + j));
            g.col(0) = inverse(grid_, acc);
        }
        return sum / double(d.rows()) - base_;
    }

    // Sobolev-preconditioned descent direction restricted to the band.
    Eigen::ArrayXXd precondition(const Eigen::ArrayXXd& g) const {
        Eigen::ArrayXXd out(g.rows(), g.cols());
        for (Eigen::Index c = 0; c < g.cols(); ++c)
            out.col(c) = inverse(grid_, precond_ * forward(grid_, g.col(c)));
        return out;
    }

    // Mean |D x|^2 with D = grad or hess.
    double derivative_energy(const Eigen::ArrayXXd& x) const {
        return derivatives(x).square().rowwise().sum().mean();
    }

    double smallest_argument(const Eigen::ArrayXXd& x) const {
        const Eigen::ArrayXXd d = derivatives(x);
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index node = 0; node < d.rows(); ++node)
            best = std::min(best, node_matrix(d, node).norm());
        return best;
    }

private:
    const EnergyFunction& F_;
    Mat a_;
    PeriodicGrid grid_;
    std::shared_ptr<const SpectralTables> tables_;
    int order_;
    std::optional<double> strict_nu_;
    int n_;
    double base_;
    double mu2a2_ = 0.0;
    Eigen::ArrayXd mask_;
    Eigen::ArrayXd precond_;
};

AnyField to_field(const PeriodicGrid& grid, const Eigen::ArrayXXd& x, DeficitKind kind) {
    if (kind == DeficitKind::qc)
        return VectorField(grid, x);
    return ScalarField(grid, x.col(0));
}

Eigen::ArrayXXd from_field(const AnyField& f, const PeriodicGrid& grid, DeficitKind kind) {
    if (kind == DeficitKind::qc) {
        const auto* v = std::get_if<VectorField>(&f);
        if (!v)
            throw ParameterError("warm start must be a vector field");
        return resample(*v, grid).values();
    }
    const auto* s = std::get_if<ScalarField>(&f);
    if (!s)
        throw ParameterError("warm start must be a scalar field");
    return Eigen::ArrayXXd(resample(*s, grid).values());
}

struct RunResult {
    RestartLog log;
    Eigen::ArrayXXd x;
};

// Quasi-Newton pair for the L-BFGS two-loop recursion.
struct CurvaturePair {
    Eigen::ArrayXXd s, y;
    double rho;
};

RunResult descend(const Problem& prob, Eigen::ArrayXXd x, const OptimizerSettings& s, std::uint64_t seed,
                  DeficitReport& report) {
    RunResult out;
    out.log.seed = seed;
    const double nodes = double(x.rows());
    auto dot = [nodes](const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b) { return (a * b).sum() / nodes; };

    Eigen::ArrayXXd g;
    double value = prob.value_gradient(x, g);
    double step = s.initial_step;
    double gamma = 1.0;  // initial inverse-Hessian scale relative to the preconditioner
    std::deque<CurvaturePair> memory;
    int stalled = 0;
    const double floor = -s.divergence_floor * (1.0 + std::abs(prob.base()));
    out.log.termination = "max-iterations";
    int it = 0;
    for (; it < s.max_iterations; ++it) {
        const Eigen::ArrayXXd pg = prob.precondition(g);
        const double gnorm2 = dot(g, pg);
        if (!(gnorm2 > s.gradient_tolerance * s.gradient_tolerance)) {
            out.log.termination = "gradient";
            out.log.converged = true;
            break;
        }

        // Direction to subtract: L-BFGS with the Sobolev metric as initial
        // inverse Hessian, or the preconditioned gradient itself.
        Eigen::ArrayXXd dir = pg;
        bool quasi = false;
        if (!memory.empty()) {
            Eigen::ArrayXXd q = g;
            std::vector<double> alpha(memory.size());
            for (std::size_t i = memory.size(); i-- > 0;) {
                alpha[i] = memory[i].rho * dot(memory[i].s, q);
                q -= alpha[i] * memory[i].y;
            }
            Eigen::ArrayXXd r = gamma * prob.precondition(q);
            for (std::size_t i = 0; i < memory.size(); ++i)
                r += (alpha[i] - memory[i].rho * dot(memory[i].y, r)) * memory[i].s;
            if (dot(g, r) > 0.0) {
                dir = std::move(r);
                quasi = true;
            } else {
                memory.clear();
            }
        }
        const double slope = quasi ? dot(g, dir) : gnorm2;

        double t = quasi ? 1.0 : step;
        bool accepted = false;
        Eigen::ArrayXXd trial;
        for (int bt = 0; bt < s.max_backtracks; ++bt) {
            trial = x - t * dir;
            const double trial_value = prob.value(trial);
            if (trial_value <= value - s.armijo * t * slope) {
                accepted = true;
                break;
            }
            t *= s.shrink;
        }
        if (!accepted) {
            out.log.termination = "line-search";
            out.log.converged = true;
            break;
        }
        const double previous = value;
        Eigen::ArrayXXd g_new;
        Eigen::ArrayXXd moved = -t * dir;
        x = std::move(trial);
        value = prob.value_gradient(x, g_new);
        if (value < floor || !std::isfinite(value)) {
            report.deficit = value;
            report.witness = to_field(report.grid, x, report.kind);
            report.violation = true;
            out.log.iterations = it + 1;
            out.log.termination = "divergence";
            out.log.value = value;
            report.runs.push_back(out.log);
            throw DivergenceError("objective unbounded below: fell under " + std::to_string(floor), report);
        }
        if (s.lbfgs_memory > 0) {
            Eigen::ArrayXXd dy = g_new - g;
            const double sy = dot(moved, dy);
            if (sy > 1e-14 * std::sqrt(dot(moved, moved) * dot(dy, dy))) {
                gamma = sy / dot(dy, prob.precondition(dy));
                memory.push_back({std::move(moved), std::move(dy), 1.0 / sy});
                if (static_cast<int>(memory.size()) > s.lbfgs_memory)
                    memory.pop_front();
            }
        }
        g = std::move(g_new);
        if (previous - value <= s.stall_tolerance * (1.0 + std::abs(prob.base()))) {
            if (++stalled >= s.stall_iterations) {
                out.log.termination = "stalled";
                out.log.converged = true;
                ++it;
                break;
            }
        } else {
            stalled = 0;
        }
        if (!quasi)
            step = std::min(t * 2.0, 1e6);
    }
    out.log.iterations = it;
    out.log.value = value;
    out.x = std::move(x);
    return out;
}

DeficitReport run_search(const EnergyFunction& F, const Mat& a, const PeriodicGrid& grid, const OptimizerSettings& s,
                         DeficitKind kind, std::optional<double> strict_nu, const std::optional<AnyField>& warm) {
    s.validate();
    if (a.rows() != grid.dim() || a.cols() != grid.dim())
        throw ParameterError("base point dimension does not match the grid");
    const int order = kind == DeficitKind::qc ? 1 : 2;
    const Problem prob(F, a, grid, order, strict_nu);

    DeficitReport report(grid);
    report.kind = kind;
    report.base_point = a;
    report.energy_at_base = prob.base();
    report.strict_nu = strict_nu;
    report.restarts = s.restarts;

    Eigen::ArrayXXd best_x = Eigen::ArrayXXd::Zero(grid.nodes(), prob.components());
    double best = prob.value(best_x);

    auto consider = [&](RunResult&& r) {
        if (r.log.value < best) {
            best = r.log.value;
            best_x = std::move(r.x);
        }
        report.runs.push_back(r.log);
    };

    const int band = std::min(s.init_wavenumber, grid.max_band());
    for (int r = 0; r < s.restarts; ++r) {
        auto gen = make_stream(s.seed, static_cast<std::uint64_t>(r));
        const std::uint64_t field_seed = gen();
        Eigen::ArrayXXd x0 = kind == DeficitKind::qc
                                 ? random_vector_field(grid, band, field_seed, false).values()
                                 : Eigen::ArrayXXd(random_scalar_field(grid, band, field_seed).values());
        x0 = prob.project(x0);
        const double e = prob.derivative_energy(x0);
        if (e > 0.0)
            x0 *= std::sqrt(s.init_energy / e);
        consider(descend(prob, std::move(x0), s, field_seed, report));
    }
    if (warm)
        consider(descend(prob, prob.project(from_field(*warm, grid, kind)), s, 0, report));

    report.deficit = best;
    report.witness = to_field(grid, best_x, kind);

    // Aliasing error bar from the same polynomial on a grid twice as fine.
    if (best_x.matrix().norm() > 0.0) {
        const PeriodicGrid fine(grid.dim(), 2 * grid.n());
        if (kind == DeficitKind::qc)
            report.aliasing_error =
                std::abs(best - qc_objective(F, a, resample(std::get<VectorField>(report.witness), fine)));
        else
            report.aliasing_error = std::abs(
                best - qc2_objective(F, a, resample(std::get<ScalarField>(report.witness), fine), strict_nu));
    }
    report.violation = report.deficit < -(report.aliasing_error + kViolationSlack);
    if (F.params().p < 2.0 && F.params().mu == 0.0)
        report.nonsmooth_proximity = prob.smallest_argument(best_x);
    return report;
}

} // namespace

void OptimizerSettings::validate() const {
    if (max_iterations < 1)
        throw ParameterError("optimizer: max_iterations must be at least 1");
    if (!(gradient_tolerance > 0.0))
        throw ParameterError("optimizer: gradient_tolerance must be positive");
    if (!(initial_step > 0.0) || !(armijo > 0.0 && armijo < 1.0) || !(shrink > 0.0 && shrink < 1.0))
        throw ParameterError("optimizer: invalid line-search parameters");
    if (restarts < 0 || max_backtracks < 1 || stall_iterations < 1 || init_wavenumber < 1)
        throw ParameterError("optimizer: invalid restart or iteration counts");
    if (lbfgs_memory < 0)
        throw ParameterError("optimizer: lbfgs_memory must be nonnegative");
    if (!(stall_tolerance >= 0.0))
        throw ParameterError("optimizer: stall_tolerance must be nonnegative");
    if (!(init_energy > 0.0) || !(divergence_floor > 0.0))
        throw ParameterError("optimizer: init_energy and divergence_floor must be positive");
}

DeficitReport::DeficitReport(const PeriodicGrid& g) : witness(ScalarField::zeros(g)), grid(g) {}

DivergenceError::DivergenceError(const std::string& what, DeficitReport report)
    : Error(what), report_(std::move(report)) {}

double qc_objective(const EnergyFunction& F, const Mat& a, const VectorField& phi) {
    const Problem prob(F, a, phi.grid(), 1, std::nullopt);
    return prob.value(phi.values());
}

double qc2_objective(const EnergyFunction& f, const Mat& a, const ScalarField& phi, std::optional<double> strict_nu) {
    const Problem prob(f, a, phi.grid(), 2, strict_nu);
    return prob.value(Eigen::ArrayXXd(phi.values()));
}

DeficitReport qc_deficit(const EnergyFunction& F, const Mat& a, const PeriodicGrid& grid,
                         const OptimizerSettings& settings, const std::optional<AnyField>& warm_start) {
    if (F.domain() != EnergyDomain::full)
        throw ParameterError("qc_deficit needs a full-matrix energy; extend symmetric energies first");
    return run_search(F, a, grid, settings, DeficitKind::qc, std::nullopt, warm_start);
}

DeficitReport qc2_deficit(const EnergyFunction& f, const Mat& a, const PeriodicGrid& grid,
                          const OptimizerSettings& settings, std::optional<double> strict_nu,
                          const std::optional<AnyField>& warm_start) {
    if (!is_symmetric(a))
        throw DomainError("qc2_deficit needs a symmetric base point");
    if (strict_nu && !(*strict_nu >= 0.0))
        throw ParameterError("strict_nu must be nonnegative");
    const Mat s = sym(a);
    return run_search(f, s, grid, settings, DeficitKind::qc2, strict_nu, warm_start);
}

double replay(const EnergyFunction& F, const DeficitReport& report) {
    if (report.kind == DeficitKind::qc)
        return qc_objective(F, report.base_point, std::get<VectorField>(report.witness));
    return qc2_objective(F, report.base_point, std::get<ScalarField>(report.witness), report.strict_nu);
}

EnvelopeEstimate quasiconvexify(const EnergyFunction& G, const Mat& a, const PeriodicGrid& grid,
                                const OptimizerSettings& settings) {
    DeficitReport report = qc_deficit(G, a, grid, settings);
    const double energy = report.energy_at_base;
    const double upper = energy + std::min(report.deficit, 0.0);
    return {upper, energy, std::move(report)};
}

RankOneVerdict rank_one_probe(const EnergyFunction& f, const Mat& a, const Vec& u, const Vec& v, double t_min,
                              double t_max, int samples) {
    if (samples < 3 || !(t_max > t_min))
        throw ParameterError("rank_one_probe needs at least 3 samples on a nonempty interval");
    Mat dir = u * v.transpose();
    if (f.domain() == EnergyDomain::symmetric)
        dir += v * u.transpose();
    std::vector<double> values(samples);
    double scale = 0.0;
    const double h = (t_max - t_min) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        values[i] = f(a + (t_min + i * h) * dir);
        scale = std::max(scale, std::abs(values[i]));
    }
    RankOneVerdict verdict;
    const double tol = 1e-10 * (1.0 + scale);
    for (int i = 1; i + 1 < samples; ++i) {
        const double second = values[i - 1] + values[i + 1] - 2.0 * values[i];
        const double relative = second / (1.0 + scale);
        if (relative < verdict.worst_second_difference) {
            verdict.worst_second_difference = relative;
            verdict.t_at_worst = t_min + i * h;
        }
        if (second < -tol) {
            ++verdict.violations;
            verdict.convex = false;
        }
    }
    return verdict;
}

SandwichVerdict sandwich_check_theorem1(const EnergyFunction& f, double beta_k, double lambda_k, int k,
                                        const Mat& a, const PeriodicGrid& grid, const OptimizerSettings& settings) {
    if (k < 1 || !(lambda_k >= 0.0))
        throw ParameterError("sandwich: need k >= 1 and lambda_k >= 0");
    const EnergyFunction G = extend_theorem1_G_k(f, beta_k);
    EnvelopeEstimate env = quasiconvexify(G, a, grid, settings);
    const double p = f.params().p;
    SandwichVerdict v{.k = k, .beta_k = beta_k, .lambda_k = lambda_k, .upper = env.upper_bound,
                      .energy = env.energy, .lower = 0.0, .upper_ok = true, .consistent = true,
                      .report = std::move(env.report)};
    v.lower = v.energy - std::pow(sym(a).norm(), p) / k - lambda_k * std::pow(antisym(a).norm(), p) - 1.0 / k;
    const double slack = v.report.aliasing_error + kViolationSlack;
    v.upper_ok = v.upper <= v.energy;
    v.consistent = v.upper >= v.lower - slack;
    return v;
}

} // namespace hoqc
