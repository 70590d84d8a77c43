#include "hoqc/report.hpp"

#include <cmath>

namespace hoqc {

using nlohmann::json;

namespace {

// JSON has no NaN or infinity; they become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

} // namespace

json matrix_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Mat matrix_from_json(const json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    if (n < 2 || n > 3)
        throw ParameterError("matrix must be 2x2 or 3x3");
    Mat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != n)
            throw ParameterError("matrix must be square");
        for (Eigen::Index k = 0; k < n; ++k)
            m(i, k) = j[i][k].get<double>();
    }
    return m;
}

json report_json(const ModelParams& params) {
    json j{{"p", params.p}, {"mu", params.mu}, {"nu", params.nu}};
    if (params.lip)
        j["lip"] = *params.lip;
    if (params.growth)
        j["growth"] = *params.growth;
    return j;
}

json report_json(const ConstantsTable& t) {
    return {{"kappa_p", t.kappa_p}, {"K_p", t.K_p}, {"theta_p", t.theta_p}, {"Theta_p", t.Theta_p},
            {"lambda", t.lambda}};
}

json report_json(const SweepReport& sweep) {
    json cells = json::array();
    for (const auto& c : sweep.cells)
        cells.push_back({{"lemma", c.lemma},
                         {"p", c.p},
                         {"mu", c.mu},
                         {"samples", c.samples},
                         {"failures", c.failures},
                         {"tight", c.tight},
                         {"numerical_errors", c.numerical_errors},
                         {"worst_margin", number(c.worst_margin)},
                         {"max_quad_error", c.max_quad_error}});
    return {{"passed", sweep.passed()},
            {"failures", sweep.failures()},
            {"numerical_errors", sweep.numerical_errors()},
            {"worst_margin", number(sweep.worst_margin())},
            {"cells", cells}};
}

json report_json(const KornEstimate& est, const std::string& field_path) {
    const auto& s = est.settings;
    json j{{"dim", s.dim},
           {"p", s.p},
           {"mu", s.mu},
           {"mode", to_string(s.mode)},
           {"samples", s.samples},
           {"degenerate_samples", est.degenerate},
           {"max_wavenumber", s.max_wavenumber},
           {"optimizer_steps", s.optimizer_steps},
           {"grid_n", s.grid_n},
           {"seed", s.seed},
           {"max_ratio", number(est.max_ratio)},
           {"min_start_ratio", number(est.min_start_ratio)},
           {"argmax_sample", est.argmax_sample},
           {"lower_bound_only", true}};
    j["field_file"] = field_path.empty() ? json(nullptr) : json(field_path);
    return j;
}

json report_json(const OptimizerSettings& s) {
    return {{"max_iterations", s.max_iterations}, {"gradient_tolerance", s.gradient_tolerance},
            {"initial_step", s.initial_step},     {"armijo", s.armijo},
            {"shrink", s.shrink},                 {"max_backtracks", s.max_backtracks},
            {"stall_iterations", s.stall_iterations}, {"stall_tolerance", s.stall_tolerance},
            {"lbfgs_memory", s.lbfgs_memory}, {"restarts", s.restarts},
            {"init_wavenumber", s.init_wavenumber}, {"init_energy", s.init_energy},
            {"divergence_floor", s.divergence_floor}, {"seed", s.seed}};
}

OptimizerSettings optimizer_from_json(const json& j, OptimizerSettings s) {
    s.max_iterations = j.value("max_iterations", s.max_iterations);
    s.gradient_tolerance = j.value("gradient_tolerance", s.gradient_tolerance);
    s.initial_step = j.value("initial_step", s.initial_step);
    s.armijo = j.value("armijo", s.armijo);
    s.shrink = j.value("shrink", s.shrink);
    s.max_backtracks = j.value("max_backtracks", s.max_backtracks);
    s.stall_iterations = j.value("stall_iterations", s.stall_iterations);
    s.stall_tolerance = j.value("stall_tolerance", s.stall_tolerance);
    s.lbfgs_memory = j.value("lbfgs_memory", s.lbfgs_memory);
    s.restarts = j.value("restarts", s.restarts);
    s.init_wavenumber = j.value("init_wavenumber", s.init_wavenumber);
    s.init_energy = j.value("init_energy", s.init_energy);
    s.divergence_floor = j.value("divergence_floor", s.divergence_floor);
    s.seed = j.value("seed", s.seed);
    return s;
}

json report_json(const DeficitReport& r, const std::string& witness_path) {
    json runs = json::array();
    for (const auto& run : r.runs)
        runs.push_back({{"seed", run.seed},
                        {"iterations", run.iterations},
                        {"converged", run.converged},
                        {"termination", run.termination},
                        {"value", number(run.value)}});
    json j{{"kind", r.kind == DeficitKind::qc ? "qc" : "qc2"},
           {"base_point", matrix_json(r.base_point)},
           {"energy_at_base", number(r.energy_at_base)},
           {"deficit", number(r.deficit)},
           {"aliasing_error", number(r.aliasing_error)},
           {"violation", r.violation},
           {"restarts", r.restarts},
           {"grid", {{"dim", r.grid.dim()}, {"points_per_axis", r.grid.n()}}},
           {"runs", runs}};
    if (r.strict_nu)
        j["strict_nu"] = *r.strict_nu;
    if (r.nonsmooth_proximity)
        j["nonsmooth_proximity"] = *r.nonsmooth_proximity;
    j["witness_file"] = witness_path.empty() ? json(nullptr) : json(witness_path);
    return j;
}

json report_json(const CertificateReport& c) {
    return {{"certificate", to_string(c.kind)}, {"energy", c.energy},
            {"constant", c.constant},         {"samples", c.samples},
            {"worst_margin", number(c.worst_margin)}, {"worst_ratio", number(c.worst_ratio)},
            {"holds", c.holds}};
}

json report_json(const ProbeOutcome& probe) {
    json reports = json::array();
    for (const auto& r : probe.reports)
        reports.push_back(report_json(r));
    return {{"beta", probe.beta}, {"violations", probe.violations},
            {"worst_deficit", number(probe.worst_deficit)}, {"reports", reports}};
}

json report_json(const SandwichVerdict& v) {
    return {{"k", v.k},
            {"beta_k", v.beta_k},
            {"lambda_k", v.lambda_k},
            {"upper", number(v.upper)},
            {"energy", number(v.energy)},
            {"lower", number(v.lower)},
            {"upper_ok", v.upper_ok},
            {"consistent", v.consistent},
            {"base_point", matrix_json(v.report.base_point)},
            {"aliasing_error", number(v.report.aliasing_error)}};
}

} // namespace hoqc
