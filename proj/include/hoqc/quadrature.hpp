#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "hoqc/errors.hpp"

namespace hoqc {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached n-point rule; n >= 1.
const GaussRule& gauss_legendre(int n);

struct QuadOptions {
    int nodes = 16;           ///< points per panel, >= 16 for the certified checks
    double rel_tol = 1e-14;
    double abs_tol = 1e-300;
    int max_depth = 40;       ///< bisection depth before QuadratureError
};

struct QuadResult {
    double value = 0.0;
    double error_bound = 0.0;  ///< accumulated per-panel estimate plus rounding
    int panels = 0;
};

namespace detail {

template <typename F>
double apply_rule(const GaussRule& rule, const F& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

template <typename F>
void refine(const GaussRule& rule, const F& f, double a, double b, double coarse, double tol_density,
            const QuadOptions& opt, int depth, QuadResult& out) {
    const double m = 0.5 * (a + b);
    const double left = apply_rule(rule, f, a, m);
    const double right = apply_rule(rule, f, m, b);
    const double fine = left + right;
    const double err = std::abs(fine - coarse);
    // Differences at the rounding level of the panel sums cannot shrink further.
    const double noise = 64.0 * 2.2e-16 * (std::abs(left) + std::abs(right));
    const double allowed = std::max({tol_density * (b - a), opt.rel_tol * std::abs(fine), noise});
    if (err <= allowed || err <= opt.abs_tol) {
        out.value += fine;
        out.error_bound += err + 4.0 * 2.2e-16 * (std::abs(left) + std::abs(right));
        ++out.panels;
        return;
    }
    if (depth >= opt.max_depth)
        throw QuadratureError("adaptive quadrature exceeded bisection depth");
    refine(rule, f, a, m, left, tol_density, opt, depth + 1, out);
    refine(rule, f, m, b, right, tol_density, opt, depth + 1, out);
}

} // namespace detail

/// Adaptive Gauss-Legendre: each panel compares the rule against the same rule
/// on its two halves and bisects until the difference meets tolerance.
template <typename F>
QuadResult integrate_adaptive(const F& f, double a, double b, const QuadOptions& opt = {}) {
    QuadResult out;
    if (a == b)
        return out;
    const GaussRule& rule = gauss_legendre(opt.nodes);
    const double coarse = detail::apply_rule(rule, f, a, b);
    const double tol_density = std::max(opt.abs_tol, opt.rel_tol * std::abs(coarse)) / (b - a);
    detail::refine(rule, f, a, b, coarse, tol_density, opt, 0, out);
    return out;
}

/// Integral over [0,1] of (mu^2 + |x + t y|^2)^{(p-2)/2} w(t) for a segment
/// described by |x|^2, x.y, |y|^2. When the exponent is negative the
/// interval is split at the closest approach to the origin and each side is
/// mapped t = t* +- L u^m, which removes an endpoint singularity of order p-2.
struct SegmentIntegrand {
    double xx = 0.0, xy = 0.0, yy = 0.0;
    double mu = 0.0, p = 2.0;
};

enum class SegmentWeight { one, one_minus_t };

QuadResult integrate_segment(const SegmentIntegrand& seg, SegmentWeight weight, const QuadOptions& opt = {});

} // namespace hoqc
