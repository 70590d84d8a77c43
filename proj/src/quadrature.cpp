#include "hoqc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace hoqc {

namespace {

GaussRule build_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex lock;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

QuadResult integrate_segment(const SegmentIntegrand& seg, SegmentWeight weight, const QuadOptions& opt) {
    const double r = (seg.p - 2.0) / 2.0;
    const double mu2 = seg.mu * seg.mu;
    auto w = [&](double t) { return weight == SegmentWeight::one ? 1.0 : 1.0 - t; };

    if (seg.yy == 0.0) {
        // Constant integrand.
        const double c = std::pow(mu2 + seg.xx, r);
        QuadResult out;
        out.value = (weight == SegmentWeight::one) ? c : 0.5 * c;
        out.error_bound = 4.0 * 2.2e-16 * std::abs(out.value);
        out.panels = 1;
        if (!std::isfinite(out.value))
            throw QuadratureError("integrand singular along the whole segment");
        return out;
    }

    // Centered form q(t) = d^2 + |y|^2 (t - t_c)^2 keeps the distance to the
    // origin accurate near the closest approach t_c = -x.y/|y|^2.
    const double t_c = -seg.xy / seg.yy;
    const double d2 = std::max(mu2 + seg.xx - seg.xy * seg.xy / seg.yy, 0.0);
    if (r >= 0.0) {
        auto f = [&](double t) { return std::pow(d2 + seg.yy * (t - t_c) * (t - t_c), r) * w(t); };
        return integrate_adaptive(f, 0.0, 1.0, opt);
    }

    // Negative exponent: split at the peak and map each side.
    const double t_star = std::clamp(t_c, 0.0, 1.0);
    const double offset = t_star - t_c;
    // 1 - t measured from the split point; 1 - t itself cancels when t* is near 1.
    const double rest = 1.0 - t_star;
    const int m = std::max(1, static_cast<int>(std::ceil(1.0 / (seg.p - 1.0) - 1e-12)));
    QuadResult total;
    auto side = [&](double length, double sign) {
        if (length <= 0.0)
            return;
        auto mapped = [&](double u) {
            if (u <= 0.0)
                u = 1e-300;
            const double um1 = std::pow(u, m - 1);
            const double step = sign * length * um1 * u;
            const double dt = offset + step;
            const double qt = d2 + seg.yy * dt * dt;
            if (qt == 0.0)
                return 0.0;  // only reachable as u -> 0 with m(p-1) > 1
            const double wt = weight == SegmentWeight::one ? 1.0 : rest - step;
            return std::pow(qt, r) * wt * length * m * um1;
        };
        const QuadResult part = integrate_adaptive(mapped, 0.0, 1.0, opt);
        total.value += part.value;
        total.error_bound += part.error_bound;
        total.panels += part.panels;
    };
    side(t_star, -1.0);
    side(1.0 - t_star, +1.0);
    if (!std::isfinite(total.value))
        throw QuadratureError("segment integral is not finite");
    return total;
}

} // namespace hoqc
