#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hoqc/errors.hpp"
#include "hoqc/lemmas.hpp"
#include "hoqc/params.hpp"
#include "hoqc/power.hpp"
#include "hoqc/quadrature.hpp"
#include "hoqc/rng.hpp"
#include "hoqc/sweep.hpp"

using namespace hoqc;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
    VectorXd x(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double a : v)
        x[i++] = a;
    return x;
}

VectorXd random_vec(std::mt19937_64& gen, int dim, double scale) {
    std::normal_distribution<double> n;
    VectorXd x(dim);
    for (int i = 0; i < dim; ++i)
        x[i] = scale * n(gen);
    return x;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("power_g closed forms") {
    CHECK(power_g(vec({0, 0}), 1.0, 2.0) == 1.0);
    CHECK(power_g(vec({1, 0}), 0.0, 2.0) == 1.0);
    CHECK(power_g(vec({3, 4}), 0.0, 3.0) == doctest::Approx(125.0).epsilon(1e-15));
}

TEST_CASE("grad_power_g values and singular point") {
    CHECK(grad_power_g(vec({0, 0}), 1.0, 1.5).norm() == 0.0);
    CHECK((grad_power_g(vec({1, 0}), 0.0, 2.0) - vec({2, 0})).norm() == 0.0);
    CHECK((grad_power_g(vec({1, 1}), 1.0, 4.0) - vec({12, 12})).norm() < 1e-13);
    CHECK_THROWS_AS(grad_power_g(vec({0, 0}), 0.0, 1.5), SingularPointError);
    CHECK(grad_power_g(vec({0, 0}), 0.0, 3.0).norm() == 0.0);
}

TEST_CASE("grad_power_g matches central differences") {
    auto gen = make_stream(11, 0);
    for (double p : {1.2, 1.5, 2.0, 3.0, 4.5})
        for (double mu : {0.0, 0.5, 2.0})
            for (int s = 0; s < 20; ++s) {
                const VectorXd x = random_vec(gen, 3, 1.0);
                const VectorXd g = grad_power_g(x, mu, p);
                const double h = 1e-5;
                for (int i = 0; i < 3; ++i) {
                    VectorXd e = VectorXd::Zero(3);
                    e[i] = h;
                    const double fd = (power_g(x + e, mu, p) - power_g(x - e, mu, p)) / (2 * h);
                    CHECK(std::abs(fd - g[i]) <= 1e-6 * std::max(1.0, g.norm()));
                }
            }
}

TEST_CASE("constants at p = 2 are exact") {
    const ConstantsTable t = constants_for({.p = 2.0, .mu = 0.0, .nu = 1.0});
    CHECK(t.kappa_p == 0.5);
    CHECK(t.K_p == 1.0);
    CHECK(t.theta_p == 1.0);
    CHECK(t.Theta_p == 2.0);
    CHECK(t.lambda == 0.5);
}

TEST_CASE("constants by hand at p = 3 and p = 1.5") {
    CHECK(K_p(3.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(Theta_p(3.0) == doctest::Approx(6.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(kappa_p(3.0) == doctest::Approx(1.0 / (std::sqrt(5.0) * 24.0)).epsilon(1e-15));
    CHECK(kappa_p(1.5) == doctest::Approx(std::pow(2.0, -1.25)).epsilon(1e-15));
    CHECK(K_p(1.5) == doctest::Approx(2.0 * std::pow(2.0, 0.75)).epsilon(1e-15));
    CHECK(theta_p(1.5) == doctest::Approx(1.5 * 0.5 * std::pow(2.0, -1.25)).epsilon(1e-15));
    CHECK_THROWS_AS(kappa_p(1.0), ParameterError);
    CHECK_THROWS_AS(constants_for({.p = 2.0, .mu = -1.0}), ParameterError);
    CHECK_THROWS_AS(constants_for({.p = 2.0, .mu = 0.0, .nu = 1.0, .lip = 0.5}), ParameterError);
}

TEST_CASE("constant invariants over a range of p") {
    for (double p = 1.05; p < 8.0; p += 0.05) {
        CHECK(kappa_p(p) > 0.0);
        CHECK(kappa_p(p) <= 0.5);
        CHECK(K_p(p) >= 1.0);
        CHECK(theta_p(p) > 0.0);
        CHECK(theta_p(p) <= Theta_p(p));
        const ConstantsTable t = constants_for({.p = p, .mu = 0.0, .nu = 0.7});
        CHECK(t.lambda == 0.7 / t.Theta_p);
    }
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int n : {1, 4, 16, 32}) {
        const GaussRule& r = gauss_legendre(n);
        for (int deg = 0; deg < 2 * n; ++deg) {
            double sum = 0.0;
            for (int i = 0; i < n; ++i)
                sum += r.weights[i] * std::pow(r.nodes[i], deg);
            const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CHECK(sum == doctest::Approx(exact).epsilon(1e-13));
        }
    }
    const QuadResult q = integrate_adaptive([](double t) { return std::exp(t); }, 0.0, 1.0);
    CHECK(std::abs(q.value - (std::numbers::e - 1.0)) < 1e-14);
}

TEST_CASE("prima and seconda against closed-form integrals") {
    // x = e1, y = e2, p = 3: the integrand is sqrt(1 + t^2).
    const double full = (std::sqrt(2.0) + std::asinh(1.0)) / 2.0;
    const double first_moment = (2.0 * std::sqrt(2.0) - 1.0) / 3.0;
    const Verdict prima = check_prima(vec({1, 0}), vec({0, 1}), 0.0, 3.0);
    CHECK(prima.margin + kappa_p(3.0) * std::sqrt(2.0) == doctest::Approx(full - first_moment).epsilon(1e-13));
    CHECK(prima.holds());
    const Verdict seconda = check_seconda(vec({1, 0}), vec({0, 1}), 0.0, 3.0);
    CHECK(K_p(3.0) * std::sqrt(2.0) - seconda.margin == doctest::Approx(full).epsilon(1e-13));
}

TEST_CASE("prima and seconda through the singular point") {
    // Segment 1 - 2t crosses the origin at t = 1/2; with p = 1.5 the integrand
    // is |1 - 2t|^{-1/2}: seconda integral 2, prima integral 1.
    const VectorXd x = vec({1, 0}), y = vec({-2, 0});
    const double total = std::pow(5.0, -0.25);
    const Verdict s = check_seconda(x, y, 0.0, 1.5);
    CHECK(std::abs(K_p(1.5) * total - s.margin - 2.0) <= 1e-9 + s.error_bound);
    const Verdict pr = check_prima(x, y, 0.0, 1.5);
    CHECK(std::abs(pr.margin + kappa_p(1.5) * total - 1.0) <= 1e-9 + pr.error_bound);
    CHECK(s.holds());
    CHECK(pr.holds());
}

TEST_CASE("prima and seconda trivial cases") {
    for (double p : {1.5, 2.0, 3.0}) {
        const Verdict a = check_prima(vec({0, 0}), vec({0, 0}), 1.0, p);
        CHECK(a.margin == doctest::Approx(0.5 - kappa_p(p)).epsilon(1e-14));
        const Verdict b = check_seconda(vec({0, 0}), vec({0, 0}), 1.0, p);
        CHECK(b.margin == doctest::Approx(K_p(p) - 1.0).epsilon(1e-14));
    }
    auto gen = make_stream(3, 0);
    for (int s = 0; s < 20; ++s) {
        const VectorXd x = random_vec(gen, 4, 2.0), y = random_vec(gen, 4, 2.0);
        CHECK(std::abs(check_prima(x, y, 0.7, 2.0).margin) < 1e-14);
        CHECK(std::abs(check_seconda(x, y, 0.7, 2.0).margin) < 1e-14);
    }
    CHECK_THROWS_AS(check_prima(vec({1, 0}), vec({0, 1}), 0.0, 3.0, 8), ParameterError);
}

TEST_CASE("prima and seconda margins are continuous") {
    auto gen = make_stream(5, 0);
    for (double p : {1.5, 3.0})
        for (int s = 0; s < 10; ++s) {
            const VectorXd x = random_vec(gen, 3, 1.0), y = random_vec(gen, 3, 1.0);
            const VectorXd d = random_vec(gen, 3, 1e-7);
            const double m0 = check_prima(x, y, 0.5, p).margin;
            const double m1 = check_prima(x + d, y, 0.5, p).margin;
            CHECK(std::abs(m1 - m0) < 1e-5);
            const double s0 = check_seconda(x, y, 0.5, p).margin;
            const double s1 = check_seconda(x, y + d, 0.5, p).margin;
            CHECK(std::abs(s1 - s0) < 1e-5);
        }
}

TEST_CASE("Taylor bounds: quadratic case is tight") {
    auto gen = make_stream(7, 0);
    for (int s = 0; s < 50; ++s) {
        const VectorXd x = random_vec(gen, 3, 3.0), y = random_vec(gen, 3, 3.0);
        const PairVerdict v = check_taylor_bounds(x, y, 0.0, 2.0);
        CHECK(v.first.tight());
        CHECK(v.second->margin == doctest::Approx(y.squaredNorm()).epsilon(1e-12));
    }
    const PairVerdict zero = check_taylor_bounds(vec({1, 2}), vec({0, 0}), 0.5, 3.0);
    CHECK(zero.first.margin == 0.0);
    CHECK(zero.second->margin == 0.0);
    CHECK_THROWS_AS(check_taylor_bounds(vec({0, 0}), vec({1, 0}), 0.0, 1.5), SingularPointError);
}

TEST_CASE("Taylor bounds hold on random samples") {
    auto gen = make_stream(9, 0);
    for (double p : {1.2, 2.0, 4.0})
        for (double mu : {0.0, 0.5, 2.0})
            for (int s = 0; s < 300; ++s) {
                const VectorXd x = random_vec(gen, 3, 1.0), y = random_vec(gen, 3, 1.0);
                const PairVerdict v = check_taylor_bounds(x, y, mu, p);
                CHECK(v.first.relative() >= -1e-12);
                CHECK(v.second->relative() >= -1e-12);
            }
}

TEST_CASE("product-space Taylor bounds") {
    auto gen = make_stream(13, 0);
    const VectorXd x = random_vec(gen, 2, 1.0), y = random_vec(gen, 2, 1.0);
    const PairVerdict zero = check_product_taylor(x, VectorXd::Zero(2), y, VectorXd::Zero(2), 0.5, 3.0, 2.0);
    CHECK(zero.first.margin == 0.0);
    // beta = 0 reduces to the plain Taylor bound in x.
    const VectorXd xi = random_vec(gen, 2, 1.0), eta = random_vec(gen, 2, 1.0);
    const PairVerdict degenerate = check_product_taylor(x, xi, y, eta, 0.5, 1.5, 0.0);
    const PairVerdict plain = check_taylor_bounds(x, xi, 0.5, 1.5);
    CHECK(degenerate.first.margin == doctest::Approx(plain.first.margin).epsilon(1e-12));
    CHECK_FALSE(check_product_taylor(x, xi, y, eta, 0.5, 1.5, 1.0).second.has_value());
    for (double beta : {0.5, 1.0, 4.0})
        for (double p : {1.5, 2.0, 3.0})
            for (int s = 0; s < 100; ++s) {
                const VectorXd a = random_vec(gen, 3, 1.0), b = random_vec(gen, 3, 1.0);
                const VectorXd c = random_vec(gen, 2, 1.0), d = random_vec(gen, 2, 1.0);
                const PairVerdict v = check_product_taylor(a, b, c, d, 0.3, p, beta);
                CHECK(v.first.relative() >= -1e-12);
                if (v.second)
                    CHECK(v.second->relative() >= -1e-12);
            }
}

TEST_CASE("small-p splitting inequalities") {
    CHECK(check_lemma10(vec({1, 2}), vec({0, 0}), 0.5, 1.5, 0.1).holds());
    CHECK(check_lemma10(vec({0, 0}), vec({1, 2}), 0.5, 1.5, 0.1).first.holds());
    CHECK_THROWS_AS(check_lemma10(vec({1, 0}), vec({0, 1}), 0.5, 2.5, 0.1), ParameterError);
    CHECK_THROWS_AS(check_lemma12(1.0, 1.0, 0.5, 3.0, 0.5), ParameterError);
    CHECK(check_lemma12(3.0, 0.0, 1.0, 1.5, 0.3).holds());
    // p = 2: b^2 <= 8 b^2 + eps a^2 + eps mu^2.
    const Verdict quad = check_lemma12(2.0, 3.0, 1.0, 2.0, 0.5);
    CHECK(quad.margin == doctest::Approx(7.0 * 9.0 + 0.5 * 4.0 + 0.5).epsilon(1e-14));
    auto gen = make_stream(17, 0);
    std::uniform_real_distribution<double> u(0.0, 10.0), pe(1.0001, 2.0), ee(1e-3, 0.999);
    for (int s = 0; s < 2000; ++s) {
        CHECK(check_lemma12(u(gen), u(gen), u(gen), pe(gen), ee(gen)).holds());
        const VectorXd x = random_vec(gen, 4, 1.0), y = random_vec(gen, 4, 1.0);
        CHECK(check_lemma10(x, y, u(gen) / 10.0, pe(gen), ee(gen)).holds());
    }
}

TEST_CASE("gradient Lipschitz from the Hessian bound") {
    const ScalarPotential quad = power_potential(0.0, 2.0);
    auto gen = make_stream(19, 0);
    for (int s = 0; s < 20; ++s) {
        const VectorXd x = random_vec(gen, 3, 1.0), y = random_vec(gen, 3, 1.0);
        const Verdict v = check_gradient_lipschitz(quad, x, y, 0.0, 2.0);
        CHECK(v.tight());
    }
    CHECK(check_gradient_lipschitz(quad, vec({1, 1}), vec({0, 0}), 0.0, 2.0).margin == 0.0);
    ScalarPotential nograd = quad;
    nograd.grad = nullptr;
    CHECK_THROWS_AS(check_gradient_lipschitz(nograd, vec({1, 1}), vec({0, 1}), 0.0, 2.0), MissingGradientError);
}

TEST_CASE("three-point estimate") {
    for (double p : {1.5, 3.0}) {
        const ScalarPotential f = power_potential(0.5, p, 1.0 / Theta_p(p));
        const VectorXd x = vec({1, -1}), y = vec({0.5, 2});
        CHECK(check_lemma4(f, x, y, VectorXd::Zero(2), 0.5, p, 0.5).margin >= 0.0);
        CHECK(check_lemma4(f, x, VectorXd::Zero(2), VectorXd::Zero(2), 0.5, p, 0.5).margin >= 0.0);
        const ScalarPotential loud = power_potential(0.5, p, 10.0);
        CHECK_THROWS_AS(check_lemma4(loud, x, y, vec({1, 1}), 0.5, p, 0.5), NormalizationError);
    }
}

TEST_CASE("small lemma sweep passes and is deterministic") {
    SweepConfig cfg;
    cfg.samples = 300;
    const SweepReport a = run_lemma_sweep(cfg);
    CHECK(a.passed());
    CHECK(a.failures() == 0);
    const SweepReport b = run_lemma_sweep(cfg);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        CHECK(a.cells[i].worst_margin == b.cells[i].worst_margin);
    cfg.samples = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("random streams depend only on seed and index") {
    auto a = make_stream(42, 3);
    auto b = make_stream(42, 3);
    auto c = make_stream(42, 4);
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
}

} // TEST_SUITE
