#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "hoqc/errors.hpp"
#include "hoqc/field_io.hpp"
#include "hoqc/fields.hpp"

using namespace hoqc;
using std::numbers::pi;

namespace {

template <typename Derived>
double max_abs(const Eigen::ArrayBase<Derived>& a) {
    return a.abs().maxCoeff();
}

VectorField sample_vector(const PeriodicGrid& g, auto&& f) {
    Eigen::ArrayXXd v(g.nodes(), g.dim());
    for (int a = 0; a < g.dim(); ++a)
        v.col(a) = ScalarField::sample(g, [&](const Eigen::VectorXd& x) { return f(x)[a]; }).values();
    return VectorField(g, v);
}

} // namespace

TEST_SUITE("fields") {

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(PeriodicGrid(1, 16), ParameterError);
    CHECK_THROWS_AS(PeriodicGrid(2, 12), ParameterError);
    CHECK_THROWS_AS(PeriodicGrid(2, 4), ParameterError);
    const PeriodicGrid g(3, 8);
    CHECK(g.nodes() == 512);
    CHECK(g.spectral_size() == 8 * 8 * 5);
    CHECK(g.max_band() == 2);
}

TEST_CASE("forward transform matches a naive DFT") {
    const PeriodicGrid g(2, 8);
    const ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd& x) {
        return std::exp(std::sin(2 * pi * x[0]) + 0.3 * std::cos(2 * pi * (x[0] + 2 * x[1])));
    });
    const Spectrum s = forward(g, f.values());
    const auto t = spectral_tables(g);
    for (Eigen::Index m = 0; m < s.size(); ++m) {
        std::complex<double> naive = 0.0;
        for (std::size_t node = 0; node < g.nodes(); ++node) {
            const auto idx = g.node_index(node);
            const double phase = -2 * pi * (t->k[0][m] * idx[0] + t->k[1][m] * idx[1]) / 8.0;
            naive += f[node] * std::polar(1.0, phase);
        }
        naive /= double(g.nodes());
        CHECK(std::abs(naive - s[m]) < 1e-14);
    }
}

TEST_CASE("round trip and Parseval") {
    for (int dim : {2, 3}) {
        const PeriodicGrid g(dim, 16);
        const ScalarField f = ScalarField::sample(g, [](const Eigen::VectorXd& x) {
            return std::exp(std::cos(2 * pi * x[0])) * (1.0 + x[1] * (1.0 - x[1]));
        });
        const Spectrum s = forward(g, f.values());
        CHECK(max_abs(inverse(g, s) - f.values()) <= 1e-12 * max_abs(f.values()));
        CHECK(spectral_energy(g, s) == doctest::Approx(f.values().square().mean()).epsilon(1e-12));
    }
}

TEST_CASE("derivatives of single modes") {
    const PeriodicGrid g(2, 16);
    const ScalarField c = ScalarField::sample(g, [](const Eigen::VectorXd&) { return 3.0; });
    CHECK(max_abs(gradient(c).values()) < 1e-14);
    const ScalarField s1 = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::sin(2 * pi * x[0]); });
    const VectorField gs = gradient(s1);
    const ScalarField expect = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 2 * pi * std::cos(2 * pi * x[0]); });
    CHECK(max_abs(gs.values().col(0) - expect.values()) < 1e-12);
    CHECK(max_abs(gs.values().col(1)) < 1e-12);
    CHECK(max_abs(laplacian(s1).values() + 4 * pi * pi * s1.values()) < 1e-11);

    const ScalarField ss = ScalarField::sample(
        g, [](const Eigen::VectorXd& x) { return std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[1]); });
    const MatrixField h = hessian(ss);
    const ScalarField off = ScalarField::sample(
        g, [](const Eigen::VectorXd& x) { return 4 * pi * pi * std::cos(2 * pi * x[0]) * std::cos(2 * pi * x[1]); });
    CHECK(max_abs(h.entry(0, 1).values() - off.values()) < 1e-10);
    CHECK((h.entry(0, 1).values() == h.entry(1, 0).values()).all());
}

TEST_CASE("operator identities") {
    for (int dim : {2, 3}) {
        const PeriodicGrid g(dim, 16);
        const ScalarField phi = random_scalar_field(g, 4, 5);
        CHECK(max_abs(divergence(gradient(phi)).values() - laplacian(phi).values()) < 1e-10);
        const MatrixField jh = jacobian(gradient(phi));
        CHECK(max_abs(jh.values() - hessian(phi).values()) < 1e-10);
        CHECK(max_abs(antisym_part(hessian(phi)).values()) == 0.0);
    }
    const PeriodicGrid g(2, 16);
    const VectorField v = sample_vector(g, [](const Eigen::VectorXd& x) {
        return Eigen::Vector2d(std::sin(2 * pi * x[1]), 0.0);
    });
    CHECK(max_abs(divergence(v).values()) < 1e-13);
}

TEST_CASE("periodic Poisson solve") {
    const PeriodicGrid g(2, 16);
    CHECK(max_abs(solve_poisson(ScalarField::zeros(g)).values()) == 0.0);
    const ScalarField s1 = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::sin(2 * pi * x[0]); });
    CHECK(max_abs(solve_poisson(s1).values() + s1.values() / (4 * pi * pi)) < 1e-15);
    const ScalarField f = random_scalar_field(g, 5, 9);
    CHECK(max_abs(solve_poisson(laplacian(f)).values() - f.values()) < 1e-12);
    const ScalarField shifted = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 1.0 + std::sin(2 * pi * x[0]); });
    CHECK_THROWS_AS(solve_poisson(shifted), ParameterError);
}

TEST_CASE("Helmholtz decomposition examples") {
    const PeriodicGrid g(2, 16);
    const ScalarField u = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::sin(2 * pi * x[0]) / (2 * pi); });
    const HelmholtzParts curl_free = helmholtz(gradient(u));
    CHECK(max_abs(curl_free.solenoidal.values()) < 1e-13);
    CHECK(max_abs(curl_free.potential.values() - u.values()) < 1e-13);

    // v perpendicular to k = (1, 2).
    const VectorField divfree = sample_vector(g, [](const Eigen::VectorXd& x) {
        const double c = std::cos(2 * pi * (x[0] + 2 * x[1]));
        return Eigen::Vector2d(2 * c, -c);
    });
    const HelmholtzParts df = helmholtz(divfree);
    CHECK(max_abs(df.potential.values()) < 1e-14);
    CHECK(max_abs(df.solenoidal.values() - divfree.values()) < 1e-13);

    // Generic v = (1, 0) on k = (1, 1): gradient part carries (v.k^)k^ = (1/2, 1/2).
    const VectorField generic = sample_vector(g, [](const Eigen::VectorXd& x) {
        return Eigen::Vector2d(std::cos(2 * pi * (x[0] + x[1])), 0.0);
    });
    const HelmholtzParts gp = helmholtz(generic);
    const VectorField grad_part = gradient(gp.potential);
    const ScalarField half = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return 0.5 * std::cos(2 * pi * (x[0] + x[1])); });
    CHECK(max_abs(grad_part.values().col(0) - half.values()) < 1e-13);
    CHECK(max_abs(grad_part.values().col(1) - half.values()) < 1e-13);
    CHECK(max_abs(gp.solenoidal.values().col(0) - half.values()) < 1e-13);
    CHECK(max_abs(gp.solenoidal.values().col(1) + half.values()) < 1e-13);
}

TEST_CASE("Helmholtz residuals and idempotence on random fields") {
    for (int dim : {2, 3})
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const PeriodicGrid g(dim, 16);
            const VectorField v = random_vector_field(g, 5, seed, false);
            const HelmholtzParts parts = helmholtz(v);
            const double norm = spectral_norm(v);
            CHECK(spectral_norm(v - gradient(parts.potential) - parts.solenoidal) < 1e-12 * norm);
            CHECK(spectral_norm(divergence(parts.solenoidal)) < 1e-10 * norm);
            CHECK(std::abs(integrate(parts.potential)) < 1e-15);
            const HelmholtzParts again = helmholtz(parts.solenoidal);
            CHECK(spectral_norm(again.potential) < 1e-14 * norm);
            CHECK(spectral_norm(again.solenoidal - parts.solenoidal) < 1e-13 * norm);
        }
}

TEST_CASE("symmetric and antisymmetric parts") {
    const PeriodicGrid g(2, 8);
    Eigen::ArrayXXd e = Eigen::ArrayXXd::Zero(g.nodes(), 4);
    e.col(1) = 1.0;  // entry (0, 1)
    const MatrixField m(g, e);
    const MatrixField s = sym_part(m), a = antisym_part(m);
    CHECK((s.values().col(1) == 0.5).all());
    CHECK((s.values().col(2) == 0.5).all());
    CHECK((a.values().col(1) == 0.5).all());
    CHECK((a.values().col(2) == -0.5).all());
    const MatrixField r = jacobian(random_vector_field(g, 2, 3, false));
    const MatrixField rs = sym_part(r), ra = antisym_part(r);
    CHECK(max_abs(rs.values() + ra.values() - r.values()) < 1e-15 * (1.0 + max_abs(r.values())));
    const Eigen::ArrayXd lhs = r.values().square().rowwise().sum();
    const Eigen::ArrayXd rhs = rs.values().square().rowwise().sum() + ra.values().square().rowwise().sum();
    CHECK(max_abs(lhs - rhs) < 1e-12 * (1.0 + max_abs(lhs)));
    CHECK(max_abs(antisym_part(sym_part(r)).values()) == 0.0);
}

TEST_CASE("integration") {
    const PeriodicGrid g(2, 16);
    CHECK(integrate(ScalarField::sample(g, [](const Eigen::VectorXd&) { return 2.5; })) == 2.5);
    CHECK(std::abs(integrate(ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::sin(2 * pi * x[0]); }))) < 1e-16);
    CHECK(integrate(ScalarField::sample(g, [](const Eigen::VectorXd& x) {
              return std::pow(std::sin(2 * pi * x[0]), 2);
          })) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("random fields") {
    for (int dim : {2, 3}) {
        const PeriodicGrid g(dim, 16);
        const VectorField df = random_vector_field(g, 5, 7, true);
        CHECK(spectral_norm(divergence(df)) < 1e-12);
        CHECK(df.values().square().rowwise().sum().mean() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((random_vector_field(g, 5, 7, true).values() == df.values()).all());
        CHECK((random_vector_field(g, 5, 8, true).values() != df.values()).any());
        const ScalarField s = random_scalar_field(g, 3, 1);
        CHECK(s.values().square().mean() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(integrate(s)) < 1e-15);
        CHECK_THROWS_AS(random_scalar_field(g, 6, 1), ParameterError);
    }
}

TEST_CASE("random fields do not depend on the grid") {
    const PeriodicGrid coarse(2, 16), fine(2, 32);
    const VectorField a = random_vector_field(coarse, 4, 11, true);
    const VectorField b = random_vector_field(fine, 4, 11, true);
    CHECK(max_abs(resample(a, fine).values() - b.values()) < 1e-13);
    CHECK(max_abs(resample(b, coarse).values() - a.values()) < 1e-13);
}

TEST_CASE("grid refinement leaves band-limited integrals unchanged") {
    for (double p : {2.0, 4.0}) {
        const PeriodicGrid coarse(2, 32), fine(2, 64);
        const VectorField a = random_vector_field(coarse, 4, 3, true);
        auto power_integral = [p](const VectorField& v) {
            return pointwise_norm(jacobian(v)).values().pow(p).mean();
        };
        const double ic = power_integral(a), iff = power_integral(resample(a, fine));
        CHECK(std::abs(ic - iff) < 1e-10 * std::abs(iff));
    }
    // Non-polynomial integrands carry a small aliasing error.
    const PeriodicGrid coarse(2, 64), fine(2, 128);
    const VectorField a = random_vector_field(coarse, 3, 3, true);
    const double ic = pointwise_norm(jacobian(a)).values().pow(3.0).mean();
    const double iff = pointwise_norm(jacobian(resample(a, fine))).values().pow(3.0).mean();
    CHECK(std::abs(ic - iff) < 1e-6 * std::abs(iff));
}

TEST_CASE("band limiting") {
    const PeriodicGrid g(2, 16);
    const ScalarField f = random_scalar_field(g, 5, 2);
    const ScalarField low = band_limit(f, 2, true);
    const ScalarField again = band_limit(low, 2, true);
    CHECK(max_abs(low.values() - again.values()) < 1e-14);
    CHECK(spectral_norm(low) < spectral_norm(f));
}

TEST_CASE("field files round trip") {
    const auto dir = std::filesystem::temp_directory_path();
    const PeriodicGrid g(3, 8);
    const VectorField v = random_vector_field(g, 2, 1, true);
    const std::string path = (dir / "hoqc_test_vector.bin").string();
    save_field(path, v, "unit test");
    const AnyField back = load_field(path);
    REQUIRE(std::holds_alternative<VectorField>(back));
    CHECK((std::get<VectorField>(back).values() == v.values()).all());
    CHECK(std::get<VectorField>(back).grid() == g);
    CHECK(std::filesystem::exists(path + ".json"));

    const MatrixField m = jacobian(v);
    save_field(path, m);
    CHECK((std::get<MatrixField>(load_field(path)).values() == m.values()).all());
    const ScalarField s = random_scalar_field(PeriodicGrid(2, 16), 3, 4);
    save_field(path, s);
    CHECK((std::get<ScalarField>(load_field(path)).values() == s.values()).all());
    CHECK_THROWS_AS(load_field(path + ".json"), ParameterError);
}

} // TEST_SUITE
