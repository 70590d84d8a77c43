#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hoqc/errors.hpp"
#include "hoqc/korn.hpp"

using namespace hoqc;
using std::numbers::pi;

namespace {

// psi = (sin(2 pi y), 0): divergence free, grad psi has one off-diagonal entry.
VectorField shear(const PeriodicGrid& g) {
    Eigen::ArrayXXd v = Eigen::ArrayXXd::Zero(g.nodes(), g.dim());
    v.col(0) = ScalarField::sample(g, [](const Eigen::VectorXd& x) { return std::sin(2 * pi * x[1]); }).values();
    return VectorField(g, v);
}

} // namespace

TEST_SUITE("korn") {

TEST_CASE("single shear mode has ratio 2 for every p") {
    const PeriodicGrid g(2, 16);
    const VectorField psi = shear(g);
    // |grad psi| = |c| and |antisym| = |c|/sqrt(2) pointwise.
    for (double p : {1.5, 2.0, 3.0, 4.0})
        CHECK(korn_ratio(psi, p) == doctest::Approx(std::pow(2.0, p / 2.0)).epsilon(1e-12));
    CHECK(identity_residual(psi) < 1e-12);
}

TEST_CASE("p = 2 ratio is exactly 2 on divergence-free fields") {
    for (int dim : {2, 3})
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const VectorField psi = random_vector_field(PeriodicGrid(dim, 16), 4, seed, true);
            CHECK(korn_ratio(psi, 2.0) == doctest::Approx(2.0).epsilon(1e-10));
            CHECK(identity_residual(psi) < 1e-10);
        }
}

TEST_CASE("ratio is at least 1 for every p") {
    for (double p : {1.5, 3.0, 5.0})
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const VectorField psi = random_vector_field(PeriodicGrid(2, 16), 3, seed, true);
            CHECK(korn_ratio(psi, p) >= 1.0);
        }
}

TEST_CASE("weighted ratio") {
    const VectorField psi = random_vector_field(PeriodicGrid(2, 16), 4, 2, true);
    for (double mu : {0.0, 0.5, 10.0})
        CHECK(weighted_korn_ratio(psi, 2.0, mu) == doctest::Approx(1.0).epsilon(1e-10));
    // Large mu flattens the weight, so the p = 2 identity is recovered.
    CHECK(weighted_korn_ratio(psi, 3.0, 1e3) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(weighted_korn_ratio(psi, 3.0, 0.0) > 0.0);
}

TEST_CASE("scaling") {
    const VectorField psi = random_vector_field(PeriodicGrid(2, 16), 4, 4, true);
    for (double p : {1.5, 3.0}) {
        CHECK(korn_ratio(7.0 * psi, p) == doctest::Approx(korn_ratio(psi, p)).epsilon(1e-12));
        CHECK(weighted_korn_ratio(7.0 * psi, p, 0.0) ==
              doctest::Approx(weighted_korn_ratio(psi, p, 0.0)).epsilon(1e-12));
    }
    // With mu > 0 the weight carries a length scale.
    CHECK(std::abs(weighted_korn_ratio(100.0 * psi, 3.0, 1.0) - weighted_korn_ratio(0.01 * psi, 3.0, 1.0)) > 1e-6);
}

TEST_CASE("inadmissible fields") {
    const PeriodicGrid g(2, 16);
    CHECK_THROWS_AS(korn_ratio(random_vector_field(g, 4, 1, false), 2.0), ParameterError);
    CHECK_THROWS_AS(korn_ratio(VectorField::zeros(g), 2.0), DegenerateFieldError);
    CHECK_THROWS_AS(weighted_korn_ratio(VectorField::zeros(g), 3.0, 1.0), DegenerateFieldError);
}

TEST_CASE("settings validation") {
    CHECK_THROWS_AS((KornSettings{.dim = 4}.validate()), ParameterError);
    CHECK_THROWS_AS((KornSettings{.p = 1.0}.validate()), ParameterError);
    CHECK_THROWS_AS((KornSettings{.samples = 0}.validate()), ParameterError);
    CHECK_THROWS_AS((KornSettings{.max_wavenumber = 11, .grid_n = 32}.validate()), ParameterError);
    CHECK(parse_korn_mode("lemma5") == KornMode::lemma5);
    CHECK_THROWS_AS(parse_korn_mode("lemma7"), ParameterError);
}

TEST_CASE("estimate at p = 2 is 2") {
    for (int dim : {2, 3}) {
        const KornEstimate e = estimate_constant({.dim = dim, .samples = 3, .optimizer_steps = 5, .grid_n = 16});
        CHECK(e.max_ratio == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(e.degenerate == 0);
        REQUIRE(e.argmax_field);
        CHECK(korn_ratio(*e.argmax_field, 2.0) == doctest::Approx(e.max_ratio).epsilon(1e-12));
    }
}

TEST_CASE("estimate is monotone and reproducible") {
    const KornSettings base{.p = 3.0, .samples = 2, .max_wavenumber = 3, .optimizer_steps = 5, .grid_n = 16};
    const KornEstimate a = estimate_constant(base);
    KornSettings more = base;
    more.samples = 4;
    more.optimizer_steps = 10;
    const KornEstimate b = estimate_constant(more);
    CHECK(b.max_ratio >= a.max_ratio);
    CHECK(a.max_ratio >= a.min_start_ratio);
    CHECK(estimate_constant(base).max_ratio == a.max_ratio);
    CHECK(a.max_ratio >= 1.0);
}

TEST_CASE("weighted mode ascends the weighted ratio") {
    const KornEstimate e = estimate_constant(
        {.p = 3.0, .mu = 1.0, .mode = KornMode::lemma5, .samples = 2, .max_wavenumber = 3, .optimizer_steps = 5, .grid_n = 16});
    CHECK(e.max_ratio >= e.min_start_ratio);
    CHECK(e.max_ratio > 0.0);
}

} // TEST_SUITE
