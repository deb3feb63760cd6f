// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fsorelay/error.hpp"
#include "fsorelay/mixture_gamma.hpp"
#include "fsorelay/quadrature.hpp"

using namespace fso;

namespace {

double mixture_cdf(const MixtureGamma& mg, double x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < mg.size(); ++i) {
        const auto& t = mg.terms()[i];
        sum += mg.component_probabilities()[i] * specfun::lower_inc_gamma(t.shape, t.rate * x) /
               specfun::gamma(t.shape);
    }
    return sum;
}

}  // namespace

TEST_CASE("single-term densities and means") {
    const MixtureGamma expo({{1, 1, 1}});
    const MixtureGamma gamma2({{1, 2, 1}});
    for (double x : {0.1, 1.0, 3.5}) {
        CHECK(expo.pdf(x) == doctest::Approx(std::exp(-x)).epsilon(1e-15));
        CHECK(gamma2.pdf(x) == doctest::Approx(x * std::exp(-x)).epsilon(1e-15));
    }
    CHECK(expo.mean() == doctest::Approx(1.0));
    CHECK(gamma2.mean() == doctest::Approx(2.0));
    CHECK(expo.pdf(0.0) == 1.0);
    CHECK(gamma2.pdf(0.0) == 0.0);
}

TEST_CASE("mixture invariants are enforced") {
    CHECK_THROWS_AS(MixtureGamma({}), ParameterError);
    CHECK_THROWS_AS(MixtureGamma({{1, 1, -1}}), ParameterError);
    CHECK_THROWS_AS(MixtureGamma({{0.5, 1, 1}}), ParameterError);
    CHECK_THROWS_AS(MixtureGamma(std::vector<MixtureTerm>(65, MixtureTerm{1.0 / 65, 1, 1})), ParameterError);
    CHECK_NOTHROW(MixtureGamma(std::vector<MixtureTerm>(64, MixtureTerm{1.0 / 64, 1, 1})));
    CHECK_THROWS_AS(GammaGammaParams(0.0, 2.0), ParameterError);
}

TEST_CASE("Gamma-Gamma fit structure") {
    const GammaGammaParams gg(4, 2);
    const auto mg = fit_gamma_gamma(gg, 10);
    REQUIRE(mg.size() == 10);
    double total = 0.0;
    for (std::size_t i = 0; i < mg.size(); ++i) {
        CHECK(mg.terms()[i].shape == 2.0);
        CHECK(mg.component_probabilities()[i] > 0.0);
        total += mg.component_probabilities()[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mg.mean() == doctest::Approx(1.0).epsilon(1e-2));
    const auto r = quad::integrate_half_line([&](double x) { return mg.pdf(x); }, 1.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    // b_i = min(alpha, beta) regardless of order.
    const auto swapped = fit_gamma_gamma({2, 4}, 6);
    for (const auto& t : swapped.terms()) CHECK(t.shape == 2.0);
}

TEST_CASE("Gamma-Gamma density is normalized with unit mean") {
    for (auto [a, b] : std::vector<std::pair<double, double>>{{4, 2}, {8, 4}, {2.5, 1.5}}) {
        const GammaGammaParams gg(a, b);
        const auto mass = quad::integrate_half_line([&](double x) { return gamma_gamma_pdf(gg, x); }, 1.0);
        const auto mean = quad::integrate_half_line([&](double x) { return x * gamma_gamma_pdf(gg, x); }, 1.0);
        CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(mean.value == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("fit accuracy and monotonicity in L") {
    const GammaGammaParams ref(4, 2);
    CHECK(fit_max_relative_error(fit_gamma_gamma(ref, 10), ref) <= 1e-2);
    for (auto [a, b] : std::vector<std::pair<double, double>>{{4, 2}, {8, 4}, {2, 1}, {5, 3}}) {
        CAPTURE(a);
        CAPTURE(b);
        const GammaGammaParams gg(a, b);
        double prev = fit_max_relative_error(fit_gamma_gamma(gg, 4), gg);
        for (int l = 5; l <= 10; ++l) {
            const double err = fit_max_relative_error(fit_gamma_gamma(gg, l), gg);
            CHECK(err <= prev);
            prev = err;
        }
    }
    CHECK(fit_max_relative_error(fit_gamma_gamma(ref, 1), ref) >
          fit_max_relative_error(fit_gamma_gamma(ref, 10), ref));
}

TEST_CASE("fit and exact model agree in distribution") {
    for (auto [a, b] : std::vector<std::pair<double, double>>{{8, 4}, {4, 2}, {2, 1}}) {
        CAPTURE(a);
        const GammaGammaParams gg(a, b);
        const auto mg = fit_gamma_gamma(gg, 10);
        double worst = 0.0;
        double exact = 0.0;
        double prev = 0.0;
        for (double x = 0.02; x <= 8.0; x += 0.02) {
            exact += quad::integrate([&](double t) { return gamma_gamma_pdf(gg, t); }, prev, x).value;
            prev = x;
            worst = std::max(worst, std::abs(exact - mixture_cdf(mg, x)));
        }
        CHECK(worst <= 1e-2);
    }
}

TEST_CASE("near-exponential limit") {
    const GammaGammaParams gg(200, 1);
    const auto mg = fit_gamma_gamma(gg, 64);
    for (double x = 0.1; x <= 5.0; x += 0.1) {
        CAPTURE(x);
        CHECK(mg.pdf(x) == doctest::Approx(std::exp(-x)).epsilon(0.02));
    }
}

TEST_CASE("JSON round trip") {
    const auto mg = fit_gamma_gamma({4, 2}, 5);
    const auto back = MixtureGamma::from_json(nlohmann::json::parse(mg.to_json().dump()));
    REQUIRE(back.size() == mg.size());
    for (std::size_t i = 0; i < mg.size(); ++i) {
        CHECK(back.terms()[i].weight == mg.terms()[i].weight);
        CHECK(back.terms()[i].shape == mg.terms()[i].shape);
        CHECK(back.terms()[i].rate == mg.terms()[i].rate);
    }
    CHECK(MixtureGamma::from_json(nlohmann::json::parse(R"([[1,2,1]])")).mean() == doctest::Approx(2.0));
    CHECK_THROWS_AS(MixtureGamma::from_json(nlohmann::json::parse(R"({"terms":[[1,2]]})")), ConfigError);
    CHECK_THROWS_AS(MixtureGamma::from_json(nlohmann::json::parse(R"({"rows":[]})")), ConfigError);
}

TEST_CASE("sampling") {
    Rng rng(42);
    const MixtureGamma expo({{1, 1, 1}});
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += expo.sample(rng);
    CHECK(std::abs(sum / n - 1.0) <= 0.005);

    const auto mg = fit_gamma_gamma({4, 2}, 10);
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = mg.sample(rng);
        s1 += v;
        s2 += v * v;
    }
    const double mean = s1 / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean - mg.mean()) <= 3 * se);

    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(mg.sample(a) == mg.sample(b));
}
