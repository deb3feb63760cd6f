// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fsorelay/error.hpp"
#include "fsorelay/hop.hpp"
#include "fsorelay/quadrature.hpp"

using namespace fso;

namespace {

HopChannel unit_hop() { return HopChannel(MixtureGamma({{1, 2, 1}}), Pointing(1, 1), 1.0); }

HopChannel gg_hop(double alpha, double beta, double xi_sq, double db, double a0 = 1.0) {
    return HopChannel(fit_gamma_gamma({alpha, beta}, 10), Pointing(xi_sq, a0), db_to_linear(db));
}

// Normalized single-term mixture with integer shape b.
MixtureGamma single(double b, double c) { return MixtureGamma({{std::pow(c, b) / std::tgamma(b), b, c}}); }

}  // namespace

TEST_CASE("pointing loss") {
    CHECK(pointing_loss(100.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pointing_loss(0.1, 1.0) == doctest::Approx(0.019792086945219324813).epsilon(1e-13));
    const double r = 1e-4;
    CHECK(pointing_loss(r, 1.0) == doctest::Approx(std::numbers::pi * r * r / 2).epsilon(1e-7));
    CHECK_THROWS_AS(pointing_loss(0.0, 1.0), DomainError);
    CHECK(Pointing::from_aperture(1.0, 0.1, 1.0).a0 == pointing_loss(0.1, 1.0));
    CHECK_THROWS_AS(Pointing(0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(Pointing(1.0, 1.5), ParameterError);
}

TEST_CASE("mean irradiance and average SNR") {
    CHECK(unit_hop().mean_irradiance() == doctest::Approx(1.0));
    CHECK(unit_hop().snr_scale() == doctest::Approx(1.0));
    const auto mg = fit_gamma_gamma({4, 2}, 10);
    const HopChannel wide(mg, Pointing(1e6, 1.0), 1.0);
    CHECK(wide.mean_irradiance() == doctest::Approx(mg.mean()).epsilon(1e-5));
    // The density has mean gamma_bar.
    const auto h = gg_hop(4, 2, 1, 7.0, 0.0198);
    const auto mean = quad::integrate_half_line([&](double x) { return x * snr_pdf(h, x); }, h.gamma_bar());
    CHECK(mean.value == doctest::Approx(h.gamma_bar()).epsilon(1e-8));
    // Budget-derived gamma_bar = P eta I / N0.
    const auto b = HopChannel::from_budget(mg, Pointing(2, 0.5), {2.0, 0.8, 0.1});
    CHECK(b.gamma_bar() == doctest::Approx(2.0 * 0.8 * b.mean_irradiance() / 0.1).epsilon(1e-12));
    CHECK_THROWS_AS(HopChannel(mg, Pointing(1, 1), 0.0), ParameterError);
}

TEST_CASE("regime classification") {
    CHECK(unit_hop().regime() == HopRegime::exact);
    CHECK(gg_hop(4, 2, 1, 0).regime() == HopRegime::exact);
    CHECK(gg_hop(4, 2, 2, 0).regime() == HopRegime::bound);
    CHECK(gg_hop(4, 2, 3, 0).regime() == HopRegime::bound);
    CHECK(gg_hop(4, 2, 1.5, 0).regime() == HopRegime::general);
    CHECK(gg_hop(4.2, 2.5, 1, 0).regime() == HopRegime::general);
    CHECK(gg_hop(4, 1, 1, 0).regime() == HopRegime::general);  // b = 1 bound is not integrable
}

TEST_CASE("expansion coefficients") {
    const auto u = unit_hop();
    CHECK(expansion_coeff(u, 0, 0) == doctest::Approx(1.0));
    CHECK(expansion_coeff(u.with_gamma_bar(2.0), 0, 0) == doctest::Approx(0.5));
    const auto h = gg_hop(5, 3, 1, 4.0);
    const auto h2 = h.with_gamma_bar(2.0 * h.gamma_bar());
    double norm = 0.0;
    for (std::size_t i = 0; i < h.mixture().size(); ++i) {
        const auto& t = h.mixture().terms()[i];
        for (int k = 0; k < 2; ++k) {
            CHECK(expansion_coeff(h2, i, k) == doctest::Approx(expansion_coeff(h, i, k) / std::pow(2.0, 1 + k)).epsilon(1e-12));
            norm += expansion_coeff(h, i, k) * std::tgamma(1.0 + k) * std::pow(h.snr_scale() / t.rate, 1.0 + k);
        }
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(expansion_coeff(h, 0, 2), DomainError);
    CHECK_THROWS_AS(expansion_coeff(gg_hop(4, 2, 2, 0), 0, 0), IntegerConditionError);
}

TEST_CASE("exact and reduced densities") {
    const auto u = unit_hop();
    for (double x : {0.01, 0.5, 2.0, 9.0}) {
        CHECK(snr_pdf(u, x) == doctest::Approx(std::exp(-x)).epsilon(1e-13));
        CHECK(snr_pdf_reduced(u, x) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    }
    const std::vector<HopChannel> hops = {
        gg_hop(4, 2, 1, 0), gg_hop(5, 3, 2, 10), gg_hop(4, 3, 1, 20, 0.0198),
        HopChannel(single(3, 1.7), Pointing(1, 0.5), 3.0), HopChannel(single(6, 2.0), Pointing(3, 1.0), 0.4)};
    for (const auto& h : hops) {
        for (double x = 1e-3; x <= 50.0; x *= 1.3) {
            const double exact = snr_pdf(h, x);
            CHECK(std::abs(snr_pdf_reduced(h, x) - exact) <= 1e-10 * exact);
        }
        const auto mass = quad::integrate_half_line([&](double x) { return snr_pdf(h, x); }, h.gamma_bar());
        CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(reduced_expansion(h).mass() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // x -> 0 with xi^2 = 1: the k = 0 coefficients.
    const auto h = hops[3];
    CHECK(snr_pdf_reduced(h, 1e-12) == doctest::Approx(expansion_coeff(h, 0, 0)).epsilon(1e-9));
    CHECK_THROWS_AS(snr_pdf_reduced(gg_hop(4, 2, 1.5, 0), 1.0), IntegerConditionError);
}

TEST_CASE("density bound") {
    for (double xi_sq : {2.0, 3.0}) {
        const auto h = gg_hop(4, 2, xi_sq, 10);
        for (double x = 1e-3; x < 200.0; x *= 1.25) CHECK(snr_pdf_bound(h, x) >= snr_pdf(h, x));
        CHECK(snr_pdf(h, 2000.0) / snr_pdf_bound(h, 2000.0) > 0.95);
        for (double x : {0.1, 3.0}) CHECK(analytic_expansion(h).pdf(x) == doctest::Approx(snr_pdf_bound(h, x)));
    }
    // Single term with b = xi^2.
    const HopChannel h(single(2, 1.3), Pointing(2, 0.7), 5.0);
    const double s = h.snr_scale();
    const double a = h.mixture().terms()[0].weight;
    for (double x : {0.2, 4.0})
        CHECK(snr_pdf_bound(h, x) == doctest::Approx(a / 1.3 * 2.0 / s * std::exp(-1.3 * x / s)).epsilon(1e-13));
}

TEST_CASE("CCDF") {
    const auto u = unit_hop();
    for (double x : {0.0, 0.3, 4.0}) CHECK(snr_ccdf(u, x) == doctest::Approx(std::exp(-x)).epsilon(1e-14));
    const auto h = gg_hop(5, 3, 2, 10);
    CHECK(snr_ccdf(h, 0.0) == 1.0);
    double prev = 1.0;
    double acc = 0.0;
    double lo = 0.0;
    for (double x = 0.05; x < 100.0; x *= 1.2) {
        const double c = snr_ccdf(h, x);
        CHECK(c <= prev);
        CHECK(c >= 0.0);
        prev = c;
        acc += quad::integrate([&](double t) { return snr_pdf_reduced(h, t); }, lo, x).value;
        lo = x;
        CHECK(std::abs(1.0 - c - acc) <= 1e-8);
        CHECK(std::abs(snr_ccdf_numeric(h, x) - c) <= 1e-12);
    }
}

TEST_CASE("numeric CDF for real parameters") {
    const HopChannel h(fit_gamma_gamma({3.3, 1.7}, 10), Pointing(1.6, 0.4), db_to_linear(6.0));
    CHECK(h.regime() == HopRegime::general);
    double lo = 0.0, acc = 0.0;
    for (double x = 0.02; x < 80.0; x *= 1.4) {
        acc += quad::integrate([&](double t) { return snr_pdf(h, t); }, lo, x).value;
        lo = x;
        CHECK(std::abs(snr_cdf_numeric(h, x) - acc) <= 1e-9);
        CHECK(snr_cdf_numeric(h, x) + snr_ccdf_numeric(h, x) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("scale equivariance") {
    const auto h = gg_hop(4, 2, 1, 3.0);
    const double s = 7.5;
    const auto hs = h.with_gamma_bar(s * h.gamma_bar());
    for (double x : {0.1, 1.0, 10.0}) {
        CHECK(snr_pdf(hs, x) == doctest::Approx(snr_pdf(h, x / s) / s).epsilon(1e-12));
        CHECK(snr_ccdf(hs, x) == doctest::Approx(snr_ccdf(h, x / s)).epsilon(1e-12));
    }
}

TEST_CASE("pointing-free limit") {
    const auto mg = fit_gamma_gamma({5, 3}, 10);
    const double gbar = 4.0;
    // Pure-MG SNR: gamma = gbar * I_a / E[I_a].
    auto pure_ccdf = [&](double x) {
        double sum = 0.0;
        for (std::size_t i = 0; i < mg.size(); ++i) {
            const auto& t = mg.terms()[i];
            sum += mg.component_probabilities()[i] *
                   specfun::upper_inc_gamma(t.shape, t.rate * x * mg.mean() / gbar) / specfun::gamma(t.shape);
        }
        return sum;
    };
    for (double x : {0.5, 2.0, 6.0}) {
        double prev = 1.0;
        for (int xi_sq = 1; xi_sq <= 2; ++xi_sq) {
            const double d = std::abs(snr_ccdf(HopChannel(mg, Pointing(xi_sq, 1), gbar), x) - pure_ccdf(x));
            CHECK(d < prev);
            prev = d;
        }
        for (double xi_sq : {4.0, 10.0, 40.0}) {
            const double d = std::abs(snr_ccdf_numeric(HopChannel(mg, Pointing(xi_sq, 1), gbar), x) - pure_ccdf(x));
            CHECK(d < prev);
            prev = d;
        }
    }
}

TEST_CASE("integer bracket") {
    const auto h = gg_hop(4.6, 2.4, 1.5, 5.0);
    const auto [lower, upper] = integer_bracket(h);
    CHECK(lower.pointing().xi_sq == 1.0);
    CHECK(upper.pointing().xi_sq == 2.0);
    CHECK(lower.mixture().terms()[0].shape == 2.0);
    CHECK(upper.mixture().terms()[0].shape == 3.0);
    CHECK(lower.regime() == HopRegime::exact);
    CHECK(upper.regime() == HopRegime::exact);
    for (std::size_t i = 0; i < h.mixture().size(); ++i)
        CHECK(lower.mixture().component_probabilities()[i] ==
              doctest::Approx(h.mixture().component_probabilities()[i]).epsilon(1e-12));
    const auto same = integer_bracket(gg_hop(4, 2, 1, 0));
    CHECK(same.lower.mixture().terms()[0].shape == 2.0);
    CHECK(same.upper.mixture().terms()[0].shape == 2.0);
}

TEST_CASE("hop JSON") {
    const auto h = gg_hop(4, 2, 1, 12.5, 0.3);
    const auto back = HopChannel::from_json(nlohmann::json::parse(h.to_json().dump()));
    CHECK(back.gamma_bar() == doctest::Approx(h.gamma_bar()).epsilon(1e-14));
    CHECK(back.pointing().a0 == 0.3);
    CHECK(back.mixture().size() == 10);
    CHECK_THROWS_AS(HopChannel::from_json(nlohmann::json::parse(R"({"xi_sq":1})")), ConfigError);
    CHECK_THROWS_AS(HopChannel::from_json(
                        nlohmann::json::parse(R"({"mg":[[1,2,1]],"xi_sq":"a","A0":1,"gamma_bar_db":0})")),
                    ConfigError);
}
