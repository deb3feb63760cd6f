// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fsorelay/aber.hpp"
#include "fsorelay/error.hpp"
#include "fsorelay/specfun.hpp"

using namespace fso;

namespace {

HopChannel unit_hop() { return HopChannel(MixtureGamma({{1, 2, 1}}), Pointing(1, 1), 1.0); }

HopChannel gg_hop(double alpha, double beta, double xi_sq, double db) {
    return HopChannel(fit_gamma_gamma({alpha, beta}, 10), Pointing(xi_sq, 1.0), db_to_linear(db));
}

}  // namespace

TEST_CASE("conditional BER") {
    const auto bpsk = Modulation::bpsk();
    for (double s : {0.0, 0.2, 3.0, 30.0}) {
        CHECK(conditional_ber(bpsk, s) == doctest::Approx(0.5 * std::erfc(std::sqrt(s))).epsilon(1e-14));
        CHECK(conditional_ber({1.0, 0.5}, s) == doctest::Approx(0.5 * std::exp(-0.5 * s)).epsilon(1e-14));
        CHECK(conditional_ber({2.0, 1.0}, s) == doctest::Approx(0.5 * (1 + s) * std::exp(-s)).epsilon(1e-14));
        if (s > 0.0)
            CHECK(conditional_ber({1.5, 0.7}, s) ==
                  doctest::Approx(specfun::upper_inc_gamma(1.5, 0.7 * s) / (2 * specfun::gamma(1.5))).epsilon(1e-12));
    }
    CHECK_THROWS_AS(Modulation(0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(Modulation(1.0, -1.0), ParameterError);
}

TEST_CASE("ABER of degenerate CDFs") {
    for (const Modulation m : {Modulation::bpsk(), Modulation(1.0, 1.0), Modulation(2.5, 0.3)}) {
        CHECK(aber_from_cdf([](double) { return 1.0; }, m) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(aber_from_cdf([](double) { return 0.0; }, m) == 0.0);
    }
}

TEST_CASE("unit channel values") {
    const auto u = unit_hop();
    const auto bpsk = Modulation::bpsk();
    // Exponential SNR with mean 1/2: 0.5 (1 - sqrt(1/3)).
    CHECK(aber_df(RelayLink(u, u, DecodeForward{}), bpsk) ==
          doctest::Approx(0.5 * (1.0 - std::sqrt(1.0 / 3.0))).epsilon(1e-12));
    CHECK(aber_csi(RelayLink(u, u, CsiAssisted{0}), bpsk) == doctest::Approx(0.24333115347639).epsilon(1e-10));
    CHECK(aber_fixed(RelayLink(u, u, FixedGain{}), bpsk) == doctest::Approx(0.276862261695711).epsilon(1e-10));
    const auto csi1 = aber(RelayLink(u, u, CsiAssisted{1}), bpsk);
    CHECK(csi1.method == Method::numeric);
    CHECK(csi1.value == doctest::Approx(0.288011494863153).epsilon(1e-9));
    CHECK_THROWS_AS(aber_csi(RelayLink(u, u, CsiAssisted{1}), bpsk), std::invalid_argument);
    // P = 1: ABER = Q/2 * Laplace transform of F at Q; min of two unit exponentials.
    CHECK(aber_df(RelayLink(u, u, DecodeForward{}), {1.0, 1.0}) == doctest::Approx(0.5 * 2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("closed forms match quadrature") {
    const std::vector<Modulation> mods = {Modulation::bpsk(), Modulation(1.0, 0.5)};
    for (double db : {0.0, 10.0, 20.0}) {
        const auto h1 = gg_hop(4, 2, 1, db);
        const auto h2 = gg_hop(5, 3, 2, db);
        for (const Protocol p : {Protocol{CsiAssisted{0}}, Protocol{FixedGain{}}, Protocol{DecodeForward{}}}) {
            const RelayLink link(h1, db == 10.0 ? h2 : h1, p);
            for (const auto& m : mods) {
                const double closed = aber(link, m).value;
                const double numeric = aber_quadrature(link, m, CdfSource::numeric);
                CHECK(std::abs(closed - numeric) <= 1e-6 * std::max(1.0, numeric));
                CHECK(std::abs(closed - numeric) <= 1e-4 * numeric);
            }
        }
    }
}

TEST_CASE("monotone in average SNR") {
    for (const Protocol p : {Protocol{CsiAssisted{0}}, Protocol{FixedGain{}}, Protocol{DecodeForward{}}}) {
        double prev = 0.5;
        for (double db = 0.0; db <= 40.0; db += 5.0) {
            const auto h = gg_hop(4, 2, 1, db);
            const double v = aber(RelayLink(h, h, p), Modulation::bpsk()).value;
            CHECK(v < prev);
            CHECK(v > 0.0);
            prev = v;
        }
    }
}

TEST_CASE("ordering across protocols") {
    for (double db : {5.0, 15.0, 25.0}) {
        const auto h = gg_hop(4, 2, 1, db);
        const auto bpsk = Modulation::bpsk();
        const double df = aber(RelayLink(h, h, DecodeForward{}), bpsk).value;
        const double c0 = aber(RelayLink(h, h, CsiAssisted{0}), bpsk).value;
        const double c1 = aber(RelayLink(h, h, CsiAssisted{1}), bpsk).value;
        CHECK(df <= c0);
        CHECK(c0 <= c1);
    }
}

TEST_CASE("bound regime") {
    const auto h = gg_hop(4, 2, 2, 10);
    for (const Protocol p : {Protocol{CsiAssisted{0}}, Protocol{FixedGain{}}, Protocol{DecodeForward{}}}) {
        const RelayLink link(h, h, p);
        const auto e = aber(link, Modulation::bpsk());
        CHECK(e.method == Method::bound);
        CHECK(e.value <= 0.5);
        CHECK(e.value >= aber_quadrature(link, Modulation::bpsk(), CdfSource::numeric));
    }
}

TEST_CASE("general regime is numeric") {
    const auto h = gg_hop(3.5, 1.5, 1.2, 10);
    const auto e = aber(RelayLink(h, h, DecodeForward{}), Modulation::bpsk());
    CHECK(e.method == Method::numeric);
    CHECK(e.value > 0.0);
    CHECK(e.value < 0.5);
    CHECK_THROWS_AS(aber_df(RelayLink(h, h, DecodeForward{}), Modulation::bpsk()), IntegerConditionError);
}
