// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo oracle for hop and end-to-end SNR statistics.
#pragma once

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "fsorelay/aber.hpp"
#include "fsorelay/mixture_gamma.hpp"
#include "fsorelay/relay.hpp"

namespace fso {

/// Draw I_a from the hop's own mixture.
struct MixtureSource {};
/// Draw I_a as a product of unit-mean Gamma(alpha) and Gamma(beta) variates.
struct GammaGammaSource {
    GammaGammaParams params;
};

using FadingSource = std::variant<MixtureSource, GammaGammaSource>;

struct McConfig {
    static constexpr std::uint64_t kMinSamples = 10'000;

    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    int streams = 1;
    std::array<FadingSource, 2> fading{};

    /// Throws ConfigError when samples < 10^4 or streams < 1.
    void validate() const;
};

struct Estimate {
    double value = 0.0;
    double std_err = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool degenerate = false;  // all-or-nothing outcome; CI from the rule of three
    std::uint64_t samples = 0;
};

struct LinkEstimate {
    Estimate outage;
    Estimate aber;
};

/// I_p = A0 u^(1/xi^2), u uniform on (0, 1].
double sample_pointing(const Pointing& pointing, Rng& rng);
double sample_gamma_gamma(const GammaGammaParams& gg, Rng& rng);
/// gamma_bar * I_a * I_p / mean_irradiance(hop).
double sample_snr(const HopChannel& hop, const FadingSource& source, Rng& rng);

Estimate estimate_outage(const RelayLink& link, double gamma_th, const McConfig& cfg);
Estimate estimate_aber(const RelayLink& link, const Modulation& mod, const McConfig& cfg);

/// Outage and ABER of several protocols over one set of hop samples. All
/// links must share the hops of links.front(); results are independent of
/// cfg.streams.
std::vector<LinkEstimate> estimate_links(const std::vector<RelayLink>& links, double gamma_th,
                                         const Modulation& mod, const McConfig& cfg);

}  // namespace fso
