// SPDX-License-Identifier: Apache-2.0
//
// End-to-end SNR distribution of a dual-hop link for CSI-assisted AF,
// fixed-gain AF and DF relaying.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "fsorelay/hop.hpp"

namespace fso {

/// gamma1 gamma2 / (gamma1 + gamma2 + q), q in {0, 1}.
struct CsiAssisted {
    int q = 0;
};

/// gamma1 gamma2 / (gamma2 + U); U derived from hop 1 when not given.
struct FixedGain {
    std::optional<double> gain;
};

/// min(gamma1, gamma2).
struct DecodeForward {};

using Protocol = std::variant<CsiAssisted, FixedGain, DecodeForward>;

/// "csi0", "csi1", "fixed" or "df".
std::string protocol_name(const Protocol& p);
Protocol parse_protocol(std::string_view name);

/// How a reported value was obtained.
enum class Method {
    closed,   // finite-sum closed form
    bound,    // closed form built on the density upper bound
    numeric,  // quadrature
};

const char* to_string(Method m);

struct Evaluation {
    double value;
    Method method;
    bool bound_regime;
};

class RelayLink {
  public:
    /// Validates q and an explicit gain; resolves an automatic fixed gain
    /// (closed form for an exact-regime hop 1, quadrature otherwise).
    RelayLink(HopChannel hop1, HopChannel hop2, Protocol protocol, const Accuracy& acc = {});

    [[nodiscard]] const HopChannel& hop1() const noexcept { return hop1_; }
    [[nodiscard]] const HopChannel& hop2() const noexcept { return hop2_; }
    [[nodiscard]] const Protocol& protocol() const noexcept { return protocol_; }

    /// Resolved fixed gain U; throws std::logic_error for other protocols.
    [[nodiscard]] double gain() const;

    /// Either hop has components with b_i <= xi^2.
    [[nodiscard]] bool bound_regime() const;
    /// Both hops admit finite-sum expansions (exact or bound).
    [[nodiscard]] bool has_closed_form() const;

  private:
    HopChannel hop1_;
    HopChannel hop2_;
    Protocol protocol_;
    double gain_ = 0.0;
};

/// U = 1 / E[1/(1 + gamma1)] from the finite-sum density; exact regime only.
double fixed_gain(const HopChannel& hop1);
/// The same expectation by quadrature of the exact density.
double fixed_gain_numeric(const HopChannel& hop1, const Accuracy& acc = {});

/// Closed-form CDFs. In the bound regime they return the upper bound built
/// from the bounded densities. Throw IntegerConditionError when either hop
/// has no finite-sum expansion, std::invalid_argument on a protocol mismatch.
double cdf_csi(const RelayLink& link, double x);
double cdf_fixed(const RelayLink& link, double x);
double cdf_df(const RelayLink& link, double x);

/// Dispatches to the closed form matching the link's protocol.
double cdf_closed(const RelayLink& link, double x);

/// Reference CDF by quadrature of the exact real-parameter hop statistics.
double cdf_numeric(const RelayLink& link, double x, const Accuracy& acc = {});

/// Closed form where available, numeric otherwise.
Evaluation cdf(const RelayLink& link, double x);
Evaluation outage(const RelayLink& link, double gamma_th);

}  // namespace fso
