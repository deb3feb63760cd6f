// SPDX-License-Identifier: Apache-2.0
//
// Average bit-error rate for the kernel Q^P / (2 Gamma(P)) z^(P-1) e^(-Q z).
#pragma once

#include <functional>

#include "fsorelay/relay.hpp"

namespace fso {

struct Modulation {
    double p;
    double q;

    Modulation(double p, double q);
    static Modulation bpsk() { return {0.5, 1.0}; }
};

/// Gamma(P, Q snr) / (2 Gamma(P)); 0.5 erfc(sqrt(snr)) for BPSK.
double conditional_ber(const Modulation& mod, double snr);

/// Q^P / (2 Gamma(P)) * int_0^inf z^(P-1) e^(-Q z) F(z) dz for a caller-supplied CDF.
double aber_from_cdf(const std::function<double(double)>& cdf, const Modulation& mod);

enum class CdfSource {
    closed,   // closed-form (or bound) CDF
    numeric,  // quadrature CDF
};

/// Adaptive quadrature of the ABER definition over the chosen CDF.
double aber_quadrature(const RelayLink& link, const Modulation& mod, CdfSource source);

/// Closed forms; bound-regime links get the bound-based value. CSI requires
/// q = 0. Throw IntegerConditionError when either hop lacks an expansion.
double aber_csi(const RelayLink& link, const Modulation& mod);
double aber_fixed(const RelayLink& link, const Modulation& mod);
double aber_df(const RelayLink& link, const Modulation& mod);

/// Closed form where one exists; CSI with q = 1 and general-regime links
/// fall back to quadrature (labelled numeric).
Evaluation aber(const RelayLink& link, const Modulation& mod);

}  // namespace fso
