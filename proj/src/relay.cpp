// SPDX-License-Identifier: Apache-2.0
#include "fsorelay/relay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fsorelay/error.hpp"
#include "fsorelay/quadrature.hpp"
#include "logsum.hpp"

namespace fso {
namespace {

using detail::log_binomial;
using detail::log_factorial;
using detail::LogSum;

constexpr double kLog2 = 0.69314718055994530942;

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

// log of w (n-1)! / (r! rate^(n-r)), the coefficient of x^r e^(-rate x) in the tail.
double log_tail_coeff(const GammaTerm& t, int r) {
    return t.log_weight + log_factorial(t.power - 1) - log_factorial(r) - (t.power - r) * std::log(t.rate);
}

// Integral of T1(x + D/y) f2(x + y) over y > 0, D = x^2 + q x.
double csi_cross_sum(const SnrExpansion& e1, const SnrExpansion& e2, double x, int q) {
    const double d = x * x + q * x;
    const double log_d = std::log(d);
    const double log_x = std::log(x);
    LogSum sum;
    for (const auto& t1 : e1.terms()) {
        for (const auto& t2 : e2.terms()) {
            const double z = 2.0 * std::sqrt(t1.rate * t2.rate * d);
            const auto log_k = specfun::log_bessel_k_orders(std::max(t1.power, t2.power), z);
            const double log_ratio = std::log(t1.rate) - std::log(t2.rate);
            const double log_exp = -(t1.rate + t2.rate) * x;
            for (int r1 = 0; r1 < t1.power; ++r1) {
                const double c1 = log_tail_coeff(t1, r1);
                for (int s = 0; s <= r1; ++s) {
                    for (int p = 0; p < t2.power; ++p) {
                        const int nu = p - s + 1;
                        sum.add(kLog2 + log_binomial(r1, s) + log_binomial(t2.power - 1, p) + c1 + t2.log_weight +
                                0.5 * nu * log_ratio + 0.5 * (p + s + 1) * log_d +
                                (t2.power + r1 - p - s - 1) * log_x + log_exp + log_k[std::abs(nu)]);
                    }
                }
            }
        }
    }
    return sum.value();
}

// Integral of T1(x + U x / y) f2(y) over y > 0.
double fixed_cross_sum(const SnrExpansion& e1, const SnrExpansion& e2, double x, double gain) {
    const double log_x = std::log(x);
    const double log_u = std::log(gain);
    LogSum sum;
    for (const auto& t1 : e1.terms()) {
        for (const auto& t2 : e2.terms()) {
            const double z = 2.0 * std::sqrt(t1.rate * t2.rate * gain * x);
            const auto log_k = specfun::log_bessel_k_orders(std::max(t1.power, t2.power), z);
            const double log_ratio = std::log(t1.rate) - std::log(t2.rate);
            for (int r1 = 0; r1 < t1.power; ++r1) {
                const double c1 = log_tail_coeff(t1, r1);
                for (int s = 0; s <= r1; ++s) {
                    const int nu = t2.power - s;
                    sum.add(kLog2 + log_binomial(r1, s) + c1 + t2.log_weight + 0.5 * nu * log_ratio +
                            0.5 * (t2.power + s) * log_u + (0.5 * nu + r1) * log_x - t1.rate * x +
                            log_k[std::abs(nu)]);
                }
            }
        }
    }
    return sum.value();
}

const CsiAssisted& expect_csi(const RelayLink& link) {
    const auto* p = std::get_if<CsiAssisted>(&link.protocol());
    if (p == nullptr) throw std::invalid_argument("cdf_csi: link protocol is not CSI-assisted AF");
    return *p;
}

quad::Options numeric_options() {
    quad::Options opts;
    opts.abs_tol = 1e-11;
    opts.rel_tol = 1e-10;
    return opts;
}

}  // namespace

std::string protocol_name(const Protocol& p) {
    return std::visit(Overloaded{[](const CsiAssisted& c) { return std::string(c.q == 0 ? "csi0" : "csi1"); },
                                 [](const FixedGain&) { return std::string("fixed"); },
                                 [](const DecodeForward&) { return std::string("df"); }},
                      p);
}

Protocol parse_protocol(std::string_view name) {
    if (name == "csi0") return CsiAssisted{0};
    if (name == "csi1") return CsiAssisted{1};
    if (name == "fixed") return FixedGain{};
    if (name == "df") return DecodeForward{};
    throw ConfigError("unknown protocol \"" + std::string(name) + "\" (expected csi0, csi1, fixed or df)");
}

const char* to_string(Method m) {
    switch (m) {
        case Method::closed: return "closed";
        case Method::bound: return "bound";
        case Method::numeric: return "numeric";
    }
    return "?";
}

RelayLink::RelayLink(HopChannel hop1, HopChannel hop2, Protocol protocol, const Accuracy& acc)
    : hop1_(std::move(hop1)), hop2_(std::move(hop2)), protocol_(std::move(protocol)) {
    if (const auto* csi = std::get_if<CsiAssisted>(&protocol_)) {
        if (csi->q != 0 && csi->q != 1) throw ParameterError("CSI-assisted AF: q must be 0 or 1");
    } else if (const auto* fixed = std::get_if<FixedGain>(&protocol_)) {
        if (fixed->gain) {
            if (!(*fixed->gain > 0.0) || !std::isfinite(*fixed->gain))
                throw ParameterError("fixed-gain AF: U must be positive and finite");
            gain_ = *fixed->gain;
        } else {
            gain_ = hop1_.regime() == HopRegime::exact ? fixed_gain(hop1_) : fixed_gain_numeric(hop1_, acc);
        }
    }
}

double RelayLink::gain() const {
    if (!std::holds_alternative<FixedGain>(protocol_)) throw std::logic_error("RelayLink::gain: not a fixed-gain link");
    return gain_;
}

bool RelayLink::bound_regime() const {
    return hop1_.regime() == HopRegime::bound || hop2_.regime() == HopRegime::bound;
}

bool RelayLink::has_closed_form() const {
    return hop1_.regime() != HopRegime::general && hop2_.regime() != HopRegime::general;
}

double fixed_gain(const HopChannel& hop1) { return 1.0 / reduced_expansion(hop1).inverse_shift_moment(); }

double fixed_gain_numeric(const HopChannel& hop1, const Accuracy& acc) {
    const auto r = quad::integrate_half_line(
        [&](double x) { return snr_pdf(hop1, x, acc) / (1.0 + x); }, hop1.gamma_bar(), numeric_options());
    return 1.0 / quad::value_or_throw(r, "fixed_gain_numeric");
}

double cdf_csi(const RelayLink& link, double x) {
    const int q = expect_csi(link).q;
    if (!(x > 0.0)) return 0.0;
    const SnrExpansion e1 = analytic_expansion(link.hop1());
    const SnrExpansion e2 = analytic_expansion(link.hop2());
    const double cross = csi_cross_sum(e1, e2, x, q);
    double f = 0.0;
    if (e1.is_bound() || e2.is_bound()) {
        // F2(x) + int_x^inf f2(y) F1(h(y)) dy with F1 = M1 - T1
        f = e2.cdf(x) + e1.mass() * e2.tail(x) - cross;
    } else {
        f = 1.0 - cross;
    }
    return std::clamp(f, 0.0, 1.0);
}

double cdf_fixed(const RelayLink& link, double x) {
    if (!std::holds_alternative<FixedGain>(link.protocol()))
        throw std::invalid_argument("cdf_fixed: link protocol is not fixed-gain AF");
    if (!(x > 0.0)) return 0.0;
    const SnrExpansion e1 = analytic_expansion(link.hop1());
    const SnrExpansion e2 = analytic_expansion(link.hop2());
    const double cross = fixed_cross_sum(e1, e2, x, link.gain());
    return std::clamp(e1.mass() * e2.mass() - cross, 0.0, 1.0);
}

double cdf_df(const RelayLink& link, double x) {
    if (!std::holds_alternative<DecodeForward>(link.protocol()))
        throw std::invalid_argument("cdf_df: link protocol is not DF");
    if (!(x > 0.0)) return 0.0;
    const SnrExpansion e1 = analytic_expansion(link.hop1());
    const SnrExpansion e2 = analytic_expansion(link.hop2());
    const double f1 = std::clamp(e1.cdf(x), 0.0, 1.0);
    const double f2 = std::clamp(e2.cdf(x), 0.0, 1.0);
    return std::clamp(f1 + f2 - f1 * f2, 0.0, 1.0);
}

double cdf_closed(const RelayLink& link, double x) {
    return std::visit(Overloaded{[&](const CsiAssisted&) { return cdf_csi(link, x); },
                                 [&](const FixedGain&) { return cdf_fixed(link, x); },
                                 [&](const DecodeForward&) { return cdf_df(link, x); }},
                      link.protocol());
}

double cdf_numeric(const RelayLink& link, double x, const Accuracy& acc) {
    if (!(x > 0.0)) return 0.0;
    const HopChannel& h1 = link.hop1();
    const HopChannel& h2 = link.hop2();
    auto f1 = [&](double z) { return snr_cdf_numeric(h1, z, acc); };
    double value = 0.0;
    if (const auto* csi = std::get_if<CsiAssisted>(&link.protocol())) {
        const double d = x * x + csi->q * x;
        const auto r = quad::integrate_half_line(
            [&](double y) { return f1(x + d / y) * snr_pdf(h2, x + y, acc); }, h2.gamma_bar(), numeric_options());
        value = snr_cdf_numeric(h2, x, acc) + quad::value_or_throw(r, "cdf_numeric");
    } else if (std::holds_alternative<FixedGain>(link.protocol())) {
        const double ux = link.gain() * x;
        const auto r = quad::integrate_half_line([&](double y) { return f1(x + ux / y) * snr_pdf(h2, y, acc); },
                                                 h2.gamma_bar(), numeric_options());
        value = quad::value_or_throw(r, "cdf_numeric");
    } else {
        const double a = f1(x);
        const double b = snr_cdf_numeric(h2, x, acc);
        value = a + b - a * b;
    }
    return std::clamp(value, 0.0, 1.0);
}

Evaluation cdf(const RelayLink& link, double x) {
    const bool bound = link.bound_regime();
    if (link.has_closed_form()) return {cdf_closed(link, x), bound ? Method::bound : Method::closed, bound};
    return {cdf_numeric(link, x), Method::numeric, bound};
}

Evaluation outage(const RelayLink& link, double gamma_th) {
    if (!(gamma_th > 0.0) || !std::isfinite(gamma_th)) throw DomainError("outage: threshold must be positive");
    return cdf(link, gamma_th);
}

}  // namespace fso
