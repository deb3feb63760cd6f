// SPDX-License-Identifier: Apache-2.0
#include "fsorelay/aber.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "fsorelay/error.hpp"
#include "fsorelay/quadrature.hpp"
#include "logsum.hpp"

namespace fso {
namespace {

using detail::log_binomial;
using detail::log_factorial;
using detail::LogSum;

constexpr double kLog2 = 0.69314718055994530942;
const double kHalfLogPi = 0.5 * std::log(std::numbers::pi);

double log_tail_coeff(const GammaTerm& t, int r) {
    return t.log_weight + log_factorial(t.power - 1) - log_factorial(r) - (t.power - r) * std::log(t.rate);
}

// log(Q^P / Gamma(P))
double log_kernel_norm(const Modulation& mod) { return mod.p * std::log(mod.q) - specfun::log_gamma(mod.p); }

// K[T] for a single-hop tail T(z).
double kernel_of_tail(const SnrExpansion& e, const Modulation& mod) {
    const double norm = log_kernel_norm(mod) - kLog2;
    LogSum sum;
    for (const auto& t : e.terms())
        for (int r = 0; r < t.power; ++r)
            sum.add(norm + log_tail_coeff(t, r) + specfun::log_gamma(r + mod.p) -
                    (r + mod.p) * std::log(t.rate + mod.q));
    return sum.value();
}

double clamp_aber(double v) { return std::clamp(v, 0.0, 0.5); }

}  // namespace

Modulation::Modulation(double p_, double q_) : p(p_), q(q_) {
    if (!(p > 0.0 && q > 0.0) || !std::isfinite(p) || !std::isfinite(q))
        throw ParameterError("Modulation: P and Q must be positive and finite");
}

double conditional_ber(const Modulation& mod, double snr) {
    if (!(snr > 0.0)) return 0.5;
    const double z = mod.q * snr;
    if (mod.p == 0.5) return 0.5 * std::erfc(std::sqrt(z));
    if (mod.p == 1.0) return 0.5 * std::exp(-z);
    if (mod.p == std::nearbyint(mod.p) && mod.p <= 50.0) {
        // Gamma(n, z) / Gamma(n) = e^-z sum_{m<n} z^m / m!
        double term = 1.0;
        double sum = 1.0;
        for (int m = 1; m < static_cast<int>(mod.p); ++m) {
            term *= z / m;
            sum += term;
        }
        return 0.5 * std::exp(-z) * sum;
    }
    return 0.5 * specfun::upper_inc_gamma(mod.p, z) / specfun::gamma(mod.p);
}

double aber_from_cdf(const std::function<double(double)>& cdf, const Modulation& mod) {
    const double log_norm = log_kernel_norm(mod) - kLog2;
    auto integrand = [&](double z) {
        const double f = cdf(z);
        if (f == 0.0) return 0.0;
        return f * std::exp(log_norm + (mod.p - 1.0) * std::log(z) - mod.q * z);
    };
    quad::Options opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-10;
    const auto r = quad::integrate_half_line(integrand, std::max(mod.p, 0.5) / mod.q, opts);
    return quad::value_or_throw(r, "aber_quadrature");
}

double aber_quadrature(const RelayLink& link, const Modulation& mod, CdfSource source) {
    if (source == CdfSource::closed)
        return clamp_aber(aber_from_cdf([&](double z) { return cdf_closed(link, z); }, mod));
    return clamp_aber(aber_from_cdf([&](double z) { return cdf_numeric(link, z); }, mod));
}

double aber_csi(const RelayLink& link, const Modulation& mod) {
    const auto* csi = std::get_if<CsiAssisted>(&link.protocol());
    if (csi == nullptr) throw std::invalid_argument("aber_csi: link protocol is not CSI-assisted AF");
    if (csi->q != 0) throw std::invalid_argument("aber_csi: no closed form for q = 1");
    const SnrExpansion e1 = analytic_expansion(link.hop1());
    const SnrExpansion e2 = analytic_expansion(link.hop2());
    const double norm = log_kernel_norm(mod);
    LogSum sum;
    for (const auto& t1 : e1.terms()) {
        for (const auto& t2 : e2.terms()) {
            const double alpha = t1.rate + t2.rate + mod.q;
            const double beta = 2.0 * std::sqrt(t1.rate * t2.rate);
            const double arg = (alpha - beta) / (alpha + beta);
            const double log_sum_ab = std::log(alpha + beta);
            for (int r1 = 0; r1 < t1.power; ++r1) {
                const double c1 = log_tail_coeff(t1, r1) + (t1.power - r1) * std::log(t1.rate);
                const double mu = t2.power + r1 + mod.p;
                for (int s = 0; s <= r1; ++s) {
                    for (int p = 0; p < t2.power; ++p) {
                        const int nu = p - s + 1;
                        if (!(mu - nu > 0.0)) throw std::logic_error("aber_csi: non-positive Gamma argument");
                        const double f = specfun::gauss_2f1(mu + nu, nu + 0.5, mu + 0.5, arg);
                        if (!(f > 0.0)) continue;
                        sum.add(norm + log_binomial(r1, s) + log_binomial(t2.power - 1, p) + c1 + t2.log_weight +
                                (nu + r1 - t1.power) * std::log(t1.rate) + kHalfLogPi + nu * 2.0 * kLog2 +
                                specfun::log_gamma(mu + nu) + specfun::log_gamma(mu - nu) -
                                specfun::log_gamma(mu + 0.5) - (mu + nu) * log_sum_ab + std::log(f));
                    }
                }
            }
        }
    }
    const double cross = sum.value();
    if (e1.is_bound() || e2.is_bound())
        return clamp_aber(0.5 * e2.mass() + (e1.mass() - 1.0) * kernel_of_tail(e2, mod) - cross);
    return clamp_aber(0.5 - cross);
}

double aber_fixed(const RelayLink& link, const Modulation& mod) {
    if (!std::holds_alternative<FixedGain>(link.protocol()))
        throw std::invalid_argument("aber_fixed: link protocol is not fixed-gain AF");
    const SnrExpansion e1 = analytic_expansion(link.hop1());
    const SnrExpansion e2 = analytic_expansion(link.hop2());
    const double gain = link.gain();
    const double log_u = std::log(gain);
    const double norm = log_kernel_norm(mod) - kLog2;
    std::map<std::tuple<double, double, int, int>, double> whittaker_cache;
    LogSum sum;
    for (const auto& t1 : e1.terms()) {
        for (const auto& t2 : e2.terms()) {
            const double shifted = t1.rate + mod.q;
            const double y = t1.rate * t2.rate * gain / shifted;
            for (int r1 = 0; r1 < t1.power; ++r1) {
                const double c1 = log_tail_coeff(t1, r1) + (t1.power - r1) * std::log(t1.rate);
                for (int s = 0; s <= r1; ++s) {
                    const int nu = t2.power - s;
                    const double order = nu + 2.0 * r1 + 2.0 * mod.p - 1.0;
                    const auto key = std::make_tuple(t1.rate, t2.rate, r1, nu);
                    auto it = whittaker_cache.find(key);
                    if (it == whittaker_cache.end()) {
                        const double w = specfun::whittaker_w_scaled(-0.5 * order, 0.5 * nu, y);
                        it = whittaker_cache.emplace(key, w > 0.0 ? std::log(w) : -INFINITY).first;
                    }
                    sum.add(norm + log_binomial(r1, s) + c1 + t2.log_weight +
                            (0.5 * (nu - 1) + r1 - t1.power) * std::log(t1.rate) -
                            0.5 * (nu + 1) * std::log(t2.rate) + 0.5 * (t2.power + s - 1) * log_u +
                            specfun::log_gamma(nu + r1 + mod.p) + specfun::log_gamma(r1 + mod.p) -
                            0.5 * order * std::log(shifted) + it->second);
                }
            }
        }
    }
    return clamp_aber(0.5 * e1.mass() * e2.mass() - sum.value());
}

double aber_df(const RelayLink& link, const Modulation& mod) {
    if (!std::holds_alternative<DecodeForward>(link.protocol()))
        throw std::invalid_argument("aber_df: link protocol is not DF");
    const SnrExpansion e1 = analytic_expansion(link.hop1());
    const SnrExpansion e2 = analytic_expansion(link.hop2());
    if (e1.is_bound() || e2.is_bound()) {
        // The product form is only meaningful once each hop CDF is clipped to [0, 1].
        return aber_quadrature(link, mod, CdfSource::closed);
    }
    const double norm = log_kernel_norm(mod) - kLog2;
    LogSum sum;
    for (const auto& t1 : e1.terms()) {
        for (const auto& t2 : e2.terms()) {
            const double log_rate = std::log(t1.rate + t2.rate + mod.q);
            for (int r1 = 0; r1 < t1.power; ++r1) {
                const double c1 = log_tail_coeff(t1, r1);
                for (int r2 = 0; r2 < t2.power; ++r2) {
                    const double order = r1 + r2 + mod.p;
                    sum.add(norm + c1 + log_tail_coeff(t2, r2) + specfun::log_gamma(order) - order * log_rate);
                }
            }
        }
    }
    return clamp_aber(0.5 - sum.value());
}

Evaluation aber(const RelayLink& link, const Modulation& mod) {
    const bool bound = link.bound_regime();
    if (!link.has_closed_form()) return {aber_quadrature(link, mod, CdfSource::numeric), Method::numeric, bound};
    const Method closed = bound ? Method::bound : Method::closed;
    if (const auto* csi = std::get_if<CsiAssisted>(&link.protocol())) {
        if (csi->q == 1)
            return {aber_quadrature(link, mod, CdfSource::closed), bound ? Method::bound : Method::numeric, bound};
        return {aber_csi(link, mod), closed, bound};
    }
    if (std::holds_alternative<FixedGain>(link.protocol())) return {aber_fixed(link, mod), closed, bound};
    return {aber_df(link, mod), closed, bound};
}

}  // namespace fso
