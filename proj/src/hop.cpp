// SPDX-License-Identifier: Apache-2.0
#include "fsorelay/hop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fsorelay/error.hpp"

namespace fso {
namespace {

bool is_integer(double v) { return std::abs(v - std::nearbyint(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

int as_int(double v) { return static_cast<int>(std::nearbyint(v)); }

enum class TermKind { exact, bound, general };

TermKind classify(const MixtureTerm& t, double xi_sq) {
    if (t.shape - xi_sq > 1e-9) {
        return is_integer(t.shape) && is_integer(xi_sq) ? TermKind::exact : TermKind::general;
    }
    return is_integer(t.shape) && as_int(t.shape) >= 2 ? TermKind::bound : TermKind::general;
}

// log of the per-term mass w (n-1)! / rate^n
double log_term_mass(const GammaTerm& t) {
    return t.log_weight + specfun::log_gamma(t.power) - t.power * std::log(t.rate);
}

// Regularized lower incomplete gamma P(n, y), integer n >= 1.
double regularized_lower(int n, double y) {
    if (y <= 0.0) return 0.0;
    if (y < n + 1.0) return specfun::lower_inc_gamma(n, y) / std::tgamma(static_cast<double>(n));
    double term = 1.0;
    double sum = 1.0;
    for (int r = 1; r < n; ++r) {
        term *= y / r;
        sum += term;
    }
    return 1.0 - std::exp(-y) * sum;
}

// Regularized upper incomplete gamma Q(n, y), integer n >= 1, by the finite sum.
double regularized_upper(int n, double y) {
    if (y <= 0.0) return 1.0;
    if (y < 0.5) return 1.0 - regularized_lower(n, y);
    double term = 1.0;
    double sum = 1.0;
    for (int r = 1; r < n; ++r) {
        term *= y / r;
        sum += term;
    }
    return std::exp(-y + std::log(sum));
}

void require_exact(const HopChannel& hop, const char* fn) {
    if (hop.regime() != HopRegime::exact)
        throw IntegerConditionError(std::string(fn) +
                                    ": requires integer xi^2 and integer shapes b_i > xi^2");
}

}  // namespace

double pointing_loss(double r, double w_z) {
    if (!(r > 0.0 && w_z > 0.0)) throw DomainError("pointing_loss: r and w_z must be positive");
    const double v = std::erf(std::sqrt(std::numbers::pi) * r / (std::numbers::sqrt2 * w_z));
    return v * v;
}

Pointing::Pointing(double xi, double a) : xi_sq(xi), a0(a) {
    if (!(xi_sq > 0.0) || !std::isfinite(xi_sq)) throw ParameterError("Pointing: xi_sq must be positive");
    if (!(a0 > 0.0 && a0 <= 1.0)) throw ParameterError("Pointing: A0 must lie in (0, 1]");
}

Pointing Pointing::from_aperture(double xi_sq, double r, double w_z) {
    return Pointing(xi_sq, pointing_loss(r, w_z));
}

const char* to_string(HopRegime r) {
    switch (r) {
        case HopRegime::exact: return "exact";
        case HopRegime::bound: return "bound";
        case HopRegime::general: return "general";
    }
    return "?";
}

HopChannel::HopChannel(MixtureGamma mg, Pointing pointing, double gamma_bar)
    : mg_(std::move(mg)), pointing_(pointing), gamma_bar_(gamma_bar) {
    if (!(gamma_bar_ > 0.0) || !std::isfinite(gamma_bar_))
        throw ParameterError("HopChannel: gamma_bar must be positive and finite");
}

HopChannel HopChannel::from_budget(MixtureGamma mg, Pointing pointing, const TransmitBudget& budget) {
    if (!(budget.power > 0.0 && budget.eta > 0.0 && budget.noise > 0.0))
        throw ParameterError("TransmitBudget: power, eta and noise must be positive");
    const double mean = pointing.xi_sq * pointing.a0 / (1.0 + pointing.xi_sq) * mg.mean();
    const double gamma_bar = budget.power * budget.eta * mean / budget.noise;
    return HopChannel(std::move(mg), pointing, gamma_bar);
}

double HopChannel::mean_irradiance() const {
    return pointing_.xi_sq * pointing_.a0 / (1.0 + pointing_.xi_sq) * mg_.mean();
}

double HopChannel::snr_scale() const { return pointing_.a0 * gamma_bar_ / mean_irradiance(); }

HopChannel HopChannel::with_gamma_bar(double gamma_bar) const { return HopChannel(mg_, pointing_, gamma_bar); }

HopRegime HopChannel::regime() const {
    bool any_bound = false;
    for (const auto& t : mg_.terms()) {
        switch (classify(t, pointing_.xi_sq)) {
            case TermKind::general: return HopRegime::general;
            case TermKind::bound: any_bound = true; break;
            case TermKind::exact: break;
        }
    }
    return any_bound ? HopRegime::bound : HopRegime::exact;
}

nlohmann::json HopChannel::to_json() const {
    return {{"mg", mg_.to_json()},
            {"xi_sq", pointing_.xi_sq},
            {"A0", pointing_.a0},
            {"gamma_bar_db", linear_to_db(gamma_bar_)}};
}

HopChannel HopChannel::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("hop: expected an object");
    for (const char* key : {"mg", "xi_sq", "A0", "gamma_bar_db"})
        if (!j.contains(key)) throw ConfigError(std::string("hop: missing \"") + key + "\"");
    for (const char* key : {"xi_sq", "A0", "gamma_bar_db"})
        if (!j.at(key).is_number()) throw ConfigError(std::string("hop: \"") + key + "\" must be a number");
    return HopChannel(MixtureGamma::from_json(j.at("mg")),
                      Pointing(j.at("xi_sq").get<double>(), j.at("A0").get<double>()),
                      db_to_linear(j.at("gamma_bar_db").get<double>()));
}

SnrExpansion::SnrExpansion(std::vector<GammaTerm> terms, bool bound) : terms_(std::move(terms)), bound_(bound) {
    for (const auto& t : terms_)
        if (t.power < 1 || !(t.rate > 0.0) || !std::isfinite(t.log_weight))
            throw ParameterError("SnrExpansion: invalid term");
}

double SnrExpansion::mass() const {
    double sum = 0.0;
    for (const auto& t : terms_) sum += std::exp(log_term_mass(t));
    return sum;
}

double SnrExpansion::pdf(double x) const {
    if (x < 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& t : terms_) {
        if (x == 0.0) {
            if (t.power == 1) sum += std::exp(t.log_weight);
            continue;
        }
        sum += std::exp(t.log_weight + (t.power - 1) * std::log(x) - t.rate * x);
    }
    return sum;
}

double SnrExpansion::tail(double x) const {
    if (x <= 0.0) return mass();
    double sum = 0.0;
    for (const auto& t : terms_) sum += std::exp(log_term_mass(t)) * regularized_upper(t.power, t.rate * x);
    return sum;
}

double SnrExpansion::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& t : terms_) sum += std::exp(log_term_mass(t)) * regularized_lower(t.power, t.rate * x);
    return sum;
}

double SnrExpansion::inverse_shift_moment() const {
    // int_0^inf x^(n-1) e^(-rate x) / (1 + x) dx = (n-1)! e^rate Gamma(1-n, rate)
    double sum = 0.0;
    for (const auto& t : terms_) {
        const double g = specfun::upper_inc_gamma_scaled(1.0 - t.power, t.rate);
        sum += std::exp(t.log_weight + specfun::log_gamma(t.power)) * g;
    }
    return sum;
}

double expansion_coeff(const HopChannel& hop, std::size_t term, int k) {
    const auto& terms = hop.mixture().terms();
    if (term >= terms.size()) throw DomainError("expansion_coeff: term index out of range");
    const auto& t = terms[term];
    const double xi_sq = hop.pointing().xi_sq;
    if (classify(t, xi_sq) != TermKind::exact)
        throw IntegerConditionError("expansion_coeff: requires integer xi^2 and integer b_i > xi^2");
    const int excess = as_int(t.shape) - as_int(xi_sq);
    if (k < 0 || k >= excess) throw DomainError("expansion_coeff: k out of range");
    const double scale = hop.snr_scale();
    const double xs = std::nearbyint(xi_sq);
    return std::exp(std::log(t.weight) + (xs - std::nearbyint(t.shape) + k) * std::log(t.rate) + std::log(xs) +
                    specfun::log_gamma(excess) - specfun::log_gamma(k + 1.0) - (xs + k) * std::log(scale));
}

SnrExpansion reduced_expansion(const HopChannel& hop) {
    require_exact(hop, "reduced_expansion");
    return analytic_expansion(hop);
}

SnrExpansion analytic_expansion(const HopChannel& hop) {
    const HopRegime regime = hop.regime();
    if (regime == HopRegime::general)
        throw IntegerConditionError("analytic_expansion: no finite-sum form for these parameters");
    const double scale = hop.snr_scale();
    const double log_scale = std::log(scale);
    const double xi_sq = hop.pointing().xi_sq;
    std::vector<GammaTerm> out;
    for (std::size_t i = 0; i < hop.mixture().size(); ++i) {
        const auto& t = hop.mixture().terms()[i];
        const double rate = t.rate / scale;
        if (classify(t, xi_sq) == TermKind::exact) {
            const int excess = as_int(t.shape) - as_int(xi_sq);
            for (int k = 0; k < excess; ++k)
                out.push_back({std::log(expansion_coeff(hop, i, k)), as_int(xi_sq) + k, rate});
        } else {
            const double b = std::nearbyint(t.shape);
            out.push_back({std::log(t.weight) - std::log(t.rate) + std::log(xi_sq) + (1.0 - b) * log_scale,
                           as_int(b) - 1, rate});
        }
    }
    return SnrExpansion(std::move(out), regime == HopRegime::bound);
}

double snr_pdf(const HopChannel& hop, double x, const Accuracy& acc) {
    if (!(x > 0.0)) return 0.0;
    const double scale = hop.snr_scale();
    const double xi_sq = hop.pointing().xi_sq;
    double sum = 0.0;
    for (const auto& t : hop.mixture().terms()) {
        const double y = t.rate * x / scale;
        const double log_prefix = std::log(t.weight) + (xi_sq - t.shape) * std::log(t.rate) + std::log(xi_sq) +
                                  (xi_sq - 1.0) * std::log(x) - xi_sq * std::log(scale) - y;
        sum += std::exp(log_prefix) * specfun::upper_inc_gamma_scaled(t.shape - xi_sq, y, acc);
    }
    return sum;
}

double snr_pdf_reduced(const HopChannel& hop, double x) { return reduced_expansion(hop).pdf(x); }

double snr_pdf_bound(const HopChannel& hop, double x) {
    if (!(x > 0.0)) return 0.0;
    const double scale = hop.snr_scale();
    const double xi_sq = hop.pointing().xi_sq;
    double sum = 0.0;
    for (const auto& t : hop.mixture().terms())
        sum += std::exp(std::log(t.weight) - std::log(t.rate) + std::log(xi_sq) + (1.0 - t.shape) * std::log(scale) +
                        (t.shape - 2.0) * std::log(x) - t.rate * x / scale);
    return sum;
}

double snr_ccdf(const HopChannel& hop, double x) { return std::clamp(reduced_expansion(hop).tail(x), 0.0, 1.0); }

namespace {

// Per-component CDF and CCDF contributions, weighted by component probability.
struct Split {
    double cdf;
    double ccdf;
};

Split component_split(const MixtureTerm& t, double prob, double xi_sq, double y, const Accuracy& acc) {
    // F = p/Gamma(b) [gamma(b, y) + y^xi^2 Gamma(b - xi^2, y)]
    // 1 - F = p/Gamma(b) e^-y [Gamma_s(b, y) - y^xi^2 Gamma_s(b - xi^2, y)]
    const double lg_b = specfun::log_gamma(t.shape);
    const double pointing_part =
        std::exp(xi_sq * std::log(y) - y - lg_b) * specfun::upper_inc_gamma_scaled(t.shape - xi_sq, y, acc);
    const double lower = specfun::lower_inc_gamma(t.shape, y, acc) * std::exp(-lg_b);
    const double cdf = prob * (lower + pointing_part);
    if (cdf < 0.5 * prob) return {cdf, prob - cdf};
    const double upper = std::exp(-y - lg_b) * specfun::upper_inc_gamma_scaled(t.shape, y, acc);
    const double ccdf = prob * std::max(0.0, upper - pointing_part);
    return {prob - ccdf, ccdf};
}

Split numeric_split(const HopChannel& hop, double x, const Accuracy& acc) {
    if (!(x > 0.0)) return {0.0, 1.0};
    const double scale = hop.snr_scale();
    const auto& probs = hop.mixture().component_probabilities();
    Split total{0.0, 0.0};
    for (std::size_t i = 0; i < hop.mixture().size(); ++i) {
        const auto& t = hop.mixture().terms()[i];
        const Split s = component_split(t, probs[i], hop.pointing().xi_sq, t.rate * x / scale, acc);
        total.cdf += s.cdf;
        total.ccdf += s.ccdf;
    }
    return total;
}

}  // namespace

double snr_cdf_numeric(const HopChannel& hop, double x, const Accuracy& acc) {
    return std::clamp(numeric_split(hop, x, acc).cdf, 0.0, 1.0);
}

double snr_ccdf_numeric(const HopChannel& hop, double x, const Accuracy& acc) {
    return std::clamp(numeric_split(hop, x, acc).ccdf, 0.0, 1.0);
}

HopBracket integer_bracket(const HopChannel& hop) {
    const auto& probs = hop.mixture().component_probabilities();
    auto build = [&](auto round) {
        std::vector<MixtureTerm> terms;
        for (std::size_t i = 0; i < hop.mixture().size(); ++i) {
            const auto& t = hop.mixture().terms()[i];
            const double b = std::max(1.0, round(t.shape));
            terms.push_back({std::exp(std::log(probs[i]) + b * std::log(t.rate) - specfun::log_gamma(b)), b, t.rate});
        }
        const double xi_sq = std::max(1.0, round(hop.pointing().xi_sq));
        return HopChannel(MixtureGamma(std::move(terms)), Pointing(xi_sq, hop.pointing().a0), hop.gamma_bar());
    };
    return {build([](double v) { return std::floor(v + 1e-9); }), build([](double v) { return std::ceil(v - 1e-9); })};
}

}  // namespace fso
