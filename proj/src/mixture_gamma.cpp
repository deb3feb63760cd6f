// SPDX-License-Identifier: Apache-2.0
#include "fsorelay/mixture_gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fsorelay/error.hpp"

namespace fso {

MixtureGamma::MixtureGamma(std::vector<MixtureTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty() || terms_.size() > kMaxTerms)
        throw ParameterError("MixtureGamma: number of terms must lie in [1, 64], got " +
                             std::to_string(terms_.size()));
    double total = 0.0;
    probs_.reserve(terms_.size());
    for (const auto& t : terms_) {
        if (!(t.weight > 0.0 && t.shape > 0.0 && t.rate > 0.0) ||
            !std::isfinite(t.weight) || !std::isfinite(t.shape) || !std::isfinite(t.rate))
            throw ParameterError("MixtureGamma: weights, shapes and rates must be positive and finite");
        const double p = std::exp(std::log(t.weight) + specfun::log_gamma(t.shape) - t.shape * std::log(t.rate));
        probs_.push_back(p);
        total += p;
    }
    if (std::abs(total - 1.0) > kNormTolerance)
        throw ParameterError("MixtureGamma: component probabilities sum to " + std::to_string(total) +
                             ", expected 1");
    cumulative_.reserve(probs_.size());
    double run = 0.0;
    for (double p : probs_) {
        run += p / total;
        cumulative_.push_back(run);
    }
    cumulative_.back() = 1.0;
}

double MixtureGamma::pdf(double x) const {
    if (x < 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& t : terms_) {
        if (x == 0.0) {
            if (t.shape < 1.0) return std::numeric_limits<double>::infinity();
            if (t.shape == 1.0) sum += t.weight;
            continue;
        }
        sum += std::exp(std::log(t.weight) + (t.shape - 1.0) * std::log(x) - t.rate * x);
    }
    return sum;
}

double MixtureGamma::mean() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < terms_.size(); ++i) sum += probs_[i] * terms_[i].shape / terms_[i].rate;
    return sum;
}

double MixtureGamma::sample(Rng& rng) const {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = uniform(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                                        static_cast<std::ptrdiff_t>(terms_.size()) - 1));
    std::gamma_distribution<double> gamma(terms_[idx].shape, 1.0 / terms_[idx].rate);
    return gamma(rng);
}

nlohmann::json MixtureGamma::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& t : terms_) rows.push_back({t.weight, t.shape, t.rate});
    return {{"terms", rows}};
}

MixtureGamma MixtureGamma::from_json(const nlohmann::json& j) {
    const nlohmann::json* rows = &j;
    if (j.is_object()) {
        if (!j.contains("terms")) throw ConfigError("mixture: missing \"terms\"");
        rows = &j.at("terms");
    }
    if (!rows->is_array()) throw ConfigError("mixture: \"terms\" must be an array of [a, b, c]");
    std::vector<MixtureTerm> terms;
    for (const auto& row : *rows) {
        if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() ||
            !row[2].is_number())
            throw ConfigError("mixture: each term must be a numeric triple [a, b, c]");
        terms.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
    }
    return MixtureGamma(std::move(terms));
}

GammaGammaParams::GammaGammaParams(double a, double b) : alpha(a), beta(b) {
    if (!(alpha > 0.0 && beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
        throw ParameterError("Gamma-Gamma: alpha and beta must be positive and finite");
}

double gamma_gamma_pdf(const GammaGammaParams& gg, double x) {
    if (!(x > 0.0)) return 0.0;
    const double ab = gg.alpha * gg.beta;
    const double half_sum = 0.5 * (gg.alpha + gg.beta);
    const double log_pdf = std::log(2.0) + half_sum * std::log(ab) - specfun::log_gamma(gg.alpha) -
                           specfun::log_gamma(gg.beta) + (half_sum - 1.0) * std::log(x) +
                           specfun::log_bessel_k(gg.alpha - gg.beta, 2.0 * std::sqrt(ab * x));
    return std::exp(log_pdf);
}

MixtureGamma fit_gamma_gamma(const GammaGammaParams& gg, int terms, const Accuracy& acc) {
    const double lo = std::min(gg.alpha, gg.beta);
    const double hi = std::max(gg.alpha, gg.beta);
    const double prod = lo * hi;
    const auto rule = specfun::gauss_laguerre(terms, acc);
    const double log_norm = lo * std::log(prod) - specfun::log_gamma(hi) - specfun::log_gamma(lo);
    std::vector<double> log_theta;
    std::vector<double> log_prob;
    for (const auto& q : rule) {
        const double lt = std::log(q.weight) + log_norm + (hi - lo - 1.0) * std::log(q.node);
        if (!std::isfinite(lt))
            throw ParameterError("fit_gamma_gamma: degenerate weight for alpha=" + std::to_string(gg.alpha) +
                                 ", beta=" + std::to_string(gg.beta) + ", L=" + std::to_string(terms));
        log_theta.push_back(lt);
        log_prob.push_back(lt + specfun::log_gamma(lo) - lo * std::log(prod / q.node));
    }
    const double peak = *std::max_element(log_prob.begin(), log_prob.end());
    double total = 0.0;
    for (double lp : log_prob) total += std::exp(lp - peak);
    const double log_total = peak + std::log(total);
    std::vector<MixtureTerm> out;
    out.reserve(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        // Nodes far from the mixing density's bulk underflow; keep them at a
        // negligible positive weight so the fit always has L terms.
        const double a = std::max(std::exp(log_theta[i] - log_total), std::numeric_limits<double>::min());
        out.push_back({a, lo, prod / rule[i].node});
    }
    return MixtureGamma(std::move(out));
}

double fit_max_relative_error(const MixtureGamma& mg, const GammaGammaParams& gg, double lo, double hi,
                              int points) {
    if (!(lo > 0.0 && hi > lo) || points < 2) throw DomainError("fit_max_relative_error: invalid grid");
    double worst = 0.0;
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double x = lo * std::exp(step * i);
        const double exact = gamma_gamma_pdf(gg, x);
        worst = std::max(worst, std::abs(mg.pdf(x) - exact) / exact);
    }
    return worst;
}

}  // namespace fso
