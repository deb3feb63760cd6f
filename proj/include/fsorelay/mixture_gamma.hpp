// SPDX-License-Identifier: Apache-2.0
//
// Mixture-Gamma irradiance distributions and the Gauss-Laguerre fit of the
// Gamma-Gamma turbulence model.
#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "json.hpp"

#include "fsorelay/specfun.hpp"

namespace fso {

using Rng = std::mt19937_64;

/// One component a * x^(b-1) * exp(-c x).
struct MixtureTerm {
    double weight;  // a
    double shape;   // b
    double rate;    // c
};

/// Normalized finite mixture of Gamma densities, 1 <= L <= 64 terms.
class MixtureGamma {
  public:
    static constexpr std::size_t kMaxTerms = 64;
    static constexpr double kNormTolerance = 1e-9;

    /// Throws ParameterError on an empty or oversized term list, non-positive
    /// parameters, or a mixture that does not integrate to one.
    explicit MixtureGamma(std::vector<MixtureTerm> terms);

    [[nodiscard]] const std::vector<MixtureTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

    [[nodiscard]] double pdf(double x) const;
    [[nodiscard]] double mean() const;

    /// a_i Gamma(b_i) c_i^-b_i, summing to one.
    [[nodiscard]] const std::vector<double>& component_probabilities() const noexcept { return probs_; }

    [[nodiscard]] double sample(Rng& rng) const;

    [[nodiscard]] nlohmann::json to_json() const;
    static MixtureGamma from_json(const nlohmann::json& j);

  private:
    std::vector<MixtureTerm> terms_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

struct GammaGammaParams {
    double alpha;
    double beta;

    GammaGammaParams(double alpha, double beta);
};

/// Unit-mean Gamma-Gamma density.
double gamma_gamma_pdf(const GammaGammaParams& gg, double x);

/// L-point Gauss-Laguerre mixture for the unit-mean Gamma-Gamma model;
/// every term has shape min(alpha, beta).
MixtureGamma fit_gamma_gamma(const GammaGammaParams& gg, int terms, const Accuracy& acc = {});

/// max |mg(x) - gg(x)| / gg(x) over `points` log-spaced x in [lo, hi].
double fit_max_relative_error(const MixtureGamma& mg, const GammaGammaParams& gg, double lo = 0.05,
                              double hi = 5.0, int points = 400);

}  // namespace fso
