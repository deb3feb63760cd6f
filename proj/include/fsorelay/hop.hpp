// SPDX-License-Identifier: Apache-2.0
//
// Single-hop SNR statistics under Mixture-Gamma turbulence and zero-boresight
// pointing errors.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fsorelay/mixture_gamma.hpp"
#include "fsorelay/specfun.hpp"

namespace fso {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

/// A0 = erf(sqrt(pi) r / (sqrt(2) w_z))^2 for aperture radius r and beam waist w_z.
double pointing_loss(double r, double w_z);

struct Pointing {
    double xi_sq;  // squared jitter ratio
    double a0;     // collected fraction at perfect alignment

    Pointing(double xi_sq, double a0);
    static Pointing from_aperture(double xi_sq, double r, double w_z);
};

/// Transmit power, electrical-to-optical conversion and noise power.
struct TransmitBudget {
    double power;
    double eta;
    double noise;
};

/// Which closed forms apply to a hop.
enum class HopRegime {
    exact,    // xi^2 and every shape b_i integer, b_i > xi^2
    bound,    // some b_i <= xi^2 (integer b_i >= 2); closed forms give upper bounds
    general,  // only the numerical path applies
};

const char* to_string(HopRegime r);

class HopChannel {
  public:
    /// `gamma_bar` is the linear average SNR. Throws ParameterError if not positive.
    HopChannel(MixtureGamma mg, Pointing pointing, double gamma_bar);

    /// Average SNR P * eta * mean_irradiance / N0.
    static HopChannel from_budget(MixtureGamma mg, Pointing pointing, const TransmitBudget& budget);

    [[nodiscard]] const MixtureGamma& mixture() const noexcept { return mg_; }
    [[nodiscard]] const Pointing& pointing() const noexcept { return pointing_; }
    [[nodiscard]] double gamma_bar() const noexcept { return gamma_bar_; }

    /// E[I_a I_p] = xi^2 A0 / (1 + xi^2) * E[I_a].
    [[nodiscard]] double mean_irradiance() const;

    /// SNR per unit of I_a I_p / A0: gamma = snr_scale() * (I_a I_p / A0).
    /// Equal to A0 * gamma_bar / mean_irradiance(), so that E[gamma] = gamma_bar.
    [[nodiscard]] double snr_scale() const;

    [[nodiscard]] HopChannel with_gamma_bar(double gamma_bar) const;
    [[nodiscard]] HopRegime regime() const;

    /// {"mg": {"terms": ...}, "xi_sq": ..., "A0": ..., "gamma_bar_db": ...}
    [[nodiscard]] nlohmann::json to_json() const;
    static HopChannel from_json(const nlohmann::json& j);

  private:
    MixtureGamma mg_;
    Pointing pointing_;
    double gamma_bar_;
};

/// weight * x^(power-1) * exp(-rate x), stored with its log-weight.
struct GammaTerm {
    double log_weight;
    int power;
    double rate;
};

/// Finite sum of GammaTerms representing a hop SNR density (exact) or the
/// density bound (bound regime; total mass then exceeds one).
class SnrExpansion {
  public:
    SnrExpansion(std::vector<GammaTerm> terms, bool bound);

    [[nodiscard]] const std::vector<GammaTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_bound() const noexcept { return bound_; }

    [[nodiscard]] double mass() const;
    [[nodiscard]] double pdf(double x) const;
    /// Integral of the density over [x, inf).
    [[nodiscard]] double tail(double x) const;
    /// Integral of the density over [0, x].
    [[nodiscard]] double cdf(double x) const;
    /// Integral of the density times 1/(1+x) over (0, inf).
    [[nodiscard]] double inverse_shift_moment() const;

  private:
    std::vector<GammaTerm> terms_;
    bool bound_;
};

/// Coefficient of x^(xi^2+k-1) exp(-c_i x / scale) in the reduced density.
/// Throws IntegerConditionError unless xi^2 is a positive integer and
/// b_i - xi^2 a positive integer with 0 <= k < b_i - xi^2.
double expansion_coeff(const HopChannel& hop, std::size_t term, int k);

/// Exact SNR density for arbitrary real parameters (incomplete-gamma form).
double snr_pdf(const HopChannel& hop, double x, const Accuracy& acc = {});

/// Finite-sum density; requires HopRegime::exact.
double snr_pdf_reduced(const HopChannel& hop, double x);

/// Upper bound of the density for components with b_i <= xi^2.
double snr_pdf_bound(const HopChannel& hop, double x);

/// Finite-sum CCDF; requires HopRegime::exact.
double snr_ccdf(const HopChannel& hop, double x);

/// CDF and CCDF for arbitrary real parameters, via incomplete gammas.
double snr_cdf_numeric(const HopChannel& hop, double x, const Accuracy& acc = {});
double snr_ccdf_numeric(const HopChannel& hop, double x, const Accuracy& acc = {});

/// Exact finite-sum expansion; requires HopRegime::exact.
SnrExpansion reduced_expansion(const HopChannel& hop);

/// Exact expansion, or the bound expansion when some component has
/// b_i <= xi^2. Throws IntegerConditionError in HopRegime::general.
SnrExpansion analytic_expansion(const HopChannel& hop);

/// Nearest integer-parameter hops: shapes and xi^2 rounded down (floor,
/// xi^2 at least 1) and up (ceil). Component probabilities, pointing loss
/// and gamma_bar are kept.
struct HopBracket {
    HopChannel lower;
    HopChannel upper;
};
HopBracket integer_bracket(const HopChannel& hop);

}  // namespace fso
