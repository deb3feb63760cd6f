// SPDX-License-Identifier: Apache-2.0
//
// Batch scenarios: JSON parsing, grid sweeps, oracle cross-checks and CSV
// rendering for the command-line front-end.
#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsorelay/aber.hpp"
#include "fsorelay/error.hpp"
#include "fsorelay/mcsim.hpp"
#include "fsorelay/relay.hpp"

namespace fso {

/// A numerical failure tied to one grid point.
class PointError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Hop description independent of the swept average SNR.
struct HopSpec {
    MixtureGamma mixture;
    std::optional<GammaGammaParams> gamma_gamma;  // set when the mixture is a fit
    Pointing pointing;
    double gamma_bar_offset_db = 0.0;

    /// {"alpha", "beta", "L"} or {"mg"}, plus "xi_sq" (default 1), "A0" or
    /// "r_over_wz" (default 0.1) and "gamma_bar_offset_db" (default 0).
    static HopSpec from_json(const nlohmann::json& j);
    [[nodiscard]] HopChannel at(double gamma_bar_db) const;
};

struct SweepRange {
    double start_db;
    double stop_db;
    double step_db;

    /// start, start + step, ... up to stop (inclusive, with 1e-9 dB slack).
    [[nodiscard]] std::vector<double> points() const;
};

enum class McFading {
    mixture,      // sample the hop's own mixture
    gamma_gamma,  // sample the underlying Gamma-Gamma law where known
};

struct Scenario {
    std::array<HopSpec, 2> hops;
    std::vector<Protocol> protocols;
    Modulation modulation = Modulation::bpsk();
    double gamma_th_db = 0.0;
    std::vector<double> grid_db;
    std::optional<McConfig> mc;
    McFading mc_fading = McFading::mixture;

    /// Throws ConfigError for malformed documents or violated invariants.
    static Scenario from_json(const nlohmann::json& j);
    static Scenario load(const std::string& path);

    [[nodiscard]] std::array<HopChannel, 2> hops_at(double gamma_bar_db) const;
    [[nodiscard]] RelayLink link_at(double gamma_bar_db, const Protocol& protocol) const;
    /// McConfig for the scenario with fading sources resolved per hop.
    [[nodiscard]] McConfig mc_config() const;
};

struct SweepRow {
    double gamma_bar_db;
    std::string protocol;
    Evaluation outage;
    Evaluation aber;
};

struct VerifyRow {
    double gamma_bar_db;
    std::string protocol;
    std::string metric;  // "outage" or "aber"
    Method method;
    double closed_form;
    double quadrature;
    Estimate mc;
    bool bound_regime;
    bool pass;
};

/// Grid points are evaluated concurrently on up to `workers` threads
/// (0 = hardware concurrency); rows come back in grid-then-protocol order.
std::vector<SweepRow> run_sweep(const Scenario& s, unsigned workers = 0);
std::vector<VerifyRow> run_verify(const Scenario& s, unsigned workers = 0);

/// Non-bound rows pass when the closed form lies in the MC interval and
/// within `quad_tol` of the quadrature; bound rows when MC <= closed form.
bool verify_pass(Method method, bool bound_regime, double closed, double quadrature, const Estimate& mc,
                 double quad_tol = 1e-6);

/// Locale-independent shortest round-trip formatting in scientific notation.
std::string format_double(double v);

/// Runs fn, rethrowing any failure other than ConfigError as PointError
/// naming the grid point and protocol.
template <class Fn>
auto at_point(double gamma_bar_db, const std::string& protocol, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw PointError("gamma_bar_db=" + format_double(gamma_bar_db) + " protocol=" + protocol + ": " +
                         e.what());
    }
}

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string verify_csv(const std::vector<VerifyRow>& rows);

}  // namespace fso
