// SPDX-License-Identifier: Apache-2.0
#include "fsorelay/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "fsorelay/error.hpp"

namespace fso {
namespace {

using nlohmann::json;

constexpr double kDefaultApertureRatio = 0.1;
constexpr int kDefaultFitTerms = 10;

double number(const json& j, const char* key, const char* where) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string(where) + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const char* where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
    for (const auto& [key, _] : j.items())
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError(std::string(where) + ": unknown key \"" + key + "\"");
}

std::uint64_t count(const json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float() && v.get<double>() >= 0.0 && v.get<double>() == std::floor(v.get<double>()) &&
        v.get<double>() < 1.8e19)
        return static_cast<std::uint64_t>(v.get<double>());
    throw ConfigError(std::string("mc: \"") + key + "\" must be a non-negative integer");
}

// Runs body(i) for i in [0, n) on a small thread pool. The exception of the
// lowest failing index is rethrown so errors are reported deterministically.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_at = n;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

Method combine(Method a, Method b) {
    if (a == Method::numeric || b == Method::numeric) return Method::numeric;
    if (a == Method::bound || b == Method::bound) return Method::bound;
    return Method::closed;
}

}  // namespace

HopSpec HopSpec::from_json(const json& j) {
    constexpr const char* where = "hop";
    if (!j.is_object()) throw ConfigError("hop: expected an object");
    reject_unknown(j, {"alpha", "beta", "L", "mg", "xi_sq", "A0", "r_over_wz", "gamma_bar_offset_db"}, where);
    try {
        const bool has_gg = j.contains("alpha") || j.contains("beta");
        if (has_gg == j.contains("mg"))
            throw ConfigError("hop: give either \"alpha\"/\"beta\" or \"mg\"");
        if (j.contains("A0") && j.contains("r_over_wz"))
            throw ConfigError("hop: give at most one of \"A0\" and \"r_over_wz\"");
        const double xi_sq = number_or(j, "xi_sq", 1.0, where);
        const Pointing pointing = j.contains("A0")
                                      ? Pointing(xi_sq, number(j, "A0", where))
                                      : Pointing::from_aperture(
                                            xi_sq, number_or(j, "r_over_wz", kDefaultApertureRatio, where), 1.0);
        const double offset = number_or(j, "gamma_bar_offset_db", 0.0, where);
        if (has_gg) {
            if (!j.contains("alpha") || !j.contains("beta"))
                throw ConfigError("hop: both \"alpha\" and \"beta\" are required");
            const GammaGammaParams gg(number(j, "alpha", where), number(j, "beta", where));
            const double terms = number_or(j, "L", kDefaultFitTerms, where);
            if (terms != std::floor(terms) || terms < 1 || terms > 64)
                throw ConfigError("hop: \"L\" must be an integer in [1, 64]");
            return HopSpec{fit_gamma_gamma(gg, static_cast<int>(terms)), gg, pointing, offset};
        }
        if (j.contains("L")) throw ConfigError("hop: \"L\" only applies to a Gamma-Gamma fit");
        return HopSpec{MixtureGamma::from_json(j.at("mg")), std::nullopt, pointing, offset};
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("hop: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("hop: ") + e.what());
    }
}

HopChannel HopSpec::at(double gamma_bar_db) const {
    return HopChannel(mixture, pointing, db_to_linear(gamma_bar_db + gamma_bar_offset_db));
}

std::vector<double> SweepRange::points() const {
    if (!std::isfinite(start_db) || !std::isfinite(stop_db) || !std::isfinite(step_db))
        throw ConfigError("sweep: bounds must be finite");
    if (!(step_db > 0.0)) throw ConfigError("sweep: step must be positive");
    if (stop_db < start_db) throw ConfigError("sweep: empty range (stop < start)");
    const double span = (stop_db - start_db) / step_db;
    if (span > 1e6) throw ConfigError("sweep: too many grid points");
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start_db + static_cast<double>(i) * step_db;
    return out;
}

Scenario Scenario::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
    reject_unknown(j, {"schema", "hops", "protocols", "modulation", "gamma_th_db", "sweep", "mc"}, "scenario");
    if (!j.contains("schema") || !j.at("schema").is_number_integer() || j.at("schema").get<int>() != 1)
        throw ConfigError("scenario: \"schema\" must be 1");

    if (!j.contains("hops")) throw ConfigError("scenario: missing \"hops\"");
    const auto& hops = j.at("hops");
    auto parse_hops = [&]() -> std::array<HopSpec, 2> {
        if (!hops.is_array()) {
            const auto shared = HopSpec::from_json(hops);
            return {shared, shared};
        }
        if (hops.size() != 2) throw ConfigError("scenario: \"hops\" array must have exactly two entries");
        return {HopSpec::from_json(hops[0]), HopSpec::from_json(hops[1])};
    };
    Scenario s{.hops = parse_hops(), .protocols = {}, .grid_db = {}, .mc = std::nullopt};

    if (j.contains("protocols")) {
        const auto& list = j.at("protocols");
        if (!list.is_array()) throw ConfigError("scenario: \"protocols\" must be an array");
        for (const auto& name : list) {
            if (!name.is_string()) throw ConfigError("scenario: protocol names must be strings");
            s.protocols.push_back(parse_protocol(name.get<std::string>()));
        }
    } else {
        s.protocols = {CsiAssisted{0}, CsiAssisted{1}, FixedGain{}, DecodeForward{}};
    }
    if (s.protocols.empty()) throw ConfigError("scenario: at least one protocol is required");

    if (j.contains("modulation")) {
        const auto& m = j.at("modulation");
        if (!m.is_object()) throw ConfigError("modulation: expected {\"P\": ..., \"Q\": ...}");
        reject_unknown(m, {"P", "Q"}, "modulation");
        try {
            s.modulation = Modulation(number(m, "P", "modulation"), number(m, "Q", "modulation"));
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("modulation: ") + e.what());
        } catch (const json::out_of_range&) {
            throw ConfigError("modulation: both \"P\" and \"Q\" are required");
        }
    }
    s.gamma_th_db = number_or(j, "gamma_th_db", 0.0, "scenario");
    if (!std::isfinite(s.gamma_th_db)) throw ConfigError("scenario: \"gamma_th_db\" must be finite");

    if (!j.contains("sweep")) throw ConfigError("scenario: missing \"sweep\"");
    const auto& sw = j.at("sweep");
    if (!sw.is_object()) throw ConfigError("sweep: expected an object");
    reject_unknown(sw, {"start_db", "stop_db", "step_db"}, "sweep");
    for (const char* key : {"start_db", "stop_db"})
        if (!sw.contains(key)) throw ConfigError(std::string("sweep: missing \"") + key + "\"");
    const double start = number(sw, "start_db", "sweep");
    const double stop = number(sw, "stop_db", "sweep");
    s.grid_db = SweepRange{start, stop, number_or(sw, "step_db", std::max(stop - start, 1.0), "sweep")}.points();

    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        if (!m.is_object()) throw ConfigError("mc: expected an object");
        reject_unknown(m, {"samples", "seed", "streams", "fading"}, "mc");
        McConfig cfg;
        cfg.samples = count(m, "samples", cfg.samples);
        cfg.seed = count(m, "seed", cfg.seed);
        const auto streams = count(m, "streams", 1);
        if (streams > 1024) throw ConfigError("mc: \"streams\" must not exceed 1024");
        cfg.streams = static_cast<int>(streams);
        cfg.validate();
        s.mc = cfg;
        if (m.contains("fading")) {
            const auto& f = m.at("fading");
            if (f == "mixture") {
                s.mc_fading = McFading::mixture;
            } else if (f == "gamma_gamma") {
                s.mc_fading = McFading::gamma_gamma;
                for (const auto& h : s.hops)
                    if (!h.gamma_gamma)
                        throw ConfigError("mc: \"gamma_gamma\" fading needs alpha/beta on both hops");
            } else {
                throw ConfigError("mc: \"fading\" must be \"mixture\" or \"gamma_gamma\"");
            }
        }
    }
    return s;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    try {
        return from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError("scenario '" + path + "': " + e.what());
    }
}

std::array<HopChannel, 2> Scenario::hops_at(double gamma_bar_db) const {
    return {hops[0].at(gamma_bar_db), hops[1].at(gamma_bar_db)};
}

RelayLink Scenario::link_at(double gamma_bar_db, const Protocol& protocol) const {
    auto [h1, h2] = hops_at(gamma_bar_db);
    return RelayLink(std::move(h1), std::move(h2), protocol);
}

McConfig Scenario::mc_config() const {
    McConfig cfg = mc.value_or(McConfig{});
    for (std::size_t i = 0; i < 2; ++i)
        cfg.fading[i] = mc_fading == McFading::gamma_gamma ? FadingSource{GammaGammaSource{*hops[i].gamma_gamma}}
                                                          : FadingSource{MixtureSource{}};
    return cfg;
}

std::vector<SweepRow> run_sweep(const Scenario& s, unsigned workers) {
    const std::size_t np = s.protocols.size();
    std::vector<std::optional<SweepRow>> rows(s.grid_db.size() * np);
    const double threshold = db_to_linear(s.gamma_th_db);
    parallel_for(rows.size(), workers, [&](std::size_t i) {
        const double db = s.grid_db[i / np];
        const auto& protocol = s.protocols[i % np];
        const auto name = protocol_name(protocol);
        rows[i] = at_point(db, name, [&] {
            const auto link = s.link_at(db, protocol);
            return SweepRow{db, name, outage(link, threshold), aber(link, s.modulation)};
        });
        spdlog::debug("sweep: {} dB {} done", db, name);
    });
    std::vector<SweepRow> out;
    out.reserve(rows.size());
    for (auto& r : rows) out.push_back(std::move(*r));
    return out;
}

bool verify_pass(Method method, bool bound_regime, double closed, double quadrature, const Estimate& mc,
                 double quad_tol) {
    if (bound_regime && method == Method::bound) return mc.value <= closed;
    return mc.ci_low <= closed && closed <= mc.ci_high && std::abs(closed - quadrature) <= quad_tol;
}

std::vector<VerifyRow> run_verify(const Scenario& s, unsigned workers) {
    if (!s.mc) throw ConfigError("verify: scenario has no \"mc\" block");
    const McConfig cfg = s.mc_config();
    const std::size_t np = s.protocols.size();
    const double threshold = db_to_linear(s.gamma_th_db);
    std::vector<std::vector<VerifyRow>> per_point(s.grid_db.size());
    parallel_for(s.grid_db.size(), workers, [&](std::size_t g) {
        const double db = s.grid_db[g];
        std::vector<RelayLink> links;
        for (const auto& p : s.protocols)
            links.push_back(at_point(db, protocol_name(p), [&] { return s.link_at(db, p); }));
        const auto mc = at_point(db, "all", [&] { return estimate_links(links, threshold, s.modulation, cfg); });
        auto& rows = per_point[g];
        for (std::size_t p = 0; p < np; ++p) {
            const auto name = protocol_name(s.protocols[p]);
            const auto& link = links[p];
            const bool bound = link.bound_regime();
            at_point(db, name, [&] {
                const auto out = outage(link, threshold);
                const double out_quad = cdf_numeric(link, threshold);
                rows.push_back({db, name, "outage", out.method, out.value, out_quad, mc[p].outage, bound,
                                verify_pass(out.method, bound, out.value, out_quad, mc[p].outage)});
                const auto ab = aber(link, s.modulation);
                const double ab_quad = aber_quadrature(link, s.modulation, CdfSource::numeric);
                rows.push_back({db, name, "aber", ab.method, ab.value, ab_quad, mc[p].aber, bound,
                                verify_pass(ab.method, bound, ab.value, ab_quad, mc[p].aber)});
                return 0;
            });
        }
        spdlog::debug("verify: {} dB done", db);
    });
    std::vector<VerifyRow> out;
    for (auto& rows : per_point) std::move(rows.begin(), rows.end(), std::back_inserter(out));
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific,
                                   std::numeric_limits<double>::max_digits10 - 1);
    return std::string(buf, res.ptr);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "gamma_bar_db,protocol,outage,aber,method,bound_regime\n";
    for (const auto& r : rows) {
        out += format_double(r.gamma_bar_db) + ',' + r.protocol + ',' + format_double(r.outage.value) + ',' +
               format_double(r.aber.value) + ',' + to_string(combine(r.outage.method, r.aber.method)) + ',' +
               (r.outage.bound_regime ? "true" : "false") + '\n';
    }
    return out;
}

std::string verify_csv(const std::vector<VerifyRow>& rows) {
    std::string out =
        "gamma_bar_db,protocol,metric,method,closed_form,quadrature,mc_value,mc_std_err,mc_ci_low,mc_ci_high,"
        "bound_regime,pass\n";
    for (const auto& r : rows) {
        out += format_double(r.gamma_bar_db) + ',' + r.protocol + ',' + r.metric + ',' + to_string(r.method) +
               ',' + format_double(r.closed_form) + ',' + format_double(r.quadrature) + ',' +
               format_double(r.mc.value) + ',' + format_double(r.mc.std_err) + ',' + format_double(r.mc.ci_low) +
               ',' + format_double(r.mc.ci_high) + ',' + (r.bound_regime ? "true" : "false") + ',' +
               (r.pass ? "true" : "false") + '\n';
    }
    return out;
}

}  // namespace fso
