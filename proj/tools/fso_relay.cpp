// SPDX-License-Identifier: Apache-2.0
//
// fso_relay: command-line front-end for dual-hop FSO link statistics.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fsorelay/error.hpp"
#include "fsorelay/scenario.hpp"

namespace {

using nlohmann::json;
using namespace fso;

enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3, kVerification = 4 };

// Channel selection shared by the point-evaluation subcommands.
struct ChannelArgs {
    std::string config;
    std::optional<double> alpha;
    std::optional<double> beta;
    int terms = 10;
    double xi_sq = 1.0;
    double r_over_wz = 0.1;
    std::vector<double> gamma_bar_db;
    std::optional<double> gamma_th_db;
    std::vector<std::string> protocols;
};

struct OutputArgs {
    std::string out;
    std::string format = "csv";
};

void add_channel_options(CLI::App& cmd, ChannelArgs& a) {
    cmd.add_option("--config", a.config, "Scenario JSON file")->check(CLI::ExistingFile);
    cmd.add_option("--alpha", a.alpha, "Gamma-Gamma alpha (both hops)");
    cmd.add_option("--beta", a.beta, "Gamma-Gamma beta (both hops)");
    cmd.add_option("--L", a.terms, "Mixture terms")->capture_default_str();
    cmd.add_option("--xi-sq", a.xi_sq, "Squared jitter ratio")->capture_default_str();
    cmd.add_option("--r-over-wz", a.r_over_wz, "Aperture radius over beam waist")->capture_default_str();
    cmd.add_option("--gamma-bar-db", a.gamma_bar_db, "Average SNR points in dB")->delimiter(',');
    cmd.add_option("--gamma-th-db", a.gamma_th_db, "Outage threshold in dB");
    cmd.add_option("--protocol", a.protocols, "Comma-separated subset of csi0,csi1,fixed,df")->delimiter(',');
}

void add_output_options(CLI::App& cmd, OutputArgs& o) {
    cmd.add_option("--out", o.out, "Output path (default stdout)");
    cmd.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv"}))->capture_default_str();
}

Scenario build_scenario(const ChannelArgs& a) {
    Scenario s = [&] {
        if (!a.config.empty()) {
            if (a.alpha || a.beta) throw ConfigError("--alpha/--beta cannot be combined with --config");
            return Scenario::load(a.config);
        }
        if (!a.alpha || !a.beta) throw ConfigError("either --config or both --alpha and --beta are required");
        const double db = a.gamma_bar_db.empty() ? 0.0 : a.gamma_bar_db.front();
        const json doc = {{"schema", 1},
                          {"hops",
                           {{"alpha", *a.alpha},
                            {"beta", *a.beta},
                            {"L", a.terms},
                            {"xi_sq", a.xi_sq},
                            {"r_over_wz", a.r_over_wz}}},
                          {"sweep", {{"start_db", db}, {"stop_db", db}}}};
        return Scenario::from_json(doc);
    }();
    if (!a.gamma_bar_db.empty()) s.grid_db = a.gamma_bar_db;
    if (a.gamma_th_db) s.gamma_th_db = *a.gamma_th_db;
    if (!a.protocols.empty()) {
        s.protocols.clear();
        for (const auto& name : a.protocols) s.protocols.push_back(parse_protocol(name));
    }
    return s;
}

void emit(const OutputArgs& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open output file '" + o.out + "'");
    f << text;
    if (!f.flush()) throw ConfigError("failed writing '" + o.out + "'");
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("fso_relay");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("FSO_RELAY_LOG")) {
        const std::string name(env);
        const auto level = spdlog::level::from_str(name);
        if (level == spdlog::level::off && name != "off")
            spdlog::warn("FSO_RELAY_LOG: unknown level '{}', using warn", name);
        else
            spdlog::set_level(level);
    }
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

int cmd_fit(double alpha, double beta, int terms, const OutputArgs& o) {
    const GammaGammaParams gg(alpha, beta);
    const auto mg = fit_gamma_gamma(gg, terms);
    json doc = mg.to_json();
    doc["alpha"] = alpha;
    doc["beta"] = beta;
    doc["L"] = terms;
    doc["max_relative_error"] = fit_max_relative_error(mg, gg);
    emit(o, doc.dump(2) + "\n");
    return kOk;
}

int cmd_pdf(const ChannelArgs& a, const std::vector<double>& xs, const OutputArgs& o) {
    const auto s = build_scenario(a);
    std::string out = "gamma_bar_db,hop,x,pdf\n";
    for (double db : s.grid_db) {
        const auto hops = s.hops_at(db);
        for (int h = 0; h < 2; ++h)
            for (double x : xs) {
                const double v = at_point(db, "hop" + std::to_string(h + 1), [&] { return snr_pdf(hops[h], x); });
                out += format_double(db) + ',' + std::to_string(h + 1) + ',' + format_double(x) + ',' +
                       format_double(v) + '\n';
            }
    }
    emit(o, out);
    return kOk;
}

int cmd_cdf(const ChannelArgs& a, const std::vector<double>& xs, const OutputArgs& o) {
    const auto s = build_scenario(a);
    std::string out = "gamma_bar_db,protocol,x,cdf,method,bound_regime\n";
    for (double db : s.grid_db)
        for (const auto& p : s.protocols) {
            const auto name = protocol_name(p);
            const auto link = at_point(db, name, [&] { return s.link_at(db, p); });
            for (double x : xs) {
                const auto e = at_point(db, name, [&] { return cdf(link, x); });
                out += format_double(db) + ',' + protocol_name(p) + ',' + format_double(x) + ',' +
                       format_double(e.value) + ',' + to_string(e.method) + ',' + bool_str(e.bound_regime) + '\n';
            }
        }
    emit(o, out);
    return kOk;
}

int cmd_metric(const ChannelArgs& a, bool want_outage, const OutputArgs& o) {
    const auto s = build_scenario(a);
    std::string out = std::string("gamma_bar_db,protocol,") + (want_outage ? "outage" : "aber") +
                      ",method,bound_regime\n";
    const double threshold = db_to_linear(s.gamma_th_db);
    for (double db : s.grid_db)
        for (const auto& p : s.protocols) {
            const auto e = at_point(db, protocol_name(p), [&] {
                const auto link = s.link_at(db, p);
                return want_outage ? outage(link, threshold) : aber(link, s.modulation);
            });
            out += format_double(db) + ',' + protocol_name(p) + ',' + format_double(e.value) + ',' +
                   to_string(e.method) + ',' + bool_str(e.bound_regime) + '\n';
        }
    emit(o, out);
    return kOk;
}

int cmd_sweep(const ChannelArgs& a, const OutputArgs& o) {
    emit(o, sweep_csv(run_sweep(build_scenario(a))));
    return kOk;
}

struct McOverrides {
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<int> streams;
};

int cmd_verify(const ChannelArgs& a, const McOverrides& m, const OutputArgs& o) {
    auto s = build_scenario(a);
    if (!s.mc) {
        if (!a.config.empty()) throw ConfigError("verify: scenario has no \"mc\" block");
        s.mc = McConfig{};
    }
    if (m.samples) s.mc->samples = *m.samples;
    if (m.seed) s.mc->seed = *m.seed;
    if (m.streams) s.mc->streams = *m.streams;
    s.mc->validate();
    const auto rows = run_verify(s);
    emit(o, verify_csv(rows));
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.pass ? 0 : 1;
    std::cerr << "verify: " << rows.size() << " checks, " << failed << " failed\n";
    return failed == 0 ? kOk : kVerification;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Dual-hop FSO relaying: outage and ABER closed forms with quadrature and Monte Carlo oracles"};
    app.require_subcommand(1);

    double alpha = 0.0, beta = 0.0;
    int terms = 10;
    OutputArgs fit_out;
    auto* fit = app.add_subcommand("fit", "Mixture-Gamma fit of a Gamma-Gamma law");
    fit->add_option("--alpha", alpha, "Gamma-Gamma alpha")->required();
    fit->add_option("--beta", beta, "Gamma-Gamma beta")->required();
    fit->add_option("--L", terms, "Mixture terms")->capture_default_str()->check(CLI::Range(1, 64));
    fit->add_option("--out", fit_out.out, "Output path (default stdout)");

    ChannelArgs pdf_args, cdf_args, outage_args, aber_args, sweep_args, verify_args;
    OutputArgs pdf_out, cdf_out, outage_out, aber_out, sweep_out, verify_out;
    std::vector<double> pdf_x, cdf_x;
    McOverrides mc;

    auto* pdf = app.add_subcommand("pdf", "Per-hop SNR density");
    add_channel_options(*pdf, pdf_args);
    add_output_options(*pdf, pdf_out);
    pdf->add_option("--x", pdf_x, "SNR points (linear)")->delimiter(',')->required()->check(CLI::PositiveNumber);

    auto* cdf_cmd = app.add_subcommand("cdf", "End-to-end SNR CDF");
    add_channel_options(*cdf_cmd, cdf_args);
    add_output_options(*cdf_cmd, cdf_out);
    cdf_cmd->add_option("--x", cdf_x, "SNR points (linear)")->delimiter(',')->required()->check(
        CLI::NonNegativeNumber);

    auto* outage_cmd = app.add_subcommand("outage", "Outage probability");
    add_channel_options(*outage_cmd, outage_args);
    add_output_options(*outage_cmd, outage_out);

    auto* aber_cmd = app.add_subcommand("aber", "Average bit-error rate");
    add_channel_options(*aber_cmd, aber_args);
    add_output_options(*aber_cmd, aber_out);

    auto* sweep = app.add_subcommand("sweep", "Outage and ABER over the scenario grid");
    add_channel_options(*sweep, sweep_args);
    add_output_options(*sweep, sweep_out);

    auto* verify = app.add_subcommand("verify", "Cross-check closed forms against quadrature and Monte Carlo");
    add_channel_options(*verify, verify_args);
    add_output_options(*verify, verify_out);
    verify->add_option("--samples", mc.samples, "Monte Carlo samples");
    verify->add_option("--seed", mc.seed, "Monte Carlo seed");
    verify->add_option("--streams", mc.streams, "Worker threads for Monte Carlo blocks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*fit) return cmd_fit(alpha, beta, terms, fit_out);
        if (*pdf) return cmd_pdf(pdf_args, pdf_x, pdf_out);
        if (*cdf_cmd) return cmd_cdf(cdf_args, cdf_x, cdf_out);
        if (*outage_cmd) return cmd_metric(outage_args, true, outage_out);
        if (*aber_cmd) return cmd_metric(aber_args, false, aber_out);
        if (*sweep) return cmd_sweep(sweep_args, sweep_out);
        if (*verify) return cmd_verify(verify_args, mc, verify_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
