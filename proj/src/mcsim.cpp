// SPDX-License-Identifier: Apache-2.0
#include "fsorelay/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "fsorelay/error.hpp"

namespace fso {
namespace {

constexpr std::uint64_t kBlockSize = 65'536;
constexpr double kZ95 = 1.959963984540054;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Running mean and centred second moment, mergeable in a fixed order.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        n += 1.0;
        const double d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }
};

struct LinkTally {
    std::uint64_t outages = 0;
    Moments ber;
};

// Per-block draw state for one hop; distributions are rebuilt per block so
// that no cached variate leaks across block boundaries.
class HopSampler {
  public:
    HopSampler(const HopChannel& hop, const FadingSource& source)
        : hop_(hop), scale_(hop.gamma_bar() / hop.mean_irradiance()), inv_xi_sq_(1.0 / hop.pointing().xi_sq) {
        if (const auto* gg = std::get_if<GammaGammaSource>(&source)) {
            gg_ = true;
            large_ = std::gamma_distribution<double>(gg->params.alpha, 1.0 / gg->params.alpha);
            small_ = std::gamma_distribution<double>(gg->params.beta, 1.0 / gg->params.beta);
        }
    }

    double operator()(Rng& rng) {
        const double fading = gg_ ? large_(rng) * small_(rng) : hop_.mixture().sample(rng);
        const double u = 1.0 - uniform_(rng);  // (0, 1]
        return scale_ * fading * hop_.pointing().a0 * std::pow(u, inv_xi_sq_);
    }

  private:
    const HopChannel& hop_;
    double scale_;
    double inv_xi_sq_;
    bool gg_ = false;
    std::gamma_distribution<double> large_;
    std::gamma_distribution<double> small_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

double end_to_end(const Protocol& p, double gain, double g1, double g2) {
    if (const auto* csi = std::get_if<CsiAssisted>(&p)) return g1 * g2 / (g1 + g2 + csi->q);
    if (std::holds_alternative<FixedGain>(p)) return g1 * g2 / (g2 + gain);
    return std::min(g1, g2);
}

Estimate proportion_estimate(std::uint64_t hits, std::uint64_t n) {
    Estimate e;
    e.samples = n;
    const double nn = static_cast<double>(n);
    e.value = static_cast<double>(hits) / nn;
    if (hits == 0 || hits == n) {
        e.degenerate = true;
        e.std_err = 0.0;
        e.ci_low = hits == 0 ? 0.0 : 1.0 - 3.0 / nn;
        e.ci_high = hits == 0 ? 3.0 / nn : 1.0;
        return e;
    }
    e.std_err = std::sqrt(e.value * (1.0 - e.value) / nn);
    e.ci_low = std::max(0.0, e.value - kZ95 * e.std_err);
    e.ci_high = std::min(1.0, e.value + kZ95 * e.std_err);
    return e;
}

Estimate mean_estimate(const Moments& m) {
    Estimate e;
    e.samples = static_cast<std::uint64_t>(m.n);
    e.value = m.mean;
    e.std_err = m.n > 1.0 ? std::sqrt(m.m2 / (m.n - 1.0) / m.n) : 0.0;
    e.degenerate = e.std_err == 0.0;
    e.ci_low = e.value - kZ95 * e.std_err;
    e.ci_high = e.value + kZ95 * e.std_err;
    return e;
}

}  // namespace

void McConfig::validate() const {
    if (samples < kMinSamples) throw ConfigError("mc: samples must be at least 10000");
    if (streams < 1) throw ConfigError("mc: streams must be at least 1");
}

double sample_pointing(const Pointing& pointing, Rng& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    return pointing.a0 * std::pow(1.0 - uniform(rng), 1.0 / pointing.xi_sq);
}

double sample_gamma_gamma(const GammaGammaParams& gg, Rng& rng) {
    std::gamma_distribution<double> large(gg.alpha, 1.0 / gg.alpha);
    std::gamma_distribution<double> small(gg.beta, 1.0 / gg.beta);
    const double x = large(rng);
    return x * small(rng);
}

double sample_snr(const HopChannel& hop, const FadingSource& source, Rng& rng) {
    const double fading = std::holds_alternative<GammaGammaSource>(source)
                              ? sample_gamma_gamma(std::get<GammaGammaSource>(source).params, rng)
                              : hop.mixture().sample(rng);
    return hop.gamma_bar() * fading * sample_pointing(hop.pointing(), rng) / hop.mean_irradiance();
}

std::vector<LinkEstimate> estimate_links(const std::vector<RelayLink>& links, double gamma_th,
                                         const Modulation& mod, const McConfig& cfg) {
    cfg.validate();
    if (links.empty()) return {};
    if (!(gamma_th > 0.0)) throw DomainError("estimate_links: threshold must be positive");
    const HopChannel& hop1 = links.front().hop1();
    const HopChannel& hop2 = links.front().hop2();
    std::vector<double> gains(links.size(), 0.0);
    for (std::size_t i = 0; i < links.size(); ++i)
        if (std::holds_alternative<FixedGain>(links[i].protocol())) gains[i] = links[i].gain();

    const std::uint64_t blocks = (cfg.samples + kBlockSize - 1) / kBlockSize;
    std::vector<std::vector<LinkTally>> tallies(blocks, std::vector<LinkTally>(links.size()));

    auto run_block = [&](std::uint64_t b) {
        Rng rng(splitmix64(cfg.seed ^ splitmix64(b)));
        HopSampler s1(hop1, cfg.fading[0]);
        HopSampler s2(hop2, cfg.fading[1]);
        const std::uint64_t begin = b * kBlockSize;
        const std::uint64_t count = std::min(kBlockSize, cfg.samples - begin);
        auto& out = tallies[b];
        for (std::uint64_t i = 0; i < count; ++i) {
            const double g1 = s1(rng);
            const double g2 = s2(rng);
            for (std::size_t l = 0; l < links.size(); ++l) {
                const double g = end_to_end(links[l].protocol(), gains[l], g1, g2);
                if (g < gamma_th) ++out[l].outages;
                out[l].ber.add(conditional_ber(mod, g));
            }
        }
    };

    const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(cfg.streams, blocks));
    spdlog::debug("mc: {} samples in {} blocks on {} streams (seed {})", cfg.samples, blocks, workers, cfg.seed);
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::uint64_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t b = next++; b < blocks; b = next++) run_block(b);
            });
    }

    std::vector<LinkEstimate> out(links.size());
    for (std::size_t l = 0; l < links.size(); ++l) {
        std::uint64_t outages = 0;
        Moments ber;
        for (std::uint64_t b = 0; b < blocks; ++b) {
            outages += tallies[b][l].outages;
            ber.merge(tallies[b][l].ber);
        }
        out[l] = {proportion_estimate(outages, cfg.samples), mean_estimate(ber)};
    }
    return out;
}

Estimate estimate_outage(const RelayLink& link, double gamma_th, const McConfig& cfg) {
    return estimate_links({link}, gamma_th, Modulation::bpsk(), cfg).front().outage;
}

Estimate estimate_aber(const RelayLink& link, const Modulation& mod, const McConfig& cfg) {
    return estimate_links({link}, 1.0, mod, cfg).front().aber;
}

}  // namespace fso
