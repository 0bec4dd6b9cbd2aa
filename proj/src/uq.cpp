#include "lhi/uq.hpp"

#include <cmath>
#include <string>

#include "lhi/error.hpp"
#include "lhi/parallel.hpp"
#include "lhi/rapp.hpp"
#include "lhi/rng.hpp"

namespace lhi::uq {
namespace {

constexpr std::uint64_t kDropoutStreamTag = 0x64726f70ULL;  // "drop"
constexpr std::uint64_t kLatentStreamTag = 0x6c61746eULL;   // "latn"

void check_config(const UQConfig& cfg) {
    if (cfg.n_passes < 2) {
        throw UsageError("uq: n_passes must be >= 2, got " + std::to_string(cfg.n_passes));
    }
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0) {
        throw UsageError("uq: dropout_rate must be in [0, 1)");
    }
}

// Mean and sample std over MC passes. Bitwise-identical passes short-circuit
// to sigma = 0 so disabled randomness yields an exact zero instead of
// accumulated rounding noise.
UQResult reduce(const std::vector<double>& vals, UQKind kind) {
    UQResult out;
    out.kind = kind;
    bool all_equal = true;
    for (double v : vals) {
        if (v != vals.front()) {
            all_equal = false;
            break;
        }
    }
    if (all_equal) {
        out.mean_rec = vals.front();
        out.sigma = 0.0;
        return out;
    }
    const double n = static_cast<double>(vals.size());
    double sum = 0.0;
    for (double v : vals) sum += v;
    out.mean_rec = sum / n;
    double ss = 0.0;
    for (double v : vals) {
        const double d = v - out.mean_rec;
        ss += d * d;
    }
    out.sigma = std::sqrt(ss / (n - 1.0));
    return out;
}

// Decoder-dropout passes from a pinned latent code.
template <class Model>
UQResult decoder_dropout_passes(const Model& model, std::span<const double> x,
                                std::span<const double> z, const UQConfig& cfg) {
    const std::uint64_t dseed = cfg.effective_dropout_seed();
    std::vector<double> vals(static_cast<std::size_t>(cfg.n_passes));
    for (std::size_t p = 0; p < vals.size(); ++p) {
        auto gen = rng::substream(dseed, kDropoutStreamTag, p);
        std::vector<double> xhat;
        if (cfg.dropout_rate > 0.0) {
            neural::LayerMasks masks =
                neural::sample_masks_at_rate(model.decoder, cfg.dropout_rate, gen);
            xhat = neural::forward(model.decoder, z, &masks, nullptr);
        } else {
            xhat = neural::forward(model.decoder, z, nullptr, nullptr);
        }
        vals[p] = rapp::eps_rec(x, xhat);
    }
    return reduce(vals, UQKind::epistemic);
}

}  // namespace

std::uint64_t UQConfig::effective_dropout_seed() const {
    return dropout_seed.value_or(rng::mix(seed, kDropoutStreamTag));
}

std::uint64_t UQConfig::effective_latent_seed() const {
    return latent_seed.value_or(rng::mix(seed, kLatentStreamTag));
}

UQResult epistemic_ae(const models::AEModel& model, std::span<const double> x,
                      const UQConfig& cfg) {
    check_config(cfg);
    std::vector<double> z = neural::forward(model.encoder, x, nullptr, nullptr);
    return decoder_dropout_passes(model, x, z, cfg);
}

UQResult aleatoric_vae(const models::VAEModel& model, std::span<const double> x,
                       const UQConfig& cfg) {
    check_config(cfg);
    std::mt19937_64 unused(0);
    models::VAEEncoding enc = models::vae_encode(model, x, false, unused);
    const std::uint64_t lseed = cfg.effective_latent_seed();
    std::vector<double> vals(static_cast<std::size_t>(cfg.n_passes));
    std::vector<double> z(model.latent_dim);
    for (std::size_t p = 0; p < vals.size(); ++p) {
        auto gen = rng::substream(lseed, kLatentStreamTag, p);
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] = enc.mu[i] + std::exp(0.5 * enc.logvar[i]) * rng::gauss(gen);
        }
        std::vector<double> xhat = models::vae_decode(model, z, nullptr);
        vals[p] = rapp::eps_rec(x, xhat);
    }
    return reduce(vals, UQKind::aleatoric);
}

UQResult epistemic_vae(const models::VAEModel& model, std::span<const double> x,
                       const UQConfig& cfg) {
    check_config(cfg);
    std::mt19937_64 unused(0);
    models::VAEEncoding enc = models::vae_encode(model, x, false, unused);
    return decoder_dropout_passes(model, x, enc.mu, cfg);
}

UQSeries extract_uq_series(const models::AEModel& model,
                           std::span<const preprocess::WindowSample> samples, const UQConfig& cfg,
                           int threads) {
    check_config(cfg);
    UQSeries series;
    series.sigma_e.resize(samples.size());
    const std::uint64_t dseed = cfg.effective_dropout_seed();
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        UQConfig per = cfg;
        per.dropout_seed = rng::mix(dseed, static_cast<std::uint64_t>(samples[i].unit_id),
                                    static_cast<std::uint64_t>(samples[i].cycle));
        series.sigma_e[i] = epistemic_ae(model, samples[i].x, per).sigma;
    });
    return series;
}

UQSeries extract_uq_series(const models::VAEModel& model,
                           std::span<const preprocess::WindowSample> samples, const UQConfig& cfg,
                           int threads) {
    check_config(cfg);
    UQSeries series;
    series.sigma_e.resize(samples.size());
    series.sigma_a.resize(samples.size());
    const std::uint64_t dseed = cfg.effective_dropout_seed();
    const std::uint64_t lseed = cfg.effective_latent_seed();
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        UQConfig per = cfg;
        const auto unit = static_cast<std::uint64_t>(samples[i].unit_id);
        const auto cycle = static_cast<std::uint64_t>(samples[i].cycle);
        per.dropout_seed = rng::mix(dseed, unit, cycle);
        per.latent_seed = rng::mix(lseed, unit, cycle);
        series.sigma_e[i] = epistemic_vae(model, samples[i].x, per).sigma;
        series.sigma_a[i] = aleatoric_vae(model, samples[i].x, per).sigma;
    });
    return series;
}

}  // namespace lhi::uq
