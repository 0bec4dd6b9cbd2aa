#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lhi/models.hpp"
#include "lhi/preprocess.hpp"

namespace lhi::uq {

struct UQConfig {
    int n_passes = 50;
    double dropout_rate = 0.1;
    std::uint64_t seed = 0;
    // Independent stream overrides. When unset, both are derived from seed;
    // setting them separately lets callers prove that the epistemic result
    // does not depend on the latent-sampling stream and vice versa.
    std::optional<std::uint64_t> dropout_seed;
    std::optional<std::uint64_t> latent_seed;

    std::uint64_t effective_dropout_seed() const;
    std::uint64_t effective_latent_seed() const;
};

enum class UQKind { aleatoric, epistemic, total };

struct UQResult {
    double mean_rec = 0.0;
    double sigma = 0.0;  // sample std (n-1) of eps_rec across passes
    UQKind kind = UQKind::epistemic;
};

// Monte Carlo dropout on the decoder with a deterministic encoder. The
// uncertainty of the scalar reconstruction error, not of the raw output.
UQResult epistemic_ae(const models::AEModel& model, std::span<const double> x,
                      const UQConfig& cfg);

// Latent sampling z ~ q(z|x) with dropout off everywhere.
UQResult aleatoric_vae(const models::VAEModel& model, std::span<const double> x,
                       const UQConfig& cfg);

// z pinned at mu(x); decoder dropout is the only randomness.
UQResult epistemic_vae(const models::VAEModel& model, std::span<const double> x,
                       const UQConfig& cfg);

struct UQSeries {
    std::vector<double> sigma_e;
    std::vector<double> sigma_a;  // empty for the AE
};

UQSeries extract_uq_series(const models::AEModel& model,
                           std::span<const preprocess::WindowSample> samples, const UQConfig& cfg,
                           int threads = 1);
UQSeries extract_uq_series(const models::VAEModel& model,
                           std::span<const preprocess::WindowSample> samples, const UQConfig& cfg,
                           int threads = 1);

}  // namespace lhi::uq
