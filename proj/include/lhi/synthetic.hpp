#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace lhi::synthetic {

// Run-to-failure simulator emitting files in the 26-column turbofan text
// format. Healthy behaviour is a low-dimensional latent-factor process per
// unit; degradation adds sensor-specific drifts that stay negligible while
// RUL is large and accelerate toward failure. Units differ in overall noise
// level and degradation severity, so indicators that ignore noise structure
// carry a per-unit bias.
struct SynthParams {
    std::string name = "FD001";
    int train_units = 100;
    int test_units = 100;
    int conditions = 1;
    int fault_modes = 1;
    std::uint64_t seed = 7;

    int min_life = 150;
    int max_life = 300;
    // Cycles before failure over which degradation ramps from 0 to full.
    double degradation_horizon = 200.0;
    // Shape of the ramp; >1 means slow onset then acceleration.
    double degradation_power = 1.6;
    // Sensor noise std relative to the per-sensor magnitude scale.
    double noise_base = 0.20;
    // Per-unit multiplicative noise factor drawn from [1-s, 1+s].
    double unit_noise_spread = 0.5;
    // Log-std of the per-unit degradation severity factor.
    double severity_log_std = 0.15;
};

// Canonical unit/condition/fault-mode structure for the given dataset name
// (FD001..FD004) with generator defaults.
SynthParams synth_params_for(const std::string& name, std::uint64_t seed);

// Writes train_<name>.txt, test_<name>.txt and RUL_<name>.txt into dir.
void write_dataset(const std::filesystem::path& dir, const SynthParams& params);

// All four sub-datasets with their canonical counts.
void write_corpus(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace lhi::synthetic
