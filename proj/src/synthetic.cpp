#include "lhi/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lhi/cmapss.hpp"
#include "lhi/error.hpp"
#include "lhi/rng.hpp"
#include "lhi/textio.hpp"

namespace lhi::synthetic {

namespace {

constexpr std::size_t kSensors = cmapss::kNumSensors;
constexpr int kFactors = 3;

// Operating regimes in (altitude, Mach, throttle) order; regime 0 is the
// single-condition setting.
constexpr std::array<std::array<double, 3>, 6> kRegimes = {{
    {0.0, 0.0, 100.0},
    {10.0, 0.25, 100.0},
    {20.0, 0.70, 100.0},
    {25.0, 0.62, 60.0},
    {35.0, 0.84, 100.0},
    {42.0, 0.84, 40.0},
}};

struct SensorProfile {
    std::array<double, kSensors> base{};
    std::array<double, kSensors> mag{};
    std::array<bool, kSensors> constant{};
    std::array<std::array<double, kFactors>, kSensors> load{};
    std::array<std::array<double, kSensors>, 2> trend{};
    std::array<double, kSensors> noise{};
    std::array<std::array<double, kSensors>, 6> cond_offset{};
};

SensorProfile make_profile(const SynthParams& p) {
    SensorProfile prof;
    auto gen = rng::substream(p.seed, 0x5e75, 1);

    // A few flat channels mimic the real files' constant sensors and exercise
    // the constant-sensor dropping in preprocessing.
    prof.constant = {};
    prof.constant[0] = prof.constant[4] = prof.constant[17] = true;

    for (std::size_t j = 0; j < kSensors; ++j) {
        prof.base[j] = 10.0 + 1500.0 * rng::uniform01(gen);
        prof.mag[j] = 0.5 + 2.5 * rng::uniform01(gen);
        for (int f = 0; f < kFactors; ++f) {
            prof.load[j][f] = 0.45 * prof.mag[j] * rng::gauss(gen);
        }
        prof.noise[j] = p.noise_base * prof.mag[j];
    }

    // Two fault-mode trend profiles over partially overlapping sensor sets.
    for (int m = 0; m < 2; ++m) {
        for (std::size_t j = 0; j < kSensors; ++j) prof.trend[m][j] = 0.0;
    }
    const std::array<int, 10> mode0 = {1, 2, 3, 6, 7, 10, 11, 14, 19, 20};
    const std::array<int, 10> mode1 = {2, 3, 5, 8, 9, 11, 12, 15, 16, 19};
    for (int j : mode0) {
        double sign = rng::uniform01(gen) < 0.5 ? -1.0 : 1.0;
        prof.trend[0][j] = sign * prof.mag[j] * (0.9 + 0.8 * rng::uniform01(gen));
    }
    for (int j : mode1) {
        double sign = rng::uniform01(gen) < 0.5 ? -1.0 : 1.0;
        prof.trend[1][j] = sign * prof.mag[j] * (0.9 + 0.8 * rng::uniform01(gen));
    }

    // Condition-dependent baseline shifts, large against noise so regimes are
    // separable by clustering on the settings alone and the per-condition
    // statistics genuinely differ.
    for (int c = 0; c < 6; ++c) {
        for (std::size_t j = 0; j < kSensors; ++j) {
            prof.cond_offset[c][j] = c == 0 ? 0.0 : 4.0 * prof.mag[j] * rng::gauss(gen);
        }
    }
    return prof;
}

struct UnitPlan {
    int life = 0;        // total cycles to failure
    int observed = 0;    // emitted cycles (== life for train)
    int rul_at_end = 0;  // life - observed
    int fault_mode = 0;
    double noise_factor = 1.0;
    double severity = 1.0;
};

UnitPlan plan_unit(const SynthParams& p, std::uint64_t side_tag, int unit) {
    auto gen = rng::substream(p.seed, side_tag, static_cast<std::uint64_t>(unit), 0xA11);
    UnitPlan plan;
    int span = p.max_life - p.min_life + 1;
    plan.life = p.min_life + static_cast<int>(rng::uniform01(gen) * span);
    plan.fault_mode = p.fault_modes > 1 ? unit % p.fault_modes : 0;
    plan.noise_factor = 1.0 + p.unit_noise_spread * (2.0 * rng::uniform01(gen) - 1.0);
    plan.severity = std::exp(p.severity_log_std * rng::gauss(gen));
    return plan;
}

void append_unit(std::string& out, std::vector<int>* rul_lines, const SynthParams& p,
                 const SensorProfile& prof, std::uint64_t side_tag, int unit) {
    auto gen = rng::substream(p.seed, side_tag, static_cast<std::uint64_t>(unit), 0xB22);
    UnitPlan plan = plan_unit(p, side_tag, unit);
    bool is_test = rul_lines != nullptr;
    if (is_test) {
        int rul = 5 + static_cast<int>(rng::uniform01(gen) * 141.0);
        // Keep at least a stub of observed history per test unit; for very
        // short lives fall back to half the life so the RUL stays >= 1.
        const int min_observed = std::min(40, std::max(2, plan.life / 2));
        if (plan.life - rul < min_observed) rul = plan.life - min_observed;
        if (rul < 1) rul = 1;
        plan.rul_at_end = rul;
        plan.observed = plan.life - rul;
        rul_lines->push_back(rul);
    } else {
        plan.observed = plan.life;
        plan.rul_at_end = 0;
    }

    std::array<double, kFactors> factors{};
    for (int f = 0; f < kFactors; ++f) factors[f] = rng::gauss(gen);

    char buf[32];
    for (int t = 1; t <= plan.observed; ++t) {
        // Slow latent drift shared across sensors: the healthy manifold.
        for (int f = 0; f < kFactors; ++f) {
            factors[f] = 0.97 * factors[f] + 0.2 * rng::gauss(gen);
        }
        int cond = p.conditions > 1
                       ? static_cast<int>(rng::uniform01(gen) * p.conditions) % p.conditions
                       : 0;
        double over = static_cast<double>(t) - (static_cast<double>(plan.life) - p.degradation_horizon);
        double ramp = over > 0.0 ? over / p.degradation_horizon : 0.0;
        double g = std::pow(ramp, p.degradation_power) * plan.severity;

        out += std::to_string(unit);
        out += ' ';
        out += std::to_string(t);
        const auto& regime = kRegimes[static_cast<std::size_t>(cond)];
        for (int s = 0; s < 3; ++s) {
            double jitter = (s == 2 ? 0.01 : 0.002) * rng::gauss(gen);
            std::snprintf(buf, sizeof(buf), " %.4f", regime[static_cast<std::size_t>(s)] + jitter);
            out += buf;
        }
        for (std::size_t j = 0; j < kSensors; ++j) {
            double value = prof.base[j];
            if (!prof.constant[j]) {
                value += prof.cond_offset[static_cast<std::size_t>(cond)][j];
                for (int f = 0; f < kFactors; ++f) value += prof.load[j][f] * factors[f];
                value += prof.trend[static_cast<std::size_t>(plan.fault_mode)][j] * g;
                value += prof.noise[j] * plan.noise_factor * rng::gauss(gen);
            }
            std::snprintf(buf, sizeof(buf), " %.4f", value);
            out += buf;
        }
        // The public files end lines with stray whitespace; reproduce it.
        out += " \n";
    }
}

}  // namespace

SynthParams synth_params_for(const std::string& name, std::uint64_t seed) {
    auto counts = cmapss::canonical_counts(name);
    if (!counts) {
        throw UsageError("unknown dataset name: " + name);
    }
    SynthParams p;
    p.name = name;
    p.train_units = counts->train_units;
    p.test_units = counts->test_units;
    p.conditions = counts->conditions;
    p.fault_modes = counts->fault_modes;
    p.seed = rng::mix(seed, textio::fnv1a64(name));
    return p;
}

void write_dataset(const std::filesystem::path& dir, const SynthParams& p) {
    std::filesystem::create_directories(dir);
    SensorProfile prof = make_profile(p);

    std::string train_text;
    train_text.reserve(1 << 22);
    for (int u = 1; u <= p.train_units; ++u) {
        append_unit(train_text, nullptr, p, prof, 1, u);
    }
    textio::write_file_atomic(dir / ("train_" + p.name + ".txt"), train_text);

    std::string test_text;
    test_text.reserve(1 << 22);
    std::vector<int> ruls;
    for (int u = 1; u <= p.test_units; ++u) {
        append_unit(test_text, &ruls, p, prof, 2, u);
    }
    textio::write_file_atomic(dir / ("test_" + p.name + ".txt"), test_text);

    std::string rul_text;
    for (int r : ruls) {
        rul_text += std::to_string(r);
        rul_text += '\n';
    }
    textio::write_file_atomic(dir / ("RUL_" + p.name + ".txt"), rul_text);
}

void write_corpus(const std::filesystem::path& dir, std::uint64_t seed) {
    for (const char* name : {"FD001", "FD002", "FD003", "FD004"}) {
        write_dataset(dir, synth_params_for(name, seed));
    }
}

}  // namespace lhi::synthetic
