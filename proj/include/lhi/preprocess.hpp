#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lhi/cmapss.hpp"
#include "lhi/matrix.hpp"

namespace lhi::preprocess {

// Per-condition z-score statistics. Settings are clustered (k-means on the
// three operating settings, standardized); each kept sensor is normalized
// against its cluster's mean/std. Sensors that are globally constant are
// dropped because they would make downstream covariances singular.
struct NormalizationModel {
    Matrix centroids;                   // k x 3, raw settings space
    std::vector<double> settings_mean;  // for the standardized clustering metric
    std::vector<double> settings_std;
    Matrix mean;            // k x S
    Matrix stdv;            // k x S, floored at std_floor
    std::vector<int> kept;  // sensor column indices, ascending
    double std_floor = 1e-6;

    std::size_t condition_count() const { return centroids.rows; }
    std::size_t sensor_count() const { return kept.size(); }

    // Nearest centroid in standardized settings space; ties break low.
    std::size_t assign_condition(std::span<const double> settings) const;
};

struct LabelConfig {
    double r_early = 125.0;
    double healthy_rul_threshold = 125.0;
    double healthy_fallback_fraction = 0.2;
};

// One per-cycle sample: a window of normalized cycles (zero-padded at the
// start of a unit) with its clipped RUL label. rul_true keeps the unclipped
// value for healthy-set selection.
struct WindowSample {
    int unit_id = 0;
    int cycle = 0;
    std::vector<double> x;  // window * S, oldest cycle first
    double rul_label = 0.0;
    double rul_true = 0.0;
};

NormalizationModel fit_normalization(const std::vector<cmapss::Trajectory>& train, int k,
                                     std::uint64_t seed);

// length x S matrix of z-scored kept sensors.
Matrix normalize(const cmapss::Trajectory& traj, const NormalizationModel& model);

// Inverse of normalize on the kept sensors (needs the trajectory's settings
// to recover each row's condition).
Matrix denormalize(const cmapss::Trajectory& traj, const Matrix& normalized,
                   const NormalizationModel& model);

std::vector<WindowSample> make_samples(const cmapss::Trajectory& traj,
                                       const NormalizationModel& model, const LabelConfig& cfg,
                                       int window, cmapss::TrajKind kind,
                                       std::optional<double> true_rul_at_end);

// Samples whose unclipped RUL exceeds the healthy threshold; units that never
// exceed it contribute their earliest ceil(fraction * length) cycles instead,
// so every unit is represented.
std::vector<WindowSample> healthy_subset(const std::vector<WindowSample>& samples,
                                         const LabelConfig& cfg);

void save_normalization(const std::filesystem::path& path, const NormalizationModel& model);
NormalizationModel load_normalization(const std::filesystem::path& path);

// Debug export of one normalized trajectory.
std::string normalized_csv(const cmapss::Trajectory& traj, const NormalizationModel& model);

}  // namespace lhi::preprocess
