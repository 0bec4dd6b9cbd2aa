#include "lhi/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lhi/container.hpp"
#include "lhi/error.hpp"
#include "lhi/rng.hpp"
#include "lhi/textio.hpp"

namespace lhi::preprocess {

namespace {

constexpr std::size_t kSettings = cmapss::kNumSettings;
constexpr double kConstantSensorTol = 1e-8;

double sq(double x) { return x * x; }

std::vector<double> column_mean(const Matrix& m) {
    std::vector<double> mean(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) mean[c] += m.at(r, c);
    }
    for (auto& v : mean) v /= static_cast<double>(m.rows);
    return mean;
}

std::vector<double> column_std(const Matrix& m, const std::vector<double>& mean) {
    std::vector<double> out(m.cols, 0.0);
    if (m.rows < 2) return out;
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) out[c] += sq(m.at(r, c) - mean[c]);
    }
    for (auto& v : out) v = std::sqrt(v / static_cast<double>(m.rows - 1));
    return out;
}

// Lloyd's algorithm with k-means++ seeding on pre-standardized rows. Returns
// per-row assignments; fails the attempt when a cluster empties out.
bool kmeans_attempt(const Matrix& rows, int k, std::mt19937_64& gen, Matrix& centroids,
                    std::vector<std::size_t>& assignment) {
    std::size_t n = rows.rows;
    std::size_t dim = rows.cols;
    centroids = Matrix(static_cast<std::size_t>(k), dim);

    // k-means++ seeding
    std::size_t first = static_cast<std::size_t>(rng::uniform01(gen) * static_cast<double>(n));
    if (first >= n) first = n - 1;
    for (std::size_t c = 0; c < dim; ++c) centroids.at(0, c) = rows.at(first, c);
    std::vector<double> best_dist(n, std::numeric_limits<double>::infinity());
    for (int ci = 1; ci < k; ++ci) {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double d = 0.0;
            for (std::size_t c = 0; c < dim; ++c) d += sq(rows.at(r, c) - centroids.at(ci - 1, c));
            best_dist[r] = std::min(best_dist[r], d);
            total += best_dist[r];
        }
        std::size_t chosen = n - 1;
        if (total > 0.0) {
            double target = rng::uniform01(gen) * total;
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                acc += best_dist[r];
                if (acc >= target) {
                    chosen = r;
                    break;
                }
            }
        } else {
            chosen = static_cast<std::size_t>(rng::uniform01(gen) * static_cast<double>(n));
            if (chosen >= n) chosen = n - 1;
        }
        for (std::size_t c = 0; c < dim; ++c) centroids.at(ci, c) = rows.at(chosen, c);
    }

    assignment.assign(n, 0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t r = 0; r < n; ++r) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (int ci = 0; ci < k; ++ci) {
                double d = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    d += sq(rows.at(r, c) - centroids.at(static_cast<std::size_t>(ci), c));
                }
                if (d < best) {
                    best = d;
                    best_c = static_cast<std::size_t>(ci);
                }
            }
            if (assignment[r] != best_c) {
                assignment[r] = best_c;
                changed = true;
            }
        }
        std::fill(counts.begin(), counts.end(), 0);
        Matrix sums(static_cast<std::size_t>(k), dim);
        for (std::size_t r = 0; r < n; ++r) {
            ++counts[assignment[r]];
            for (std::size_t c = 0; c < dim; ++c) sums.at(assignment[r], c) += rows.at(r, c);
        }
        for (int ci = 0; ci < k; ++ci) {
            if (counts[static_cast<std::size_t>(ci)] == 0) return false;
            for (std::size_t c = 0; c < dim; ++c) {
                centroids.at(static_cast<std::size_t>(ci), c) =
                    sums.at(static_cast<std::size_t>(ci), c) /
                    static_cast<double>(counts[static_cast<std::size_t>(ci)]);
            }
        }
        if (!changed && iter > 0) break;
    }
    return true;
}

}  // namespace

std::size_t NormalizationModel::assign_condition(std::span<const double> settings) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t ci = 0; ci < centroids.rows; ++ci) {
        double d = 0.0;
        for (std::size_t c = 0; c < kSettings; ++c) {
            double scale = settings_std[c] > 0 ? settings_std[c] : 1.0;
            double a = (settings[c] - settings_mean[c]) / scale;
            double b = (centroids.at(ci, c) - settings_mean[c]) / scale;
            d += (a - b) * (a - b);
        }
        if (d < best) {
            best = d;
            best_c = ci;
        }
    }
    return best_c;
}

NormalizationModel fit_normalization(const std::vector<cmapss::Trajectory>& train, int k,
                                     std::uint64_t seed) {
    if (train.empty()) {
        throw UsageError("fit_normalization: empty training set");
    }
    if (k < 1) {
        throw UsageError("fit_normalization: condition count must be >= 1");
    }

    std::size_t total_rows = 0;
    for (const auto& t : train) total_rows += t.length();

    Matrix settings(total_rows, kSettings);
    Matrix sensors(total_rows, cmapss::kNumSensors);
    std::size_t row = 0;
    for (const auto& t : train) {
        for (std::size_t r = 0; r < t.length(); ++r, ++row) {
            for (std::size_t c = 0; c < kSettings; ++c) settings.at(row, c) = t.settings.at(r, c);
            for (std::size_t c = 0; c < cmapss::kNumSensors; ++c) {
                sensors.at(row, c) = t.sensors.at(r, c);
            }
        }
    }

    NormalizationModel model;
    model.settings_mean = column_mean(settings);
    model.settings_std = column_std(settings, model.settings_mean);

    // Drop globally constant sensors.
    std::vector<double> sensor_mean = column_mean(sensors);
    std::vector<double> sensor_std = column_std(sensors, sensor_mean);
    for (std::size_t c = 0; c < cmapss::kNumSensors; ++c) {
        if (sensor_std[c] >= kConstantSensorTol) model.kept.push_back(static_cast<int>(c));
    }
    std::size_t S = model.kept.size();
    if (S == 0) {
        throw UsageError("fit_normalization: all sensors are constant");
    }

    std::vector<std::size_t> assignment(total_rows, 0);
    if (k == 1) {
        model.centroids = Matrix(1, kSettings);
        for (std::size_t c = 0; c < kSettings; ++c) {
            model.centroids.at(0, c) = model.settings_mean[c];
        }
    } else {
        Matrix standardized(total_rows, kSettings);
        for (std::size_t r = 0; r < total_rows; ++r) {
            for (std::size_t c = 0; c < kSettings; ++c) {
                double scale = model.settings_std[c] > 0 ? model.settings_std[c] : 1.0;
                standardized.at(r, c) = (settings.at(r, c) - model.settings_mean[c]) / scale;
            }
        }
        Matrix std_centroids;
        bool ok = false;
        for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
            auto gen = rng::substream(seed, 0x6b6d, static_cast<std::uint64_t>(attempt));
            ok = kmeans_attempt(standardized, k, gen, std_centroids, assignment);
        }
        if (!ok) {
            throw UsageError("fit_normalization: k-means produced an empty cluster after 10 seeds"
                             " (k too large for these settings?)");
        }
        model.centroids = Matrix(static_cast<std::size_t>(k), kSettings);
        for (int ci = 0; ci < k; ++ci) {
            for (std::size_t c = 0; c < kSettings; ++c) {
                double scale = model.settings_std[c] > 0 ? model.settings_std[c] : 1.0;
                model.centroids.at(static_cast<std::size_t>(ci), c) =
                    std_centroids.at(static_cast<std::size_t>(ci), c) * scale +
                    model.settings_mean[c];
            }
        }
    }

    // Per-cluster z-score statistics on kept sensors (two passes; sample std).
    std::size_t kk = static_cast<std::size_t>(k);
    model.mean = Matrix(kk, S);
    model.stdv = Matrix(kk, S);
    std::vector<std::size_t> counts(kk, 0);
    for (std::size_t r = 0; r < total_rows; ++r) {
        std::size_t ci = assignment[r];
        ++counts[ci];
        for (std::size_t s = 0; s < S; ++s) {
            model.mean.at(ci, s) += sensors.at(r, static_cast<std::size_t>(model.kept[s]));
        }
    }
    for (std::size_t ci = 0; ci < kk; ++ci) {
        for (std::size_t s = 0; s < S; ++s) {
            model.mean.at(ci, s) /= static_cast<double>(counts[ci]);
        }
    }
    for (std::size_t r = 0; r < total_rows; ++r) {
        std::size_t ci = assignment[r];
        for (std::size_t s = 0; s < S; ++s) {
            model.stdv.at(ci, s) +=
                sq(sensors.at(r, static_cast<std::size_t>(model.kept[s])) - model.mean.at(ci, s));
        }
    }
    for (std::size_t ci = 0; ci < kk; ++ci) {
        for (std::size_t s = 0; s < S; ++s) {
            double v = counts[ci] > 1
                           ? std::sqrt(model.stdv.at(ci, s) / static_cast<double>(counts[ci] - 1))
                           : 0.0;
            model.stdv.at(ci, s) = std::max(v, model.std_floor);
        }
    }
    return model;
}

Matrix normalize(const cmapss::Trajectory& traj, const NormalizationModel& model) {
    std::size_t S = model.sensor_count();
    Matrix out(traj.length(), S);
    for (std::size_t r = 0; r < traj.length(); ++r) {
        std::size_t ci = model.assign_condition(traj.settings.row(r));
        for (std::size_t s = 0; s < S; ++s) {
            double raw = traj.sensors.at(r, static_cast<std::size_t>(model.kept[s]));
            out.at(r, s) = (raw - model.mean.at(ci, s)) / model.stdv.at(ci, s);
        }
    }
    return out;
}

Matrix denormalize(const cmapss::Trajectory& traj, const Matrix& normalized,
                   const NormalizationModel& model) {
    std::size_t S = model.sensor_count();
    require_shape(normalized, traj.length(), S, "denormalize input");
    Matrix out(traj.length(), S);
    for (std::size_t r = 0; r < traj.length(); ++r) {
        std::size_t ci = model.assign_condition(traj.settings.row(r));
        for (std::size_t s = 0; s < S; ++s) {
            out.at(r, s) = normalized.at(r, s) * model.stdv.at(ci, s) + model.mean.at(ci, s);
        }
    }
    return out;
}

std::vector<WindowSample> make_samples(const cmapss::Trajectory& traj,
                                       const NormalizationModel& model, const LabelConfig& cfg,
                                       int window, cmapss::TrajKind kind,
                                       std::optional<double> true_rul_at_end) {
    if (window < 1) {
        throw UsageError("make_samples: window must be >= 1");
    }
    if (kind == cmapss::TrajKind::test && !true_rul_at_end) {
        throw UsageError("make_samples: test trajectory requires true_rul_at_end");
    }
    if (kind == cmapss::TrajKind::train && true_rul_at_end) {
        throw UsageError("make_samples: train trajectory must not carry true_rul_at_end");
    }

    Matrix norm = normalize(traj, model);
    std::size_t S = model.sensor_count();
    std::size_t W = static_cast<std::size_t>(window);
    std::size_t len = traj.length();
    double rul_offset = kind == cmapss::TrajKind::test ? *true_rul_at_end : 0.0;

    std::vector<WindowSample> out;
    out.reserve(len);
    for (std::size_t r = 0; r < len; ++r) {
        WindowSample sample;
        sample.unit_id = traj.unit_id;
        sample.cycle = static_cast<int>(r + 1);
        sample.rul_true = rul_offset + static_cast<double>(len - 1 - r);
        sample.rul_label = std::min(cfg.r_early, sample.rul_true);
        sample.x.assign(W * S, 0.0);
        // Window covers cycles [cycle-W+1, cycle], oldest first; cycles before
        // the start of the unit stay zero.
        for (std::size_t w = 0; w < W; ++w) {
            std::ptrdiff_t src = static_cast<std::ptrdiff_t>(r) -
                                 static_cast<std::ptrdiff_t>(W - 1 - w);
            if (src < 0) continue;
            for (std::size_t s = 0; s < S; ++s) {
                sample.x[w * S + s] = norm.at(static_cast<std::size_t>(src), s);
            }
        }
        out.push_back(std::move(sample));
    }
    return out;
}

std::vector<WindowSample> healthy_subset(const std::vector<WindowSample>& samples,
                                         const LabelConfig& cfg) {
    struct UnitInfo {
        bool any_above = false;
        int length = 0;
    };
    std::map<int, UnitInfo> units;
    for (const auto& s : samples) {
        auto& info = units[s.unit_id];
        info.any_above = info.any_above || s.rul_true > cfg.healthy_rul_threshold;
        info.length = std::max(info.length, s.cycle);
    }

    std::vector<WindowSample> out;
    for (const auto& s : samples) {
        const auto& info = units[s.unit_id];
        if (info.any_above) {
            if (s.rul_true > cfg.healthy_rul_threshold) out.push_back(s);
        } else {
            int fallback = static_cast<int>(
                std::ceil(cfg.healthy_fallback_fraction * static_cast<double>(info.length)));
            if (s.cycle <= fallback) out.push_back(s);
        }
    }
    return out;
}

void save_normalization(const std::filesystem::path& path, const NormalizationModel& model) {
    TextContainer c;
    c.kind = "norm";
    c.add_array("centroids", model.centroids);
    c.add_vector("settings_mean", model.settings_mean);
    c.add_vector("settings_std", model.settings_std);
    c.add_array("mean", model.mean);
    c.add_array("stdv", model.stdv);
    std::vector<double> kept(model.kept.begin(), model.kept.end());
    c.add_vector("kept", kept);
    c.add_scalar("std_floor", model.std_floor);
    save_container(path, c);
}

NormalizationModel load_normalization(const std::filesystem::path& path) {
    TextContainer c = load_container(path, "norm");
    NormalizationModel model;
    model.centroids = c.require_array("centroids");
    model.settings_mean = c.require_vector("settings_mean");
    model.settings_std = c.require_vector("settings_std");
    model.mean = c.require_array("mean");
    model.stdv = c.require_array("stdv");
    for (double v : c.require_vector("kept")) model.kept.push_back(static_cast<int>(v));
    model.std_floor = c.require_scalar("std_floor");
    return model;
}

std::string normalized_csv(const cmapss::Trajectory& traj, const NormalizationModel& model) {
    Matrix norm = normalize(traj, model);
    std::string out = "unit,cycle";
    for (int idx : model.kept) out += ",s" + std::to_string(idx + 1);
    out += '\n';
    for (std::size_t r = 0; r < norm.rows; ++r) {
        out += std::to_string(traj.unit_id) + "," + std::to_string(r + 1);
        for (std::size_t c = 0; c < norm.cols; ++c) {
            out += "," + textio::format_double(norm.at(r, c));
        }
        out += '\n';
    }
    return out;
}

}  // namespace lhi::preprocess
