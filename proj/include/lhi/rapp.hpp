#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lhi/container.hpp"
#include "lhi/matrix.hpp"
#include "lhi/models.hpp"
#include "lhi/preprocess.hpp"

namespace lhi::rapp {

// Which hidden activations enter the pathway difference: every encoder layer
// (including the latent) or the latent vector alone.
enum class PathwayScope { encoder_all_hidden, latent_only };

const char* scope_name(PathwayScope scope);
PathwayScope scope_from_name(const std::string& name);

struct PathwayDiff {
    std::vector<double> d;
};

// Whitening statistics of healthy pathway differences: column mean, right
// singular vectors and singular values of the centered diff matrix.
struct NapCalibration {
    PathwayScope scope = PathwayScope::encoder_all_hidden;
    std::vector<double> mu_x;  // dim
    Matrix v;                  // dim x m, columns are right singular vectors
    std::vector<double> sigma; // m, non-increasing, >= 0
    std::size_t rows = 0;      // calibration sample count n
    std::size_t rank_kept = 0; // components with sigma_j > 1e-10 * sigma_max

    std::size_t dim() const { return mu_x.size(); }
};

// Euclidean reconstruction error.
double eps_rec(std::span<const double> x, std::span<const double> xhat);

// Runs x and its deterministic reconstruction through the encoder and
// concatenates the per-layer activation differences in scope.
PathwayDiff pathway_diff(const models::AEModel& model, std::span<const double> x,
                         PathwayScope scope);
PathwayDiff pathway_diff(const models::VAEModel& model, std::span<const double> x,
                         PathwayScope scope);

double eps_sap(const PathwayDiff& d);

// SVD of the centered diff matrix; components below 1e-10 * sigma_max are
// dropped so near-null directions cannot blow up the score.
NapCalibration calibrate_nap(const std::vector<PathwayDiff>& diffs, PathwayScope scope);

// Mahalanobis-style norm: project (d - mu_X) on the retained singular
// directions and divide coordinate j by sigma_j / sqrt(n-1), which gives the
// whitened coordinates unit sample variance over the calibration set.
double eps_nap(const PathwayDiff& d, const NapCalibration& cal);

struct RappSeries {
    std::vector<double> rec, sap, nap, sap_ls, nap_ls;
};

RappSeries extract_rapp_series(const models::AEModel& model,
                               std::span<const preprocess::WindowSample> samples,
                               const NapCalibration& encoder_cal, const NapCalibration& latent_cal,
                               int threads = 1);
RappSeries extract_rapp_series(const models::VAEModel& model,
                               std::span<const preprocess::WindowSample> samples,
                               const NapCalibration& encoder_cal, const NapCalibration& latent_cal,
                               int threads = 1);

// Calibration sections inside a checkpoint container ("nap_enc" / "nap_lat").
void append_calibration(TextContainer& c, const NapCalibration& cal, const std::string& prefix);
NapCalibration read_calibration(const TextContainer& c, const std::string& prefix);
bool has_calibration(const TextContainer& c, const std::string& prefix);

}  // namespace lhi::rapp
