#include "lhi/rapp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "lhi/error.hpp"
#include "lhi/parallel.hpp"
#include "lhi/textio.hpp"

namespace lhi::rapp {
namespace {

double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

PathwayDiff diff_from_pathways(const std::vector<std::vector<double>>& hx,
                               const std::vector<std::vector<double>>& hxhat,
                               PathwayScope scope) {
    PathwayDiff diff;
    if (scope == PathwayScope::latent_only) {
        const auto& a = hx.back();
        const auto& b = hxhat.back();
        diff.d.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) diff.d[i] = a[i] - b[i];
        return diff;
    }
    std::size_t total = 0;
    for (const auto& layer : hx) total += layer.size();
    diff.d.reserve(total);
    for (std::size_t li = 0; li < hx.size(); ++li) {
        const auto& a = hx[li];
        const auto& b = hxhat[li];
        if (a.size() != b.size()) throw ShapeError("pathway_diff: layer size mismatch");
        for (std::size_t i = 0; i < a.size(); ++i) diff.d.push_back(a[i] - b[i]);
    }
    return diff;
}

template <class Model>
PathwayDiff pathway_diff_impl(const Model& model, std::span<const double> x, PathwayScope scope) {
    std::vector<double> xhat = models::reconstruct_det(model, x);
    auto hx = models::encode_pathway(model, x);
    auto hxhat = models::encode_pathway(model, xhat);
    return diff_from_pathways(hx, hxhat, scope);
}

template <class Model>
RappSeries extract_impl(const Model& model, std::span<const preprocess::WindowSample> samples,
                        const NapCalibration& encoder_cal, const NapCalibration& latent_cal,
                        int threads) {
    if (encoder_cal.scope != PathwayScope::encoder_all_hidden ||
        latent_cal.scope != PathwayScope::latent_only) {
        throw UsageError("extract_rapp_series: calibrations passed in the wrong scope order");
    }
    RappSeries series;
    const std::size_t n = samples.size();
    series.rec.resize(n);
    series.sap.resize(n);
    series.nap.resize(n);
    series.sap_ls.resize(n);
    series.nap_ls.resize(n);
    parallel_for(n, threads, [&](std::size_t i) {
        const auto& x = samples[i].x;
        std::vector<double> xhat = models::reconstruct_det(model, x);
        auto hx = models::encode_pathway(model, x);
        auto hxhat = models::encode_pathway(model, xhat);
        PathwayDiff enc = diff_from_pathways(hx, hxhat, PathwayScope::encoder_all_hidden);
        PathwayDiff lat = diff_from_pathways(hx, hxhat, PathwayScope::latent_only);
        series.rec[i] = eps_rec(x, xhat);
        series.sap[i] = eps_sap(enc);
        series.nap[i] = eps_nap(enc, encoder_cal);
        series.sap_ls[i] = eps_sap(lat);
        series.nap_ls[i] = eps_nap(lat, latent_cal);
    });
    return series;
}

}  // namespace

const char* scope_name(PathwayScope scope) {
    return scope == PathwayScope::encoder_all_hidden ? "encoder" : "latent";
}

PathwayScope scope_from_name(const std::string& name) {
    if (name == "encoder") return PathwayScope::encoder_all_hidden;
    if (name == "latent") return PathwayScope::latent_only;
    throw CheckpointError("unknown pathway scope '" + name + "'");
}

double eps_rec(std::span<const double> x, std::span<const double> xhat) {
    if (x.size() != xhat.size()) throw ShapeError("eps_rec: vector size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - xhat[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

PathwayDiff pathway_diff(const models::AEModel& model, std::span<const double> x,
                         PathwayScope scope) {
    return pathway_diff_impl(model, x, scope);
}

PathwayDiff pathway_diff(const models::VAEModel& model, std::span<const double> x,
                         PathwayScope scope) {
    return pathway_diff_impl(model, x, scope);
}

double eps_sap(const PathwayDiff& d) { return norm2(d.d); }

NapCalibration calibrate_nap(const std::vector<PathwayDiff>& diffs, PathwayScope scope) {
    if (diffs.size() < 2) {
        throw UsageError("calibrate_nap: need at least 2 pathway diffs, got " +
                         std::to_string(diffs.size()));
    }
    const std::size_t n = diffs.size();
    const std::size_t dim = diffs.front().d.size();
    if (dim == 0) throw UsageError("calibrate_nap: pathway diffs are empty");
    for (const auto& diff : diffs) {
        if (diff.d.size() != dim) throw ShapeError("calibrate_nap: inconsistent diff dimensions");
    }

    NapCalibration cal;
    cal.scope = scope;
    cal.rows = n;
    cal.mu_x.assign(dim, 0.0);
    for (const auto& diff : diffs) {
        for (std::size_t j = 0; j < dim; ++j) cal.mu_x[j] += diff.d[j];
    }
    for (double& m : cal.mu_x) m /= static_cast<double>(n);

    Eigen::MatrixXd centered(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                diffs[i].d[j] - cal.mu_x[j];
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const auto& v = svd.matrixV();
    const std::size_t m = static_cast<std::size_t>(sv.size());
    cal.sigma.resize(m);
    for (std::size_t j = 0; j < m; ++j) cal.sigma[j] = sv(static_cast<Eigen::Index>(j));
    cal.v = Matrix(dim, m);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            cal.v.at(i, j) = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    const double sigma_max = m > 0 ? cal.sigma.front() : 0.0;
    const double tol = 1e-10 * sigma_max;
    cal.rank_kept = 0;
    for (double s : cal.sigma) {
        if (s > tol && s > 0.0) ++cal.rank_kept;
    }
    return cal;
}

double eps_nap(const PathwayDiff& d, const NapCalibration& cal) {
    if (d.d.size() != cal.dim()) {
        throw ShapeError("eps_nap: diff dimension " + std::to_string(d.d.size()) +
                         " does not match calibration dimension " + std::to_string(cal.dim()));
    }
    if (cal.rank_kept == 0) return 0.0;
    const double scale = std::sqrt(static_cast<double>(cal.rows - 1));
    double acc = 0.0;
    for (std::size_t j = 0; j < cal.rank_kept; ++j) {
        double proj = 0.0;
        for (std::size_t i = 0; i < cal.dim(); ++i) {
            proj += (d.d[i] - cal.mu_x[i]) * cal.v.at(i, j);
        }
        const double w = proj * scale / cal.sigma[j];
        acc += w * w;
    }
    return std::sqrt(acc);
}

RappSeries extract_rapp_series(const models::AEModel& model,
                               std::span<const preprocess::WindowSample> samples,
                               const NapCalibration& encoder_cal, const NapCalibration& latent_cal,
                               int threads) {
    return extract_impl(model, samples, encoder_cal, latent_cal, threads);
}

RappSeries extract_rapp_series(const models::VAEModel& model,
                               std::span<const preprocess::WindowSample> samples,
                               const NapCalibration& encoder_cal, const NapCalibration& latent_cal,
                               int threads) {
    return extract_impl(model, samples, encoder_cal, latent_cal, threads);
}

void append_calibration(TextContainer& c, const NapCalibration& cal, const std::string& prefix) {
    c.add_meta(prefix + ".scope", scope_name(cal.scope));
    c.add_meta(prefix + ".rows", std::to_string(cal.rows));
    c.add_meta(prefix + ".rank", std::to_string(cal.rank_kept));
    c.add_vector(prefix + ".mu", cal.mu_x);
    c.add_array(prefix + ".v", cal.v);
    c.add_vector(prefix + ".sigma", cal.sigma);
}

NapCalibration read_calibration(const TextContainer& c, const std::string& prefix) {
    NapCalibration cal;
    cal.scope = scope_from_name(c.require_meta(prefix + ".scope"));
    try {
        cal.rows = std::stoul(c.require_meta(prefix + ".rows"));
        cal.rank_kept = std::stoul(c.require_meta(prefix + ".rank"));
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw CheckpointError("bad calibration counts under '" + prefix + "'");
    }
    cal.mu_x = c.require_vector(prefix + ".mu");
    cal.v = c.require_array(prefix + ".v");
    cal.sigma = c.require_vector(prefix + ".sigma");
    if (cal.v.rows != cal.mu_x.size() || cal.v.cols != cal.sigma.size() ||
        cal.rank_kept > cal.sigma.size() || cal.rows < 2) {
        throw CheckpointError("inconsistent calibration section '" + prefix + "'");
    }
    return cal;
}

bool has_calibration(const TextContainer& c, const std::string& prefix) {
    return c.find_meta(prefix + ".scope").has_value() && c.has_array(prefix + ".mu");
}

}  // namespace lhi::rapp
