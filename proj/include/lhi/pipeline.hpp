#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lhi/models.hpp"
#include "lhi/preprocess.hpp"
#include "lhi/rul_bench.hpp"
#include "lhi/uq.hpp"

namespace lhi::pipeline {

// Everything a run needs, resolvable from a flat key=value config file plus
// command-line overrides.
struct RunConfig {
    std::filesystem::path data_dir = "data";
    std::string dataset = "FD001";
    models::ModelKind model = models::ModelKind::ae;
    models::TrainConfig train;
    uq::UQConfig uq;
    preprocess::LabelConfig labels;
    bench::ForestParams forest;
    int window = 1;
    int lag = 1;
    int conditions = 0;  // 0 = use the dataset's published condition count
    std::string groups = "default";
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::filesystem::path output_dir = "out";
    int threads = 0;  // 0 = machine parallelism
    bool annotate_sota = false;

    int effective_threads() const;
};

// key=value lines; blank lines and #-comments are skipped.
std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::filesystem::path& path);

// Same syntax as one config line; unknown keys are usage errors.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Artifact locations under output_dir, shared by the commands and the tests.
struct ArtifactPaths {
    std::filesystem::path norm_model;
    std::filesystem::path prepare_summary;
    std::filesystem::path checkpoint;
    std::filesystem::path loss_curve;
    std::filesystem::path hi_train;
    std::filesystem::path hi_test;
    std::filesystem::path hi_unit_dir;
    std::filesystem::path bench_report;
    std::filesystem::path bench_units;
    std::filesystem::path metric_table;
    std::filesystem::path bench_summary;
};
ArtifactPaths artifact_paths(const RunConfig& cfg);

// Each command returns a one-line summary for stdout and writes its artifacts
// atomically; reruns with the same config are byte-identical.
std::string cmd_prepare(const RunConfig& cfg);
std::string cmd_train(const RunConfig& cfg);
std::string cmd_extract(const RunConfig& cfg);
std::string cmd_bench(const RunConfig& cfg);

// The named ablation groups for this config ("default", "singles", preset or
// channel names, comma-separated).
std::vector<bench::HIGroup> resolve_groups(const std::string& spec, bool has_sigma_a);

}  // namespace lhi::pipeline
