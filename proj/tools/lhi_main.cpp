// Command-line front end: prepare / train / extract / bench over a flat
// key=value config with per-flag overrides.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lhi/error.hpp"
#include "lhi/pipeline.hpp"

namespace {

using lhi::pipeline::RunConfig;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string dataset;
    std::string model;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    bool annotate = false;

    CLI::Option* config_opt = nullptr;
    CLI::Option* dataset_opt = nullptr;
    CLI::Option* model_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* sub, CommonOpts& o) {
    o.config_opt = sub->add_option("--config", o.config_path, "key=value config file");
    sub->add_option("--set", o.sets, "override one config entry, KEY=VALUE (repeatable)");
    o.dataset_opt = sub->add_option("--dataset", o.dataset, "dataset name (FD001..FD004)");
    o.model_opt = sub->add_option("--model", o.model, "model kind: ae or vae");
    o.seed_opt = sub->add_option("--seed", o.seed, "master seed (training and UQ)");
    o.threads_opt = sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    o.out_opt = sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--annotate-sota", o.annotate,
                  "include the published reference RMSE in benchmark reports");
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

// Precedence: config file, then --set pairs in order, then dedicated flags.
RunConfig build_config(const CommonOpts& o) {
    RunConfig cfg;
    if (o.config_opt->count() > 0) {
        for (const auto& [key, value] : lhi::pipeline::parse_config_file(o.config_path)) {
            lhi::pipeline::apply_override(cfg, key, value);
        }
    }
    for (const std::string& kv : o.sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            throw lhi::UsageError("--set expects KEY=VALUE, got '" + kv + "'");
        }
        lhi::pipeline::apply_override(cfg, trimmed(kv.substr(0, eq)), trimmed(kv.substr(eq + 1)));
    }
    if (o.dataset_opt->count() > 0) lhi::pipeline::apply_override(cfg, "dataset", o.dataset);
    if (o.model_opt->count() > 0) lhi::pipeline::apply_override(cfg, "model", o.model);
    if (o.seed_opt->count() > 0) {
        cfg.train.seed = o.seed;
        cfg.uq.seed = o.seed;
    }
    if (o.threads_opt->count() > 0) cfg.threads = o.threads;
    if (o.out_opt->count() > 0) cfg.output_dir = o.out;
    if (o.annotate) cfg.annotate_sota = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"latent-space health indicators for turbofan RUL prognostics"};
    app.require_subcommand(1);

    CommonOpts prepare_opts, train_opts, extract_opts, bench_opts;
    CLI::App* prepare =
        app.add_subcommand("prepare", "fit per-condition normalization statistics");
    CLI::App* train =
        app.add_subcommand("train", "train the model and calibrate the anomaly scores");
    CLI::App* extract = app.add_subcommand("extract", "compute health-indicator series");
    CLI::App* bench = app.add_subcommand("bench", "random-forest RUL benchmark and HI metrics");
    add_common(prepare, prepare_opts);
    add_common(train, train_opts);
    add_common(extract, extract_opts);
    add_common(bench, bench_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(lhi::ExitCode::usage);
    }

    try {
        std::string message;
        if (app.got_subcommand(prepare)) {
            message = lhi::pipeline::cmd_prepare(build_config(prepare_opts));
        } else if (app.got_subcommand(train)) {
            message = lhi::pipeline::cmd_train(build_config(train_opts));
        } else if (app.got_subcommand(extract)) {
            message = lhi::pipeline::cmd_extract(build_config(extract_opts));
        } else {
            message = lhi::pipeline::cmd_bench(build_config(bench_opts));
        }
        std::cout << message << "\n";
        return static_cast<int>(lhi::ExitCode::ok);
    } catch (const lhi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(lhi::ExitCode::io);
    }
}
