#include "lhi/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "lhi/cmapss.hpp"
#include "lhi/error.hpp"
#include "lhi/hi_eval.hpp"
#include "lhi/parallel.hpp"
#include "lhi/rapp.hpp"
#include "lhi/textio.hpp"

namespace lhi::pipeline {
namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

long long to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': expected a non-negative integer, got '" +
                         value + "'");
    }
}

double to_real(const std::string& key, const std::string& value) {
    try {
        return textio::parse_double(value);
    } catch (const Error&) {
        throw UsageError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "on") return true;
    if (value == "0" || value == "false" || value == "off") return false;
    throw UsageError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<std::uint64_t> to_u64_list(const std::string& key, const std::string& value) {
    std::vector<std::uint64_t> out;
    for (const std::string& part : split_on(value, ',')) {
        const std::string token = trim(part);
        if (token.empty()) continue;
        out.push_back(to_u64(key, token));
    }
    if (out.empty()) throw UsageError("config key '" + key + "': empty list");
    return out;
}

std::string unit_file_name(const char* side, int unit_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_unit_%03d.csv", side, unit_id);
    return buf;
}

preprocess::NormalizationModel load_norm_for(const RunConfig& cfg) {
    try {
        return preprocess::load_normalization(artifact_paths(cfg).norm_model);
    } catch (const IoError& e) {
        throw IoError(std::string(e.what()) + " (run the 'prepare' command first)");
    }
}

TextContainer load_checkpoint_for(const RunConfig& cfg) {
    try {
        return models::load_checkpoint(artifact_paths(cfg).checkpoint);
    } catch (const IoError& e) {
        throw IoError(std::string(e.what()) + " (run the 'train' command first)");
    }
}

std::vector<preprocess::WindowSample> samples_for_unit(const cmapss::Trajectory& traj,
                                                       const preprocess::NormalizationModel& norm,
                                                       const RunConfig& cfg, cmapss::TrajKind kind,
                                                       const cmapss::DatasetSplit& split) {
    std::optional<double> rul_at_end;
    if (kind == cmapss::TrajKind::test) {
        rul_at_end = split.test_rul.at(traj.unit_id);
    }
    return preprocess::make_samples(traj, norm, cfg.labels, cfg.window, kind, rul_at_end);
}

// Channel layout of an extraction: sigma_a only exists for the VAE.
std::vector<hi::Channel> channel_layout(models::ModelKind kind) {
    using hi::Channel;
    if (kind == models::ModelKind::vae) {
        return {Channel::rec,    Channel::sap,     Channel::nap,    Channel::sap_ls,
                Channel::nap_ls, Channel::sigma_a, Channel::sigma_e};
    }
    return {Channel::rec,    Channel::sap,    Channel::nap,
            Channel::sap_ls, Channel::nap_ls, Channel::sigma_e};
}

std::string channel_header(std::span<const hi::Channel> channels) {
    std::string header;
    for (hi::Channel ch : channels) {
        header += ',';
        header += hi::channel_name(ch);
    }
    return header;
}

struct HIBundle {
    std::vector<hi::Channel> channels;
    std::vector<bench::UnitHIData> units;  // rul_clipped filled by the caller
};

// Reads a combined HI CSV (unit,cycle,channels...) back into per-unit blocks.
HIBundle read_hi_csv(const fs::path& path) {
    const std::string text = textio::read_file(path);
    HIBundle bundle;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bench::UnitHIData* current = nullptr;
    std::vector<std::vector<double>> rows;
    int current_unit = 0;

    auto flush_unit = [&]() {
        if (current == nullptr) return;
        current->values = Matrix(rows.size(), bundle.channels.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::copy(rows[r].begin(), rows[r].end(), current->values.row(r).begin());
        }
        rows.clear();
        current = nullptr;
    };

    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = trim(std::string_view(text).substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_on(line, ',');
        if (line_no == 1) {
            if (fields.size() < 3 || fields[0] != "unit" || fields[1] != "cycle") {
                throw ParseError("HI file '" + path.string() + "': unexpected header", line_no);
            }
            for (std::size_t i = 2; i < fields.size(); ++i) {
                auto ch = hi::channel_from_name(fields[i]);
                if (!ch) {
                    throw ParseError("HI file '" + path.string() + "': unknown channel '" +
                                     fields[i] + "'", line_no);
                }
                bundle.channels.push_back(*ch);
            }
            continue;
        }
        if (fields.size() != bundle.channels.size() + 2) {
            throw ParseError("HI file '" + path.string() + "': wrong column count", line_no);
        }
        const int unit = static_cast<int>(to_int("unit", fields[0]));
        const int cycle = static_cast<int>(to_int("cycle", fields[1]));
        if (current == nullptr || unit != current_unit) {
            flush_unit();
            bundle.units.push_back({});
            current = &bundle.units.back();
            current->unit_id = unit;
            current->channels = bundle.channels;
            current_unit = unit;
        }
        if (cycle != static_cast<int>(rows.size()) + 1) {
            throw ParseError("HI file '" + path.string() + "': cycles of unit " +
                             std::to_string(unit) + " are not contiguous", line_no);
        }
        std::vector<double> row(bundle.channels.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = textio::parse_double(fields[i + 2], line_no);
        }
        rows.push_back(std::move(row));
    }
    flush_unit();
    return bundle;
}

void attach_targets(HIBundle& bundle, const cmapss::DatasetSplit& split, bool is_test,
                    double r_early) {
    const std::vector<cmapss::Trajectory>& side = is_test ? split.test : split.train;
    std::map<int, const cmapss::Trajectory*> by_id;
    for (const auto& traj : side) by_id[traj.unit_id] = &traj;
    for (bench::UnitHIData& unit : bundle.units) {
        auto it = by_id.find(unit.unit_id);
        if (it == by_id.end()) {
            throw IntegrityError("HI series reference unit " + std::to_string(unit.unit_id) +
                                 " which the dataset lacks");
        }
        const std::size_t len = unit.values.rows;
        if (it->second->length() != len) {
            throw IntegrityError("HI series of unit " + std::to_string(unit.unit_id) +
                                 " do not match the trajectory length");
        }
        double base = 0.0;
        if (is_test) base = split.test_rul.at(unit.unit_id);
        unit.rul_clipped.resize(len);
        for (std::size_t r = 0; r < len; ++r) {
            const double rul_true = base + static_cast<double>(len - 1 - r);
            unit.rul_clipped[r] = std::min(r_early, rul_true);
        }
    }
}

int checkpoint_window(const TextContainer& c) {
    const std::string text = c.require_meta("window");
    try {
        return std::stoi(text);
    } catch (const std::exception&) {
        throw CheckpointError("bad 'window' entry in checkpoint: '" + text + "'");
    }
}

}  // namespace

int RunConfig::effective_threads() const {
    return threads > 0 ? threads : default_thread_count();
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const fs::path& path) {
    const std::string text = textio::read_file(path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line(text, pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config file '" + path.string() + "' line " +
                             std::to_string(line_no) + ": expected key=value");
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        if (eol == text.size()) break;
    }
    return entries;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "data_dir") cfg.data_dir = value;
    else if (key == "dataset") cfg.dataset = value;
    else if (key == "model") cfg.model = models::kind_from_name(value);
    else if (key == "output_dir" || key == "out") cfg.output_dir = value;
    else if (key == "window") cfg.window = static_cast<int>(to_int(key, value));
    else if (key == "lag") cfg.lag = static_cast<int>(to_int(key, value));
    else if (key == "conditions") cfg.conditions = static_cast<int>(to_int(key, value));
    else if (key == "threads") cfg.threads = static_cast<int>(to_int(key, value));
    else if (key == "groups") cfg.groups = value;
    else if (key == "seeds") cfg.seeds = to_u64_list(key, value);
    else if (key == "annotate_sota") cfg.annotate_sota = to_bool(key, value);
    else if (key == "seed") {
        cfg.train.seed = to_u64(key, value);
        cfg.uq.seed = cfg.train.seed;
    } else if (key == "epochs") cfg.train.epochs = static_cast<int>(to_int(key, value));
    else if (key == "batch_size") cfg.train.batch_size = static_cast<int>(to_int(key, value));
    else if (key == "learning_rate") cfg.train.learning_rate = to_real(key, value);
    else if (key == "dropout_rate") cfg.train.dropout_rate = to_real(key, value);
    else if (key == "train_seed") cfg.train.seed = to_u64(key, value);
    else if (key == "beta") cfg.train.beta = to_real(key, value);
    else if (key == "latent_dim") cfg.train.latent_dim = static_cast<std::size_t>(to_int(key, value));
    else if (key == "hidden") {
        cfg.train.hidden.clear();
        for (const std::string& part : split_on(value, ',')) {
            const std::string token = trim(part);
            if (token.empty()) continue;
            cfg.train.hidden.push_back(static_cast<std::size_t>(to_int(key, token)));
        }
    } else if (key == "uq_passes") cfg.uq.n_passes = static_cast<int>(to_int(key, value));
    else if (key == "uq_dropout" || key == "uq_dropout_rate") cfg.uq.dropout_rate = to_real(key, value);
    else if (key == "uq_seed") cfg.uq.seed = to_u64(key, value);
    else if (key == "r_early") cfg.labels.r_early = to_real(key, value);
    else if (key == "healthy_threshold") cfg.labels.healthy_rul_threshold = to_real(key, value);
    else if (key == "healthy_fraction") cfg.labels.healthy_fallback_fraction = to_real(key, value);
    else if (key == "n_trees") cfg.forest.n_trees = static_cast<int>(to_int(key, value));
    else if (key == "max_depth") cfg.forest.max_depth = static_cast<int>(to_int(key, value));
    else if (key == "min_samples_leaf") cfg.forest.min_samples_leaf = static_cast<int>(to_int(key, value));
    else if (key == "feature_subsample") cfg.forest.feature_subsample = to_real(key, value);
    else if (key == "bootstrap") cfg.forest.bootstrap = to_bool(key, value);
    else throw UsageError("unknown config key '" + key + "'");
}

ArtifactPaths artifact_paths(const RunConfig& cfg) {
    const std::string ds = cfg.dataset;
    const std::string tag = ds + "_" + models::kind_name(cfg.model);
    ArtifactPaths p;
    p.norm_model = cfg.output_dir / (ds + "_norm.txt");
    p.prepare_summary = cfg.output_dir / (ds + "_prepare.csv");
    p.checkpoint = cfg.output_dir / (tag + "_model.txt");
    p.loss_curve = cfg.output_dir / (tag + "_loss.csv");
    p.hi_train = cfg.output_dir / (tag + "_hi_train.csv");
    p.hi_test = cfg.output_dir / (tag + "_hi_test.csv");
    p.hi_unit_dir = cfg.output_dir / "hi_units" / tag;
    p.bench_report = cfg.output_dir / (tag + "_bench.csv");
    p.bench_units = cfg.output_dir / (tag + "_bench_units.csv");
    p.metric_table = cfg.output_dir / (tag + "_metrics.csv");
    p.bench_summary = cfg.output_dir / (tag + "_bench_summary.txt");
    return p;
}

std::vector<bench::HIGroup> resolve_groups(const std::string& spec, bool has_sigma_a) {
    std::vector<bench::HIGroup> groups;
    std::set<std::string> seen;
    auto add = [&](bench::HIGroup group) {
        if (seen.insert(group.name).second) groups.push_back(std::move(group));
    };
    const std::vector<bench::HIGroup> defaults = bench::default_groups(has_sigma_a);
    std::vector<hi::Channel> channels;
    for (hi::Channel ch : hi::kAllChannels) {
        if (ch == hi::Channel::sigma_a && !has_sigma_a) continue;
        channels.push_back(ch);
    }
    for (const std::string& part : split_on(spec, ',')) {
        const std::string token = trim(part);
        if (token.empty()) continue;
        if (token == "default") {
            for (const auto& g : defaults) add(g);
            continue;
        }
        if (token == "singles") {
            for (auto& g : bench::single_channel_groups(channels)) add(std::move(g));
            continue;
        }
        bool matched = false;
        for (const auto& g : defaults) {
            if (g.name == token) {
                add(g);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (auto ch = hi::channel_from_name(token)) {
            if (*ch == hi::Channel::sigma_a && !has_sigma_a) {
                throw UsageError("group 'sigma_a' requires a VAE model");
            }
            add({token, {*ch}});
            continue;
        }
        throw UsageError("unknown group '" + token + "'");
    }
    if (groups.empty()) throw UsageError("no ablation groups selected");
    return groups;
}

std::string cmd_prepare(const RunConfig& cfg) {
    const ArtifactPaths paths = artifact_paths(cfg);
    fs::create_directories(cfg.output_dir);
    const cmapss::DatasetSplit split = cmapss::load_split(cfg.data_dir, cfg.dataset);

    const auto canonical = cmapss::canonical_counts(cfg.dataset);
    int k = cfg.conditions;
    if (k <= 0) k = canonical ? canonical->conditions : 1;
    const preprocess::NormalizationModel norm =
        preprocess::fit_normalization(split.train, k, cfg.train.seed);
    preprocess::save_normalization(paths.norm_model, norm);

    std::string csv = "field,value\n";
    auto put = [&csv](const std::string& field, const std::string& value) {
        csv += textio::join_csv({field, value});
        csv += '\n';
    };
    put("dataset", cfg.dataset);
    put("train_units", std::to_string(split.train.size()));
    put("test_units", std::to_string(split.test.size()));
    put("expected_train_units", canonical ? std::to_string(canonical->train_units) : "");
    put("expected_test_units", canonical ? std::to_string(canonical->test_units) : "");
    put("conditions", std::to_string(k));
    put("kept_sensors", std::to_string(norm.kept.size()));
    std::string kept;
    for (std::size_t i = 0; i < norm.kept.size(); ++i) {
        if (i > 0) kept += ';';
        kept += "s" + std::to_string(norm.kept[i] + 1);
    }
    put("kept_sensor_list", kept);
    put("window", std::to_string(cfg.window));
    put("input_dim", std::to_string(static_cast<std::size_t>(cfg.window) * norm.kept.size()));
    put("r_early", textio::format_double(cfg.labels.r_early));
    textio::write_file_atomic(paths.prepare_summary, csv);

    return "prepared " + cfg.dataset + ": " + std::to_string(split.train.size()) + " train / " +
           std::to_string(split.test.size()) + " test units, " + std::to_string(k) +
           " condition(s), " + std::to_string(norm.kept.size()) + " sensors kept";
}

std::string cmd_train(const RunConfig& cfg) {
    const ArtifactPaths paths = artifact_paths(cfg);
    fs::create_directories(cfg.output_dir);
    const cmapss::DatasetSplit split = cmapss::load_split(cfg.data_dir, cfg.dataset);
    const preprocess::NormalizationModel norm = load_norm_for(cfg);

    std::vector<preprocess::WindowSample> all;
    for (const auto& traj : split.train) {
        auto samples = samples_for_unit(traj, norm, cfg, cmapss::TrajKind::train, split);
        all.insert(all.end(), std::make_move_iterator(samples.begin()),
                   std::make_move_iterator(samples.end()));
    }
    std::vector<preprocess::WindowSample> healthy = preprocess::healthy_subset(all, cfg.labels);
    std::vector<std::vector<double>> xs;
    xs.reserve(healthy.size());
    for (auto& sample : healthy) xs.push_back(std::move(sample.x));

    const std::size_t input_dim = static_cast<std::size_t>(cfg.window) * norm.sensor_count();
    models::LossCurve curve;
    TextContainer container;
    if (cfg.model == models::ModelKind::ae) {
        models::AEModel model = models::make_ae(input_dim, cfg.train);
        curve = models::train_ae(model, xs, cfg.train);
        std::vector<rapp::PathwayDiff> enc_diffs, lat_diffs;
        enc_diffs.reserve(xs.size());
        lat_diffs.reserve(xs.size());
        for (const auto& x : xs) {
            enc_diffs.push_back(rapp::pathway_diff(model, x, rapp::PathwayScope::encoder_all_hidden));
            lat_diffs.push_back(rapp::pathway_diff(model, x, rapp::PathwayScope::latent_only));
        }
        container = models::to_container(model);
        rapp::append_calibration(
            container, rapp::calibrate_nap(enc_diffs, rapp::PathwayScope::encoder_all_hidden),
            "nap_enc");
        rapp::append_calibration(container,
                                 rapp::calibrate_nap(lat_diffs, rapp::PathwayScope::latent_only),
                                 "nap_lat");
    } else {
        models::VAEModel model = models::make_vae(input_dim, cfg.train);
        curve = models::train_vae(model, xs, cfg.train);
        std::vector<rapp::PathwayDiff> enc_diffs, lat_diffs;
        enc_diffs.reserve(xs.size());
        lat_diffs.reserve(xs.size());
        for (const auto& x : xs) {
            enc_diffs.push_back(rapp::pathway_diff(model, x, rapp::PathwayScope::encoder_all_hidden));
            lat_diffs.push_back(rapp::pathway_diff(model, x, rapp::PathwayScope::latent_only));
        }
        container = models::to_container(model);
        rapp::append_calibration(
            container, rapp::calibrate_nap(enc_diffs, rapp::PathwayScope::encoder_all_hidden),
            "nap_enc");
        rapp::append_calibration(container,
                                 rapp::calibrate_nap(lat_diffs, rapp::PathwayScope::latent_only),
                                 "nap_lat");
    }
    container.add_meta("dataset", cfg.dataset);
    container.add_meta("window", std::to_string(cfg.window));
    models::save_checkpoint(paths.checkpoint, container);

    std::string csv;
    if (cfg.model == models::ModelKind::vae) {
        csv = "epoch,loss,recon,kl\n";
        for (std::size_t e = 0; e < curve.size(); ++e) {
            csv += textio::join_csv({std::to_string(e + 1), textio::format_double(curve[e].loss),
                                     textio::format_double(curve[e].recon),
                                     textio::format_double(curve[e].kl)});
            csv += '\n';
        }
    } else {
        csv = "epoch,loss\n";
        for (std::size_t e = 0; e < curve.size(); ++e) {
            csv += textio::join_csv({std::to_string(e + 1), textio::format_double(curve[e].loss)});
            csv += '\n';
        }
    }
    textio::write_file_atomic(paths.loss_curve, csv);

    std::string msg = "trained " + models::kind_name(cfg.model) + " on " + cfg.dataset + ": " +
                      std::to_string(xs.size()) + " healthy windows, " +
                      std::to_string(curve.size()) + " epochs";
    if (!curve.empty()) {
        msg += ", final loss " + textio::format_double(curve.back().loss);
    }
    return msg;
}

std::string cmd_extract(const RunConfig& cfg) {
    const ArtifactPaths paths = artifact_paths(cfg);
    const cmapss::DatasetSplit split = cmapss::load_split(cfg.data_dir, cfg.dataset);
    const preprocess::NormalizationModel norm = load_norm_for(cfg);
    const TextContainer container = load_checkpoint_for(cfg);

    if (models::checkpoint_kind(container) != cfg.model) {
        throw CheckpointError("checkpoint '" + paths.checkpoint.string() + "' holds kind '" +
                              container.kind + "' but the run requests '" +
                              models::kind_name(cfg.model) + "'");
    }
    if (checkpoint_window(container) != cfg.window) {
        throw CheckpointError("checkpoint was trained with window " +
                              container.require_meta("window") + ", run requests " +
                              std::to_string(cfg.window));
    }
    if (auto ds = container.find_meta("dataset"); ds && *ds != cfg.dataset) {
        logging::warn("checkpoint was trained on " + *ds + " but is applied to " + cfg.dataset);
    }
    const rapp::NapCalibration cal_enc = rapp::read_calibration(container, "nap_enc");
    const rapp::NapCalibration cal_lat = rapp::read_calibration(container, "nap_lat");

    models::AEModel ae;
    models::VAEModel vae;
    const bool is_vae = cfg.model == models::ModelKind::vae;
    if (is_vae) vae = models::vae_from_container(container);
    else ae = models::ae_from_container(container);

    const std::vector<hi::Channel> channels = channel_layout(cfg.model);
    fs::create_directories(paths.hi_unit_dir);
    const int threads = cfg.effective_threads();

    auto run_side = [&](const std::vector<cmapss::Trajectory>& side, cmapss::TrajKind kind,
                        const char* side_name, const fs::path& combined_path) {
        std::string combined = "unit,cycle" + channel_header(channels) + "\n";
        for (const auto& traj : side) {
            const auto samples = samples_for_unit(traj, norm, cfg, kind, split);
            rapp::RappSeries rs;
            uq::UQSeries us;
            if (is_vae) {
                rs = rapp::extract_rapp_series(vae, samples, cal_enc, cal_lat, threads);
                us = uq::extract_uq_series(vae, samples, cfg.uq, threads);
            } else {
                rs = rapp::extract_rapp_series(ae, samples, cal_enc, cal_lat, threads);
                us = uq::extract_uq_series(ae, samples, cfg.uq, threads);
            }
            std::string unit_csv = "cycle" + channel_header(channels) + "\n";
            for (std::size_t i = 0; i < samples.size(); ++i) {
                std::string row;
                row += textio::format_double(rs.rec[i]);
                row += ',' + textio::format_double(rs.sap[i]);
                row += ',' + textio::format_double(rs.nap[i]);
                row += ',' + textio::format_double(rs.sap_ls[i]);
                row += ',' + textio::format_double(rs.nap_ls[i]);
                if (is_vae) row += ',' + textio::format_double(us.sigma_a[i]);
                row += ',' + textio::format_double(us.sigma_e[i]);
                unit_csv += std::to_string(samples[i].cycle) + ',' + row + '\n';
                combined += std::to_string(traj.unit_id) + ',' +
                            std::to_string(samples[i].cycle) + ',' + row + '\n';
            }
            textio::write_file_atomic(paths.hi_unit_dir / unit_file_name(side_name, traj.unit_id),
                                      unit_csv);
        }
        textio::write_file_atomic(combined_path, combined);
    };
    run_side(split.train, cmapss::TrajKind::train, "train", paths.hi_train);
    run_side(split.test, cmapss::TrajKind::test, "test", paths.hi_test);

    return "extracted HI series for " + cfg.dataset + " (" + models::kind_name(cfg.model) + "): " +
           std::to_string(split.train.size()) + " train / " + std::to_string(split.test.size()) +
           " test units, " + std::to_string(channels.size()) + " channels";
}

std::string cmd_bench(const RunConfig& cfg) {
    const ArtifactPaths paths = artifact_paths(cfg);
    const cmapss::DatasetSplit split = cmapss::load_split(cfg.data_dir, cfg.dataset);

    HIBundle train_bundle;
    HIBundle test_bundle;
    try {
        train_bundle = read_hi_csv(paths.hi_train);
        test_bundle = read_hi_csv(paths.hi_test);
    } catch (const IoError& e) {
        throw IoError(std::string(e.what()) + " (run the 'extract' command first)");
    }
    attach_targets(train_bundle, split, false, cfg.labels.r_early);
    attach_targets(test_bundle, split, true, cfg.labels.r_early);

    const bool has_sigma_a =
        std::find(train_bundle.channels.begin(), train_bundle.channels.end(),
                  hi::Channel::sigma_a) != train_bundle.channels.end();
    std::vector<bench::HIGroup> requested = resolve_groups(cfg.groups, has_sigma_a);
    std::vector<bench::HIGroup> all_groups = requested;
    for (auto& g : bench::single_channel_groups(train_bundle.channels)) {
        const bool present = std::any_of(all_groups.begin(), all_groups.end(),
                                         [&](const auto& have) { return have.name == g.name; });
        if (!present) all_groups.push_back(std::move(g));
    }

    bench::BenchmarkReport full = bench::run_ablation(
        cfg.dataset, models::kind_name(cfg.model), train_bundle.units, test_bundle.units,
        all_groups, cfg.seeds, cfg.forest, cfg.lag, cfg.labels.r_early, cfg.effective_threads());

    std::map<std::string, std::vector<double>> rmses_by_group;
    for (const auto& row : full.rows) rmses_by_group[row.group].push_back(row.rmse);
    std::map<hi::Channel, double> rmse_by_channel;
    for (hi::Channel ch : train_bundle.channels) {
        rmse_by_channel[ch] = bench::median(rmses_by_group.at(hi::channel_name(ch)));
    }

    // Table rows for the report CSV keep only the requested groups; the
    // single-channel runs feed the metric table.
    bench::BenchmarkReport report;
    report.dataset = full.dataset;
    report.model_kind = full.model_kind;
    if (cfg.annotate_sota) report.sota_ref = bench::sota_reference(cfg.dataset);
    std::set<std::string> requested_names;
    for (const auto& g : requested) requested_names.insert(g.name);
    for (const auto& row : full.rows) {
        if (requested_names.count(row.group)) report.rows.push_back(row);
    }
    for (const auto& p : full.unit_predictions) {
        if (requested_names.count(p.group)) report.unit_predictions.push_back(p);
    }

    const bool have_sap_pair = rmse_by_channel.count(hi::Channel::sap) &&
                               rmse_by_channel.count(hi::Channel::sap_ls);
    if (have_sap_pair &&
        rmse_by_channel.at(hi::Channel::sap_ls) >= rmse_by_channel.at(hi::Channel::sap)) {
        report.notes.push_back(
            "advisory: median single-channel RMSE of sap_ls (" +
            textio::format_double(rmse_by_channel.at(hi::Channel::sap_ls)) +
            ") is not below sap (" + textio::format_double(rmse_by_channel.at(hi::Channel::sap)) +
            "); the expected latent-pathway advantage did not materialize on this run");
    }

    std::string best_group;
    double best_median = 0.0;
    for (const auto& g : requested) {
        const double m = bench::median(rmses_by_group.at(g.name));
        if (best_group.empty() || m < best_median) {
            best_group = g.name;
            best_median = m;
        }
    }

    std::vector<hi::HISeries> train_series;
    for (const auto& unit : train_bundle.units) {
        for (std::size_t c = 0; c < train_bundle.channels.size(); ++c) {
            hi::HISeries s;
            s.unit_id = unit.unit_id;
            s.channel = train_bundle.channels[c];
            s.values.resize(unit.values.rows);
            for (std::size_t r = 0; r < unit.values.rows; ++r) s.values[r] = unit.values.at(r, c);
            train_series.push_back(std::move(s));
        }
    }
    const std::vector<hi::HIMetricRow> metric_rows =
        hi::metric_table(train_series, rmse_by_channel);

    textio::write_file_atomic(paths.bench_report, bench::report_csv(report));
    textio::write_file_atomic(paths.bench_units, bench::unit_predictions_csv(report));
    textio::write_file_atomic(paths.metric_table, hi::metric_table_csv(metric_rows));

    std::string summary;
    summary += "dataset " + cfg.dataset + " model " + models::kind_name(cfg.model) + "\n";
    summary += "best_group " + best_group + " median_rmse " + textio::format_double(best_median) +
               "\n";
    for (const auto& g : requested) {
        summary += "group " + g.name + " median_rmse " +
                   textio::format_double(bench::median(rmses_by_group.at(g.name))) + "\n";
    }
    for (hi::Channel ch : train_bundle.channels) {
        summary += std::string("channel ") + hi::channel_name(ch) + " median_rmse " +
                   textio::format_double(rmse_by_channel.at(ch)) + "\n";
    }
    if (report.sota_ref) {
        summary += "sota_ref " + textio::format_double(*report.sota_ref) + "\n";
    }
    for (const auto& note : report.notes) summary += note + "\n";
    textio::write_file_atomic(paths.bench_summary, summary);

    return "benchmarked " + cfg.dataset + " (" + models::kind_name(cfg.model) +
           "): best group '" + best_group + "' with median RMSE " +
           textio::format_double(best_median);
}

}  // namespace lhi::pipeline
