#include "lhi/cmapss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lhi/error.hpp"
#include "lhi/textio.hpp"

namespace lhi::cmapss {

std::optional<TableCounts> canonical_counts(const std::string& name) {
    if (name == "FD001") return TableCounts{100, 100, 1, 1};
    if (name == "FD002") return TableCounts{260, 259, 6, 1};
    if (name == "FD003") return TableCounts{100, 100, 1, 2};
    if (name == "FD004") return TableCounts{248, 249, 6, 2};
    return std::nullopt;
}

namespace {

struct UnitRows {
    std::vector<std::array<double, kNumSettings>> settings;
    std::vector<std::array<double, kNumSensors>> sensors;
    int next_cycle = 1;
};

const char* kind_name(TrajKind kind) {
    return kind == TrajKind::train ? "train" : "test";
}

}  // namespace

std::vector<Trajectory> parse_trajectories(const std::filesystem::path& path, TrajKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("missing file: " + path.string());
    }

    std::map<int, UnitRows> units;
    std::string line;
    std::size_t line_no = 0;
    bool saw_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = textio::split_ws(line);
        if (fields.empty()) continue;  // tolerate blank lines (trailing newline quirk)
        saw_data = true;
        if (fields.size() != kNumColumns) {
            throw ParseError("expected " + std::to_string(kNumColumns) + " columns, got " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        double unit_raw = textio::parse_double(fields[0], line_no);
        double cycle_raw = textio::parse_double(fields[1], line_no);
        int unit_id = static_cast<int>(unit_raw);
        int cycle = static_cast<int>(cycle_raw);
        if (unit_id <= 0 || unit_raw != unit_id) {
            throw ParseError("unit id must be a positive integer", line_no);
        }
        if (cycle <= 0 || cycle_raw != cycle) {
            throw ParseError("cycle must be a positive integer", line_no);
        }

        UnitRows& rows = units[unit_id];
        if (cycle != rows.next_cycle) {
            throw IntegrityError("unit " + std::to_string(unit_id) + " in " + path.string() +
                                 ": expected cycle " + std::to_string(rows.next_cycle) + ", got " +
                                 std::to_string(cycle) + " at line " + std::to_string(line_no));
        }
        ++rows.next_cycle;

        std::array<double, kNumSettings> setting{};
        for (std::size_t i = 0; i < kNumSettings; ++i) {
            setting[i] = textio::parse_double(fields[2 + i], line_no);
        }
        std::array<double, kNumSensors> sensor{};
        for (std::size_t i = 0; i < kNumSensors; ++i) {
            sensor[i] = textio::parse_double(fields[2 + kNumSettings + i], line_no);
        }
        rows.settings.push_back(setting);
        rows.sensors.push_back(sensor);
    }

    if (!saw_data) {
        logging::warn("empty " + std::string(kind_name(kind)) + " file: " + path.string());
        return {};
    }

    // Unit ids come from column 1 but must be contiguous 1..N; gaps indicate a
    // corrupted download.
    int expected = 1;
    for (const auto& [unit_id, rows] : units) {
        if (unit_id != expected) {
            throw IntegrityError("unit ids not contiguous in " + path.string() + ": expected " +
                                 std::to_string(expected) + ", found " + std::to_string(unit_id));
        }
        ++expected;
    }

    std::vector<Trajectory> out;
    out.reserve(units.size());
    for (auto& [unit_id, rows] : units) {
        Trajectory traj;
        traj.unit_id = unit_id;
        std::size_t len = rows.sensors.size();
        traj.settings = Matrix(len, kNumSettings);
        traj.sensors = Matrix(len, kNumSensors);
        for (std::size_t r = 0; r < len; ++r) {
            for (std::size_t c = 0; c < kNumSettings; ++c) traj.settings.at(r, c) = rows.settings[r][c];
            for (std::size_t c = 0; c < kNumSensors; ++c) traj.sensors.at(r, c) = rows.sensors[r][c];
        }
        out.push_back(std::move(traj));
    }
    return out;
}

std::map<int, double> parse_rul_file(const std::filesystem::path& path,
                                     const std::vector<Trajectory>& test) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("missing file: " + path.string());
    }
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = textio::split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != 1) {
            throw ParseError("expected one value per RUL line", line_no);
        }
        double value = textio::parse_double(fields[0], line_no);
        if (value < 0 || value != std::floor(value)) {
            throw ParseError("RUL must be a non-negative integer", line_no);
        }
        values.push_back(value);
    }
    if (values.size() != test.size()) {
        throw IntegrityError("RUL line count (" + std::to_string(values.size()) +
                             ") does not match test unit count (" + std::to_string(test.size()) +
                             ") for " + path.string());
    }
    std::map<int, double> out;
    for (std::size_t i = 0; i < test.size(); ++i) {
        out[test[i].unit_id] = values[i];
    }
    return out;
}

DatasetSplit load_split(const std::filesystem::path& data_dir, const std::string& name) {
    if (!canonical_counts(name)) {
        throw UsageError("unknown dataset name: " + name +
                         " (expected FD001, FD002, FD003 or FD004)");
    }
    DatasetSplit split;
    split.name = name;
    split.train = parse_trajectories(data_dir / ("train_" + name + ".txt"), TrajKind::train);
    split.test = parse_trajectories(data_dir / ("test_" + name + ".txt"), TrajKind::test);
    split.test_rul = parse_rul_file(data_dir / ("RUL_" + name + ".txt"), split.test);

    TableCounts expected = *canonical_counts(name);
    if (static_cast<int>(split.train.size()) != expected.train_units ||
        static_cast<int>(split.test.size()) != expected.test_units) {
        logging::warn(name + ": unit counts " + std::to_string(split.train.size()) + "/" +
                      std::to_string(split.test.size()) + " differ from the canonical " +
                      std::to_string(expected.train_units) + "/" +
                      std::to_string(expected.test_units) + " (desk-scale copy?)");
    }
    return split;
}

std::string serialize_trajectories(const std::vector<Trajectory>& trajectories) {
    std::string out;
    for (const auto& traj : trajectories) {
        for (std::size_t r = 0; r < traj.length(); ++r) {
            std::string line = std::to_string(traj.unit_id) + " " + std::to_string(r + 1);
            for (std::size_t c = 0; c < kNumSettings; ++c) {
                line += " " + textio::format_double(traj.settings.at(r, c));
            }
            for (std::size_t c = 0; c < kNumSensors; ++c) {
                line += " " + textio::format_double(traj.sensors.at(r, c));
            }
            line += "\n";
            out += line;
        }
    }
    return out;
}

}  // namespace lhi::cmapss
