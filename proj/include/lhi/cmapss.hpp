#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lhi/matrix.hpp"

namespace lhi::cmapss {

inline constexpr std::size_t kNumSettings = 3;
inline constexpr std::size_t kNumSensors = 21;
inline constexpr std::size_t kNumColumns = 2 + kNumSettings + kNumSensors;

enum class TrajKind { train, test };

// One engine unit's full multivariate run. Rows are ordered by cycle and
// cycles are contiguous from 1.
struct Trajectory {
    int unit_id = 0;
    Matrix settings;  // length x 3
    Matrix sensors;   // length x 21

    std::size_t length() const { return sensors.rows; }
};

struct DatasetSplit {
    std::string name;
    std::vector<Trajectory> train;
    std::vector<Trajectory> test;
    std::map<int, double> test_rul;  // unit id -> true RUL at last observed cycle
};

struct TableCounts {
    int train_units = 0;
    int test_units = 0;
    int conditions = 0;
    int fault_modes = 0;
};

// Published structure of the four canonical sub-datasets; nullopt for any
// other name.
std::optional<TableCounts> canonical_counts(const std::string& name);

// Parses a 26-column whitespace-separated trajectory file. One Trajectory per
// distinct unit id, sorted by unit id; unit ids must be contiguous from 1 and
// each unit's cycle column must run 1..length. An empty file yields an empty
// list with a warning.
std::vector<Trajectory> parse_trajectories(const std::filesystem::path& path, TrajKind kind);

// Parses a RUL file (one non-negative integer per line); line i labels the
// i-th test unit. Throws IntegrityError when the line count does not match.
std::map<int, double> parse_rul_file(const std::filesystem::path& path,
                                     const std::vector<Trajectory>& test);

// Loads train_<name>.txt, test_<name>.txt and RUL_<name>.txt from data_dir.
// For canonical names, unit counts are checked against the published table;
// mismatches warn rather than fail so truncated desk-scale copies still load.
DatasetSplit load_split(const std::filesystem::path& data_dir, const std::string& name);

// Writes trajectories back to the 26-column text format with full double
// precision; re-parsing yields bitwise-equal values.
std::string serialize_trajectories(const std::vector<Trajectory>& trajectories);

}  // namespace lhi::cmapss
