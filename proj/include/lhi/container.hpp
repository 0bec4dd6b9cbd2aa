#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lhi/matrix.hpp"

namespace lhi {

// Versioned textual container used for model checkpoints and the
// normalization model. Line-oriented and self-describing:
//
//   LHI <version> <kind>
//   meta <key> <value>
//   array <name> <rows> <cols>
//   <rows lines of cols doubles, %.17g>
//   ...
//   end <fnv1a64-hex-of-payload>
//
// The checksum covers every byte between the header line and the end line.
struct TextContainer {
    static constexpr int kVersion = 1;

    std::string kind;
    std::vector<std::pair<std::string, std::string>> meta;
    struct NamedArray {
        std::string name;
        Matrix values;
    };
    std::vector<NamedArray> arrays;

    void add_meta(const std::string& key, const std::string& value);
    void add_array(const std::string& name, Matrix values);
    void add_vector(const std::string& name, const std::vector<double>& values);
    void add_scalar(const std::string& name, double value);

    // Throw CheckpointError when the entry is missing.
    const std::string& require_meta(const std::string& key) const;
    const Matrix& require_array(const std::string& name) const;
    std::vector<double> require_vector(const std::string& name) const;
    double require_scalar(const std::string& name) const;
    std::optional<std::string> find_meta(const std::string& key) const;
    bool has_array(const std::string& name) const;

    std::string serialize() const;
    static TextContainer deserialize(const std::string& text);
};

void save_container(const std::filesystem::path& path, const TextContainer& container);
TextContainer load_container(const std::filesystem::path& path, const std::string& expected_kind);

}  // namespace lhi
