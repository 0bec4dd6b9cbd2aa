#include "lhi/container.hpp"

#include <sstream>

#include "lhi/error.hpp"
#include "lhi/textio.hpp"

namespace lhi {

void TextContainer::add_meta(const std::string& key, const std::string& value) {
    meta.emplace_back(key, value);
}

void TextContainer::add_array(const std::string& name, Matrix values) {
    arrays.push_back({name, std::move(values)});
}

void TextContainer::add_vector(const std::string& name, const std::vector<double>& values) {
    Matrix m(1, values.size());
    m.data = values;
    arrays.push_back({name, std::move(m)});
}

void TextContainer::add_scalar(const std::string& name, double value) {
    add_vector(name, {value});
}

const std::string& TextContainer::require_meta(const std::string& key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return v;
    }
    throw CheckpointError("container missing meta entry: " + key);
}

std::optional<std::string> TextContainer::find_meta(const std::string& key) const {
    for (const auto& [k, v] : meta) {
        if (k == key) return v;
    }
    return std::nullopt;
}

const Matrix& TextContainer::require_array(const std::string& name) const {
    for (const auto& a : arrays) {
        if (a.name == name) return a.values;
    }
    throw CheckpointError("container missing array: " + name);
}

bool TextContainer::has_array(const std::string& name) const {
    for (const auto& a : arrays) {
        if (a.name == name) return true;
    }
    return false;
}

std::vector<double> TextContainer::require_vector(const std::string& name) const {
    return require_array(name).data;
}

double TextContainer::require_scalar(const std::string& name) const {
    const Matrix& m = require_array(name);
    if (m.data.size() != 1) {
        throw CheckpointError("container array " + name + " is not a scalar");
    }
    return m.data[0];
}

std::string TextContainer::serialize() const {
    std::string payload;
    for (const auto& [k, v] : meta) {
        payload += "meta " + k + " " + v + "\n";
    }
    for (const auto& a : arrays) {
        payload += "array " + a.name + " " + std::to_string(a.values.rows) + " " +
                   std::to_string(a.values.cols) + "\n";
        for (std::size_t r = 0; r < a.values.rows; ++r) {
            std::string line;
            for (std::size_t c = 0; c < a.values.cols; ++c) {
                if (c) line += ' ';
                line += textio::format_double(a.values.at(r, c));
            }
            line += '\n';
            payload += line;
        }
    }
    std::string out = "LHI " + std::to_string(kVersion) + " " + kind + "\n";
    out += payload;
    out += "end " + textio::to_hex(textio::fnv1a64(payload)) + "\n";
    return out;
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

}  // namespace

TextContainer TextContainer::deserialize(const std::string& text) {
    std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) {
        throw CheckpointError("empty container");
    }
    auto header = textio::split_ws(lines[0]);
    if (header.size() != 3 || header[0] != "LHI") {
        throw CheckpointError("bad container magic");
    }
    if (header[1] != std::to_string(kVersion)) {
        throw CheckpointError("unsupported container version: " + std::string(header[1]));
    }

    TextContainer c;
    c.kind = std::string(header[2]);

    std::string payload;
    std::optional<std::string> declared_checksum;
    std::size_t i = 1;
    while (i < lines.size()) {
        const std::string& line = lines[i];
        auto tokens = textio::split_ws(line);
        if (tokens.empty()) {
            ++i;
            continue;
        }
        if (tokens[0] == "end") {
            if (tokens.size() != 2) throw CheckpointError("malformed end line");
            declared_checksum = std::string(tokens[1]);
            break;
        }
        payload += line + "\n";
        if (tokens[0] == "meta") {
            if (tokens.size() < 2) throw CheckpointError("malformed meta line");
            std::string key(tokens[1]);
            // Written as "meta <key> <value>"; the value is everything after the key.
            std::size_t value_pos = 5 + key.size() + 1;
            std::string value = value_pos <= line.size() ? line.substr(value_pos) : "";
            c.meta.emplace_back(key, value);
            ++i;
        } else if (tokens[0] == "array") {
            if (tokens.size() != 4) throw CheckpointError("malformed array header");
            NamedArray a;
            a.name = std::string(tokens[1]);
            std::size_t rows = std::stoul(std::string(tokens[2]));
            std::size_t cols = std::stoul(std::string(tokens[3]));
            a.values = Matrix(rows, cols);
            ++i;
            for (std::size_t r = 0; r < rows; ++r, ++i) {
                if (i >= lines.size()) throw CheckpointError("truncated array: " + a.name);
                payload += lines[i] + "\n";
                auto fields = textio::split_ws(lines[i]);
                if (fields.size() != cols) {
                    throw CheckpointError("array row width mismatch in " + a.name);
                }
                for (std::size_t col = 0; col < cols; ++col) {
                    a.values.at(r, col) = textio::parse_double(fields[col]);
                }
            }
            c.arrays.push_back(std::move(a));
        } else {
            throw CheckpointError("unknown container directive: " + std::string(tokens[0]));
        }
    }

    if (!declared_checksum) {
        throw CheckpointError("container truncated: missing end line");
    }
    std::string actual = textio::to_hex(textio::fnv1a64(payload));
    if (actual != *declared_checksum) {
        throw CheckpointError("container checksum mismatch");
    }
    return c;
}

void save_container(const std::filesystem::path& path, const TextContainer& container) {
    textio::write_file_atomic(path, container.serialize());
}

TextContainer load_container(const std::filesystem::path& path, const std::string& expected_kind) {
    if (!std::filesystem::exists(path)) {
        throw IoError("missing file: " + path.string());
    }
    TextContainer c = TextContainer::deserialize(textio::read_file(path));
    if (c.kind != expected_kind) {
        throw CheckpointError("container kind mismatch: expected '" + expected_kind + "', found '" +
                              c.kind + "' in " + path.string());
    }
    return c;
}

}  // namespace lhi
