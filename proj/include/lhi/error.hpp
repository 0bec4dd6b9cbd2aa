#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lhi {

// Exit codes shared between library errors and the CLI.
enum class ExitCode : int {
    ok = 0,
    usage = 1,
    io = 2,
    training = 3,
    checkpoint = 4,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

// Bad arguments, bad config, contract violations by the caller.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

// Missing or unreadable files.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

// Malformed content in a data file (carries a 1-based line number when known).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(ExitCode::io, line ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Structurally valid input that violates a dataset invariant (counts, contiguity).
class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& what) : Error(ExitCode::io, what) {}
};

// Divergence or non-finite values during optimization.
class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& what) : Error(ExitCode::training, what) {}
};

// Checkpoint/schema problems: version, checksum, kind mismatch.
class CheckpointError : public Error {
public:
    explicit CheckpointError(const std::string& what) : Error(ExitCode::checkpoint, what) {}
};

// Dimension mismatches between tensors, models and inputs.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(ExitCode::usage, what) {}
};

namespace logging {

using WarnSink = std::function<void(std::string_view)>;

// Emits a warning through the installed sink (default: stderr with a "[warn]" prefix).
void warn(std::string_view message);

// Replaces the sink and returns the previous one. Pass nullptr to restore the default.
WarnSink set_warn_sink(WarnSink sink);

}  // namespace logging

}  // namespace lhi
