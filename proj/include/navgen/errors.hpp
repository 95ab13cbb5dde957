#pragma once

#include <stdexcept>
#include <string>

namespace navgen {

struct NavError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidConfigError : NavError {
    using NavError::NavError;
};

struct OffMapError : NavError {
    using NavError::NavError;
};

struct NoPathError : NavError {
    using NavError::NavError;
};

struct DegenerateTargetError : NavError {
    using NavError::NavError;
};

struct GroupTooSmallError : NavError {
    using NavError::NavError;
};

struct IoError : NavError {
    using NavError::NavError;
};

// Carries the 1-based line number of the offending JSONL record.
struct MalformedRecordError : NavError {
    MalformedRecordError(const std::string& msg, std::size_t line)
        : NavError(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};

struct CheckpointError : NavError {
    using NavError::NavError;
};

}  // namespace navgen
