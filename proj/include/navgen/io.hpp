#pragma once

#include <string>

#include "json.hpp"

namespace navgen {

// Write-then-rename so interrupted runs never leave partial files.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Stable hex digest of a canonical config serialization.
std::string config_hash_hex(const nlohmann::json& config);

}  // namespace navgen
