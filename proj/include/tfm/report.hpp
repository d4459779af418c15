#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfm {

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string canonical_json(const nlohmann::json& j);

/// Writes text to a file; throws std::runtime_error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

/// RFC 4180 style: cells holding commas, quotes or newlines are quoted.
std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

}  // namespace tfm
