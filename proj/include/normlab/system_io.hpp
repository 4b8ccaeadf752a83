#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "normlab/ifs.hpp"

namespace normlab {

// System files are JSON objects:
//   { "maps": [ {"s": "1/3", "t": "0"}, ... ],
//     "weights": ["1/2", "1/2"],
//     "hull": ["0", "1"] }            // optional
// Rationals are strings "num/den" or "num".

RawSystem raw_system_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RawSystem& raw);

RawSystem parse_system(const std::string& text);
std::string serialize_system(const RawSystem& raw);

RawSystem read_system_file(const std::filesystem::path& path);
void write_system_file(const std::filesystem::path& path, const RawSystem& raw);

/// 64-bit FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string system_hash(const RawSystem& raw);

}  // namespace normlab
