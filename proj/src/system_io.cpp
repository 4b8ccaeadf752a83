#include "normlab/system_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace normlab {

using nlohmann::json;

namespace {

Rational rational_field(const json& value, const std::string& where) {
  if (!value.is_string()) {
    throw Error(ErrorKind::ConfigParseError, where + ": rationals must be strings \"num/den\"");
  }
  return parse_rational(value.get<std::string>());
}

}  // namespace

RawSystem raw_system_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ConfigParseError, "system file must be a JSON object");
  if (!doc.contains("maps") || !doc["maps"].is_array()) {
    throw Error(ErrorKind::ConfigParseError, "missing \"maps\" array");
  }
  if (!doc.contains("weights") || !doc["weights"].is_array()) {
    throw Error(ErrorKind::ConfigParseError, "missing \"weights\" array");
  }
  RawSystem raw;
  for (std::size_t i = 0; i < doc["maps"].size(); ++i) {
    const json& m = doc["maps"][i];
    const std::string where = "maps[" + std::to_string(i) + "]";
    if (!m.is_object() || !m.contains("s") || !m.contains("t")) {
      throw Error(ErrorKind::ConfigParseError, where + " needs fields \"s\" and \"t\"");
    }
    raw.maps.push_back({rational_field(m["s"], where + ".s"), rational_field(m["t"], where + ".t")});
  }
  for (std::size_t i = 0; i < doc["weights"].size(); ++i) {
    raw.weights.push_back(rational_field(doc["weights"][i], "weights[" + std::to_string(i) + "]"));
  }
  if (doc.contains("hull") && !doc["hull"].is_null()) {
    const json& h = doc["hull"];
    if (!h.is_array() || h.size() != 2) throw Error(ErrorKind::ConfigParseError, "\"hull\" must be [lo, hi]");
    raw.hull = Interval{rational_field(h[0], "hull[0]"), rational_field(h[1], "hull[1]")};
  }
  return raw;
}

json to_json(const RawSystem& raw) {
  json maps = json::array();
  for (const auto& f : raw.maps) maps.push_back({{"s", to_string(f.slope)}, {"t", to_string(f.offset)}});
  json weights = json::array();
  for (const auto& w : raw.weights) weights.push_back(to_string(w));
  json doc = {{"maps", maps}, {"weights", weights}};
  if (raw.hull) doc["hull"] = {to_string(raw.hull->lo), to_string(raw.hull->hi)};
  return doc;
}

RawSystem parse_system(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigParseError, e.what());
  }
  return raw_system_from_json(doc);
}

std::string serialize_system(const RawSystem& raw) { return to_json(raw).dump(2) + "\n"; }

RawSystem read_system_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigParseError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

void write_system_file(const std::filesystem::path& path, const RawSystem& raw) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigParseError, "cannot write " + path.string());
  out << serialize_system(raw);
}

std::string system_hash(const RawSystem& raw) {
  const std::string text = to_json(raw).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace normlab
