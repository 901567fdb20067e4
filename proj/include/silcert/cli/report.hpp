#pragma once

#include <string>

#include <json.hpp>

namespace silcert::cli {

inline constexpr int kReportSchemaVersion = 1;

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);

// Flattens a JSON document into `key,value` CSV lines with dotted keys.
std::string flatten_to_csv(const nlohmann::ordered_json& doc);

// Shortest round-trip decimal form.
std::string format_double(double v);

std::string utc_timestamp();

}  // namespace silcert::cli
