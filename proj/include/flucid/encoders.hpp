#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flucid::encoders {

struct NormalizeError : std::runtime_error {
  std::string raw;
  NormalizeError(const std::string& what, std::string input) : std::runtime_error(what), raw(std::move(input)) {}
};

// Lowercase, colon-separated, zero-padded six-octet form.
std::string normalize_mac(std::string_view s);

struct Timestamp {
  std::string text;  // "Www Mmm D HH:MM:SS YYYY"
  std::int64_t epoch = 0;
};

// Zone used for zoneless inputs: FLUCID_TZ if set, otherwise UTC.
std::string default_zone();

// Offset in seconds east of UTC for "UTC", "GMT", "Z", a US zone abbreviation,
// or a numeric "+hh:mm" / "-hhmm" form.
std::optional<std::int64_t> zone_offset(std::string_view zone);

Timestamp normalize_timestamp(std::string_view s, std::optional<int> reference_year = std::nullopt,
                              std::optional<std::string> zone = std::nullopt);

// Canonical text for an epoch rendered in the given zone.
std::string format_timestamp(std::int64_t epoch, std::string_view zone = "UTC");

std::string normalize_hostname(std::string_view s);

enum class FieldType { text, integer, real, mac, timestamp, hostname };

struct FieldRule {
  std::string field;
  std::string dimension;
  FieldType type = FieldType::text;
};

struct Schema {
  std::string source = "log";
  std::vector<FieldRule> fields;
  double partial_w = 0.5;
  // kv: key=value tokens; delimited: one column per field; regex: one group per field
  std::string format = "kv";
  std::string delimiter = ",";
  std::string pattern;
};

Schema parse_schema(std::string_view text);
Schema preset(std::string_view name);
std::vector<std::string> preset_names();

using Record = std::vector<std::pair<std::string, std::string>>;  // field -> raw text

std::vector<Record> extract(const Schema& schema, std::string_view input);

struct EncodeOptions {
  std::optional<int> reference_year;
  std::optional<std::string> zone;
  // encode time for the provenance comment; now when absent
  std::optional<std::int64_t> encoded_at;
};

struct EncodeResult {
  std::string text;
  std::vector<std::string> warnings;
};

EncodeResult encode_log(const std::vector<Record>& lines, const Schema& schema, const std::string& sequence_name,
                        const EncodeOptions& options = {});

std::string output_name(const std::string& case_name, const std::string& source);
std::string sha256_hex(std::string_view data);

}  // namespace flucid::encoders
