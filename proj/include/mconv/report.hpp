#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mconv {

inline constexpr std::string_view kToolName = "mconv";
inline constexpr std::string_view kToolVersion = "0.1.0";

using FieldValue = std::variant<bool, std::int64_t, double, std::string>;

/// One flat result row; field order is preserved in every output format.
struct Record {
  std::vector<std::pair<std::string, FieldValue>> fields;

  Record& add(std::string key, FieldValue value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }
};

struct Report {
  /// Provenance header: tool, version, command, config hash, seed, mode.
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Record> records;
};

enum class ReportFormat { tsv, json };

ReportFormat parse_report_format(std::string_view name);

/// Columnar text: '#'-prefixed "key=value" provenance lines, then one header
/// line per run of records sharing a field list, then tab-separated rows.
/// Doubles use the shortest round-trip representation.
std::string render_tsv(const Report& report);

/// Hierarchical text: {"meta": {...}, "records": [{...}, ...]} with keys in
/// insertion order and two-space indentation.
std::string render_json(const Report& report);

std::string render(const Report& report, ReportFormat format);

/// FNV-1a 64-bit hash, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace mconv
