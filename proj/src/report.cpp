#include "mconv/report.hpp"

#include "mconv/rational.hpp"

#include "json.hpp"

#include <cmath>

#include <cstdio>
#include <stdexcept>

namespace mconv {

namespace {

std::string field_text(const FieldValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else {
          std::string out;
          for (char c : x) out += (c == '\t' || c == '\n') ? ' ' : c;
          return out;
        }
      },
      v);
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "tsv") return ReportFormat::tsv;
  if (name == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format '" + std::string(name) + "' (tsv, json)");
}

std::string render_tsv(const Report& report) {
  std::string out;
  for (const auto& [k, v] : report.meta) out += "# " + k + "=" + v + "\n";
  std::vector<std::string> header;
  for (const auto& rec : report.records) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : rec.fields) keys.push_back(k);
    if (keys != header) {
      header = keys;
      for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "\t" : "") + keys[i];
      out += "\n";
    }
    for (std::size_t i = 0; i < rec.fields.size(); ++i) out += (i ? "\t" : "") + field_text(rec.fields[i].second);
    out += "\n";
  }
  return out;
}

std::string render_json(const Report& report) {
  nlohmann::ordered_json doc;
  doc["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.meta) doc["meta"][k] = v;
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& rec : report.records) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rec.fields) {
      std::visit(
          [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
              // Non-finite doubles are not JSON; keep them readable as strings.
              if (std::isfinite(x)) {
                row[k] = x;
              } else {
                row[k] = format_double(x);
              }
            } else {
              row[k] = x;
            }
          },
          v);
    }
    doc["records"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::string render(const Report& report, ReportFormat format) {
  return format == ReportFormat::json ? render_json(report) : render_tsv(report);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mconv
