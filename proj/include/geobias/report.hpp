#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geobias/core.hpp"

namespace geobias::report {

// Audit layer a finding belongs to. Ordered data < modeling < interpretation;
// report findings sort by (level, kind, id).
enum class Level { data, modeling, interpretation };

const char* to_string(Level level);
Level level_from_string(const std::string& s);
Severity severity_from_string(const std::string& s);

struct Finding {
    std::string id;
    Level level = Level::data;
    std::string kind;
    Severity severity = Severity::info;
    std::map<std::string, double> metrics;
    std::vector<std::string> artifacts;  // paths relative to the report directory
    std::vector<std::string> notes;

    bool operator==(const Finding&) const = default;
};

struct AuditReport {
    std::string tool_version;
    nlohmann::json config = nlohmann::json::object();  // effective configuration echo
    std::optional<std::uint64_t> seed;
    std::vector<Finding> findings;
    std::optional<std::string> created_at;  // RFC 3339 UTC; absent with --no-timestamp

    bool operator==(const AuditReport&) const = default;
};

// Canonical JSON form: schema_version, sorted findings, severity counts.
// Non-finite metric values are dropped and recorded in the finding's notes.
nlohmann::json to_json(const AuditReport& report);

AuditReport report_from_json(const nlohmann::json& j);

// Structural validation mirroring docs/report.schema.json; throws
// SchemaError on the first violation.
void validate_report_json(const nlohmann::json& j);

// Sorts findings, validates, and writes <out_dir>/report.json. Every
// referenced artifact must already exist under out_dir. Returns the
// canonical JSON that was written.
nlohmann::json write_report(AuditReport& report, const std::string& out_dir);

// RFC 3339 UTC timestamp for the current wall clock.
std::string now_rfc3339();

}  // namespace geobias::report
