#include "geobias/report.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <tuple>

#include "geobias/version.hpp"

namespace geobias::report {

namespace {

int level_rank(Level level) { return static_cast<int>(level); }

std::tuple<int, const std::string&, const std::string&> sort_key(const Finding& f) {
    return {level_rank(f.level), f.kind, f.id};
}

nlohmann::json finding_to_json(const Finding& f) {
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<std::string> notes = f.notes;
    for (const auto& [name, value] : f.metrics) {
        if (std::isfinite(value))
            metrics[name] = value;
        else
            notes.push_back("metric '" + name + "' was non-finite and omitted");
    }
    return nlohmann::json{{"artifacts", f.artifacts}, {"id", f.id},
                          {"kind", f.kind},           {"level", to_string(f.level)},
                          {"metrics", metrics},       {"notes", notes},
                          {"severity", to_string(f.severity)}};
}

void fail(const std::string& what) { throw SchemaError("report schema: " + what); }

void require_string_array(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) fail(where + " must be an array");
    for (const auto& el : j)
        if (!el.is_string()) fail(where + " must contain only strings");
}

}  // namespace

const char* to_string(Level level) {
    switch (level) {
        case Level::data: return "data";
        case Level::modeling: return "modeling";
        case Level::interpretation: return "interpretation";
    }
    return "unknown";
}

Level level_from_string(const std::string& s) {
    if (s == "data") return Level::data;
    if (s == "modeling") return Level::modeling;
    if (s == "interpretation") return Level::interpretation;
    throw SchemaError("unknown finding level '" + s + "'");
}

Severity severity_from_string(const std::string& s) {
    if (s == "info") return Severity::info;
    if (s == "warning") return Severity::warning;
    if (s == "critical") return Severity::critical;
    throw SchemaError("unknown severity '" + s + "'");
}

nlohmann::json to_json(const AuditReport& report) {
    nlohmann::json findings = nlohmann::json::array();
    std::size_t info = 0, warning = 0, critical = 0;
    for (const Finding& f : report.findings) {
        findings.push_back(finding_to_json(f));
        switch (f.severity) {
            case Severity::info: ++info; break;
            case Severity::warning: ++warning; break;
            case Severity::critical: ++critical; break;
        }
    }

    nlohmann::json j{{"config", report.config},
                     {"findings", findings},
                     {"schema_version", kReportSchemaVersion},
                     {"summary",
                      {{"critical", critical},
                       {"findings", report.findings.size()},
                       {"info", info},
                       {"warning", warning}}},
                     {"tool_version", report.tool_version}};
    if (report.seed) j["seed"] = *report.seed;
    if (report.created_at) j["created_at"] = *report.created_at;
    return j;
}

AuditReport report_from_json(const nlohmann::json& j) {
    validate_report_json(j);
    AuditReport report;
    report.tool_version = j.at("tool_version").get<std::string>();
    report.config = j.at("config");
    if (j.contains("seed")) report.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("created_at")) report.created_at = j.at("created_at").get<std::string>();
    for (const auto& jf : j.at("findings")) {
        Finding f;
        f.id = jf.at("id").get<std::string>();
        f.level = level_from_string(jf.at("level").get<std::string>());
        f.kind = jf.at("kind").get<std::string>();
        f.severity = severity_from_string(jf.at("severity").get<std::string>());
        for (const auto& [name, value] : jf.at("metrics").items())
            f.metrics[name] = value.get<double>();
        f.artifacts = jf.at("artifacts").get<std::vector<std::string>>();
        f.notes = jf.at("notes").get<std::vector<std::string>>();
        report.findings.push_back(std::move(f));
    }
    return report;
}

void validate_report_json(const nlohmann::json& j) {
    if (!j.is_object()) fail("document must be an object");
    static const std::vector<std::string> known_top = {
        "config", "created_at", "findings", "schema_version", "seed", "summary", "tool_version"};
    for (const auto& [key, value] : j.items())
        if (std::find(known_top.begin(), known_top.end(), key) == known_top.end())
            fail("unknown top-level key '" + key + "'");
    for (const char* key : {"config", "findings", "schema_version", "summary", "tool_version"})
        if (!j.contains(key)) fail(std::string("missing required key '") + key + "'");

    if (!j.at("schema_version").is_number_integer() ||
        j.at("schema_version").get<int>() != kReportSchemaVersion)
        fail("schema_version must be the integer " + std::to_string(kReportSchemaVersion));
    if (!j.at("tool_version").is_string()) fail("tool_version must be a string");
    if (!j.at("config").is_object()) fail("config must be an object");
    if (j.contains("seed") && !j.at("seed").is_number_unsigned())
        fail("seed must be a non-negative integer");
    if (j.contains("created_at")) {
        if (!j.at("created_at").is_string()) fail("created_at must be a string");
        const std::string ts = j.at("created_at").get<std::string>();
        // RFC 3339 UTC shape: YYYY-MM-DDThh:mm:ssZ
        const bool shaped = ts.size() == 20 && ts[4] == '-' && ts[7] == '-' && ts[10] == 'T' &&
                            ts[13] == ':' && ts[16] == ':' && ts[19] == 'Z';
        if (!shaped) fail("created_at must be an RFC 3339 UTC timestamp");
    }

    const nlohmann::json& findings = j.at("findings");
    if (!findings.is_array()) fail("findings must be an array");
    std::size_t info = 0, warning = 0, critical = 0;
    std::vector<std::string> ids;
    std::tuple<int, std::string, std::string> prev_key{-1, "", ""};
    for (const auto& jf : findings) {
        if (!jf.is_object()) fail("finding must be an object");
        static const std::vector<std::string> known_finding = {
            "artifacts", "id", "kind", "level", "metrics", "notes", "severity"};
        for (const auto& [key, value] : jf.items())
            if (std::find(known_finding.begin(), known_finding.end(), key) ==
                known_finding.end())
                fail("unknown finding key '" + key + "'");
        for (const std::string& key : known_finding)
            if (!jf.contains(key)) fail("finding missing key '" + key + "'");

        if (!jf.at("id").is_string() || jf.at("id").get<std::string>().empty())
            fail("finding id must be a non-empty string");
        if (!jf.at("kind").is_string() || jf.at("kind").get<std::string>().empty())
            fail("finding kind must be a non-empty string");
        const Level level = level_from_string(jf.at("level").get<std::string>());
        const Severity severity = severity_from_string(jf.at("severity").get<std::string>());
        switch (severity) {
            case Severity::info: ++info; break;
            case Severity::warning: ++warning; break;
            case Severity::critical: ++critical; break;
        }
        if (!jf.at("metrics").is_object()) fail("finding metrics must be an object");
        for (const auto& [name, value] : jf.at("metrics").items())
            if (!value.is_number()) fail("metric '" + name + "' must be a number");
        require_string_array(jf.at("artifacts"), "finding artifacts");
        require_string_array(jf.at("notes"), "finding notes");

        ids.push_back(jf.at("id").get<std::string>());
        std::tuple<int, std::string, std::string> key{level_rank(level),
                                                      jf.at("kind").get<std::string>(),
                                                      jf.at("id").get<std::string>()};
        if (key < prev_key) fail("findings are not sorted by (level, kind, id)");
        prev_key = std::move(key);
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        fail("finding ids are not unique");

    const nlohmann::json& summary = j.at("summary");
    if (!summary.is_object()) fail("summary must be an object");
    for (const char* key : {"critical", "findings", "info", "warning"})
        if (!summary.contains(key) || !summary.at(key).is_number_unsigned())
            fail(std::string("summary key '") + key + "' must be a non-negative integer");
    if (summary.at("findings").get<std::size_t>() != findings.size() ||
        summary.at("info").get<std::size_t>() != info ||
        summary.at("warning").get<std::size_t>() != warning ||
        summary.at("critical").get<std::size_t>() != critical)
        fail("summary counts do not match the findings array");
}

nlohmann::json write_report(AuditReport& report, const std::string& out_dir) {
    std::sort(report.findings.begin(), report.findings.end(),
              [](const Finding& a, const Finding& b) { return sort_key(a) < sort_key(b); });
    {
        std::vector<std::string> ids;
        for (const Finding& f : report.findings) ids.push_back(f.id);
        std::sort(ids.begin(), ids.end());
        const auto dup = std::adjacent_find(ids.begin(), ids.end());
        if (dup != ids.end())
            throw InternalError("write_report: duplicate finding id '" + *dup + "'");
    }

    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create report directory " + out_dir + ": " + ec.message());

    for (const Finding& f : report.findings)
        for (const std::string& artifact : f.artifacts)
            if (!std::filesystem::exists(dir / artifact))
                throw InternalError("write_report: finding '" + f.id +
                                    "' references missing artifact " + artifact);

    const nlohmann::json j = to_json(report);
    validate_report_json(j);

    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "report.json").string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing " + (dir / "report.json").string());
    return j;
}

std::string now_rfc3339() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace geobias::report
