#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geobias/report.hpp"
#include "geobias/version.hpp"

using namespace geobias;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

std::string binary_path() {
    const char* bin = std::getenv("GEOBIAS_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "GEOBIAS_BIN must point at the geobias binary");
    return bin;
}

RunResult run_cli(const std::string& args) {
    const std::string cmd = binary_path() + " " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) res.output.append(buf, n);
    const int status = ::pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path scratch_dir(const std::string& stem) {
    const fs::path p = fs::temp_directory_path() /
                       ("geobias_cli_" + std::to_string(::getpid()) + "_" + stem);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), ("missing file: " + p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Two groups on the same perfect upward line: every fit agrees, no paradox.
const char* kHomogeneousCsv =
    "x,y,val,resp,region\n"
    "0,0,0,0,g1\n"
    "0,1,1,1,g1\n"
    "0,2,2,2,g1\n"
    "0,3,3,3,g1\n"
    "1,0,10,10,g2\n"
    "1,1,11,11,g2\n"
    "1,2,12,12,g2\n"
    "1,3,13,13,g2\n";

const char* kScatterCsv =
    "x,y\n"
    "0,0\n"
    "1,0\n"
    "2,1\n"
    "0.5,2\n"
    "1.5,1.2\n"
    "0.2,0.8\n";

}  // namespace

TEST_CASE("--version prints the tool version") {
    const auto res = run_cli("--version");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find(kToolVersion) != std::string::npos);
}

TEST_CASE("bare invocation prints help and succeeds") {
    const auto res = run_cli("");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("simpson") != std::string::npos);
    CHECK(res.output.find("demo") != std::string::npos);
}

TEST_CASE("missing required options exit with code 2") {
    const fs::path dir = scratch_dir("missing");
    write_file(dir / "pts.csv", kHomogeneousCsv);

    auto res = run_cli("simpson --input " + (dir / "pts.csv").string() +
                       " --y resp --group region --out " + (dir / "out").string());
    CHECK(res.exit_code == 2);  // --x absent
    CHECK(res.output.find("--x") != std::string::npos);

    res = run_cli("demo --experiment not-a-thing --out " + (dir / "out2").string());
    CHECK(res.exit_code == 2);

    res = run_cli("--definitely-not-a-flag");
    CHECK(res.exit_code == 2);

    fs::remove_all(dir);
}

TEST_CASE("unreadable input exits with code 1") {
    const fs::path dir = scratch_dir("io");
    const auto res = run_cli("simpson --input " + (dir / "absent.csv").string() +
                             " --x val --y resp --group region --out " +
                             (dir / "out").string());
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("error") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("demo runs are deterministic byte for byte") {
    const fs::path a = scratch_dir("det_a");
    const fs::path b = scratch_dir("det_b");
    const std::string common = "demo --experiment simpson --seed 42 --no-timestamp --out ";
    CHECK(run_cli(common + a.string()).exit_code == 0);
    CHECK(run_cli(common + b.string()).exit_code == 0);

    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    int svg_count = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().extension() != ".svg") continue;
        ++svg_count;
        CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
    CHECK(svg_count >= 2);  // scatter + parallel coordinates

    report::validate_report_json(json::parse(slurp(a / "report.json")));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("kde rejects an inverted bandwidth range") {
    const fs::path dir = scratch_dir("kde");
    write_file(dir / "pts.csv", kScatterCsv);
    const auto res = run_cli("kde --input " + (dir / "pts.csv").string() +
                             " --h-lo 5 --h-hi 2 --out " + (dir / "out").string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("h-lo") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("--fail-on-finding escalates real findings only") {
    const fs::path dir = scratch_dir("fail_on");
    // The simpson demo is a seeded paradox: exit 3 when escalation is on.
    auto res = run_cli("demo --experiment simpson --seed 42 --fail-on-finding --out " +
                       (dir / "demo").string());
    CHECK(res.exit_code == 3);

    // Homogeneous data produces an info finding: exit stays 0.
    write_file(dir / "pts.csv", kHomogeneousCsv);
    res = run_cli("simpson --input " + (dir / "pts.csv").string() +
                  " --x val --y resp --group region --fail-on-finding --out " +
                  (dir / "flat").string());
    CHECK(res.exit_code == 0);
    const auto rep = json::parse(slurp(dir / "flat" / "report.json"));
    CHECK(rep.at("findings").at(0).at("kind") == "simpson.none");
    CHECK(rep.at("findings").at(0).at("severity") == "info");
    fs::remove_all(dir);
}

TEST_CASE("config files merge under explicit flags") {
    const fs::path dir = scratch_dir("config");
    write_file(dir / "pts.csv", kHomogeneousCsv);
    write_file(dir / "cfg.json", "{\"alpha\": 0.5}\n");
    const std::string base = "simpson --input " + (dir / "pts.csv").string() +
                             " --x val --y resp --group region --config " +
                             (dir / "cfg.json").string();

    // Config supplies alpha when the flag is absent.
    auto res = run_cli(base + " --out " + (dir / "a").string());
    CHECK(res.exit_code == 0);
    auto rep = json::parse(slurp(dir / "a" / "report.json"));
    CHECK(rep.at("config").at("alpha").get<double>() == 0.5);

    // An explicit flag beats the config value.
    res = run_cli(base + " --alpha 0.25 --out " + (dir / "b").string());
    CHECK(res.exit_code == 0);
    rep = json::parse(slurp(dir / "b" / "report.json"));
    CHECK(rep.at("config").at("alpha").get<double>() == 0.25);

    // Unknown keys are rejected, not ignored.
    write_file(dir / "bad.json", "{\"alpha\": 0.5, \"bogus\": 1}\n");
    res = run_cli("simpson --input " + (dir / "pts.csv").string() +
                  " --x val --y resp --group region --config " + (dir / "bad.json").string() +
                  " --out " + (dir / "c").string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("bogus") != std::string::npos);

    // Malformed JSON is a config error too.
    write_file(dir / "broken.json", "{\"alpha\": \n");
    res = run_cli("simpson --input " + (dir / "pts.csv").string() +
                  " --x val --y resp --group region --config " + (dir / "broken.json").string() +
                  " --out " + (dir / "d").string());
    CHECK(res.exit_code == 2);
    fs::remove_all(dir);
}

TEST_CASE("--json-logs emits one JSON object per line") {
    const fs::path dir = scratch_dir("jsonlogs");
    const auto res = run_cli("demo --experiment simpson --seed 42 --json-logs --out " +
                             (dir / "out").string());
    CHECK(res.exit_code == 0);

    std::istringstream lines(res.output);
    std::string line;
    bool saw_finding = false, saw_report = false;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);  // throws -> test failure
        REQUIRE(j.is_object());
        REQUIRE(j.contains("event"));
        if (j.at("event") == "finding") {
            saw_finding = true;
            CHECK(j.contains("id"));
            CHECK(j.contains("severity"));
            CHECK(j.contains("metrics"));
        }
        if (j.at("event") == "report") {
            saw_report = true;
            CHECK(fs::exists(fs::path(j.at("path").get<std::string>())));
        }
    }
    CHECK(saw_finding);
    CHECK(saw_report);
    fs::remove_all(dir);
}

TEST_CASE("maup demo writes the full artifact set") {
    const fs::path dir = scratch_dir("maup_demo");
    const auto res = run_cli("demo --experiment maup --seed 42 --no-timestamp --out " +
                             (dir / "out").string());
    CHECK(res.exit_code == 0);

    for (const char* name :
         {"report.json", "surface.svg", "partition_0_side5.svg", "partition_1_side10.svg",
          "partition_2_side20.svg", "partition_3_side25.svg", "consistency.svg"})
        CHECK_MESSAGE(fs::exists(dir / "out" / name), name);

    const auto rep = json::parse(slurp(dir / "out" / "report.json"));
    report::validate_report_json(rep);
    // Every artifact the report references is on disk.
    for (const auto& f : rep.at("findings"))
        for (const auto& a : f.at("artifacts"))
            CHECK(fs::exists(dir / "out" / a.get<std::string>()));
    CHECK(rep.at("findings").at(0).at("kind") == "maup.inconsistency");
    fs::remove_all(dir);
}

TEST_CASE("--threads does not change the output") {
    const fs::path a = scratch_dir("thr_a");
    const fs::path b = scratch_dir("thr_b");
    CHECK(run_cli("demo --experiment gwr --seed 7 --no-timestamp --threads 1 --out " +
                  a.string())
              .exit_code == 0);
    CHECK(run_cli("demo --experiment gwr --seed 7 --no-timestamp --threads 8 --out " +
                  b.string())
              .exit_code == 0);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(run_cli("demo --experiment gwr --threads 0 --out " + a.string()).exit_code == 2);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("explicit analysis flags reach the report config") {
    const fs::path dir = scratch_dir("flags");
    write_file(dir / "pts.csv", kScatterCsv);
    const auto res = run_cli("kde --input " + (dir / "pts.csv").string() +
                             " --steps 3 --grid-side 32 --no-timestamp --out " +
                             (dir / "out").string());
    CHECK(res.exit_code == 0);
    const auto rep = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(rep.at("config").at("steps").get<int>() == 3);
    CHECK(rep.at("config").at("grid-side").get<int>() == 32);
    CHECK(rep.at("config").at("input").get<std::string>() == (dir / "pts.csv").string());
    // Output location is not analysis configuration.
    CHECK_FALSE(rep.at("config").contains("out"));
    fs::remove_all(dir);
}
