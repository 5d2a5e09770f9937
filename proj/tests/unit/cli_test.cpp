#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "support/dot_checker.hpp"

namespace fs = std::filesystem;

#ifndef TMF_BIN
#error "TMF_BIN must name the tmf executable"
#endif
#ifndef TMFORGE_FIXTURE_DIR
#error "TMFORGE_FIXTURE_DIR must point at the shipped fixture tree"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "tmforge-cli-tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path path = scratch_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

RunResult run(const std::string& args) {
    const fs::path dir = scratch_dir();
    const fs::path out_path = dir / "stdout.txt";
    const fs::path err_path = dir / "stderr.txt";
    const std::string command = std::string(TMF_BIN) + " " + args + " >" +
                                out_path.string() + " 2>" + err_path.string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

std::string fixture(const std::string& rel) {
    return (fs::path(TMFORGE_FIXTURE_DIR) / rel).string();
}

const std::string kTwoLevel =
    "model \"m\"\n"
    "level context\nentity E1 \"User\"\nprocess P1 \"Cloud\"\n"
    "flow F1 E1 -> P1 \"req\"\n"
    "level 0\nentity E2 \"User\"\nprocess P2 \"Service\"\n"
    "flow F1 E2 -> P2 \"req\"\n"
    "refine context:E1 -> E2\nrefine context:P1 -> P2\n";

}  // namespace

TEST_CASE("check: valid two-level model exits 0") {
    const auto model = write_temp("ok.tmf", kTwoLevel);
    const RunResult result = run("check " + model.string());
    CHECK(result.exit_code == 0);
}

TEST_CASE("check: uncovered flow exits 1 with a diagnostic on stderr") {
    std::string text = kTwoLevel;
    const size_t pos = text.find("flow F1 E2 -> P2 \"req\"\n");
    text.erase(pos, std::string("flow F1 E2 -> P2 \"req\"\n").size());
    const auto model = write_temp("uncovered.tmf", text);
    const RunResult result = run("check " + model.string());
    CHECK(result.exit_code == 1);
    CHECK(result.err.find("F1") != std::string::npos);
    CHECK(result.err.find("not covered") != std::string::npos);
}

TEST_CASE("check: missing file exits 2") {
    const RunResult result = run("check /nonexistent/nope.tmf");
    CHECK(result.exit_code == 2);
}

TEST_CASE("check: parse error exits 2") {
    const auto model = write_temp("broken.tmf", "flow what\n");
    const RunResult result = run("check " + model.string());
    CHECK(result.exit_code == 2);
}

TEST_CASE("threats: the fixture level-1 table obeys the count formula") {
    const RunResult result = run("threats " + fixture("openstack.tmf") +
                                 " --level 1 --format json");
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out, nullptr, false);
    REQUIRE(!doc.is_discarded());
    const auto& threats = doc["sections"][0]["payload"]["threats"];
    // level 1: 1 entity, 12 processes, 6 plain stores, 1 log store, 22 flows
    const int expected = 2 * 1 + 6 * 12 + 3 * 6 + 4 * 1 + 3 * 22;
    CHECK(static_cast<int>(threats.size()) == expected);
}

TEST_CASE("threats: markdown and json formats agree on the row count") {
    const RunResult md = run("threats " + fixture("openstack.tmf") + " --level context");
    REQUIRE(md.exit_code == 0);
    size_t rows = 0;
    std::istringstream lines(md.out);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("| T", 0) == 0) ++rows;
    }
    CHECK(rows == 2 * 1 + 6 * 1 + 3 * 2);  // E1, P1, F1, F2
}

TEST_CASE("threats: unknown level selector exits 2") {
    const RunResult result = run("threats " + fixture("openstack.tmf") + " --level 9");
    CHECK(result.exit_code == 2);
}

TEST_CASE("threats: a matrix override narrows the entity categories") {
    const auto matrix = write_temp("entity-s.json", R"({"external_entity": "S"})");
    const RunResult result = run("threats " + fixture("openstack.tmf") +
                                 " --level context --matrix " + matrix.string() +
                                 " --format json");
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out, nullptr, false);
    REQUIRE(!doc.is_discarded());
    const auto& threats = doc["sections"][0]["payload"]["threats"];
    CHECK(static_cast<int>(threats.size()) == 1 * 1 + 6 * 1 + 3 * 2);  // E drops to {S}

    const auto bad = write_temp("bad-matrix.json", R"({"process": "ST"})");
    CHECK(run("threats " + fixture("openstack.tmf") + " --level context --matrix " +
              bad.string())
              .exit_code == 2);
}

TEST_CASE("threats: correlation rules fill the attack library column") {
    const RunResult result =
        run("threats " + fixture("openstack.tmf") + " --level 1 --rules " +
            fixture("attack_lib/rules.json") + " --catalog " +
            fixture("attack_lib/catalog.json") + " --format json");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("AL-V-1") != std::string::npos);
}

TEST_CASE("tree: cut sets of OR(a, AND(b,c)) print both sets") {
    const std::string doc = R"({"goal": "g", "root": "root", "nodes": {
        "root": {"label": "root", "gate": "or", "children": ["a", "band"]},
        "band": {"label": "band", "gate": "and", "children": ["b", "c"]},
        "a": {"label": "a"}, "b": {"label": "b"}, "c": {"label": "c"}}})";
    const auto path = write_temp("orand.json", doc);
    const RunResult result = run("tree " + path.string() + " --cutsets");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("{a}") != std::string::npos);
    CHECK(result.out.find("{b, c}") != std::string::npos);
}

TEST_CASE("tree: fixture trees are fully covered, exit 0") {
    for (const char* name :
         {"trees/account-theft.json", "trees/denial-of-service.json",
          "trees/storage-theft.json"}) {
        const RunResult result = run("tree " + fixture(name) + " --coverage --catalog " +
                                     fixture("requirements/catalog.json"));
        CHECK(result.exit_code == 0);
        CHECK(result.out.find("all cut sets mitigated") != std::string::npos);
    }
}

TEST_CASE("tree: an uncovered OR branch exits 1") {
    const std::string doc = R"({"goal": "g", "root": "root", "nodes": {
        "root": {"label": "root", "gate": "or", "children": ["a", "b"]},
        "a": {"label": "a", "requirement_refs": ["Ours-Secu-001"]},
        "b": {"label": "b"}}})";
    const auto path = write_temp("uncovered-tree.json", doc);
    const RunResult result = run("tree " + path.string() + " --coverage --catalog " +
                                 fixture("requirements/catalog.json"));
    CHECK(result.exit_code == 1);
}

TEST_CASE("tree: coverage without a catalog is a usage error") {
    const RunResult result =
        run("tree " + fixture("trees/account-theft.json") + " --coverage");
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("--catalog") != std::string::npos);
}

TEST_CASE("tree: invalid trees exit 2") {
    const auto path = write_temp("cycle.json", R"({"goal": "g", "root": "a", "nodes": {
        "a": {"label": "a", "gate": "or", "children": ["b"]},
        "b": {"label": "b", "gate": "or", "children": ["a"]}}})");
    const RunResult result = run("tree " + path.string() + " --cutsets");
    CHECK(result.exit_code == 2);
}

TEST_CASE("tree: DOT output passes the grammar checker") {
    const RunResult result = run("tree " + fixture("trees/account-theft.json") + " --dot");
    REQUIRE(result.exit_code == 0);
    CHECK(tmftest::valid_dot(result.out));
}

TEST_CASE("dread: inline factors print the total") {
    const RunResult result = run("dread --dread 2,2,2,2,2");
    CHECK(result.exit_code == 0);
    CHECK(result.out == "10\n");
}

TEST_CASE("dread: bad inline factors exit 2") {
    CHECK(run("dread --dread 2,2,2").exit_code == 2);
    CHECK(run("dread --dread 4,2,2,2,2").exit_code == 2);
    CHECK(run("dread --dread a,b,c,d,e").exit_code == 2);
}

TEST_CASE("dread: the fixture table reports its three discrepancies and exits 1") {
    const RunResult result = run("dread --input " + fixture("dread/table.json"));
    CHECK(result.exit_code == 1);
    CHECK(result.out.find("claimed 13, computed 12") != std::string::npos);
    CHECK(result.out.find("claimed 11, computed 12") != std::string::npos);
    CHECK(result.out.find("claimed 9, computed 11") != std::string::npos);
}

TEST_CASE("comply: fixture bundles include the 6.25% summary and exit 1") {
    const RunResult result =
        run("comply " + fixture("compliance/azure.json") + " " +
            fixture("compliance/aws.json") + " " + fixture("compliance/google_cloud.json") +
            " --catalog " + fixture("requirements/catalog.json"));
    CHECK(result.exit_code == 1);
    CHECK(result.out.find("6.25%") != std::string::npos);
    CHECK(result.out.find("5%") != std::string::npos);
    CHECK(result.out.find("Ours-Secu-008") != std::string::npos);
}

TEST_CASE("comply: an all-full matrix exits 0") {
    std::string cells;
    for (int i = 1; i <= 80; ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s\"Ours-Secu-%03d\": {\"rating\": \"full\"}",
                      i > 1 ? "," : "", i);
        cells += buf;
    }
    const auto path = write_temp("allfull.json",
                                 R"({"provider": "p", "framework": "ours", "cells": {)" +
                                     cells + "}}");
    const RunResult result =
        run("comply " + path.string() + " --catalog " + fixture("requirements/catalog.json"));
    CHECK(result.exit_code == 0);
}

TEST_CASE("comply: schema failures exit 2") {
    const auto path = write_temp("badmatrix.json", R"({"provider": "p"})");
    const RunResult result =
        run("comply " + path.string() + " --catalog " + fixture("requirements/catalog.json"));
    CHECK(result.exit_code == 2);
}

TEST_CASE("comply: json output is parseable") {
    const RunResult result =
        run("comply " + fixture("compliance/azure.json") + " --framework ours --catalog " +
            fixture("requirements/catalog.json") + " --format json");
    CHECK(result.exit_code == 1);
    const auto doc = nlohmann::json::parse(result.out, nullptr, false);
    REQUIRE(!doc.is_discarded());
    CHECK(doc["schema"] == 1);
}

TEST_CASE("threats: a declared-but-empty level prints an empty table and exits 0") {
    const auto model = write_temp("emptylevel.tmf",
                                  "model \"m\"\n"
                                  "level context\nentity E1 \"User\"\nprocess P1 \"Cloud\"\n"
                                  "level 0\n");
    const RunResult result = run("threats " + model.string() + " --level 0 --format json");
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out, nullptr, false);
    REQUIRE(!doc.is_discarded());
    CHECK(doc["sections"][0]["payload"]["threats"].empty());
}

TEST_CASE("comply: partial-weight reports a labeled alternative rate on stderr") {
    std::string cells;
    for (int i = 1; i <= 80; ++i) {
        const char* rating = i == 1 ? "not_met" : (i <= 3 ? "partial" : "full");
        char buf[80];
        std::snprintf(buf, sizeof buf, "%s\"Ours-Secu-%03d\": {\"rating\": \"%s\"}",
                      i > 1 ? "," : "", i, rating);
        cells += buf;
    }
    const auto path = write_temp("weighted.json",
                                 R"({"provider": "p", "framework": "ours", "cells": {)" +
                                     cells + "}}");
    const RunResult result =
        run("comply " + path.string() + " --catalog " + fixture("requirements/catalog.json") +
            " --partial-weight 0.5 --no-gaps");
    CHECK(result.exit_code == 1);
    // headline rate counts only the not-met cell
    CHECK(result.out.find("1.25% unsatisfied") != std::string::npos);
    // weighted rate (1 + 0.5*2)/80 = 2.5%
    CHECK(result.err.find("2.5%") != std::string::npos);
}

TEST_CASE("report: composes sections and writes a file") {
    const fs::path out_path = scratch_dir() / "report.md";
    const RunResult result = run(
        "report --model " + fixture("openstack.tmf") + " --level 1 --tree " +
        fixture("trees/account-theft.json") + " --dread-rows " + fixture("dread/table.json") +
        " --matrix " + fixture("compliance/azure.json") + " --matrix " +
        fixture("compliance/aws.json") + " --matrix " + fixture("compliance/google_cloud.json") +
        " --catalog " + fixture("requirements/catalog.json") + " --findings " +
        fixture("findings/findings.json") + " --output " + out_path.string());
    REQUIRE(result.exit_code == 0);
    const std::string report = slurp(out_path);
    CHECK(report.find("## Model:") != std::string::npos);
    CHECK(report.find("## Threats") != std::string::npos);
    CHECK(report.find("## Attack tree:") != std::string::npos);
    CHECK(report.find("## DREAD ranking") != std::string::npos);
    CHECK(report.find("## Security analysis") != std::string::npos);
    CHECK(report.find("## Unmet requirements") != std::string::npos);
    CHECK(report.find("●(5% unsatisfied)") != std::string::npos);
    CHECK(report.find("●(6.25% unsatisfied)") != std::string::npos);
}

TEST_CASE("report: json format emits one parseable document with ordered sections") {
    const RunResult result = run(
        "report --model " + fixture("openstack.tmf") + " --level 1 --tree " +
        fixture("trees/storage-theft.json") + " --dread-rows " + fixture("dread/table.json") +
        " --matrix " + fixture("compliance/google_cloud.json") + " --catalog " +
        fixture("requirements/catalog.json") + " --format json");
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out, nullptr, false);
    REQUIRE(!doc.is_discarded());
    CHECK(doc["schema"] == 1);
    std::vector<std::string> kinds;
    for (const auto& section : doc["sections"]) kinds.push_back(section["kind"]);
    CHECK(kinds == std::vector<std::string>{"ModelSummary", "ThreatTable", "AttackTreeView",
                                            "DreadRanking", "ComplianceTable",
                                            "GapFindings"});
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("threats").exit_code == 2);
}
