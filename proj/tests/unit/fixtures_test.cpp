#include "tmforge/fixtures.hpp"

#include <filesystem>
#include <set>

#include "doctest.h"
#include "support/dot_checker.hpp"
#include "tmforge/dread.hpp"
#include "tmforge/report.hpp"

using namespace tmforge;
namespace fs = std::filesystem;

#ifndef TMFORGE_FIXTURE_DIR
#error "TMFORGE_FIXTURE_DIR must point at the shipped fixture tree"
#endif

namespace {

const FixtureSet& fixtures() {
    static const FixtureSet set = [] {
        auto loaded = load_fixtures(TMFORGE_FIXTURE_DIR);
        if (!loaded.ok()) {
            for (const SchemaError& error : loaded.errors) {
                MESSAGE(format_schema_error(error));
            }
            REQUIRE(loaded.ok());
        }
        return std::move(*loaded.value);
    }();
    return set;
}

}  // namespace

TEST_CASE("the shipped fixture tree loads with the documented counts") {
    const FixtureSet& set = fixtures();
    CHECK(set.requirements.count(Scheme::Ours) == 80);
    CHECK(set.requirements.count(Scheme::Nist) == 25);
    CHECK(set.requirements.count(Scheme::Dod) == 52);
    CHECK(set.requirements.principles().size() == 7);
    CHECK(set.dread_rows.size() == 6);
    CHECK(set.compliance.size() == 3);
    CHECK(set.trees.size() == 3);
    CHECK(set.findings.size() == 6);
}

TEST_CASE("every principle is covered by at least one requirement") {
    const PrincipleCoverage coverage = principle_coverage(fixtures().requirements);
    CHECK(coverage.uncovered.empty());
    CHECK(coverage.by_principle.size() == 7);
}

TEST_CASE("Ours ids are contiguous from 001 to 080") {
    CHECK(fixtures().requirements.ours_contiguous());
}

TEST_CASE("reconstructed records are a flagged strict subset") {
    const FixtureSet& set = fixtures();
    int reconstructed = 0;
    int printed = 0;
    for (const auto& [id, entry] : set.attack_library.entries()) {
        (entry.reconstructed ? reconstructed : printed)++;
    }
    CHECK(reconstructed > 0);
    CHECK(printed > 0);
    for (const TreeFixture& fixture : set.trees) CHECK(fixture.reconstructed);
}

TEST_CASE("the user-device location lookup includes the packet-filtering requirement") {
    const auto hits = lookup_by_location(fixtures().requirements, "User Device");
    bool has_001 = false;
    for (const Requirement& requirement : hits) {
        if (requirement.id.text() == "Ours-Secu-001") has_001 = true;
    }
    CHECK(has_001);
}

TEST_CASE("the correlation rows resolve against the attack library") {
    const FixtureSet& set = fixtures();
    REQUIRE(set.stride_rows.size() == 2);
    CHECK(set.stride_rows[0].element_id == "E1");
    CHECK(set.stride_rows[0].refs.size() == 20);
    CHECK(set.stride_rows[1].element_id == "P43");
    CHECK(set.stride_rows[1].threat_no == "T402");
    for (const StrideRowFixture& row : set.stride_rows) {
        for (const AttackLibId& ref : row.refs) {
            CHECK(set.attack_library.contains(ref));
        }
    }
}

TEST_CASE("the model validates, is refinement-sound, and its threats correlate") {
    const FixtureSet& set = fixtures();
    REQUIRE(validate_model(set.model).empty());
    CHECK(check_refinement_soundness(set.model).empty());

    const DfdLevel* level1 = set.model.find_level(2);
    REQUIRE(level1 != nullptr);
    auto threats = enumerate_threats(*level1, StrideRuleMatrix::standard());
    threats = correlate_attack_library(std::move(threats), set.attack_library,
                                       set.correlation_rules());

    bool e1_spoofing_refs = false;
    bool p43_elevation_ref = false;
    for (const ThreatRecord& threat : threats) {
        if (threat.target == "E1" && threat.category == StrideCategory::Spoofing) {
            std::set<std::string> refs;
            for (const AttackLibId& id : threat.attack_lib_refs) refs.insert(id.text());
            e1_spoofing_refs = refs.count("AL-A-7") && refs.count("AL-W-3") &&
                               refs.count("AL-V-16") && refs.count("AL-P-21");
        }
        if (threat.target == "P43" &&
            threat.category == StrideCategory::ElevationOfPrivilege) {
            p43_elevation_ref = threat.attack_lib_refs.size() == 1 &&
                                threat.attack_lib_refs[0].text() == "AL-V-1";
        }
    }
    CHECK(e1_spoofing_refs);
    CHECK(p43_elevation_ref);
}

TEST_CASE("fixture trees have 42 leaves in total and full countermeasure coverage") {
    const FixtureSet& set = fixtures();
    int leaves = 0;
    for (const TreeFixture& fixture : set.trees) {
        REQUIRE(validate_tree(fixture.tree).empty());
        leaves += static_cast<int>(fixture.tree.leaves().size());
        const CoverageReport report =
            check_countermeasure_coverage(fixture.tree, set.requirements);
        CHECK(report.uncovered_leaves.empty());
        CHECK(report.unknown_refs.empty());
        CHECK(report.fully_mitigated);
    }
    CHECK(leaves == 42);
    CHECK(set.meta.tree_subgoals == 42);
    CHECK(set.meta.subgoal_reading == "leaves");
}

TEST_CASE("ranking the six fixture rows orders by recomputed total, ties alphabetical") {
    std::vector<std::pair<std::string, DreadFactors>> items;
    for (const DreadRow& row : fixtures().dread_rows) {
        items.emplace_back(row.label, row.factors);
    }
    const auto ranked = rank(std::move(items));
    REQUIRE(ranked.size() == 6);
    // Three rows recompute to 12; the alphabetical tie-break puts
    // "Abusing permissions" first.
    const std::vector<std::pair<std::string, int>> expected = {
        {"Abusing permissions", 12},
        {"Modification of account information", 12},
        {"Sensitive data collection", 12},
        {"Access Control", 11},
        {"Elevation of privilege", 10},
        {"API calls that reveal authentication credentials", 9},
    };
    for (size_t i = 0; i < 6; ++i) {
        CHECK(ranked[i].label == expected[i].first);
        CHECK(ranked[i].score.total == expected[i].second);
    }
}

TEST_CASE("the source-reported corpus totals are recorded verbatim, not reproduced") {
    const ReportedTotals& reported = fixtures().meta.reported;
    CHECK(reported.attack_library_entries == 569);
    CHECK(reported.cves == 68);
    CHECK(reported.cwes == 7);
    CHECK(reported.papers == 1);
    CHECK(reported.publications == 32);
    CHECK(reported.conferences == 4);
    CHECK(reported.attack_techniques == 458);
    CHECK(reported.threats == 402);
    CHECK(reported.attack_tree_subgoals == 42);
    // the shipped excerpt is deliberately tiny next to the reported corpus
    CHECK(fixtures().attack_library.size() <
          static_cast<size_t>(reported.attack_library_entries) / 10);
}

TEST_CASE("the fixture trees render to valid DOT") {
    for (const TreeFixture& fixture : fixtures().trees) {
        const std::string dot = render_dot(fixture.tree);
        CHECK(tmftest::valid_dot(dot));
    }
}

TEST_CASE("the model's levels render to valid DOT with one node per element") {
    const FixtureSet& set = fixtures();
    for (const DfdLevel& level : set.model.levels) {
        const std::string dot = render_dot(level);
        CHECK(tmftest::valid_dot(dot));
        size_t nodes = 0;
        size_t pos = 0;
        while ((pos = dot.find("[shape=", pos)) != std::string::npos) {
            ++nodes;
            pos += 7;
        }
        CHECK(nodes == level.elements.size());
    }
}

TEST_CASE("deleting a provider matrix file is reported by provider name") {
    const fs::path scratch =
        fs::temp_directory_path() / "tmforge-fixture-copy";
    fs::remove_all(scratch);
    fs::copy(TMFORGE_FIXTURE_DIR, scratch, fs::copy_options::recursive);
    fs::remove(scratch / "compliance" / "google_cloud.json");

    auto loaded = load_fixtures(scratch.string());
    REQUIRE(!loaded.ok());
    bool names_provider = false;
    for (const SchemaError& error : loaded.errors) {
        if (error.message.find("Google Cloud") != std::string::npos) names_provider = true;
    }
    CHECK(names_provider);
    fs::remove_all(scratch);
}
