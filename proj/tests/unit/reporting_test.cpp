#include "tmforge/report.hpp"

#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support/dot_checker.hpp"
#include "support/generators.hpp"

using namespace tmforge;

namespace {

ComplianceSummary azure_like_summary() {
    ComplianceSummary summary;
    summary.provider = "Provider A";
    summary.framework = Scheme::Ours;
    summary.total = 80;
    summary.full = 76;
    summary.not_met = 4;
    summary.unsatisfied_rate = Rational(4, 80);
    return summary;
}

ReportBundle dread_bundle() {
    DreadRankingSection section;
    section.rows.push_back({"high", "", {3, 3, 3, 3, 3}, std::nullopt, ""});
    section.rows.push_back({"low", "", {1, 1, 1, 1, 1}, std::nullopt, ""});
    ReportBundle bundle;
    bundle.add(std::move(section));
    return bundle;
}

}  // namespace

TEST_CASE("compliance cells render the glyph with the unsatisfied rate") {
    ComplianceTableSection section;
    section.summaries.push_back(azure_like_summary());
    ReportBundle bundle;
    bundle.add(std::move(section));
    const std::string markdown = render_markdown(bundle);
    CHECK(markdown.find("●(5% unsatisfied)") != std::string::npos);

    const std::string ascii = render_markdown(bundle, {true});
    CHECK(ascii.find("Y(5% unsatisfied)") != std::string::npos);
}

TEST_CASE("an empty bundle renders a header-only document") {
    const std::string markdown = render_markdown(ReportBundle{});
    CHECK(markdown == "# Threat model report\n\n");
    CHECK(render_json(ReportBundle{}) == R"({"schema":1,"sections":[]})");
}

TEST_CASE("rendering is deterministic") {
    ReportBundle bundle = dread_bundle();
    CHECK(render_markdown(bundle) == render_markdown(bundle));
    CHECK(render_json(bundle) == render_json(bundle));
}

TEST_CASE("sections are re-ordered into the fixed kind order") {
    ReportBundle bundle;
    bundle.add(GapFindingsSection{});
    bundle.add(ModelSummarySection{"m", {}, {}});
    const auto ordered = bundle.ordered();
    REQUIRE(ordered.size() == 2);
    CHECK(ordered[0].kind == SectionKind::ModelSummary);
    CHECK(ordered[1].kind == SectionKind::GapFindings);
}

TEST_CASE("json reports parse and keep the dread ranking order") {
    const std::string text = render_json(dread_bundle());
    const auto doc = nlohmann::json::parse(text);
    CHECK(doc["schema"] == 1);
    const auto& rows = doc["sections"][0]["payload"]["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["score"] == 15);
    CHECK(rows[1]["score"] == 5);
    CHECK(rows[0]["label"] == "high");
}

TEST_CASE("json rendering of generated bundles always parses") {
    tmftest::Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        ReportBundle bundle;
        if (rng.chance(0.5)) {
            ThreatTableSection threats;
            threats.heading = tmftest::gen_name(rng);
            const DfdLevel level = tmftest::gen_level(rng, 0);
            threats.threats = enumerate_threats(level, StrideRuleMatrix::standard());
            bundle.add(std::move(threats));
        }
        if (rng.chance(0.5)) {
            DreadRankingSection dread;
            const int rows = rng.between(0, 5);
            for (int k = 0; k < rows; ++k) {
                dread.rows.push_back({tmftest::gen_name(rng), "",
                                      {rng.between(1, 3), rng.between(1, 3), rng.between(1, 3),
                                       rng.between(1, 3), rng.between(1, 3)},
                                      std::nullopt, ""});
            }
            bundle.add(std::move(dread));
        }
        if (rng.chance(0.4)) {
            ComplianceTableSection compliance;
            compliance.summaries.push_back(azure_like_summary());
            bundle.add(std::move(compliance));
        }
        const std::string text = render_json(bundle);
        const auto doc = nlohmann::json::parse(text, nullptr, false);
        REQUIRE(!doc.is_discarded());
        CHECK(doc["schema"] == 1);
    }
}

TEST_CASE("markdown tables keep a uniform column count per table") {
    ReportBundle bundle = dread_bundle();
    ComplianceTableSection compliance;
    compliance.summaries.push_back(azure_like_summary());
    bundle.add(std::move(compliance));
    const std::string markdown = render_markdown(bundle);

    std::istringstream lines(markdown);
    std::string line;
    int current_columns = -1;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] != '|') {
            current_columns = -1;
            continue;
        }
        int columns = 0;
        bool escaped = false;
        for (char c : line) {
            if (escaped) {
                escaped = false;
                continue;
            }
            if (c == '\\') {
                escaped = true;
                continue;
            }
            if (c == '|') ++columns;
        }
        if (current_columns == -1) {
            current_columns = columns;
        } else {
            CHECK(columns == current_columns);
        }
    }
}

TEST_CASE("DFD levels render to valid DOT with the documented shapes") {
    DfdLevel level;
    level.rank = 0;
    level.elements.push_back({"E1", ElementKind::ExternalEntity, "User", false, {}, {}});
    level.elements.push_back({"P1", ElementKind::Process, "Cloud", false, {}, {}});
    level.flows.push_back({"F1", "E1", "P1", "request", {}});
    const std::string dot = render_dot(level);
    CAPTURE(dot);
    CHECK(tmftest::valid_dot(dot));
    CHECK(dot.find("\"E1\" [shape=box") != std::string::npos);
    CHECK(dot.find("\"P1\" [shape=ellipse") != std::string::npos);
    CHECK(dot.find("\"E1\" -> \"P1\"") != std::string::npos);

    size_t nodes = 0;
    size_t pos = 0;
    while ((pos = dot.find("[shape=", pos)) != std::string::npos) {
        ++nodes;
        pos += 7;
    }
    CHECK(nodes == 2);
}

TEST_CASE("stores render open-ended and boundaries as dashed clusters") {
    DfdLevel level;
    level.rank = 2;
    level.boundaries.push_back({"B1", "zone", {}});
    level.elements.push_back({"D1", ElementKind::DataStore, "Audit & Logs", true, {"B1"}, {}});
    level.elements.push_back({"P1", ElementKind::Process, "Writer", false, {}, {}});
    level.flows.push_back({"F1", "P1", "D1", "events", {}});
    DfdModel model;
    model.title = "m";
    model.levels.push_back(level);
    refresh_derived(model);
    const std::string dot = render_dot(model.levels[0]);
    CAPTURE(dot);
    CHECK(tmftest::valid_dot(dot));
    CHECK(dot.find("subgraph \"cluster_B1\"") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
    CHECK(dot.find("SIDES=\"TB\"") != std::string::npos);
    CHECK(dot.find("Audit &amp; Logs") != std::string::npos);
}

TEST_CASE("attack trees annotate AND gates in DOT") {
    AttackTree tree;
    tree.goal = "g";
    tree.root = "root";
    AttackTreeNode root;
    root.id = "root";
    root.label = "root";
    root.gate = GateKind::Or;
    root.children = {"a", "band"};
    AttackTreeNode band;
    band.id = "band";
    band.label = "both";
    band.gate = GateKind::And;
    band.children = {"b", "c"};
    AttackTreeNode a, b, c;
    a.id = a.label = "a";
    b.id = b.label = "b";
    c.id = c.label = "c";
    tree.nodes = {{"root", root}, {"band", band}, {"a", a}, {"b", b}, {"c", c}};

    const std::string dot = render_dot(tree);
    CAPTURE(dot);
    CHECK(tmftest::valid_dot(dot));
    CHECK(dot.find("both\\nAND") != std::string::npos);
    CHECK(dot.find("root\\nAND") == std::string::npos);  // OR unannotated
}

TEST_CASE("render_dot rejects invalid input") {
    DfdLevel level;
    level.rank = 0;
    level.flows.push_back({"F1", "E1", "P1", "x", {}});
    CHECK_THROWS_AS(render_dot(level), InputError);

    AttackTree tree;
    tree.goal = "g";
    tree.root = "nowhere";
    CHECK_THROWS_AS(render_dot(tree), InputError);
}

TEST_CASE("generated levels always render to checker-valid DOT") {
    tmftest::Rng rng(37);
    for (int i = 0; i < 60; ++i) {
        const DfdLevel level = tmftest::gen_level(rng, 0);
        REQUIRE(validate_level(level).empty());
        CHECK(tmftest::valid_dot(render_dot(level)));
    }
    for (int i = 0; i < 60; ++i) {
        const AttackTree tree = tmftest::gen_attack_tree(rng, 10);
        CHECK(tmftest::valid_dot(render_dot(tree)));
    }
}
