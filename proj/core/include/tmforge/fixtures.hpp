#pragma once

#include <string>
#include <vector>

#include "tmforge/attack_catalog.hpp"
#include "tmforge/attack_tree.hpp"
#include "tmforge/compliance.hpp"
#include "tmforge/diagnostics.hpp"
#include "tmforge/dread.hpp"
#include "tmforge/model.hpp"
#include "tmforge/requirements.hpp"
#include "tmforge/stride.hpp"

namespace tmforge {

// One row of the STRIDE/attack-library correlation table: the printed
// element, category and library references, convertible to a
// CorrelationRule keyed by element id.
struct StrideRowFixture {
    std::string element_kind;  // "entity" / "process" / ...
    std::string element_id;
    std::string element_name;
    StrideCategory category = StrideCategory::Spoofing;
    std::vector<AttackLibId> refs;
    std::string threat_no;  // e.g. "T1"
    std::string provenance;
};

struct ProviderCompliance {
    std::string provider;
    std::vector<ComplianceMatrix> matrices;  // one per framework

    const ComplianceMatrix* matrix(Scheme framework) const;
};

struct TreeFixture {
    AttackTree tree;
    bool reconstructed = false;
    std::string provenance;
    std::string file;
};

// Corpus totals as reported by the fixture tree's source, recorded
// verbatim; they do not reconcile arithmetically and the shipped excerpt
// is far smaller.
struct ReportedTotals {
    int attack_library_entries = 0;
    int cves = 0;
    int cwes = 0;
    int papers = 0;
    int publications = 0;
    int conferences = 0;
    int attack_techniques = 0;
    int threats = 0;
    int attack_tree_subgoals = 0;
};

struct FixtureMeta {
    int ours_requirements = 0;
    int nist_requirements = 0;
    int dod_requirements = 0;
    int principles = 0;
    int providers = 0;
    int dread_rows = 0;
    int attack_trees = 0;
    int tree_subgoals = 0;
    std::string subgoal_reading;  // what "sub-goal" counts: "leaves"
    std::vector<std::string> provider_names;
    ReportedTotals reported;
};

struct FixtureSet {
    AttackLibCatalog attack_library;
    std::vector<StrideRowFixture> stride_rows;
    RequirementsCatalog requirements;
    std::vector<DreadRow> dread_rows;
    std::vector<ProviderCompliance> compliance;  // one entry per provider
    std::vector<FindingRecord> findings;
    std::vector<TreeFixture> trees;
    DfdModel model;
    FixtureMeta meta;

    std::vector<CorrelationRule> correlation_rules() const;
    std::vector<ComplianceMatrix> matrices(Scheme framework) const;
};

// Loads the fixture tree rooted at `root` (attack_lib/, requirements/,
// dread/, compliance/, trees/, findings/, openstack.tmf, meta.json) and
// cross-checks every reference and the integrity counts from meta.json.
Loaded<FixtureSet> load_fixtures(const std::string& root);

// Default fixture root: the TMFORGE_FIXTURES environment variable when
// set, otherwise "fixtures".
std::string default_fixture_root();

}  // namespace tmforge
