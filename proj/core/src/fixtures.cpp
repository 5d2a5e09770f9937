#include "tmforge/fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "compliance_internal.hpp"
#include "json_util.hpp"
#include "tmforge/dsl.hpp"

namespace fs = std::filesystem;

namespace tmforge {

const ComplianceMatrix* ProviderCompliance::matrix(Scheme framework) const {
    for (const ComplianceMatrix& m : matrices) {
        if (m.framework == framework) return &m;
    }
    return nullptr;
}

std::vector<CorrelationRule> FixtureSet::correlation_rules() const {
    std::vector<CorrelationRule> rules;
    rules.reserve(stride_rows.size());
    for (const StrideRowFixture& row : stride_rows) {
        CorrelationRule rule;
        rule.match_id = row.element_id;
        rule.category = row.category;
        rule.refs = row.refs;
        rule.provenance = row.provenance;
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<ComplianceMatrix> FixtureSet::matrices(Scheme framework) const {
    std::vector<ComplianceMatrix> out;
    for (const ProviderCompliance& provider : compliance) {
        if (const ComplianceMatrix* m = provider.matrix(framework)) out.push_back(*m);
    }
    return out;
}

std::string default_fixture_root() {
    if (const char* env = std::getenv("TMFORGE_FIXTURES"); env != nullptr && *env != '\0') {
        return env;
    }
    return "fixtures";
}

namespace {

std::optional<std::string> read_file(const fs::path& path, std::vector<SchemaError>& errors) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        errors.push_back({path.string(), "", "file is missing or unreadable"});
        return std::nullopt;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void load_stride_rows(const fs::path& path, FixtureSet& set,
                      std::vector<SchemaError>& errors) {
    auto text = read_file(path, errors);
    if (!text) return;
    auto doc = jsonutil::parse(*text, path.string(), errors);
    if (!doc) return;
    if (!doc->is_object() || !doc->contains("rows") || !(*doc)["rows"].is_array()) {
        errors.push_back({path.string(), "", "expected an object with a 'rows' array"});
        return;
    }
    const std::string filename = path.string();
    const auto& rows = (*doc)["rows"];
    for (size_t i = 0; i < rows.size(); ++i) {
        const std::string jpath = "rows[" + std::to_string(i) + "]";
        const auto& item = rows[i];
        StrideRowFixture row;
        auto id = jsonutil::req_string(item, "id", filename, jpath, errors);
        auto category = jsonutil::req_string(item, "category", filename, jpath, errors);
        if (!id || !category) continue;
        row.element_id = *id;
        row.element_kind = jsonutil::opt_string(item, "element");
        row.element_name = jsonutil::opt_string(item, "name");
        if (category->size() != 1 || !category_from_letter((*category)[0])) {
            errors.push_back({filename, jpath, "category must be one STRIDE letter"});
            continue;
        }
        row.category = *category_from_letter((*category)[0]);
        for (const std::string& ref :
             jsonutil::opt_string_array(item, "refs", filename, jpath, errors)) {
            auto lib_id = parse_attack_lib_id(ref);
            if (!lib_id) {
                errors.push_back({filename, jpath, lib_id.error()});
                continue;
            }
            row.refs.push_back(lib_id.value());
        }
        row.threat_no = jsonutil::opt_string(item, "threat_no");
        row.provenance = jsonutil::opt_string(item, "provenance");
        set.stride_rows.push_back(std::move(row));
    }
}

void load_dread_fixture(const fs::path& path, FixtureSet& set,
                        std::vector<SchemaError>& errors) {
    auto text = read_file(path, errors);
    if (!text) return;
    auto loaded = load_dread_rows(*text, path.string());
    errors.insert(errors.end(), loaded.errors.begin(), loaded.errors.end());
    if (loaded.value) set.dread_rows = std::move(*loaded.value);
}

void load_provider_compliance(const fs::path& path, FixtureSet& set,
                              std::vector<SchemaError>& errors) {
    auto text = read_file(path, errors);
    if (!text) return;
    auto doc = jsonutil::parse(*text, path.string(), errors);
    if (!doc) return;
    const std::string filename = path.string();
    ProviderCompliance provider;
    auto name = jsonutil::req_string(*doc, "provider", filename, "", errors);
    if (!name) return;
    provider.provider = *name;
    if (!doc->contains("matrices") || !(*doc)["matrices"].is_array()) {
        errors.push_back({filename, "", "expected a 'matrices' array"});
        return;
    }
    for (const auto& body : (*doc)["matrices"]) {
        auto loaded = load_compliance_matrix_json(body, filename);
        errors.insert(errors.end(), loaded.errors.begin(), loaded.errors.end());
        if (!loaded.value) continue;
        if (loaded.value->provider != provider.provider) {
            errors.push_back({filename, "",
                              "matrix provider '" + loaded.value->provider +
                                  "' disagrees with file provider '" + provider.provider +
                                  "'"});
            continue;
        }
        provider.matrices.push_back(std::move(*loaded.value));
    }
    set.compliance.push_back(std::move(provider));
}

void load_tree_fixture(const fs::path& path, FixtureSet& set,
                       std::vector<SchemaError>& errors) {
    auto text = read_file(path, errors);
    if (!text) return;
    auto loaded = load_attack_tree(*text, path.string());
    errors.insert(errors.end(), loaded.errors.begin(), loaded.errors.end());
    if (!loaded.value) return;
    TreeFixture fixture;
    fixture.tree = std::move(*loaded.value);
    fixture.file = path.filename().string();
    auto doc = nlohmann::json::parse(*text, nullptr, false);
    fixture.reconstructed = jsonutil::opt_bool(doc, "reconstructed");
    fixture.provenance = jsonutil::opt_string(doc, "provenance");
    set.trees.push_back(std::move(fixture));
}

void load_meta(const fs::path& path, FixtureSet& set, std::vector<SchemaError>& errors) {
    auto text = read_file(path, errors);
    if (!text) return;
    auto doc = jsonutil::parse(*text, path.string(), errors);
    if (!doc) return;
    const std::string filename = path.string();
    FixtureMeta meta;
    auto count = [&](const char* key) {
        auto value = jsonutil::req_int(*doc, key, filename, "", errors);
        return value.value_or(0);
    };
    meta.ours_requirements = count("ours_requirements");
    meta.nist_requirements = count("nist_requirements");
    meta.dod_requirements = count("dod_requirements");
    meta.principles = count("principles");
    meta.providers = count("providers");
    meta.dread_rows = count("dread_rows");
    meta.attack_trees = count("attack_trees");
    meta.tree_subgoals = count("tree_subgoals");
    meta.subgoal_reading = jsonutil::opt_string(*doc, "subgoal_reading", "leaves");
    meta.provider_names =
        jsonutil::opt_string_array(*doc, "provider_names", filename, "", errors);
    if (doc->contains("reported_totals") && (*doc)["reported_totals"].is_object()) {
        const auto& totals = (*doc)["reported_totals"];
        ReportedTotals reported;
        reported.attack_library_entries =
            jsonutil::req_int(totals, "attack_library_entries", filename, "reported_totals",
                              errors)
                .value_or(0);
        reported.cves =
            jsonutil::req_int(totals, "cves", filename, "reported_totals", errors).value_or(0);
        reported.cwes =
            jsonutil::req_int(totals, "cwes", filename, "reported_totals", errors).value_or(0);
        reported.papers =
            jsonutil::req_int(totals, "papers", filename, "reported_totals", errors).value_or(0);
        reported.publications =
            jsonutil::req_int(totals, "publications", filename, "reported_totals", errors)
                .value_or(0);
        reported.conferences =
            jsonutil::req_int(totals, "conferences", filename, "reported_totals", errors)
                .value_or(0);
        reported.attack_techniques =
            jsonutil::req_int(totals, "attack_techniques", filename, "reported_totals", errors)
                .value_or(0);
        reported.threats =
            jsonutil::req_int(totals, "threats", filename, "reported_totals", errors)
                .value_or(0);
        reported.attack_tree_subgoals =
            jsonutil::req_int(totals, "attack_tree_subgoals", filename, "reported_totals",
                              errors)
                .value_or(0);
        meta.reported = reported;
    } else {
        errors.push_back({filename, "", "missing 'reported_totals' object"});
    }
    set.meta = std::move(meta);
}

void cross_check(const FixtureSet& set, std::vector<SchemaError>& errors) {
    const FixtureMeta& meta = set.meta;
    auto expect = [&](int actual, int wanted, const std::string& what) {
        if (actual != wanted) {
            errors.push_back({"fixtures", what,
                              "expected " + std::to_string(wanted) + ", found " +
                                  std::to_string(actual)});
        }
    };

    expect(set.requirements.count(Scheme::Ours), meta.ours_requirements, "ours requirements");
    expect(set.requirements.count(Scheme::Nist), meta.nist_requirements, "nist requirements");
    expect(set.requirements.count(Scheme::Dod), meta.dod_requirements, "dod requirements");
    expect(static_cast<int>(set.requirements.principles().size()), meta.principles,
           "principles");
    expect(static_cast<int>(set.dread_rows.size()), meta.dread_rows, "dread rows");
    expect(static_cast<int>(set.trees.size()), meta.attack_trees, "attack trees");
    expect(static_cast<int>(set.compliance.size()), meta.providers, "providers");

    if (!set.requirements.ours_contiguous()) {
        errors.push_back({"fixtures", "requirements", "Ours ids are not contiguous from 001"});
    }
    for (const std::string& tag : principle_coverage(set.requirements).uncovered) {
        errors.push_back({"fixtures", "requirements", "principle '" + tag + "' has no entries"});
    }

    // Every provider named in meta must have a full bundle of matrices.
    for (const std::string& name : meta.provider_names) {
        auto it = std::find_if(set.compliance.begin(), set.compliance.end(),
                               [&](const ProviderCompliance& p) { return p.provider == name; });
        if (it == set.compliance.end()) {
            errors.push_back(
                {"fixtures", "compliance", "missing compliance matrices for provider " + name});
            continue;
        }
        for (Scheme scheme : {Scheme::Ours, Scheme::Nist, Scheme::Dod}) {
            if (it->matrix(scheme) == nullptr) {
                errors.push_back({"fixtures", "compliance",
                                  "provider " + name + " is missing its " + to_string(scheme) +
                                      " matrix"});
            }
        }
    }

    // Cross-references.
    for (const StrideRowFixture& row : set.stride_rows) {
        for (const AttackLibId& ref : row.refs) {
            if (!set.attack_library.contains(ref)) {
                errors.push_back({"fixtures", "stride_rows",
                                  "row for " + row.element_id +
                                      " references unknown attack-library id " + ref.text()});
            }
        }
    }
    for (const DreadRow& row : set.dread_rows) {
        if (!row.requirement.empty() &&
            set.requirements.find(row.requirement) == nullptr) {
            errors.push_back({"fixtures", "dread",
                              "row '" + row.label + "' references unknown requirement " +
                                  row.requirement});
        }
    }
    for (const FindingRecord& finding : set.findings) {
        if (set.requirements.find(finding.requirement_id) == nullptr) {
            errors.push_back({"fixtures", "findings",
                              "finding references unknown requirement " +
                                  finding.requirement_id.text()});
        }
        for (const std::string& provider : finding.providers) {
            if (std::find(set.meta.provider_names.begin(), set.meta.provider_names.end(),
                          provider) == set.meta.provider_names.end()) {
                errors.push_back({"fixtures", "findings",
                                  "finding names unknown provider '" + provider + "'"});
            }
        }
    }
    for (const ProviderCompliance& provider : set.compliance) {
        for (const ComplianceMatrix& matrix : provider.matrices) {
            for (const auto& [key, cell] : matrix.cells) {
                const Requirement* entry = set.requirements.find(key);
                if (entry == nullptr || entry->id.scheme != matrix.framework) {
                    errors.push_back({"fixtures", "compliance",
                                      "matrix for " + provider.provider +
                                          " has a cell for unknown id " + key});
                }
            }
        }
    }

    int leaf_total = 0;
    for (const TreeFixture& fixture : set.trees) {
        const auto tree_errors = validate_tree(fixture.tree);
        for (const Diagnostic& diagnostic : tree_errors) {
            errors.push_back({"fixtures", fixture.file, diagnostic.message});
        }
        if (has_errors(tree_errors)) continue;
        for (const AttackTreeNode* leaf : fixture.tree.leaves()) {
            ++leaf_total;
            for (const std::string& ref : leaf->requirement_refs) {
                if (set.requirements.find(ref) == nullptr) {
                    errors.push_back({"fixtures", fixture.file,
                                      "leaf " + leaf->id + " references unknown requirement " +
                                          ref});
                }
            }
            for (const std::string& ref : leaf->threat_refs) {
                if (ref.size() < 2 || ref[0] != 'T' ||
                    !std::all_of(ref.begin() + 1, ref.end(), [](char c) {
                        return c >= '0' && c <= '9';
                    })) {
                    errors.push_back({"fixtures", fixture.file,
                                      "leaf " + leaf->id + " has malformed threat ref '" + ref +
                                          "'"});
                }
            }
        }
    }
    if (meta.subgoal_reading == "leaves") {
        expect(leaf_total, meta.tree_subgoals, "tree subgoal (leaf) total");
    }

    // Printed records never carry the reconstructed flag redundantly: a
    // record is either printed (provenance only) or reconstructed.
    for (const auto& [id, entry] : set.requirements.entries()) {
        if (entry.provenance.empty()) {
            errors.push_back(
                {"fixtures", "requirements", id.text() + " is missing its provenance note"});
        }
    }
}

}  // namespace

Loaded<FixtureSet> load_fixtures(const std::string& root) {
    Loaded<FixtureSet> out;
    FixtureSet set;
    const fs::path base(root);

    if (!fs::exists(base)) {
        out.errors.push_back({root, "", "fixture root does not exist"});
        return out;
    }

    if (auto text = read_file(base / "attack_lib" / "catalog.json", out.errors)) {
        auto loaded = load_attack_catalog(*text, (base / "attack_lib" / "catalog.json").string());
        out.errors.insert(out.errors.end(), loaded.errors.begin(), loaded.errors.end());
        if (loaded.value) set.attack_library = std::move(*loaded.value);
    }
    load_stride_rows(base / "attack_lib" / "stride_rows.json", set, out.errors);

    if (auto text = read_file(base / "requirements" / "catalog.json", out.errors)) {
        auto loaded =
            load_requirements(*text, (base / "requirements" / "catalog.json").string());
        out.errors.insert(out.errors.end(), loaded.errors.begin(), loaded.errors.end());
        if (loaded.value) set.requirements = std::move(*loaded.value);
    }

    load_dread_fixture(base / "dread" / "table.json", set, out.errors);

    const fs::path compliance_dir = base / "compliance";
    std::vector<fs::path> compliance_files;
    if (fs::is_directory(compliance_dir)) {
        for (const auto& entry : fs::directory_iterator(compliance_dir)) {
            if (entry.path().extension() == ".json") compliance_files.push_back(entry.path());
        }
    }
    std::sort(compliance_files.begin(), compliance_files.end());
    for (const fs::path& path : compliance_files) {
        load_provider_compliance(path, set, out.errors);
    }

    const fs::path trees_dir = base / "trees";
    std::vector<fs::path> tree_files;
    if (fs::is_directory(trees_dir)) {
        for (const auto& entry : fs::directory_iterator(trees_dir)) {
            if (entry.path().extension() == ".json") tree_files.push_back(entry.path());
        }
    }
    std::sort(tree_files.begin(), tree_files.end());
    for (const fs::path& path : tree_files) {
        load_tree_fixture(path, set, out.errors);
    }

    if (auto text = read_file(base / "findings" / "findings.json", out.errors)) {
        auto loaded = load_findings(*text, (base / "findings" / "findings.json").string());
        out.errors.insert(out.errors.end(), loaded.errors.begin(), loaded.errors.end());
        if (loaded.value) set.findings = std::move(*loaded.value);
    }

    if (auto text = read_file(base / "openstack.tmf", out.errors)) {
        auto outcome = parse_model(*text, (base / "openstack.tmf").string());
        if (!outcome.ok()) {
            out.errors.push_back({(base / "openstack.tmf").string(), "",
                                  "parse failed: " + outcome.error->message});
        } else {
            if (has_errors(outcome.diagnostics)) {
                for (const Diagnostic& diagnostic : outcome.diagnostics) {
                    out.errors.push_back(
                        {(base / "openstack.tmf").string(), "", diagnostic.message});
                }
            }
            set.model = std::move(*outcome.model);
        }
    }

    load_meta(base / "meta.json", set, out.errors);

    if (out.errors.empty()) cross_check(set, out.errors);
    if (!out.errors.empty()) return out;
    out.value = std::move(set);
    return out;
}

}  // namespace tmforge
