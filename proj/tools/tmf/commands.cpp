#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "tmforge/attack_catalog.hpp"
#include "tmforge/attack_tree.hpp"
#include "tmforge/compliance.hpp"
#include "tmforge/dread.hpp"
#include "tmforge/dsl.hpp"
#include "tmforge/fixtures.hpp"
#include "tmforge/report.hpp"
#include "tmforge/requirements.hpp"
#include "tmforge/stride.hpp"

namespace fs = std::filesystem;
using namespace tmforge;

namespace tmf {

namespace {

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int fail_input(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return kExitInputError;
}

void print_schema_errors(const std::vector<SchemaError>& errors) {
    for (const SchemaError& error : errors) {
        std::cerr << "error: " << format_schema_error(error) << "\n";
    }
}

std::optional<RequirementsCatalog> load_requirements_file(const std::string& path) {
    auto text = read_file(path);
    if (!text) {
        std::cerr << "error: cannot read " << path << "\n";
        return std::nullopt;
    }
    auto loaded = load_requirements(*text, path);
    if (!loaded.ok()) {
        print_schema_errors(loaded.errors);
        return std::nullopt;
    }
    return std::move(*loaded.value);
}

std::optional<ParseOutcome> parse_model_file(const std::string& path) {
    auto text = read_file(path);
    if (!text) {
        std::cerr << "error: cannot read " << path << "\n";
        return std::nullopt;
    }
    ParseOutcome outcome = parse_model(*text, path);
    if (!outcome.ok()) {
        std::cerr << "error: " << format_parse_error(*outcome.error) << "\n";
        return std::nullopt;
    }
    return outcome;
}

void emit(const ReportBundle& bundle, Format format, bool ascii, std::ostream& out) {
    if (format == Format::Json) {
        out << render_json(bundle) << "\n";
    } else {
        out << render_markdown(bundle, {ascii});
    }
}

// Matrix files may be single matrices or per-provider bundles with a
// "matrices" array (the fixture layout).
std::optional<std::vector<ComplianceMatrix>> load_matrix_files(
    const std::vector<std::string>& paths) {
    std::vector<ComplianceMatrix> matrices;
    for (const std::string& path : paths) {
        auto text = read_file(path);
        if (!text) {
            std::cerr << "error: cannot read " << path << "\n";
            return std::nullopt;
        }
        if (text->find("\"matrices\"") != std::string::npos) {
            auto parsed = nlohmann::json::parse(*text, nullptr, false);
            if (parsed.is_object() && parsed.contains("matrices") &&
                parsed["matrices"].is_array()) {
                bool bad = false;
                for (const auto& body : parsed["matrices"]) {
                    auto loaded = load_compliance_matrix(body.dump(), path);
                    if (!loaded.ok()) {
                        print_schema_errors(loaded.errors);
                        bad = true;
                        continue;
                    }
                    matrices.push_back(std::move(*loaded.value));
                }
                if (bad) return std::nullopt;
                continue;
            }
        }
        auto loaded = load_compliance_matrix(*text, path);
        if (!loaded.ok()) {
            print_schema_errors(loaded.errors);
            return std::nullopt;
        }
        matrices.push_back(std::move(*loaded.value));
    }
    return matrices;
}

}  // namespace

int cmd_check(const CheckArgs& args, const std::string&) {
    auto outcome = parse_model_file(args.model_path);
    if (!outcome) return kExitInputError;

    std::vector<Diagnostic> diagnostics = outcome->diagnostics;
    if (!has_errors(diagnostics)) {
        const auto soundness = check_refinement_soundness(*outcome->model);
        diagnostics.insert(diagnostics.end(), soundness.begin(), soundness.end());
        sort_diagnostics(diagnostics);
    }
    for (const Diagnostic& diagnostic : diagnostics) {
        std::cerr << format_diagnostic(diagnostic) << "\n";
    }
    if (has_errors(diagnostics)) return kExitFindings;
    std::cout << "ok: " << outcome->model->title << " ("
              << outcome->model->levels.size() << " levels)\n";
    return kExitSuccess;
}

int cmd_threats(const ThreatsArgs& args, const std::string& fixtures_root) {
    auto outcome = parse_model_file(args.model_path);
    if (!outcome) return kExitInputError;
    if (has_errors(outcome->diagnostics)) {
        for (const Diagnostic& diagnostic : outcome->diagnostics) {
            std::cerr << format_diagnostic(diagnostic) << "\n";
        }
        return fail_input("model does not validate; fix it before enumerating threats");
    }

    auto rank = level_rank_from_token(args.level);
    if (!rank) return fail_input("unknown level selector '" + args.level + "'");
    const DfdLevel* level = outcome->model->find_level(*rank);
    if (level == nullptr) {
        return fail_input("model has no " + level_display_name(*rank));
    }

    StrideRuleMatrix matrix = StrideRuleMatrix::standard();
    if (!args.matrix_path.empty()) {
        auto text = read_file(args.matrix_path);
        if (!text) return fail_input("cannot read " + args.matrix_path);
        auto loaded = load_matrix(*text, args.matrix_path);
        if (!loaded.ok()) {
            print_schema_errors(loaded.errors);
            return kExitInputError;
        }
        matrix = *loaded.value;
    }

    std::vector<ThreatRecord> threats = enumerate_threats(*level, matrix);

    if (!args.rules_path.empty()) {
        auto rules_text = read_file(args.rules_path);
        if (!rules_text) return fail_input("cannot read " + args.rules_path);
        auto rules = load_rules(*rules_text, args.rules_path);
        if (!rules.ok()) {
            print_schema_errors(rules.errors);
            return kExitInputError;
        }
        std::string catalog_path = args.catalog_path;
        if (catalog_path.empty()) {
            catalog_path = (fs::path(fixtures_root) / "attack_lib" / "catalog.json").string();
        }
        auto catalog_text = read_file(catalog_path);
        if (!catalog_text) return fail_input("cannot read " + catalog_path);
        auto catalog = load_attack_catalog(*catalog_text, catalog_path);
        if (!catalog.ok()) {
            print_schema_errors(catalog.errors);
            return kExitInputError;
        }
        try {
            threats = correlate_attack_library(std::move(threats), *catalog.value,
                                               *rules.value);
        } catch (const InputError& error) {
            return fail_input(error.what());
        }
    }

    ReportBundle bundle;
    bundle.add(ThreatTableSection{level_display_name(*rank), std::move(threats)});
    emit(bundle, args.format, false, std::cout);
    return kExitSuccess;
}

int cmd_tree(const TreeArgs& args, const std::string&) {
    auto text = read_file(args.tree_path);
    if (!text) return fail_input("cannot read " + args.tree_path);
    auto loaded = load_attack_tree(*text, args.tree_path);
    if (!loaded.ok()) {
        print_schema_errors(loaded.errors);
        return kExitInputError;
    }
    const AttackTree& tree = *loaded.value;
    const auto diagnostics = validate_tree(tree);
    if (has_errors(diagnostics)) {
        for (const Diagnostic& diagnostic : diagnostics) {
            std::cerr << format_diagnostic(diagnostic) << "\n";
        }
        return kExitInputError;
    }

    if (args.dot) {
        std::cout << render_dot(tree);
        return kExitSuccess;
    }

    AttackTreeViewSection section;
    section.tree = tree;
    if (args.cutsets) section.cut_sets = enumerate_cut_sets(tree);

    int exit_code = kExitSuccess;
    if (args.coverage) {
        if (args.catalog_path.empty()) {
            return fail_input("--coverage needs --catalog <requirements.json>");
        }
        auto catalog = load_requirements_file(args.catalog_path);
        if (!catalog) return kExitInputError;
        section.coverage = check_countermeasure_coverage(tree, *catalog);
        if (!section.coverage->fully_mitigated) exit_code = kExitFindings;
    }

    ReportBundle bundle;
    bundle.add(std::move(section));
    emit(bundle, args.format, false, std::cout);
    return exit_code;
}

int cmd_dread(const DreadArgs& args, const std::string&) {
    if (!args.inline_factors.empty()) {
        std::vector<int> values;
        std::stringstream stream(args.inline_factors);
        std::string part;
        while (std::getline(stream, part, ',')) {
            try {
                values.push_back(std::stoi(part));
            } catch (const std::exception&) {
                return fail_input("factors must be integers: '" + part + "'");
            }
        }
        if (values.size() != 5) {
            return fail_input("--dread expects five comma-separated factors d,r,e,a,di");
        }
        try {
            const DreadScore result =
                score({values[0], values[1], values[2], values[3], values[4]});
            std::cout << result.total << "\n";
        } catch (const InputError& error) {
            return fail_input(error.what());
        }
        return kExitSuccess;
    }

    if (args.input_path.empty()) {
        return fail_input("dread needs --dread d,r,e,a,di or --input <rows.json>");
    }
    auto text = read_file(args.input_path);
    if (!text) return fail_input("cannot read " + args.input_path);
    auto rows = load_dread_rows(*text, args.input_path);
    if (!rows.ok()) {
        print_schema_errors(rows.errors);
        return kExitInputError;
    }

    std::vector<std::pair<std::string, DreadFactors>> items;
    for (const DreadRow& row : *rows.value) items.emplace_back(row.label, row.factors);
    const std::vector<RankedItem> ranked = rank(std::move(items));

    DreadRankingSection section;
    for (const RankedItem& item : ranked) {
        auto it = std::find_if(rows.value->begin(), rows.value->end(),
                               [&](const DreadRow& row) { return row.label == item.label; });
        if (it != rows.value->end()) section.rows.push_back(*it);
    }
    section.discrepancies = audit_scores(*rows.value);
    const bool clean = section.discrepancies.empty();

    ReportBundle bundle;
    bundle.add(std::move(section));
    emit(bundle, args.format, false, std::cout);
    return clean ? kExitSuccess : kExitFindings;
}

int cmd_comply(const ComplyArgs& args, const std::string&) {
    if (args.matrix_paths.empty()) return fail_input("comply needs at least one matrix file");
    if (args.catalog_path.empty()) {
        return fail_input("comply needs --catalog <requirements.json>");
    }
    auto catalog = load_requirements_file(args.catalog_path);
    if (!catalog) return kExitInputError;
    auto matrices = load_matrix_files(args.matrix_paths);
    if (!matrices) return kExitInputError;

    if (!args.framework.empty()) {
        auto scheme = scheme_from_string(args.framework);
        if (!scheme) return fail_input(scheme.error());
        std::erase_if(*matrices, [&](const ComplianceMatrix& matrix) {
            return matrix.framework != scheme.value();
        });
    }
    if (matrices->empty()) return fail_input("no matrices left after the framework filter");

    std::vector<FindingRecord> findings;
    if (!args.findings_path.empty()) {
        auto text = read_file(args.findings_path);
        if (!text) return fail_input("cannot read " + args.findings_path);
        auto loaded = load_findings(*text, args.findings_path);
        if (!loaded.ok()) {
            print_schema_errors(loaded.errors);
            return kExitInputError;
        }
        findings = std::move(*loaded.value);
    }

    ReportBundle bundle;
    int not_met_total = 0;
    try {
        if (args.summary) {
            ComplianceTableSection section;
            for (const ComplianceMatrix& matrix : *matrices) {
                ComplianceSummary summary = matrix.framework == Scheme::Ours
                                                ? summarize(matrix, *catalog)
                                                : check_nist_dod(matrix, *catalog);
                not_met_total += summary.not_met;
                section.summaries.push_back(std::move(summary));
            }
            if (!args.partial_weight.empty()) {
                auto weight = parse_decimal(args.partial_weight);
                if (!weight) return fail_input(weight.error());
                for (const ComplianceSummary& summary : section.summaries) {
                    std::cerr << "note: weighted unsatisfied (non-headline, weight "
                              << args.partial_weight << ") for " << summary.provider << "/"
                              << to_string(summary.framework) << ": "
                              << weighted_unsatisfied(summary, weight.value()).percent()
                              << "\n";
                }
            }
            bundle.add(std::move(section));
        }
        if (args.gaps) {
            std::vector<ComplianceMatrix> ours;
            for (const ComplianceMatrix& matrix : *matrices) {
                if (matrix.framework == Scheme::Ours) ours.push_back(matrix);
            }
            if (!ours.empty()) {
                bundle.add(GapFindingsSection{gap_report(ours, *catalog, findings)});
            }
        }
    } catch (const InputError& error) {
        return fail_input(error.what());
    }

    emit(bundle, args.format, args.ascii, std::cout);
    return not_met_total > 0 ? kExitFindings : kExitSuccess;
}

int cmd_report(const ReportArgs& args, const std::string& fixtures_root) {
    ReportBundle bundle;

    if (!args.model_path.empty()) {
        auto outcome = parse_model_file(args.model_path);
        if (!outcome) return kExitInputError;
        ModelSummarySection summary;
        summary.title = outcome->model->title;
        for (const DfdLevel& level : outcome->model->levels) {
            ModelSummarySection::LevelStats stats;
            stats.rank = level.rank;
            for (const Element& e : level.elements) {
                switch (e.kind) {
                    case ElementKind::ExternalEntity: stats.entities++; break;
                    case ElementKind::Process: stats.processes++; break;
                    case ElementKind::DataStore: stats.stores++; break;
                }
            }
            stats.flows = static_cast<int>(level.flows.size());
            stats.boundaries = static_cast<int>(level.boundaries.size());
            summary.levels.push_back(stats);
        }
        summary.diagnostics = outcome->diagnostics;
        if (!has_errors(outcome->diagnostics)) {
            const auto soundness = check_refinement_soundness(*outcome->model);
            summary.diagnostics.insert(summary.diagnostics.end(), soundness.begin(),
                                       soundness.end());
            sort_diagnostics(summary.diagnostics);
        }
        bundle.add(std::move(summary));

        if (!args.level.empty() && !has_errors(outcome->diagnostics)) {
            ThreatsArgs threats_args;
            threats_args.model_path = args.model_path;
            threats_args.level = args.level;
            auto rank = level_rank_from_token(args.level);
            if (!rank || outcome->model->find_level(*rank) == nullptr) {
                return fail_input("unknown level selector '" + args.level + "'");
            }
            const DfdLevel* level = outcome->model->find_level(*rank);
            std::vector<ThreatRecord> threats =
                enumerate_threats(*level, StrideRuleMatrix::standard());
            if (!args.rules_path.empty()) {
                auto rules_text = read_file(args.rules_path);
                if (!rules_text) return fail_input("cannot read " + args.rules_path);
                auto rules = load_rules(*rules_text, args.rules_path);
                if (!rules.ok()) {
                    print_schema_errors(rules.errors);
                    return kExitInputError;
                }
                std::string catalog_path = args.attack_lib_path;
                if (catalog_path.empty()) {
                    catalog_path =
                        (fs::path(fixtures_root) / "attack_lib" / "catalog.json").string();
                }
                auto catalog_text = read_file(catalog_path);
                if (!catalog_text) return fail_input("cannot read " + catalog_path);
                auto catalog = load_attack_catalog(*catalog_text, catalog_path);
                if (!catalog.ok()) {
                    print_schema_errors(catalog.errors);
                    return kExitInputError;
                }
                try {
                    threats = correlate_attack_library(std::move(threats), *catalog.value,
                                                       *rules.value);
                } catch (const InputError& error) {
                    return fail_input(error.what());
                }
            }
            bundle.add(ThreatTableSection{level_display_name(*rank), std::move(threats)});
        }
    }

    std::optional<RequirementsCatalog> catalog;
    if (!args.catalog_path.empty()) {
        catalog = load_requirements_file(args.catalog_path);
        if (!catalog) return kExitInputError;
    }

    for (const std::string& tree_path : args.tree_paths) {
        auto text = read_file(tree_path);
        if (!text) return fail_input("cannot read " + tree_path);
        auto loaded = load_attack_tree(*text, tree_path);
        if (!loaded.ok()) {
            print_schema_errors(loaded.errors);
            return kExitInputError;
        }
        if (has_errors(validate_tree(*loaded.value))) {
            return fail_input("attack tree in " + tree_path + " does not validate");
        }
        AttackTreeViewSection section;
        section.tree = std::move(*loaded.value);
        section.cut_sets = enumerate_cut_sets(section.tree);
        if (catalog) {
            section.coverage = check_countermeasure_coverage(section.tree, *catalog);
        }
        bundle.add(std::move(section));
    }

    if (!args.dread_rows_path.empty()) {
        auto text = read_file(args.dread_rows_path);
        if (!text) return fail_input("cannot read " + args.dread_rows_path);
        auto rows = load_dread_rows(*text, args.dread_rows_path);
        if (!rows.ok()) {
            print_schema_errors(rows.errors);
            return kExitInputError;
        }
        std::vector<std::pair<std::string, DreadFactors>> items;
        for (const DreadRow& row : *rows.value) items.emplace_back(row.label, row.factors);
        DreadRankingSection section;
        for (const RankedItem& item : rank(std::move(items))) {
            auto it = std::find_if(rows.value->begin(), rows.value->end(),
                                   [&](const DreadRow& row) { return row.label == item.label; });
            if (it != rows.value->end()) section.rows.push_back(*it);
        }
        section.discrepancies = audit_scores(*rows.value);
        bundle.add(std::move(section));
    }

    if (!args.matrix_paths.empty()) {
        if (!catalog) return fail_input("matrices need --catalog <requirements.json>");
        auto matrices = load_matrix_files(args.matrix_paths);
        if (!matrices) return kExitInputError;
        std::vector<FindingRecord> findings;
        if (!args.findings_path.empty()) {
            auto text = read_file(args.findings_path);
            if (!text) return fail_input("cannot read " + args.findings_path);
            auto loaded = load_findings(*text, args.findings_path);
            if (!loaded.ok()) {
                print_schema_errors(loaded.errors);
                return kExitInputError;
            }
            findings = std::move(*loaded.value);
        }
        try {
            ComplianceTableSection section;
            for (const ComplianceMatrix& matrix : *matrices) {
                section.summaries.push_back(summarize(matrix, *catalog));
            }
            bundle.add(std::move(section));
            std::vector<ComplianceMatrix> ours;
            for (const ComplianceMatrix& matrix : *matrices) {
                if (matrix.framework == Scheme::Ours) ours.push_back(matrix);
            }
            if (!ours.empty()) {
                bundle.add(GapFindingsSection{gap_report(ours, *catalog, findings)});
            }
        } catch (const InputError& error) {
            return fail_input(error.what());
        }
    }

    if (args.output_path.empty()) {
        emit(bundle, args.format, args.ascii, std::cout);
    } else {
        std::ofstream out(args.output_path, std::ios::binary);
        if (!out) return fail_input("cannot write " + args.output_path);
        emit(bundle, args.format, args.ascii, out);
        std::cout << "wrote " << args.output_path << "\n";
    }
    return kExitSuccess;
}

}  // namespace tmf
