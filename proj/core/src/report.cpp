#include "tmforge/report.hpp"

#include <algorithm>
#include <sstream>

#include "json_util.hpp"

namespace tmforge {

std::string to_string(SectionKind kind) {
    switch (kind) {
        case SectionKind::ModelSummary: return "ModelSummary";
        case SectionKind::ThreatTable: return "ThreatTable";
        case SectionKind::AttackTreeView: return "AttackTreeView";
        case SectionKind::DreadRanking: return "DreadRanking";
        case SectionKind::ComplianceTable: return "ComplianceTable";
        case SectionKind::GapFindings: return "GapFindings";
    }
    return "?";
}

void ReportBundle::add(ModelSummarySection section) {
    sections_.push_back({SectionKind::ModelSummary, std::move(section)});
}
void ReportBundle::add(ThreatTableSection section) {
    sections_.push_back({SectionKind::ThreatTable, std::move(section)});
}
void ReportBundle::add(AttackTreeViewSection section) {
    sections_.push_back({SectionKind::AttackTreeView, std::move(section)});
}
void ReportBundle::add(DreadRankingSection section) {
    sections_.push_back({SectionKind::DreadRanking, std::move(section)});
}
void ReportBundle::add(ComplianceTableSection section) {
    sections_.push_back({SectionKind::ComplianceTable, std::move(section)});
}
void ReportBundle::add(GapFindingsSection section) {
    sections_.push_back({SectionKind::GapFindings, std::move(section)});
}

std::vector<ReportSection> ReportBundle::ordered() const {
    std::vector<ReportSection> out = sections_;
    std::stable_sort(out.begin(), out.end(), [](const ReportSection& a, const ReportSection& b) {
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });
    return out;
}

namespace {

std::string md_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '|') {
            out += "\\|";
        } else if (c == '\n') {
            out += ' ';
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

// Summary-table cell: a solid glyph, annotated with the unsatisfied rate
// when any requirement is unmet.
std::string compliance_cell(const ComplianceSummary& summary, bool ascii) {
    if (summary.not_met == 0) return rating_glyph(Rating::Full, ascii);
    return rating_glyph(Rating::Full, ascii) + "(" + summary.unsatisfied_rate.percent() +
           " unsatisfied)";
}

void render_markdown_section(std::ostringstream& out, const ModelSummarySection& section) {
    out << "## Model: " << md_escape(section.title) << "\n\n";
    out << "| Level | Entities | Processes | Stores | Flows | Boundaries |\n";
    out << "| --- | --- | --- | --- | --- | --- |\n";
    for (const auto& stats : section.levels) {
        out << "| " << level_display_name(stats.rank) << " | " << stats.entities << " | "
            << stats.processes << " | " << stats.stores << " | " << stats.flows << " | "
            << stats.boundaries << " |\n";
    }
    if (!section.diagnostics.empty()) {
        out << "\n";
        for (const Diagnostic& diagnostic : section.diagnostics) {
            out << "- " << md_escape(format_diagnostic(diagnostic)) << "\n";
        }
    }
    out << "\n";
}

void render_markdown_section(std::ostringstream& out, const ThreatTableSection& section) {
    out << "## Threats";
    if (!section.heading.empty()) out << ": " << md_escape(section.heading);
    out << "\n\n";
    out << "| No. | Target | Name | Category | Threat | Attack library |\n";
    out << "| --- | --- | --- | --- | --- | --- |\n";
    for (const ThreatRecord& threat : section.threats) {
        std::vector<std::string> refs;
        refs.reserve(threat.attack_lib_refs.size());
        for (const AttackLibId& id : threat.attack_lib_refs) refs.push_back(id.text());
        out << "| " << threat.id() << " | " << threat.target << " | "
            << md_escape(threat.target_name) << " | " << category_letter(threat.category)
            << " | " << md_escape(threat.title) << " | " << md_escape(join(refs, ", "))
            << " |\n";
    }
    out << "\n";
}

void render_markdown_section(std::ostringstream& out, const AttackTreeViewSection& section) {
    out << "## Attack tree: " << md_escape(section.tree.goal) << "\n\n";
    // Indented outline, children in listed order.
    auto walk = [&](auto&& self, const std::string& id, int depth) -> void {
        const AttackTreeNode* node = section.tree.find(id);
        if (node == nullptr) return;
        out << std::string(static_cast<size_t>(depth) * 2, ' ') << "- ";
        out << md_escape(node->label);
        if (!node->is_leaf()) out << " [" << to_string(*node->gate) << "]";
        if (node->is_leaf() && !node->requirement_refs.empty()) {
            out << " (mitigated by " << md_escape(join(node->requirement_refs, ", ")) << ")";
        }
        out << "\n";
        for (const std::string& child : node->children) self(self, child, depth + 1);
    };
    walk(walk, section.tree.root, 0);
    out << "\n";
    if (!section.cut_sets.empty()) {
        out << "Minimal cut sets:\n\n";
        for (const CutSet& cut_set : section.cut_sets) {
            out << "- {" << join(cut_set, ", ") << "}\n";
        }
        out << "\n";
    }
    if (section.coverage) {
        const CoverageReport& coverage = *section.coverage;
        out << "Countermeasure coverage: "
            << (coverage.fully_mitigated ? "all cut sets mitigated"
                                         : "unmitigated cut sets remain")
            << "\n\n";
        if (!coverage.uncovered_leaves.empty()) {
            out << "Uncovered leaves: " << join(coverage.uncovered_leaves, ", ") << "\n\n";
        }
        if (!coverage.unknown_refs.empty()) {
            out << "Unknown requirement references:\n\n";
            for (const auto& [leaf, ref] : coverage.unknown_refs) {
                out << "- " << leaf << " -> " << md_escape(ref) << "\n";
            }
            out << "\n";
        }
        for (const CutSetVerdict& verdict : coverage.cut_sets) {
            out << "- {" << join(verdict.cut_set, ", ") << "}: "
                << (verdict.mitigated ? "mitigated" : "unmitigated");
            if (verdict.fully_covered) out << " (all leaves covered)";
            out << "\n";
        }
        out << "\n";
    }
}

void render_markdown_section(std::ostringstream& out, const DreadRankingSection& section) {
    out << "## DREAD ranking\n\n";
    out << "| Threat | Requirement | D | R | E | A | D | Score |\n";
    out << "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
    for (const DreadRow& row : section.rows) {
        const DreadScore s = score(row.factors);
        out << "| " << md_escape(row.label) << " | " << md_escape(row.requirement) << " | "
            << row.factors.damage << " | " << row.factors.reproducibility << " | "
            << row.factors.exploitability << " | " << row.factors.affected_users << " | "
            << row.factors.discoverability << " | " << s.total << " |\n";
    }
    out << "\n";
    if (!section.discrepancies.empty()) {
        out << "Score discrepancies (claimed vs computed):\n\n";
        for (const Discrepancy& d : section.discrepancies) {
            out << "- " << md_escape(d.label) << ": claimed " << d.claimed << ", computed "
                << d.computed << "\n";
        }
        out << "\n";
    }
}

void render_markdown_section(std::ostringstream& out, const ComplianceTableSection& section,
                             bool ascii) {
    out << "## Security analysis\n\n";
    // Providers as rows, frameworks as columns, Table-6 shaped.
    std::vector<std::string> providers;
    std::vector<Scheme> frameworks;
    for (const ComplianceSummary& summary : section.summaries) {
        if (std::find(providers.begin(), providers.end(), summary.provider) ==
            providers.end()) {
            providers.push_back(summary.provider);
        }
        if (std::find(frameworks.begin(), frameworks.end(), summary.framework) ==
            frameworks.end()) {
            frameworks.push_back(summary.framework);
        }
    }
    std::sort(frameworks.begin(), frameworks.end(), [](Scheme a, Scheme b) {
        auto order = [](Scheme s) { return s == Scheme::Nist ? 0 : s == Scheme::Dod ? 1 : 2; };
        return order(a) < order(b);
    });
    auto header = [](Scheme s) {
        switch (s) {
            case Scheme::Nist: return std::string("NIST");
            case Scheme::Dod: return std::string("DoD");
            case Scheme::Ours: return std::string("Ours");
        }
        return std::string("?");
    };
    out << "| Cloud Service |";
    for (Scheme s : frameworks) out << " " << header(s) << " |";
    out << "\n|" << " --- |";
    for (size_t i = 0; i < frameworks.size(); ++i) out << " --- |";
    out << "\n";
    for (const std::string& provider : providers) {
        out << "| " << md_escape(provider) << " |";
        for (Scheme s : frameworks) {
            auto it = std::find_if(section.summaries.begin(), section.summaries.end(),
                                   [&](const ComplianceSummary& summary) {
                                       return summary.provider == provider &&
                                              summary.framework == s;
                                   });
            out << " " << (it == section.summaries.end() ? "" : compliance_cell(*it, ascii))
                << " |";
        }
        out << "\n";
    }
    out << "\n";
    for (const ComplianceSummary& summary : section.summaries) {
        out << "- " << md_escape(summary.provider) << " / " << header(summary.framework)
            << ": " << summary.full << " full, " << summary.partial << " partial, "
            << summary.not_met << " not met of " << summary.total << " ("
            << summary.unsatisfied_rate.percent() << " unsatisfied)\n";
    }
    out << "\n";
}

void render_markdown_section(std::ostringstream& out, const GapFindingsSection& section) {
    out << "## Unmet requirements\n\n";
    const GapReport& report = section.report;
    if (!report.common.empty()) {
        out << "Common to all providers:\n\n";
        for (const GapEntry& gap : report.common) {
            out << "- " << gap.id.text() << ": " << md_escape(gap.title) << "\n";
            for (const FindingRecord& finding : gap.findings) {
                if (!finding.threats.empty()) {
                    out << "  - threats: " << md_escape(join(finding.threats, "; ")) << "\n";
                }
                if (!finding.mitigations.empty()) {
                    out << "  - mitigations: " << md_escape(join(finding.mitigations, "; "))
                        << "\n";
                }
            }
        }
        out << "\n";
    }
    for (const ProviderGaps& provider : report.providers) {
        out << "### " << md_escape(provider.provider) << "\n\n";
        if (provider.gaps.empty()) {
            out << "No unmet requirements.\n\n";
            continue;
        }
        for (const GapEntry& gap : provider.gaps) {
            out << "- " << gap.id.text() << ": " << md_escape(gap.title) << "\n";
            for (const FindingRecord& finding : gap.findings) {
                if (!finding.threats.empty()) {
                    out << "  - threats: " << md_escape(join(finding.threats, "; ")) << "\n";
                }
                if (!finding.mitigations.empty()) {
                    out << "  - mitigations: " << md_escape(join(finding.mitigations, "; "))
                        << "\n";
                }
            }
        }
        out << "\n";
    }
}

}  // namespace

std::string render_markdown(const ReportBundle& bundle, const RenderOptions& options) {
    std::ostringstream out;
    out << "# Threat model report\n\n";
    for (const ReportSection& section : bundle.ordered()) {
        std::visit(
            [&](const auto& payload) {
                using T = std::decay_t<decltype(payload)>;
                if constexpr (std::is_same_v<T, ComplianceTableSection>) {
                    render_markdown_section(out, payload, options.ascii_glyphs);
                } else {
                    render_markdown_section(out, payload);
                }
            },
            section.payload);
    }
    return out.str();
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json json_of(const ModelSummarySection& section) {
    ordered_json payload;
    payload["title"] = section.title;
    payload["levels"] = ordered_json::array();
    for (const auto& stats : section.levels) {
        ordered_json level;
        level["rank"] = stats.rank;
        level["name"] = level_display_name(stats.rank);
        level["entities"] = stats.entities;
        level["processes"] = stats.processes;
        level["stores"] = stats.stores;
        level["flows"] = stats.flows;
        level["boundaries"] = stats.boundaries;
        payload["levels"].push_back(level);
    }
    payload["diagnostics"] = ordered_json::array();
    for (const Diagnostic& diagnostic : section.diagnostics) {
        ordered_json item;
        item["severity"] = to_string(diagnostic.severity);
        item["location"] = diagnostic.location;
        item["message"] = diagnostic.message;
        payload["diagnostics"].push_back(item);
    }
    return payload;
}

ordered_json json_of(const ThreatTableSection& section) {
    ordered_json payload;
    payload["heading"] = section.heading;
    payload["threats"] = ordered_json::array();
    for (const ThreatRecord& threat : section.threats) {
        ordered_json item;
        item["no"] = threat.id();
        item["target"] = threat.target;
        item["name"] = threat.target_name;
        item["category"] = std::string(1, category_letter(threat.category));
        item["title"] = threat.title;
        item["attack_library"] = ordered_json::array();
        for (const AttackLibId& id : threat.attack_lib_refs) {
            item["attack_library"].push_back(id.text());
        }
        payload["threats"].push_back(item);
    }
    return payload;
}

ordered_json json_of(const AttackTreeViewSection& section) {
    ordered_json payload;
    payload["goal"] = section.tree.goal;
    payload["root"] = section.tree.root;
    payload["nodes"] = ordered_json::object();
    for (const auto& [id, node] : section.tree.nodes) {
        ordered_json item;
        item["label"] = node.label;
        if (!node.is_leaf()) {
            item["gate"] = *node.gate == GateKind::And ? "and" : "or";
            item["children"] = node.children;
        } else {
            if (!node.threat_refs.empty()) item["threat_refs"] = node.threat_refs;
            if (!node.requirement_refs.empty()) {
                item["requirement_refs"] = node.requirement_refs;
            }
        }
        payload["nodes"][id] = item;
    }
    if (!section.cut_sets.empty()) {
        payload["cut_sets"] = ordered_json::array();
        for (const CutSet& cut_set : section.cut_sets) payload["cut_sets"].push_back(cut_set);
    }
    if (section.coverage) {
        ordered_json coverage;
        coverage["fully_mitigated"] = section.coverage->fully_mitigated;
        coverage["uncovered_leaves"] = section.coverage->uncovered_leaves;
        coverage["unknown_refs"] = ordered_json::array();
        for (const auto& [leaf, ref] : section.coverage->unknown_refs) {
            coverage["unknown_refs"].push_back(ordered_json{{"leaf", leaf}, {"ref", ref}});
        }
        coverage["cut_sets"] = ordered_json::array();
        for (const CutSetVerdict& verdict : section.coverage->cut_sets) {
            ordered_json item;
            item["cut_set"] = verdict.cut_set;
            item["mitigated"] = verdict.mitigated;
            item["fully_covered"] = verdict.fully_covered;
            coverage["cut_sets"].push_back(item);
        }
        payload["coverage"] = coverage;
    }
    return payload;
}

ordered_json json_of(const DreadRankingSection& section) {
    ordered_json payload;
    payload["rows"] = ordered_json::array();
    for (const DreadRow& row : section.rows) {
        ordered_json item;
        item["label"] = row.label;
        if (!row.requirement.empty()) item["requirement"] = row.requirement;
        item["d"] = row.factors.damage;
        item["r"] = row.factors.reproducibility;
        item["e"] = row.factors.exploitability;
        item["a"] = row.factors.affected_users;
        item["di"] = row.factors.discoverability;
        item["score"] = score(row.factors).total;
        if (row.claimed_total) item["claimed"] = *row.claimed_total;
        payload["rows"].push_back(item);
    }
    payload["discrepancies"] = ordered_json::array();
    for (const Discrepancy& d : section.discrepancies) {
        ordered_json item;
        item["label"] = d.label;
        item["claimed"] = d.claimed;
        item["computed"] = d.computed;
        payload["discrepancies"].push_back(item);
    }
    return payload;
}

ordered_json json_of(const ComplianceSummary& summary) {
    ordered_json item;
    item["provider"] = summary.provider;
    item["framework"] = to_string(summary.framework);
    item["total"] = summary.total;
    item["full"] = summary.full;
    item["partial"] = summary.partial;
    item["not_met"] = summary.not_met;
    item["unsatisfied_rate"] = {{"num", summary.unsatisfied_rate.num},
                                {"den", summary.unsatisfied_rate.den}};
    item["unsatisfied_percent"] = summary.unsatisfied_rate.percent();
    item["not_met_ids"] = ordered_json::array();
    for (const RequirementId& id : summary.not_met_ids) item["not_met_ids"].push_back(id.text());
    return item;
}

ordered_json json_of(const ComplianceTableSection& section) {
    ordered_json payload;
    payload["summaries"] = ordered_json::array();
    for (const ComplianceSummary& summary : section.summaries) {
        payload["summaries"].push_back(json_of(summary));
    }
    return payload;
}

ordered_json json_of(const GapEntry& gap) {
    ordered_json item;
    item["requirement"] = gap.id.text();
    item["title"] = gap.title;
    item["findings"] = ordered_json::array();
    for (const FindingRecord& finding : gap.findings) {
        ordered_json f;
        f["requirement"] = finding.requirement_id.text();
        f["providers"] = finding.providers;
        f["threats"] = finding.threats;
        f["mitigations"] = finding.mitigations;
        item["findings"].push_back(f);
    }
    return item;
}

ordered_json json_of(const GapFindingsSection& section) {
    ordered_json payload;
    payload["common"] = ordered_json::array();
    for (const GapEntry& gap : section.report.common) payload["common"].push_back(json_of(gap));
    payload["providers"] = ordered_json::array();
    for (const ProviderGaps& provider : section.report.providers) {
        ordered_json item;
        item["provider"] = provider.provider;
        item["gaps"] = ordered_json::array();
        for (const GapEntry& gap : provider.gaps) item["gaps"].push_back(json_of(gap));
        payload["providers"].push_back(item);
    }
    return payload;
}

}  // namespace

std::string render_json(const ReportBundle& bundle) {
    ordered_json doc;
    doc["schema"] = 1;
    doc["sections"] = ordered_json::array();
    for (const ReportSection& section : bundle.ordered()) {
        ordered_json item;
        item["kind"] = to_string(section.kind);
        item["payload"] = std::visit([](const auto& payload) { return json_of(payload); },
                                     section.payload);
        doc["sections"].push_back(item);
    }
    return doc.dump();
}

namespace {

std::string dot_quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string html_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string render_dot(const DfdLevel& level) {
    if (has_errors(validate_level(level))) {
        throw InputError("render_dot requires a level that validates cleanly");
    }

    std::vector<const Element*> elements;
    for (const Element& e : level.elements) elements.push_back(&e);
    std::sort(elements.begin(), elements.end(),
              [](const Element* a, const Element* b) { return id_less(a->id, b->id); });
    std::vector<const TrustBoundary*> boundaries;
    for (const TrustBoundary& b : level.boundaries) boundaries.push_back(&b);
    std::sort(boundaries.begin(), boundaries.end(),
              [](const TrustBoundary* a, const TrustBoundary* b) {
                  return id_less(a->id, b->id);
              });
    std::vector<const DataFlow*> flows;
    for (const DataFlow& f : level.flows) flows.push_back(&f);
    std::sort(flows.begin(), flows.end(),
              [](const DataFlow* a, const DataFlow* b) { return id_less(a->id, b->id); });

    // A node is drawn inside the cluster of its first boundary; membership
    // in further boundaries is not drawable with plain clusters.
    auto cluster_of = [](const Element& e) -> std::string {
        return e.boundary_ids.empty() ? "" : e.boundary_ids.front();
    };

    std::ostringstream out;
    out << "digraph " << dot_quote(level_display_name(level.rank)) << " {\n";
    out << "  rankdir=LR;\n";

    auto emit_node = [&](const Element& e, const std::string& indent) {
        const std::string display = e.name + " (" + e.id + ")";
        out << indent << dot_quote(e.id) << " [";
        switch (e.kind) {
            case ElementKind::ExternalEntity:
                out << "shape=box, label=" << dot_quote(display);
                break;
            case ElementKind::Process:
                out << "shape=ellipse, label=" << dot_quote(display);
                break;
            case ElementKind::DataStore:
                out << "shape=none, margin=0, label=<<TABLE BORDER=\"0\" CELLBORDER=\"1\" "
                       "CELLSPACING=\"0\"><TR><TD SIDES=\"TB\" CELLPADDING=\"4\">"
                    << html_escape(display) << "</TD></TR></TABLE>>";
                break;
        }
        out << "];\n";
    };

    for (const TrustBoundary* boundary : boundaries) {
        out << "  subgraph " << dot_quote("cluster_" + boundary->id) << " {\n";
        out << "    label=" << dot_quote(boundary->name + " (" + boundary->id + ")") << ";\n";
        out << "    style=dashed;\n";
        for (const Element* e : elements) {
            if (cluster_of(*e) == boundary->id) emit_node(*e, "    ");
        }
        out << "  }\n";
    }
    for (const Element* e : elements) {
        if (cluster_of(*e).empty()) emit_node(*e, "  ");
    }
    for (const DataFlow* f : flows) {
        out << "  " << dot_quote(f->src) << " -> " << dot_quote(f->dst)
            << " [label=" << dot_quote(f->label + " (" + f->id + ")") << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string render_dot(const AttackTree& tree) {
    if (has_errors(validate_tree(tree))) {
        throw InputError("render_dot requires a tree that validates cleanly");
    }
    std::ostringstream out;
    out << "digraph " << dot_quote(tree.goal) << " {\n";
    out << "  rankdir=TB;\n";
    for (const auto& [id, node] : tree.nodes) {
        std::string label = node.label;
        if (!node.is_leaf() && *node.gate == GateKind::And) label += "\nAND";
        out << "  " << dot_quote(id) << " [shape=" << (node.is_leaf() ? "ellipse" : "box")
            << ", label=" << dot_quote(label) << "];\n";
    }
    for (const auto& [id, node] : tree.nodes) {
        for (const std::string& child : node.children) {
            out << "  " << dot_quote(id) << " -> " << dot_quote(child) << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace tmforge
