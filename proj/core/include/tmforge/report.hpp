#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tmforge/attack_tree.hpp"
#include "tmforge/compliance.hpp"
#include "tmforge/dread.hpp"
#include "tmforge/model.hpp"
#include "tmforge/stride.hpp"

namespace tmforge {

enum class SectionKind {
    ModelSummary,
    ThreatTable,
    AttackTreeView,
    DreadRanking,
    ComplianceTable,
    GapFindings,
};

std::string to_string(SectionKind kind);

struct ModelSummarySection {
    std::string title;
    struct LevelStats {
        int rank = 0;
        int entities = 0;
        int processes = 0;
        int stores = 0;
        int flows = 0;
        int boundaries = 0;
    };
    std::vector<LevelStats> levels;
    std::vector<Diagnostic> diagnostics;
};

struct ThreatTableSection {
    std::string heading;  // e.g. the level display name
    std::vector<ThreatRecord> threats;
};

struct AttackTreeViewSection {
    AttackTree tree;
    std::vector<CutSet> cut_sets;  // may be empty when not requested
    std::optional<CoverageReport> coverage;
};

struct DreadRankingSection {
    std::vector<DreadRow> rows;  // ranked order expected from dread::rank
    std::vector<Discrepancy> discrepancies;
};

struct ComplianceTableSection {
    std::vector<ComplianceSummary> summaries;
};

struct GapFindingsSection {
    GapReport report;
};

using SectionPayload =
    std::variant<ModelSummarySection, ThreatTableSection, AttackTreeViewSection,
                 DreadRankingSection, ComplianceTableSection, GapFindingsSection>;

struct ReportSection {
    SectionKind kind;
    SectionPayload payload;
};

// Ordered collection of report sections. Section order is fixed by kind
// (ModelSummary first, GapFindings last); absent analyses are simply
// omitted.
class ReportBundle {
public:
    void add(ModelSummarySection section);
    void add(ThreatTableSection section);
    void add(AttackTreeViewSection section);
    void add(DreadRankingSection section);
    void add(ComplianceTableSection section);
    void add(GapFindingsSection section);

    std::vector<ReportSection> ordered() const;  // sorted by kind, stable
    bool empty() const { return sections_.empty(); }

private:
    std::vector<ReportSection> sections_;
};

struct RenderOptions {
    bool ascii_glyphs = false;  // substitute Y/P/N for the rating glyphs
};

std::string render_markdown(const ReportBundle& bundle, const RenderOptions& options = {});

// Stable key order, versioned with a top-level "schema": 1.
std::string render_json(const ReportBundle& bundle);

// Entities as rectangles, processes as circles, stores as open-ended
// boxes, boundaries as dashed clusters, flows as labeled edges.
// Precondition: the level validates cleanly (throws InputError).
std::string render_dot(const DfdLevel& level);

// AND gates annotated in the node label; OR left unannotated.
// Precondition: the tree validates cleanly (throws InputError).
std::string render_dot(const AttackTree& tree);

}  // namespace tmforge
