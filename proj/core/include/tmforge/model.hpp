#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmforge/diagnostics.hpp"

namespace tmforge {

enum class ElementKind { ExternalEntity, Process, DataStore };

char kind_prefix(ElementKind kind);  // E / P / D
std::optional<ElementKind> kind_from_prefix(char prefix);
std::string to_string(ElementKind kind);

struct Element {
    std::string id;  // [EPD][0-9]+, prefix fixed by kind
    ElementKind kind = ElementKind::Process;
    std::string name;
    bool is_log_store = false;  // stores only
    std::vector<std::string> boundary_ids;
    std::vector<std::string> tags;
};

struct DataFlow {
    std::string id;  // F[0-9]+
    std::string src;
    std::string dst;
    std::string label;
    // Boundary ids crossed: the symmetric difference of the endpoints'
    // boundary memberships. Derived; validation checks it stays in sync.
    std::vector<std::string> crosses;
};

struct TrustBoundary {
    std::string id;  // B[0-9]+
    std::string name;
    std::vector<std::string> member_ids;  // derived from Element::boundary_ids
};

struct DfdLevel {
    int rank = 0;  // 0 = Context Level, 1 = Level 0, 2 = Level 1, ...
    std::vector<Element> elements;
    std::vector<DataFlow> flows;
    std::vector<TrustBoundary> boundaries;

    const Element* find_element(std::string_view id) const;
    const TrustBoundary* find_boundary(std::string_view id) const;
};

struct RefinementLink {
    int parent_rank = 0;
    std::string parent_id;
    std::vector<std::string> child_ids;  // at level parent_rank + 1
};

struct DfdModel {
    std::string title;
    std::vector<DfdLevel> levels;  // ranks contiguous from 0
    std::vector<RefinementLink> refinements;

    const DfdLevel* find_level(int rank) const;
};

// Display naming follows the usual DFD convention: rank 0 is the Context
// Level, rank n >= 1 is "Level n-1".
std::string level_display_name(int rank);
// Inverse of the display/DSL token: "context" -> 0, "0" -> 1, "1" -> 2, ...
std::optional<int> level_rank_from_token(std::string_view token);
std::string level_token(int rank);  // "context", "0", "1", ...

bool valid_id(std::string_view id, char prefix);
// Natural id order: (prefix letter, numeric suffix). Falls back to plain
// string comparison for non-conforming ids.
bool id_less(std::string_view a, std::string_view b);

std::vector<std::string> compute_crosses(const DfdLevel& level, const DataFlow& flow);

// Recomputes the derived fields (boundary member lists, flow crossing
// sets) and normalizes id lists to sorted/unique form. Convenience for
// models built in code; the DSL parser calls it after construction.
void refresh_derived(DfdModel& model);

DfdModel canonical(const DfdModel& model);
bool structurally_equal(const DfdModel& a, const DfdModel& b);

// Pure structural validation. Empty result iff every type invariant
// holds; never mutates. Diagnostics are sorted by (level rank, id).
std::vector<Diagnostic> validate_model(const DfdModel& model);
std::vector<Diagnostic> validate_level(const DfdLevel& level);

// Refinement soundness between adjacent levels: every element at level n
// must be refined at n+1, and every flow at level n must be covered by a
// flow between the endpoints' children. Unparented elements at deeper
// levels are internal detail and yield warnings only.
// Precondition: validate_model reports no errors (throws InputError).
std::vector<Diagnostic> check_refinement_soundness(const DfdModel& model);

}  // namespace tmforge
