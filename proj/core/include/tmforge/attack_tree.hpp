#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmforge/diagnostics.hpp"
#include "tmforge/requirements.hpp"

namespace tmforge {

enum class GateKind { And, Or };

std::string to_string(GateKind gate);

struct AttackTreeNode {
    std::string id;
    std::string label;
    std::optional<GateKind> gate;          // nullopt = leaf
    std::vector<std::string> children;     // gate nodes only, nonempty
    std::vector<std::string> threat_refs;  // leaves: ThreatRecord ids ("T12")
    std::vector<std::string> requirement_refs;
    std::string provenance;

    bool is_leaf() const { return !gate.has_value(); }
};

struct AttackTree {
    std::string goal;
    std::string root;
    std::map<std::string, AttackTreeNode> nodes;

    const AttackTreeNode* find(std::string_view id) const;
    std::vector<const AttackTreeNode*> leaves() const;  // id-sorted
};

// Empty iff the node graph is a tree rooted at `root`: every child
// resolves, no node has two parents, no cycles, everything reachable,
// gates have children and leaves have none.
std::vector<Diagnostic> validate_tree(const AttackTree& tree);

using CutSet = std::vector<std::string>;  // sorted leaf ids

// All minimal leaf sets that satisfy the root under AND/OR semantics,
// sorted by (size, lexicographic). Structural recursion; exponential in
// the worst case, which is fine at attack-tree sizes.
// Precondition: validate_tree is clean (throws InputError).
std::vector<CutSet> enumerate_cut_sets(const AttackTree& tree);

struct CutSetVerdict {
    CutSet cut_set;
    bool mitigated = false;      // at least one member leaf is covered
    bool fully_covered = false;  // every member leaf is covered
};

struct CoverageReport {
    std::vector<std::string> uncovered_leaves;  // empty requirement_refs
    std::vector<std::pair<std::string, std::string>> unknown_refs;  // (leaf, ref)
    std::vector<CutSetVerdict> cut_sets;
    bool fully_mitigated = false;  // every cut set has a covered leaf
};

// A leaf counts as covered when at least one of its requirement_refs
// resolves in the catalog. Precondition: tree valid (throws InputError).
CoverageReport check_countermeasure_coverage(const AttackTree& tree,
                                             const RequirementsCatalog& catalog);

// Tree document: {"goal", "root", "nodes": {id: {"label", "gate"?,
// "children"?, "threat_refs"?, "requirement_refs"?}}}
Loaded<AttackTree> load_attack_tree(const std::string& json_text,
                                    const std::string& filename = "");

}  // namespace tmforge
