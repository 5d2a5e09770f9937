#include "tmforge/attack_tree.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json_util.hpp"

namespace tmforge {

std::string to_string(GateKind gate) {
    return gate == GateKind::And ? "AND" : "OR";
}

const AttackTreeNode* AttackTree::find(std::string_view id) const {
    auto it = nodes.find(std::string(id));
    return it == nodes.end() ? nullptr : &it->second;
}

std::vector<const AttackTreeNode*> AttackTree::leaves() const {
    std::vector<const AttackTreeNode*> out;
    for (const auto& [id, node] : nodes) {
        if (node.is_leaf()) out.push_back(&node);
    }
    return out;
}

std::vector<Diagnostic> validate_tree(const AttackTree& tree) {
    std::vector<Diagnostic> out;
    auto add = [&](const std::string& subject, const std::string& message) {
        out.push_back({Severity::Error, "node " + subject, message, -1, subject});
    };

    if (tree.nodes.empty()) {
        out.push_back({Severity::Error, "tree", "tree has no nodes", -1, ""});
        return out;
    }
    if (tree.find(tree.root) == nullptr) {
        add(tree.root, "root node " + tree.root + " is not defined");
        return out;
    }

    std::unordered_map<std::string, int> parent_count;
    bool unresolved_child = false;
    for (const auto& [id, node] : tree.nodes) {
        if (node.id != id) add(id, "node key disagrees with node id " + node.id);
        if (!node.is_leaf() && node.children.empty()) {
            add(id, "gate node " + id + " has no children");
        }
        if (node.is_leaf() && !node.children.empty()) {
            add(id, "leaf node " + id + " lists children");
        }
        std::unordered_set<std::string> seen;
        for (const std::string& child : node.children) {
            if (tree.find(child) == nullptr) {
                add(child, "child " + child + " of " + id + " is not defined");
                unresolved_child = true;
                continue;
            }
            if (!seen.insert(child).second) {
                add(child, "child " + child + " listed twice under " + id);
                continue;
            }
            parent_count[child]++;
        }
    }
    for (const auto& [id, count] : parent_count) {
        if (count > 1) add(id, "node " + id + " has " + std::to_string(count) + " parents");
    }
    if (parent_count.count(tree.root) > 0) {
        add(tree.root, "root node " + tree.root + " appears as a child");
    }
    if (unresolved_child) {  // the reachability walk needs resolvable edges
        sort_diagnostics(out);
        return out;
    }

    // Reachability and cycle detection from the root.
    std::unordered_set<std::string> visited;
    std::unordered_set<std::string> on_path;
    bool cycle = false;
    auto walk = [&](auto&& self, const std::string& id) -> void {
        if (cycle) return;
        if (on_path.count(id) > 0) {
            add(id, "cycle through node " + id);
            cycle = true;
            return;
        }
        if (!visited.insert(id).second) return;
        on_path.insert(id);
        for (const std::string& child : tree.find(id)->children) self(self, child);
        on_path.erase(id);
    };
    walk(walk, tree.root);
    for (const auto& [id, node] : tree.nodes) {
        if (visited.count(id) == 0 && !cycle) {
            add(id, "node " + id + " is not reachable from the root");
        }
    }

    sort_diagnostics(out);
    return out;
}

namespace {

std::vector<CutSet> minimalize(std::vector<CutSet> sets) {
    std::sort(sets.begin(), sets.end(), [](const CutSet& a, const CutSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    std::vector<CutSet> out;
    for (const CutSet& candidate : sets) {
        const bool dominated = std::any_of(out.begin(), out.end(), [&](const CutSet& kept) {
            return std::includes(candidate.begin(), candidate.end(), kept.begin(), kept.end());
        });
        if (!dominated) out.push_back(candidate);
    }
    return out;
}

CutSet merge(const CutSet& a, const CutSet& b) {
    CutSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<CutSet> cut_sets_of(const AttackTree& tree, const std::string& id) {
    const AttackTreeNode& node = *tree.find(id);
    if (node.is_leaf()) return {{node.id}};
    if (*node.gate == GateKind::Or) {
        std::vector<CutSet> out;
        for (const std::string& child : node.children) {
            auto sub = cut_sets_of(tree, child);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return minimalize(std::move(out));
    }
    // AND: one pick per child, unioned.
    std::vector<CutSet> acc = {{}};
    for (const std::string& child : node.children) {
        const auto sub = cut_sets_of(tree, child);
        std::vector<CutSet> next;
        next.reserve(acc.size() * sub.size());
        for (const CutSet& left : acc) {
            for (const CutSet& right : sub) {
                next.push_back(merge(left, right));
            }
        }
        acc = std::move(next);
    }
    return minimalize(std::move(acc));
}

}  // namespace

std::vector<CutSet> enumerate_cut_sets(const AttackTree& tree) {
    if (has_errors(validate_tree(tree))) {
        throw InputError("enumerate_cut_sets requires a tree that validates cleanly");
    }
    return cut_sets_of(tree, tree.root);  // minimalize() leaves them sorted
}

CoverageReport check_countermeasure_coverage(const AttackTree& tree,
                                             const RequirementsCatalog& catalog) {
    if (has_errors(validate_tree(tree))) {
        throw InputError(
            "check_countermeasure_coverage requires a tree that validates cleanly");
    }

    CoverageReport report;
    std::unordered_set<std::string> covered;
    for (const AttackTreeNode* leaf : tree.leaves()) {
        if (leaf->requirement_refs.empty()) {
            report.uncovered_leaves.push_back(leaf->id);
            continue;
        }
        bool any_known = false;
        for (const std::string& ref : leaf->requirement_refs) {
            if (catalog.find(ref) != nullptr) {
                any_known = true;
            } else {
                report.unknown_refs.emplace_back(leaf->id, ref);
            }
        }
        if (any_known) {
            covered.insert(leaf->id);
        } else {
            report.uncovered_leaves.push_back(leaf->id);
        }
    }
    std::sort(report.uncovered_leaves.begin(), report.uncovered_leaves.end());
    std::sort(report.unknown_refs.begin(), report.unknown_refs.end());

    report.fully_mitigated = true;
    for (const CutSet& cut_set : enumerate_cut_sets(tree)) {
        CutSetVerdict verdict;
        verdict.cut_set = cut_set;
        verdict.mitigated = std::any_of(cut_set.begin(), cut_set.end(), [&](const auto& leaf) {
            return covered.count(leaf) > 0;
        });
        verdict.fully_covered = std::all_of(cut_set.begin(), cut_set.end(),
                                            [&](const auto& leaf) {
                                                return covered.count(leaf) > 0;
                                            });
        if (!verdict.mitigated) report.fully_mitigated = false;
        report.cut_sets.push_back(std::move(verdict));
    }
    return report;
}

Loaded<AttackTree> load_attack_tree(const std::string& json_text,
                                    const std::string& filename) {
    Loaded<AttackTree> out;
    auto doc = jsonutil::parse(json_text, filename, out.errors);
    if (!doc) return out;
    if (!doc->is_object()) {
        out.errors.push_back({filename, "", "expected a tree object"});
        return out;
    }
    AttackTree tree;
    auto goal = jsonutil::req_string(*doc, "goal", filename, "", out.errors);
    auto root = jsonutil::req_string(*doc, "root", filename, "", out.errors);
    if (!goal || !root) return out;
    tree.goal = *goal;
    tree.root = *root;
    if (!doc->contains("nodes") || !(*doc)["nodes"].is_object()) {
        out.errors.push_back({filename, "", "missing 'nodes' object"});
        return out;
    }
    for (const auto& [id, body] : (*doc)["nodes"].items()) {
        const std::string path = "nodes." + id;
        AttackTreeNode node;
        node.id = id;
        node.label = jsonutil::opt_string(body, "label", id);
        if (body.contains("gate")) {
            const std::string gate = jsonutil::opt_string(body, "gate");
            if (gate == "and" || gate == "AND") {
                node.gate = GateKind::And;
            } else if (gate == "or" || gate == "OR") {
                node.gate = GateKind::Or;
            } else {
                out.errors.push_back({filename, path, "gate must be 'and' or 'or'"});
                continue;
            }
        }
        node.children = jsonutil::opt_string_array(body, "children", filename, path, out.errors);
        // OR is the default gate for nodes that list children without one.
        if (!node.gate && !node.children.empty()) node.gate = GateKind::Or;
        node.threat_refs =
            jsonutil::opt_string_array(body, "threat_refs", filename, path, out.errors);
        node.requirement_refs =
            jsonutil::opt_string_array(body, "requirement_refs", filename, path, out.errors);
        node.provenance = jsonutil::opt_string(body, "provenance");
        tree.nodes.emplace(id, std::move(node));
    }
    if (!out.errors.empty()) return out;
    out.value = std::move(tree);
    return out;
}

}  // namespace tmforge
