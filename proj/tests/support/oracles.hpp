#pragma once

// Independent oracles the implementation is checked against. These must
// stay naive on purpose: the cut-set oracle enumerates all 2^L leaf
// subsets with its own satisfaction evaluator, and the threat-count
// oracle recomputes the closed-form target count from the level shape.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "tmforge/attack_tree.hpp"
#include "tmforge/model.hpp"

namespace tmftest {

inline bool subset_satisfies(const tmforge::AttackTree& tree, const std::string& id,
                             const std::set<std::string>& chosen) {
    const tmforge::AttackTreeNode& node = *tree.find(id);
    if (node.is_leaf()) return chosen.count(node.id) > 0;
    if (*node.gate == tmforge::GateKind::And) {
        for (const std::string& child : node.children) {
            if (!subset_satisfies(tree, child, chosen)) return false;
        }
        return true;
    }
    for (const std::string& child : node.children) {
        if (subset_satisfies(tree, child, chosen)) return true;
    }
    return false;
}

// All minimal satisfying leaf subsets, by exhaustive enumeration.
inline std::vector<std::vector<std::string>> brute_force_cut_sets(
    const tmforge::AttackTree& tree) {
    std::vector<std::string> leaf_ids;
    for (const tmforge::AttackTreeNode* leaf : tree.leaves()) leaf_ids.push_back(leaf->id);
    std::sort(leaf_ids.begin(), leaf_ids.end());

    const size_t n = leaf_ids.size();
    std::vector<std::set<std::string>> satisfying;
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
        std::set<std::string> chosen;
        for (size_t i = 0; i < n; ++i) {
            if (mask & (size_t{1} << i)) chosen.insert(leaf_ids[i]);
        }
        if (subset_satisfies(tree, tree.root, chosen)) satisfying.push_back(std::move(chosen));
    }

    std::vector<std::vector<std::string>> minimal;
    for (const auto& candidate : satisfying) {
        bool has_proper_subset = false;
        for (const auto& other : satisfying) {
            if (other.size() < candidate.size() &&
                std::includes(candidate.begin(), candidate.end(), other.begin(),
                              other.end())) {
                has_proper_subset = true;
                break;
            }
        }
        if (!has_proper_subset) {
            minimal.emplace_back(candidate.begin(), candidate.end());
        }
    }
    std::sort(minimal.begin(), minimal.end(),
              [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
              });
    return minimal;
}

// Closed-form threat count for the standard matrix: 6 per process, 2 per
// entity, 3 per flow, 3 per plain store, 4 per log store.
inline int expected_threat_count(const tmforge::DfdLevel& level) {
    int entities = 0;
    int processes = 0;
    int plain_stores = 0;
    int log_stores = 0;
    for (const tmforge::Element& e : level.elements) {
        switch (e.kind) {
            case tmforge::ElementKind::ExternalEntity: entities++; break;
            case tmforge::ElementKind::Process: processes++; break;
            case tmforge::ElementKind::DataStore:
                (e.is_log_store ? log_stores : plain_stores)++;
                break;
        }
    }
    return 6 * processes + 2 * entities + 3 * static_cast<int>(level.flows.size()) +
           3 * plain_stores + 4 * log_stores;
}

}  // namespace tmftest
