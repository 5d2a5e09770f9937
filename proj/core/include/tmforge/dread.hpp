#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmforge/diagnostics.hpp"

namespace tmforge {

// Five risk factors rated low (1), medium (2) or high (3).
struct DreadFactors {
    int damage = 1;
    int reproducibility = 1;
    int exploitability = 1;
    int affected_users = 1;
    int discoverability = 1;
};

struct DreadScore {
    DreadFactors factors;
    int total = 5;  // sum of the five factors, 5..15
};

// Throws InputError naming the out-of-range factor.
DreadScore score(const DreadFactors& factors);

struct RankedItem {
    std::string label;
    DreadScore score;
};

// Descending by total; ties broken by label ascending (then by factor
// tuple so the order is total). Invariant under input permutation.
std::vector<RankedItem> rank(std::vector<std::pair<std::string, DreadFactors>> items);

struct DreadRow {
    std::string label;
    std::string requirement;  // optional associated requirement id
    DreadFactors factors;
    std::optional<int> claimed_total;
    std::string provenance;
};

struct Discrepancy {
    std::string label;
    int claimed = 0;
    int computed = 0;
};

// One discrepancy per row whose claimed total disagrees with the
// recomputed sum. Rows without a claimed total are skipped.
std::vector<Discrepancy> audit_scores(const std::vector<DreadRow>& rows);

// Rows document: {"rows": [{"label", "d", "r", "e", "a", "di",
// "claimed"?, "requirement"?}]}
Loaded<std::vector<DreadRow>> load_dread_rows(const std::string& json_text,
                                              const std::string& filename = "");

}  // namespace tmforge
