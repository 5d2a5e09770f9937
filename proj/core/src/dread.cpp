#include "tmforge/dread.hpp"

#include <algorithm>
#include <tuple>

#include "json_util.hpp"

namespace tmforge {

namespace {

void check_factor(int value, const char* name) {
    if (value < 1 || value > 3) {
        throw InputError(std::string(name) + " must be 1, 2 or 3 (got " +
                         std::to_string(value) + ")");
    }
}

std::tuple<int, int, int, int, int> as_tuple(const DreadFactors& f) {
    return {f.damage, f.reproducibility, f.exploitability, f.affected_users,
            f.discoverability};
}

}  // namespace

DreadScore score(const DreadFactors& factors) {
    check_factor(factors.damage, "damage");
    check_factor(factors.reproducibility, "reproducibility");
    check_factor(factors.exploitability, "exploitability");
    check_factor(factors.affected_users, "affected_users");
    check_factor(factors.discoverability, "discoverability");
    const int total = factors.damage + factors.reproducibility + factors.exploitability +
                      factors.affected_users + factors.discoverability;
    return {factors, total};
}

std::vector<RankedItem> rank(std::vector<std::pair<std::string, DreadFactors>> items) {
    std::vector<RankedItem> out;
    out.reserve(items.size());
    for (auto& [label, factors] : items) {
        out.push_back({std::move(label), score(factors)});
    }
    std::sort(out.begin(), out.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.score.total != b.score.total) return a.score.total > b.score.total;
        if (a.label != b.label) return a.label < b.label;
        return as_tuple(a.score.factors) < as_tuple(b.score.factors);
    });
    return out;
}

std::vector<Discrepancy> audit_scores(const std::vector<DreadRow>& rows) {
    std::vector<Discrepancy> out;
    for (const DreadRow& row : rows) {
        if (!row.claimed_total) continue;
        const int computed = score(row.factors).total;
        if (computed != *row.claimed_total) {
            out.push_back({row.label, *row.claimed_total, computed});
        }
    }
    return out;
}

Loaded<std::vector<DreadRow>> load_dread_rows(const std::string& json_text,
                                              const std::string& filename) {
    Loaded<std::vector<DreadRow>> out;
    auto doc = jsonutil::parse(json_text, filename, out.errors);
    if (!doc) return out;
    if (!doc->is_object() || !doc->contains("rows") || !(*doc)["rows"].is_array()) {
        out.errors.push_back({filename, "", "expected an object with a 'rows' array"});
        return out;
    }
    std::vector<DreadRow> rows;
    const auto& items = (*doc)["rows"];
    for (size_t i = 0; i < items.size(); ++i) {
        const std::string path = "rows[" + std::to_string(i) + "]";
        const auto& item = items[i];
        DreadRow row;
        auto label = jsonutil::req_string(item, "label", filename, path, out.errors);
        auto d = jsonutil::req_int(item, "d", filename, path, out.errors);
        auto r = jsonutil::req_int(item, "r", filename, path, out.errors);
        auto e = jsonutil::req_int(item, "e", filename, path, out.errors);
        auto a = jsonutil::req_int(item, "a", filename, path, out.errors);
        auto di = jsonutil::req_int(item, "di", filename, path, out.errors);
        if (!label || !d || !r || !e || !a || !di) continue;
        row.label = *label;
        row.factors = {*d, *r, *e, *a, *di};
        if (item.contains("claimed")) {
            if (!item["claimed"].is_number_integer()) {
                out.errors.push_back({filename, path, "'claimed' must be an integer"});
                continue;
            }
            row.claimed_total = item["claimed"].get<int>();
        }
        row.requirement = jsonutil::opt_string(item, "requirement");
        row.provenance = jsonutil::opt_string(item, "provenance");
        if (std::min({*d, *r, *e, *a, *di}) < 1 || std::max({*d, *r, *e, *a, *di}) > 3) {
            out.errors.push_back({filename, path, "factors must be 1, 2 or 3"});
            continue;
        }
        rows.push_back(std::move(row));
    }
    if (!out.errors.empty()) return out;
    out.value = std::move(rows);
    return out;
}

}  // namespace tmforge
