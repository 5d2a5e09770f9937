#include "tmforge/compliance.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "compliance_internal.hpp"
#include "json_util.hpp"

namespace tmforge {

std::string rating_glyph(Rating rating, bool ascii) {
    switch (rating) {
        case Rating::Full: return ascii ? "Y" : "●";     // ●
        case Rating::Partial: return ascii ? "P" : "◐";  // ◐
        case Rating::NotMet: return ascii ? "N" : "–";   // –
    }
    return "?";
}

Fallible<Rating> rating_from_string(std::string_view text) {
    if (text == "full") return Rating::Full;
    if (text == "partial") return Rating::Partial;
    if (text == "not_met") return Rating::NotMet;
    return Fallible<Rating>::failure("unknown rating '" + std::string(text) +
                                     "' (expected full, partial or not_met)");
}

std::string to_string(Rating rating) {
    switch (rating) {
        case Rating::Full: return "full";
        case Rating::Partial: return "partial";
        case Rating::NotMet: return "not_met";
    }
    return "?";
}

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw InputError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

bool Rational::operator==(const Rational& other) const {
    return num == other.num && den == other.den;
}

bool Rational::operator<(const Rational& other) const {
    return num * other.den < other.num * den;
}

Rational Rational::operator+(const Rational& other) const {
    return Rational(num * other.den + other.num * den, den * other.den);
}

Rational Rational::operator*(const Rational& other) const {
    return Rational(num * other.num, den * other.den);
}

std::string Rational::percent() const {
    Rational scaled(num * 100, den);
    std::int64_t whole = scaled.num / scaled.den;
    std::int64_t rem = scaled.num % scaled.den;
    if (rem < 0) {
        // round toward negative infinity so digits stay positive
        whole -= 1;
        rem += scaled.den;
    }
    std::string digits;
    for (int i = 0; i < 9 && rem != 0; ++i) {
        rem *= 10;
        digits.push_back(static_cast<char>('0' + rem / scaled.den));
        rem %= scaled.den;
    }
    if (rem != 0) {
        // Non-terminating decimal: two digits, rounded half up.
        std::ostringstream out;
        const double value = 100.0 * static_cast<double>(num) / static_cast<double>(den);
        out.setf(std::ios::fixed);
        out.precision(2);
        out << value << "%";
        return out.str();
    }
    while (!digits.empty() && digits.back() == '0') digits.pop_back();
    std::string out = std::to_string(whole);
    if (!digits.empty()) out += "." + digits;
    return out + "%";
}

Fallible<Rational> parse_decimal(std::string_view text) {
    using R = Fallible<Rational>;
    if (text.empty()) return R::failure("empty decimal");
    size_t i = 0;
    bool negative = false;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        i = 1;
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool seen_digit = false;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) return R::failure("multiple decimal points");
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') return R::failure("invalid decimal character");
        if (num > 1000000000) return R::failure("decimal out of range");
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
        seen_digit = true;
    }
    if (!seen_digit) return R::failure("no digits in decimal");
    return Rational(negative ? -num : num, den);
}

namespace {

std::string join_ids(const std::vector<std::string>& ids, size_t limit = 8) {
    std::string out;
    for (size_t i = 0; i < ids.size() && i < limit; ++i) {
        if (i > 0) out += ", ";
        out += ids[i];
    }
    if (ids.size() > limit) out += ", ...";
    return out;
}

}  // namespace

ComplianceSummary summarize(const ComplianceMatrix& matrix,
                            const RequirementsCatalog& catalog) {
    const auto scheme_entries = catalog.by_scheme(matrix.framework);
    if (scheme_entries.empty()) {
        throw InputError("catalog has no entries for scheme " + to_string(matrix.framework));
    }

    std::vector<std::string> missing;
    for (const Requirement* entry : scheme_entries) {
        if (matrix.cells.count(entry->id.text()) == 0) missing.push_back(entry->id.text());
    }
    if (!missing.empty()) {
        throw InputError("matrix for " + matrix.provider + " is missing cells for " +
                         join_ids(missing));
    }
    std::vector<std::string> unknown;
    for (const auto& [key, cell] : matrix.cells) {
        const Requirement* entry = catalog.find(key);
        if (entry == nullptr || entry->id.scheme != matrix.framework) unknown.push_back(key);
    }
    if (!unknown.empty()) {
        throw InputError("matrix for " + matrix.provider + " has cells for unknown ids " +
                         join_ids(unknown));
    }

    ComplianceSummary summary;
    summary.provider = matrix.provider;
    summary.framework = matrix.framework;
    summary.total = static_cast<int>(scheme_entries.size());
    for (const Requirement* entry : scheme_entries) {
        const ComplianceCell& cell = matrix.cells.at(entry->id.text());
        switch (cell.rating) {
            case Rating::Full: summary.full++; break;
            case Rating::Partial: summary.partial++; break;
            case Rating::NotMet:
                summary.not_met++;
                summary.not_met_ids.push_back(entry->id);
                break;
        }
    }
    std::sort(summary.not_met_ids.begin(), summary.not_met_ids.end());
    summary.unsatisfied_rate = Rational(summary.not_met, summary.total);
    return summary;
}

ComplianceSummary check_nist_dod(const ComplianceMatrix& matrix,
                                 const RequirementsCatalog& catalog) {
    if (matrix.framework == Scheme::Ours) {
        throw InputError("check_nist_dod expects a NIST or DoD framework matrix");
    }
    return summarize(matrix, catalog);
}

Rational weighted_unsatisfied(const ComplianceSummary& summary, const Rational& weight) {
    return Rational(summary.not_met, summary.total) +
           weight * Rational(summary.partial, summary.total);
}

GapReport gap_report(const std::vector<ComplianceMatrix>& matrices,
                     const RequirementsCatalog& catalog,
                     const std::vector<FindingRecord>& findings) {
    for (const FindingRecord& finding : findings) {
        const Requirement* entry = catalog.find(finding.requirement_id);
        if (entry == nullptr) {
            throw InputError("finding references unknown requirement " +
                             finding.requirement_id.text());
        }
    }

    auto findings_for = [&](const RequirementId& id,
                            const std::string& provider) -> std::vector<FindingRecord> {
        std::vector<FindingRecord> out;
        for (const FindingRecord& finding : findings) {
            if (!(finding.requirement_id == id)) continue;
            if (!provider.empty() && !finding.providers.empty() &&
                std::find(finding.providers.begin(), finding.providers.end(), provider) ==
                    finding.providers.end()) {
                continue;
            }
            out.push_back(finding);
        }
        return out;
    };

    GapReport report;
    std::vector<std::set<RequirementId>> not_met_sets;
    for (const ComplianceMatrix& matrix : matrices) {
        const ComplianceSummary summary = summarize(matrix, catalog);
        ProviderGaps gaps;
        gaps.provider = matrix.provider;
        gaps.framework = matrix.framework;
        for (const RequirementId& id : summary.not_met_ids) {
            const Requirement* entry = catalog.find(id);
            gaps.gaps.push_back({id, entry->title, findings_for(id, matrix.provider)});
        }
        not_met_sets.emplace_back(summary.not_met_ids.begin(), summary.not_met_ids.end());
        report.providers.push_back(std::move(gaps));
    }

    if (!not_met_sets.empty()) {
        std::set<RequirementId> common = not_met_sets.front();
        for (size_t i = 1; i < not_met_sets.size(); ++i) {
            std::set<RequirementId> next;
            std::set_intersection(common.begin(), common.end(), not_met_sets[i].begin(),
                                  not_met_sets[i].end(), std::inserter(next, next.begin()));
            common = std::move(next);
        }
        for (const RequirementId& id : common) {
            const Requirement* entry = catalog.find(id);
            report.common.push_back({id, entry->title, findings_for(id, "")});
        }
    }
    return report;
}

Loaded<ComplianceMatrix> load_compliance_matrix_json(const jsonutil::json& doc,
                                                     const std::string& filename) {
    Loaded<ComplianceMatrix> out;
    if (!doc.is_object()) {
        out.errors.push_back({filename, "", "expected a matrix object"});
        return out;
    }
    ComplianceMatrix matrix;
    auto provider = jsonutil::req_string(doc, "provider", filename, "", out.errors);
    auto framework = jsonutil::req_string(doc, "framework", filename, "", out.errors);
    if (!provider || !framework) return out;
    matrix.provider = *provider;
    auto scheme = scheme_from_string(*framework);
    if (!scheme) {
        out.errors.push_back({filename, "framework", scheme.error()});
        return out;
    }
    matrix.framework = scheme.value();
    matrix.provenance = jsonutil::opt_string(doc, "provenance");
    if (!doc.contains("cells") || !doc["cells"].is_object()) {
        out.errors.push_back({filename, "", "missing 'cells' object"});
        return out;
    }
    for (const auto& [key, body] : doc["cells"].items()) {
        const std::string path = "cells." + key;
        auto id = RequirementId::parse(key);
        if (!id) {
            out.errors.push_back({filename, path, id.error()});
            continue;
        }
        auto rating_text = jsonutil::req_string(body, "rating", filename, path, out.errors);
        if (!rating_text) continue;
        auto rating = rating_from_string(*rating_text);
        if (!rating) {
            out.errors.push_back({filename, path, rating.error()});
            continue;
        }
        matrix.cells[key] = {rating.value(), jsonutil::opt_string(body, "note")};
    }
    if (!out.errors.empty()) return out;
    out.value = std::move(matrix);
    return out;
}

Loaded<ComplianceMatrix> load_compliance_matrix(const std::string& json_text,
                                                const std::string& filename) {
    Loaded<ComplianceMatrix> out;
    auto doc = jsonutil::parse(json_text, filename, out.errors);
    if (!doc) return out;
    return load_compliance_matrix_json(*doc, filename);
}

Loaded<std::vector<FindingRecord>> load_findings(const std::string& json_text,
                                                 const std::string& filename) {
    Loaded<std::vector<FindingRecord>> out;
    auto doc = jsonutil::parse(json_text, filename, out.errors);
    if (!doc) return out;
    if (!doc->is_object() || !doc->contains("findings") || !(*doc)["findings"].is_array()) {
        out.errors.push_back({filename, "", "expected an object with a 'findings' array"});
        return out;
    }
    std::vector<FindingRecord> findings;
    const auto& items = (*doc)["findings"];
    for (size_t i = 0; i < items.size(); ++i) {
        const std::string path = "findings[" + std::to_string(i) + "]";
        const auto& item = items[i];
        auto req = jsonutil::req_string(item, "requirement", filename, path, out.errors);
        if (!req) continue;
        auto id = RequirementId::parse(*req);
        if (!id) {
            out.errors.push_back({filename, path, id.error()});
            continue;
        }
        FindingRecord finding;
        finding.requirement_id = id.value();
        finding.providers =
            jsonutil::opt_string_array(item, "providers", filename, path, out.errors);
        finding.threats = jsonutil::opt_string_array(item, "threats", filename, path, out.errors);
        finding.mitigations =
            jsonutil::opt_string_array(item, "mitigations", filename, path, out.errors);
        finding.provenance = jsonutil::opt_string(item, "provenance");
        findings.push_back(std::move(finding));
    }
    if (!out.errors.empty()) return out;
    out.value = std::move(findings);
    return out;
}

}  // namespace tmforge
