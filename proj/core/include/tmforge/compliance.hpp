#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tmforge/diagnostics.hpp"
#include "tmforge/requirements.hpp"

namespace tmforge {

enum class Rating { Full, Partial, NotMet };

// ● / ◐ / – (Y / P / N in ascii mode)
std::string rating_glyph(Rating rating, bool ascii = false);
Fallible<Rating> rating_from_string(std::string_view text);  // full|partial|not_met
std::string to_string(Rating rating);

// Exact rational, normalized with a positive denominator.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);
    bool operator==(const Rational& other) const;
    bool operator<(const Rational& other) const;
    Rational operator+(const Rational& other) const;
    Rational operator*(const Rational& other) const;

    // Value as a percentage with the shortest exact decimal ("5%",
    // "6.25%"). Non-terminating values fall back to two decimals.
    std::string percent() const;
};

Fallible<Rational> parse_decimal(std::string_view text);  // "0.5" -> 1/2

struct ComplianceCell {
    Rating rating = Rating::Full;
    std::string note;
};

struct ComplianceMatrix {
    std::string provider;
    Scheme framework = Scheme::Ours;
    std::map<std::string, ComplianceCell> cells;  // requirement id text -> cell
    std::string provenance;
};

struct ComplianceSummary {
    std::string provider;
    Scheme framework = Scheme::Ours;
    int total = 0;
    int full = 0;
    int partial = 0;
    int not_met = 0;
    Rational unsatisfied_rate;  // not_met / total

    std::vector<RequirementId> not_met_ids;  // id-sorted
};

// Tallies ratings over the catalog's entries for the matrix's framework.
// The matrix must cover the catalog exactly; missing or unknown cells
// raise InputError listing the offending ids.
ComplianceSummary summarize(const ComplianceMatrix& matrix,
                            const RequirementsCatalog& catalog);

// summarize restricted to the NIST/DoD framework schemes, so framework
// summaries can be rendered side by side.
ComplianceSummary check_nist_dod(const ComplianceMatrix& matrix,
                                 const RequirementsCatalog& catalog);

// Alternative rate counting partial cells at the given weight:
// (not_met + weight * partial) / total. Not part of the headline numbers.
Rational weighted_unsatisfied(const ComplianceSummary& summary, const Rational& weight);

struct FindingRecord {
    RequirementId requirement_id;  // Ours scheme
    std::vector<std::string> providers;
    std::vector<std::string> threats;
    std::vector<std::string> mitigations;
    std::string provenance;
};

struct GapEntry {
    RequirementId id;
    std::string title;
    std::vector<FindingRecord> findings;
};

struct ProviderGaps {
    std::string provider;
    Scheme framework = Scheme::Ours;
    std::vector<GapEntry> gaps;  // id-sorted
};

struct GapReport {
    std::vector<ProviderGaps> providers;
    std::vector<GapEntry> common;  // intersection of NotMet across providers
};

// Groups NotMet requirements per provider, intersects them for the common
// set, and attaches matching findings. Findings referencing unknown
// requirements raise InputError.
GapReport gap_report(const std::vector<ComplianceMatrix>& matrices,
                     const RequirementsCatalog& catalog,
                     const std::vector<FindingRecord>& findings);

// Matrix document: {"provider", "framework", "cells": {"<req-id>":
// {"rating": "full"|"partial"|"not_met", "note"?}}}
Loaded<ComplianceMatrix> load_compliance_matrix(const std::string& json_text,
                                                const std::string& filename = "");

// Findings document: {"findings": [{"requirement", "providers"?,
// "threats"?, "mitigations"?}]}
Loaded<std::vector<FindingRecord>> load_findings(const std::string& json_text,
                                                 const std::string& filename = "");

}  // namespace tmforge
