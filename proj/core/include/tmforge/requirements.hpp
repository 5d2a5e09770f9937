#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tmforge/diagnostics.hpp"

namespace tmforge {

enum class Scheme { Ours, Nist, Dod };

std::string to_string(Scheme scheme);
Fallible<Scheme> scheme_from_string(std::string_view text);  // "ours" / "nist" / "dod"

struct RequirementId {
    Scheme scheme = Scheme::Ours;
    int seq = 0;       // Ours only; 1..999
    std::string key;   // full textual id for every scheme

    std::string text() const { return key; }
    static RequirementId ours(int seq);
    // "Ours-Secu-NNN" (three digits) for the Ours scheme; NIST/DoD ids are
    // catalog keys recognized by their prefix.
    static Fallible<RequirementId> parse(std::string_view text);

    bool operator==(const RequirementId& other) const { return key == other.key; }
    bool operator<(const RequirementId& other) const;
};

struct Requirement {
    RequirementId id;
    std::string title;
    std::vector<std::string> body_items;     // lettered sub-item summaries
    std::vector<std::string> locations;      // component names
    std::vector<std::string> threat_labels;
    std::vector<std::string> principles;     // zero-trust principle tags
    std::vector<RequirementId> framework_refs;
    bool reconstructed = false;
    std::string provenance;
};

struct PrincipleInfo {
    std::string tag;
    std::string summary;
};

class RequirementsCatalog {
public:
    void set_principles(std::vector<PrincipleInfo> principles);
    bool insert(Requirement requirement);  // false when the id already exists

    const std::vector<PrincipleInfo>& principles() const { return principles_; }
    size_t size() const { return entries_.size(); }
    int count(Scheme scheme) const;
    const Requirement* find(const RequirementId& id) const;
    const Requirement* find(std::string_view text) const;
    const std::map<RequirementId, Requirement>& entries() const { return entries_; }
    std::vector<const Requirement*> by_scheme(Scheme scheme) const;
    // True when the Ours entries are exactly 001..N with no gaps.
    bool ours_contiguous() const;

private:
    std::vector<PrincipleInfo> principles_;
    std::map<RequirementId, Requirement> entries_;
};

// Catalog document:
// {"principles": [{"tag", "summary"}...],
//  "requirements": [{"id", "scheme", "title", "body_items"?, "locations"?,
//                    "threat_labels"?, "principles"?, "framework_refs"?}]}
Loaded<RequirementsCatalog> load_requirements(const std::string& json_text,
                                              const std::string& filename = "");

struct PrincipleCoverage {
    // principle tag -> requirement ids carrying it (Ours scheme), id-sorted
    std::map<std::string, std::vector<RequirementId>> by_principle;
    std::vector<std::string> uncovered;  // principles with an empty set
};

PrincipleCoverage principle_coverage(const RequirementsCatalog& catalog);

// Entries whose location set contains `location`, ordered by id.
std::vector<Requirement> lookup_by_location(const RequirementsCatalog& catalog,
                                            std::string_view location);

}  // namespace tmforge
