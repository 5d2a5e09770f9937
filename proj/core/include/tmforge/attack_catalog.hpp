#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tmforge/diagnostics.hpp"

namespace tmforge {

// Where an attack-library entry was collected from. The letter is the
// middle segment of the `AL-<letter>-<n>` identifier.
enum class AttackSourceKind {
    Cve,              // V
    Cwe,              // W
    Paper,            // P
    Conference,       // C
    AttackTechnique,  // A (MITRE ATT&CK)
    Standard,         // S
    Report,           // R
};

char source_letter(AttackSourceKind kind);
std::optional<AttackSourceKind> source_from_letter(char letter);
std::string to_string(AttackSourceKind kind);

struct AttackLibId {
    AttackSourceKind source = AttackSourceKind::Cve;
    int seq = 1;  // >= 1

    std::string text() const;  // "AL-V-1"
    auto operator<=>(const AttackLibId&) const = default;
};

// Accepts exactly `AL-<known letter>-<decimal >= 1>`.
Fallible<AttackLibId> parse_attack_lib_id(std::string_view text);

struct AttackLibEntry {
    AttackLibId id;
    std::string title;
    std::string external_ref;  // CVE number, ATT&CK technique id, citation
    std::string notes;
    bool reconstructed = false;
    std::string provenance;
};

class AttackLibCatalog {
public:
    bool insert(AttackLibEntry entry);  // false if the id already exists
    size_t size() const { return entries_.size(); }
    bool contains(const AttackLibId& id) const { return entries_.count(id) > 0; }
    const AttackLibEntry* find(const AttackLibId& id) const;
    const AttackLibEntry* find(std::string_view text) const;
    std::map<AttackSourceKind, int> source_counts() const;
    const std::map<AttackLibId, AttackLibEntry>& entries() const { return entries_; }

private:
    std::map<AttackLibId, AttackLibEntry> entries_;
};

// Catalog document: {"entries": [{"id", "title", "external_ref"?, "notes"?}]}
Loaded<AttackLibCatalog> load_attack_catalog(const std::string& json_text,
                                             const std::string& filename = "");

}  // namespace tmforge
