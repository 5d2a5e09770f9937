#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmforge/attack_catalog.hpp"
#include "tmforge/diagnostics.hpp"
#include "tmforge/model.hpp"

namespace tmforge {

enum class StrideCategory {
    Spoofing,
    Tampering,
    Repudiation,
    InformationDisclosure,
    DenialOfService,
    ElevationOfPrivilege,
};

inline constexpr std::array<StrideCategory, 6> kStrideOrder = {
    StrideCategory::Spoofing,        StrideCategory::Tampering,
    StrideCategory::Repudiation,     StrideCategory::InformationDisclosure,
    StrideCategory::DenialOfService, StrideCategory::ElevationOfPrivilege,
};

char category_letter(StrideCategory category);  // S T R I D E
std::optional<StrideCategory> category_from_letter(char letter);
std::string to_string(StrideCategory category);

// Small set of STRIDE categories, iterated in S,T,R,I,D,E order.
class CategorySet {
public:
    CategorySet() = default;
    static Fallible<CategorySet> from_letters(std::string_view letters);  // e.g. "STRIDE"
    static CategorySet of(std::initializer_list<StrideCategory> categories);

    void insert(StrideCategory category);
    bool contains(StrideCategory category) const;
    bool empty() const { return bits_ == 0; }
    size_t size() const;
    std::string letters() const;
    std::vector<StrideCategory> categories() const;
    bool operator==(const CategorySet&) const = default;

private:
    std::uint8_t bits_ = 0;
};

// What a STRIDE rule applies to. Log-keeping stores are a separate target
// kind because repudiation applies to them and not to plain stores.
enum class TargetKind { ExternalEntity, Process, DataStore, LogDataStore, DataFlow };

std::string to_string(TargetKind kind);

// STRIDE-per-element rule matrix. The entity row is configurable (it must
// at least contain S); the other rows are fixed by the discipline and
// invariant_violations() rejects deviations.
struct StrideRuleMatrix {
    CategorySet external_entity;
    CategorySet process;
    CategorySet data_store;
    CategorySet log_data_store;
    CategorySet data_flow;

    // Entity {S,R}, process all six, flow/store {T,I,D}, log store {T,R,I,D}.
    static StrideRuleMatrix standard();

    CategorySet for_target(TargetKind kind) const;
    std::vector<std::string> invariant_violations() const;
};

// Matrix override document: map of target kind to category letters, e.g.
// {"external_entity": "SR", "process": "STRIDE", ...}. Omitted kinds keep
// the standard row.
Loaded<StrideRuleMatrix> load_matrix(const std::string& json_text,
                                     const std::string& filename = "");

struct ThreatRecord {
    int seq = 0;  // 1-based, contiguous in enumeration order
    std::string target;
    std::string target_name;
    TargetKind target_kind = TargetKind::Process;
    std::vector<std::string> target_tags;
    StrideCategory category = StrideCategory::Spoofing;
    std::string title;
    std::vector<AttackLibId> attack_lib_refs;

    std::string id() const { return "T" + std::to_string(seq); }
};

// One record per (target, applicable category) pair. Targets are visited
// elements-then-flows in id order; categories in S,T,R,I,D,E order.
// Throws InputError if the level fails validation or the matrix breaks
// its invariants.
std::vector<ThreatRecord> enumerate_threats(const DfdLevel& level,
                                            const StrideRuleMatrix& matrix);

struct CorrelationRule {
    std::optional<std::string> match_tag;
    std::optional<std::string> match_id;  // exact id or glob with * and ?
    StrideCategory category = StrideCategory::Spoofing;
    std::vector<AttackLibId> refs;
    std::string provenance;
};

// Rules document: {"rules": [{"match": {"tag"|"id"}, "category": "S",
// "refs": ["AL-V-1", ...]}]}
Loaded<std::vector<CorrelationRule>> load_rules(const std::string& json_text,
                                                const std::string& filename = "");

// Populates attack_lib_refs on matching records (set union across rules);
// never adds, drops or reorders records. Throws InputError when a rule
// references an id absent from the catalog.
std::vector<ThreatRecord> correlate_attack_library(std::vector<ThreatRecord> threats,
                                                   const AttackLibCatalog& catalog,
                                                   const std::vector<CorrelationRule>& rules);

}  // namespace tmforge
