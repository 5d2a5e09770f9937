#include "tmforge/stride.hpp"

#include <algorithm>

#include "json_util.hpp"

namespace tmforge {

char category_letter(StrideCategory category) {
    switch (category) {
        case StrideCategory::Spoofing: return 'S';
        case StrideCategory::Tampering: return 'T';
        case StrideCategory::Repudiation: return 'R';
        case StrideCategory::InformationDisclosure: return 'I';
        case StrideCategory::DenialOfService: return 'D';
        case StrideCategory::ElevationOfPrivilege: return 'E';
    }
    return '?';
}

std::optional<StrideCategory> category_from_letter(char letter) {
    switch (letter) {
        case 'S': return StrideCategory::Spoofing;
        case 'T': return StrideCategory::Tampering;
        case 'R': return StrideCategory::Repudiation;
        case 'I': return StrideCategory::InformationDisclosure;
        case 'D': return StrideCategory::DenialOfService;
        case 'E': return StrideCategory::ElevationOfPrivilege;
        default: return std::nullopt;
    }
}

std::string to_string(StrideCategory category) {
    switch (category) {
        case StrideCategory::Spoofing: return "Spoofing";
        case StrideCategory::Tampering: return "Tampering";
        case StrideCategory::Repudiation: return "Repudiation";
        case StrideCategory::InformationDisclosure: return "Information disclosure";
        case StrideCategory::DenialOfService: return "Denial of service";
        case StrideCategory::ElevationOfPrivilege: return "Elevation of privilege";
    }
    return "?";
}

Fallible<CategorySet> CategorySet::from_letters(std::string_view letters) {
    CategorySet set;
    for (char c : letters) {
        auto category = category_from_letter(c);
        if (!category) {
            return Fallible<CategorySet>::failure(std::string("unknown STRIDE letter '") + c +
                                                  "'");
        }
        set.insert(*category);
    }
    return set;
}

CategorySet CategorySet::of(std::initializer_list<StrideCategory> categories) {
    CategorySet set;
    for (StrideCategory c : categories) set.insert(c);
    return set;
}

void CategorySet::insert(StrideCategory category) {
    bits_ |= static_cast<std::uint8_t>(1u << static_cast<int>(category));
}

bool CategorySet::contains(StrideCategory category) const {
    return (bits_ & (1u << static_cast<int>(category))) != 0;
}

size_t CategorySet::size() const {
    size_t n = 0;
    for (StrideCategory c : kStrideOrder) {
        if (contains(c)) ++n;
    }
    return n;
}

std::string CategorySet::letters() const {
    std::string out;
    for (StrideCategory c : kStrideOrder) {
        if (contains(c)) out.push_back(category_letter(c));
    }
    return out;
}

std::vector<StrideCategory> CategorySet::categories() const {
    std::vector<StrideCategory> out;
    for (StrideCategory c : kStrideOrder) {
        if (contains(c)) out.push_back(c);
    }
    return out;
}

std::string to_string(TargetKind kind) {
    switch (kind) {
        case TargetKind::ExternalEntity: return "entity";
        case TargetKind::Process: return "process";
        case TargetKind::DataStore: return "store";
        case TargetKind::LogDataStore: return "log-store";
        case TargetKind::DataFlow: return "flow";
    }
    return "?";
}

StrideRuleMatrix StrideRuleMatrix::standard() {
    StrideRuleMatrix m;
    m.external_entity = CategorySet::of({StrideCategory::Spoofing, StrideCategory::Repudiation});
    m.process = CategorySet::of({StrideCategory::Spoofing, StrideCategory::Tampering,
                                 StrideCategory::Repudiation,
                                 StrideCategory::InformationDisclosure,
                                 StrideCategory::DenialOfService,
                                 StrideCategory::ElevationOfPrivilege});
    m.data_store = CategorySet::of({StrideCategory::Tampering,
                                    StrideCategory::InformationDisclosure,
                                    StrideCategory::DenialOfService});
    m.log_data_store = CategorySet::of(
        {StrideCategory::Tampering, StrideCategory::Repudiation,
         StrideCategory::InformationDisclosure, StrideCategory::DenialOfService});
    m.data_flow = m.data_store;
    return m;
}

CategorySet StrideRuleMatrix::for_target(TargetKind kind) const {
    switch (kind) {
        case TargetKind::ExternalEntity: return external_entity;
        case TargetKind::Process: return process;
        case TargetKind::DataStore: return data_store;
        case TargetKind::LogDataStore: return log_data_store;
        case TargetKind::DataFlow: return data_flow;
    }
    return {};
}

std::vector<std::string> StrideRuleMatrix::invariant_violations() const {
    std::vector<std::string> out;
    const StrideRuleMatrix standard = StrideRuleMatrix::standard();
    if (!external_entity.contains(StrideCategory::Spoofing)) {
        out.push_back("entity categories must include S");
    }
    if (external_entity.empty()) out.push_back("entity categories must be nonempty");
    if (process != standard.process) out.push_back("process categories must be STRIDE");
    if (data_flow != standard.data_flow) out.push_back("flow categories must be TID");
    if (data_store != standard.data_store) out.push_back("store categories must be TID");
    if (log_data_store != standard.log_data_store) {
        out.push_back("log-store categories must be TRID");
    }
    return out;
}

Loaded<StrideRuleMatrix> load_matrix(const std::string& json_text,
                                     const std::string& filename) {
    Loaded<StrideRuleMatrix> out;
    auto doc = jsonutil::parse(json_text, filename, out.errors);
    if (!doc) return out;
    if (!doc->is_object()) {
        out.errors.push_back({filename, "", "expected an object of kind -> letters"});
        return out;
    }
    StrideRuleMatrix matrix = StrideRuleMatrix::standard();
    const std::vector<std::pair<std::string, CategorySet*>> slots = {
        {"external_entity", &matrix.external_entity},
        {"process", &matrix.process},
        {"data_store", &matrix.data_store},
        {"log_data_store", &matrix.log_data_store},
        {"data_flow", &matrix.data_flow},
    };
    for (const auto& [key, value] : doc->items()) {
        auto slot = std::find_if(slots.begin(), slots.end(),
                                 [&](const auto& s) { return s.first == key; });
        if (slot == slots.end()) {
            out.errors.push_back({filename, key, "unknown target kind"});
            continue;
        }
        if (!value.is_string()) {
            out.errors.push_back({filename, key, "expected a string of STRIDE letters"});
            continue;
        }
        auto set = CategorySet::from_letters(value.get<std::string>());
        if (!set) {
            out.errors.push_back({filename, key, set.error()});
            continue;
        }
        *slot->second = set.value();
    }
    for (const std::string& violation : matrix.invariant_violations()) {
        out.errors.push_back({filename, "", violation});
    }
    if (!out.errors.empty()) return out;
    out.value = matrix;
    return out;
}

namespace {

std::string threat_title(StrideCategory category, const std::string& name) {
    switch (category) {
        case StrideCategory::Spoofing: return "Spoofing of " + name;
        case StrideCategory::Tampering: return "Tampering with " + name;
        case StrideCategory::Repudiation: return "Repudiation by " + name;
        case StrideCategory::InformationDisclosure:
            return "Information disclosure of " + name;
        case StrideCategory::DenialOfService: return "Denial of service against " + name;
        case StrideCategory::ElevationOfPrivilege:
            return "Elevation of privilege via " + name;
    }
    return name;
}

TargetKind target_kind_of(const Element& element) {
    switch (element.kind) {
        case ElementKind::ExternalEntity: return TargetKind::ExternalEntity;
        case ElementKind::Process: return TargetKind::Process;
        case ElementKind::DataStore:
            return element.is_log_store ? TargetKind::LogDataStore : TargetKind::DataStore;
    }
    return TargetKind::Process;
}

// Shell-style match supporting * and ? only.
bool glob_match(std::string_view pattern, std::string_view text) {
    size_t p = 0, t = 0;
    size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

}  // namespace

std::vector<ThreatRecord> enumerate_threats(const DfdLevel& level,
                                            const StrideRuleMatrix& matrix) {
    if (has_errors(validate_level(level))) {
        throw InputError("enumerate_threats requires a level that validates cleanly");
    }
    if (auto violations = matrix.invariant_violations(); !violations.empty()) {
        throw InputError("invalid STRIDE rule matrix: " + violations.front());
    }

    std::vector<const Element*> elements;
    elements.reserve(level.elements.size());
    for (const Element& e : level.elements) elements.push_back(&e);
    std::sort(elements.begin(), elements.end(),
              [](const Element* a, const Element* b) { return id_less(a->id, b->id); });
    std::vector<const DataFlow*> flows;
    flows.reserve(level.flows.size());
    for (const DataFlow& f : level.flows) flows.push_back(&f);
    std::sort(flows.begin(), flows.end(),
              [](const DataFlow* a, const DataFlow* b) { return id_less(a->id, b->id); });

    std::vector<ThreatRecord> out;
    int seq = 1;
    for (const Element* e : elements) {
        const TargetKind kind = target_kind_of(*e);
        for (StrideCategory category : matrix.for_target(kind).categories()) {
            ThreatRecord record;
            record.seq = seq++;
            record.target = e->id;
            record.target_name = e->name;
            record.target_kind = kind;
            record.target_tags = e->tags;
            record.category = category;
            record.title = threat_title(category, e->name);
            out.push_back(std::move(record));
        }
    }
    for (const DataFlow* f : flows) {
        for (StrideCategory category : matrix.for_target(TargetKind::DataFlow).categories()) {
            ThreatRecord record;
            record.seq = seq++;
            record.target = f->id;
            record.target_name = f->label;
            record.target_kind = TargetKind::DataFlow;
            record.category = category;
            record.title = threat_title(category, f->label);
            out.push_back(std::move(record));
        }
    }
    return out;
}

Loaded<std::vector<CorrelationRule>> load_rules(const std::string& json_text,
                                                const std::string& filename) {
    Loaded<std::vector<CorrelationRule>> out;
    auto doc = jsonutil::parse(json_text, filename, out.errors);
    if (!doc) return out;
    if (!doc->is_object() || !doc->contains("rules") || !(*doc)["rules"].is_array()) {
        out.errors.push_back({filename, "", "expected an object with a 'rules' array"});
        return out;
    }
    std::vector<CorrelationRule> rules;
    const auto& items = (*doc)["rules"];
    for (size_t i = 0; i < items.size(); ++i) {
        const std::string path = "rules[" + std::to_string(i) + "]";
        const auto& item = items[i];
        CorrelationRule rule;
        if (!item.is_object() || !item.contains("match") || !item["match"].is_object()) {
            out.errors.push_back({filename, path, "missing 'match' object"});
            continue;
        }
        const auto& match = item["match"];
        if (match.contains("tag") && match["tag"].is_string()) {
            rule.match_tag = match["tag"].get<std::string>();
        }
        if (match.contains("id") && match["id"].is_string()) {
            rule.match_id = match["id"].get<std::string>();
        }
        if (!rule.match_tag && !rule.match_id) {
            out.errors.push_back({filename, path, "match needs a 'tag' or an 'id'"});
            continue;
        }
        auto letter = jsonutil::req_string(item, "category", filename, path, out.errors);
        if (!letter) continue;
        if (letter->size() != 1 || !category_from_letter((*letter)[0])) {
            out.errors.push_back({filename, path, "category must be one STRIDE letter"});
            continue;
        }
        rule.category = *category_from_letter((*letter)[0]);
        for (const std::string& ref :
             jsonutil::opt_string_array(item, "refs", filename, path, out.errors)) {
            auto id = parse_attack_lib_id(ref);
            if (!id) {
                out.errors.push_back({filename, path, id.error()});
                continue;
            }
            rule.refs.push_back(id.value());
        }
        rule.provenance = jsonutil::opt_string(item, "provenance");
        rules.push_back(std::move(rule));
    }
    if (!out.errors.empty()) return out;
    out.value = std::move(rules);
    return out;
}

std::vector<ThreatRecord> correlate_attack_library(std::vector<ThreatRecord> threats,
                                                   const AttackLibCatalog& catalog,
                                                   const std::vector<CorrelationRule>& rules) {
    for (const CorrelationRule& rule : rules) {
        for (const AttackLibId& ref : rule.refs) {
            if (!catalog.contains(ref)) {
                throw InputError("correlation rule references unknown attack-library id " +
                                 ref.text());
            }
        }
    }
    for (ThreatRecord& threat : threats) {
        for (const CorrelationRule& rule : rules) {
            if (rule.category != threat.category) continue;
            bool matched = false;
            if (rule.match_id) matched = glob_match(*rule.match_id, threat.target);
            if (!matched && rule.match_tag) {
                matched = std::find(threat.target_tags.begin(), threat.target_tags.end(),
                                    *rule.match_tag) != threat.target_tags.end();
            }
            if (!matched) continue;
            threat.attack_lib_refs.insert(threat.attack_lib_refs.end(), rule.refs.begin(),
                                          rule.refs.end());
        }
        std::sort(threat.attack_lib_refs.begin(), threat.attack_lib_refs.end());
        threat.attack_lib_refs.erase(
            std::unique(threat.attack_lib_refs.begin(), threat.attack_lib_refs.end()),
            threat.attack_lib_refs.end());
    }
    return threats;
}

}  // namespace tmforge
