#include "tmforge/attack_catalog.hpp"

#include <cctype>

#include "json_util.hpp"

namespace tmforge {

char source_letter(AttackSourceKind kind) {
    switch (kind) {
        case AttackSourceKind::Cve: return 'V';
        case AttackSourceKind::Cwe: return 'W';
        case AttackSourceKind::Paper: return 'P';
        case AttackSourceKind::Conference: return 'C';
        case AttackSourceKind::AttackTechnique: return 'A';
        case AttackSourceKind::Standard: return 'S';
        case AttackSourceKind::Report: return 'R';
    }
    return '?';
}

std::optional<AttackSourceKind> source_from_letter(char letter) {
    switch (letter) {
        case 'V': return AttackSourceKind::Cve;
        case 'W': return AttackSourceKind::Cwe;
        case 'P': return AttackSourceKind::Paper;
        case 'C': return AttackSourceKind::Conference;
        case 'A': return AttackSourceKind::AttackTechnique;
        case 'S': return AttackSourceKind::Standard;
        case 'R': return AttackSourceKind::Report;
        default: return std::nullopt;
    }
}

std::string to_string(AttackSourceKind kind) {
    switch (kind) {
        case AttackSourceKind::Cve: return "CVE";
        case AttackSourceKind::Cwe: return "CWE";
        case AttackSourceKind::Paper: return "paper";
        case AttackSourceKind::Conference: return "conference";
        case AttackSourceKind::AttackTechnique: return "attack-technique";
        case AttackSourceKind::Standard: return "standard";
        case AttackSourceKind::Report: return "report";
    }
    return "?";
}

std::string AttackLibId::text() const {
    return std::string("AL-") + source_letter(source) + "-" + std::to_string(seq);
}

Fallible<AttackLibId> parse_attack_lib_id(std::string_view text) {
    using R = Fallible<AttackLibId>;
    if (text.substr(0, 3) != "AL-") {
        return R::failure("attack-library id must start with 'AL-': '" + std::string(text) +
                          "'");
    }
    std::string_view rest = text.substr(3);
    const size_t dash = rest.find('-');
    if (dash == std::string_view::npos) {
        return R::failure("attack-library id is missing its sequence segment: '" +
                          std::string(text) + "'");
    }
    std::string_view letter = rest.substr(0, dash);
    std::string_view digits = rest.substr(dash + 1);
    if (letter.size() != 1) {
        return R::failure("source segment must be a single letter: '" + std::string(letter) +
                          "'");
    }
    auto source = source_from_letter(letter[0]);
    if (!source) {
        return R::failure(std::string("unknown source letter ") + letter[0]);
    }
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c));
        })) {
        return R::failure("sequence segment must be decimal digits: '" + std::string(digits) +
                          "'");
    }
    if (digits.size() > 1 && digits[0] == '0') {
        return R::failure("sequence segment must not have leading zeros: '" +
                          std::string(digits) + "'");
    }
    long long seq = 0;
    for (char c : digits) {
        seq = seq * 10 + (c - '0');
        if (seq > 1000000) return R::failure("sequence segment out of range");
    }
    if (seq < 1) return R::failure("sequence must be positive");
    return AttackLibId{*source, static_cast<int>(seq)};
}

bool AttackLibCatalog::insert(AttackLibEntry entry) {
    return entries_.emplace(entry.id, std::move(entry)).second;
}

const AttackLibEntry* AttackLibCatalog::find(const AttackLibId& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

const AttackLibEntry* AttackLibCatalog::find(std::string_view text) const {
    auto parsed = parse_attack_lib_id(text);
    if (!parsed) return nullptr;
    return find(parsed.value());
}

std::map<AttackSourceKind, int> AttackLibCatalog::source_counts() const {
    std::map<AttackSourceKind, int> counts;
    for (const auto& [id, entry] : entries_) counts[id.source]++;
    return counts;
}

Loaded<AttackLibCatalog> load_attack_catalog(const std::string& json_text,
                                             const std::string& filename) {
    Loaded<AttackLibCatalog> out;
    auto doc = jsonutil::parse(json_text, filename, out.errors);
    if (!doc) return out;
    if (!doc->is_object() || !doc->contains("entries") || !(*doc)["entries"].is_array()) {
        out.errors.push_back({filename, "", "expected an object with an 'entries' array"});
        return out;
    }

    AttackLibCatalog catalog;
    const auto& entries = (*doc)["entries"];
    for (size_t i = 0; i < entries.size(); ++i) {
        const std::string path = "entries[" + std::to_string(i) + "]";
        const auto& item = entries[i];
        auto id_text = jsonutil::req_string(item, "id", filename, path, out.errors);
        auto title = jsonutil::req_string(item, "title", filename, path, out.errors);
        if (!id_text || !title) continue;
        auto id = parse_attack_lib_id(*id_text);
        if (!id) {
            out.errors.push_back({filename, path, id.error()});
            continue;
        }
        AttackLibEntry entry;
        entry.id = id.value();
        entry.title = *title;
        entry.external_ref = jsonutil::opt_string(item, "external_ref");
        entry.notes = jsonutil::opt_string(item, "notes");
        entry.reconstructed = jsonutil::opt_bool(item, "reconstructed");
        entry.provenance = jsonutil::opt_string(item, "provenance");
        if (!catalog.insert(std::move(entry))) {
            out.errors.push_back({filename, path, "duplicate id " + *id_text});
        }
    }
    if (!out.errors.empty()) return out;
    out.value = std::move(catalog);
    return out;
}

}  // namespace tmforge
