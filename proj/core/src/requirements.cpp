#include "tmforge/requirements.hpp"

#include <algorithm>
#include <cctype>

#include "json_util.hpp"

namespace tmforge {

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::Ours: return "ours";
        case Scheme::Nist: return "nist";
        case Scheme::Dod: return "dod";
    }
    return "?";
}

Fallible<Scheme> scheme_from_string(std::string_view text) {
    if (text == "ours") return Scheme::Ours;
    if (text == "nist") return Scheme::Nist;
    if (text == "dod") return Scheme::Dod;
    return Fallible<Scheme>::failure("unknown scheme '" + std::string(text) +
                                     "' (expected ours, nist or dod)");
}

RequirementId RequirementId::ours(int seq) {
    RequirementId id;
    id.scheme = Scheme::Ours;
    id.seq = seq;
    char buf[32];
    std::snprintf(buf, sizeof buf, "Ours-Secu-%03d", seq);
    id.key = buf;
    return id;
}

Fallible<RequirementId> RequirementId::parse(std::string_view text) {
    using R = Fallible<RequirementId>;
    constexpr std::string_view ours_prefix = "Ours-Secu-";
    if (text.rfind(ours_prefix, 0) == 0) {
        std::string_view digits = text.substr(ours_prefix.size());
        if (digits.size() != 3 || !std::all_of(digits.begin(), digits.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c));
            })) {
            return R::failure("Ours id must be Ours-Secu-<three digits>: '" +
                              std::string(text) + "'");
        }
        const int seq = (digits[0] - '0') * 100 + (digits[1] - '0') * 10 + (digits[2] - '0');
        if (seq == 0) return R::failure("Ours sequence must be at least 001");
        return RequirementId::ours(seq);
    }
    RequirementId id;
    id.key = std::string(text);
    if (text.rfind("NIST", 0) == 0) {
        id.scheme = Scheme::Nist;
        return id;
    }
    if (text.rfind("DoD", 0) == 0) {
        id.scheme = Scheme::Dod;
        return id;
    }
    return R::failure("unrecognized requirement id '" + std::string(text) +
                      "' (expected an Ours-Secu-NNN, NIST* or DoD* id)");
}

bool RequirementId::operator<(const RequirementId& other) const {
    if (scheme != other.scheme) return scheme < other.scheme;
    if (scheme == Scheme::Ours) return seq < other.seq;
    return key < other.key;
}

void RequirementsCatalog::set_principles(std::vector<PrincipleInfo> principles) {
    principles_ = std::move(principles);
}

bool RequirementsCatalog::insert(Requirement requirement) {
    return entries_.emplace(requirement.id, std::move(requirement)).second;
}

int RequirementsCatalog::count(Scheme scheme) const {
    int n = 0;
    for (const auto& [id, entry] : entries_) {
        if (id.scheme == scheme) ++n;
    }
    return n;
}

const Requirement* RequirementsCatalog::find(const RequirementId& id) const {
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

const Requirement* RequirementsCatalog::find(std::string_view text) const {
    auto id = RequirementId::parse(text);
    if (!id) return nullptr;
    return find(id.value());
}

std::vector<const Requirement*> RequirementsCatalog::by_scheme(Scheme scheme) const {
    std::vector<const Requirement*> out;
    for (const auto& [id, entry] : entries_) {
        if (id.scheme == scheme) out.push_back(&entry);
    }
    return out;
}

bool RequirementsCatalog::ours_contiguous() const {
    int expected = 1;
    for (const auto& [id, entry] : entries_) {
        if (id.scheme != Scheme::Ours) continue;
        if (id.seq != expected) return false;
        ++expected;
    }
    return true;
}

Loaded<RequirementsCatalog> load_requirements(const std::string& json_text,
                                              const std::string& filename) {
    Loaded<RequirementsCatalog> out;
    auto doc = jsonutil::parse(json_text, filename, out.errors);
    if (!doc) return out;
    if (!doc->is_object() || !doc->contains("requirements") ||
        !(*doc)["requirements"].is_array()) {
        out.errors.push_back({filename, "", "expected an object with a 'requirements' array"});
        return out;
    }

    RequirementsCatalog catalog;
    std::vector<PrincipleInfo> principles;
    if (doc->contains("principles")) {
        const auto& arr = (*doc)["principles"];
        if (!arr.is_array()) {
            out.errors.push_back({filename, "principles", "must be an array"});
        } else {
            for (size_t i = 0; i < arr.size(); ++i) {
                const std::string path = "principles[" + std::to_string(i) + "]";
                auto tag = jsonutil::req_string(arr[i], "tag", filename, path, out.errors);
                if (!tag) continue;
                principles.push_back({*tag, jsonutil::opt_string(arr[i], "summary")});
            }
        }
    }
    catalog.set_principles(principles);
    auto known_principle = [&](const std::string& tag) {
        return std::any_of(principles.begin(), principles.end(),
                           [&](const PrincipleInfo& p) { return p.tag == tag; });
    };

    const auto& items = (*doc)["requirements"];
    for (size_t i = 0; i < items.size(); ++i) {
        const std::string path = "requirements[" + std::to_string(i) + "]";
        const auto& item = items[i];
        auto id_text = jsonutil::req_string(item, "id", filename, path, out.errors);
        auto title = jsonutil::req_string(item, "title", filename, path, out.errors);
        if (!id_text || !title) continue;
        auto id = RequirementId::parse(*id_text);
        if (!id) {
            out.errors.push_back({filename, path, id.error()});
            continue;
        }
        Requirement requirement;
        requirement.id = id.value();
        requirement.title = *title;
        if (requirement.title.empty()) {
            out.errors.push_back({filename, path, "title must be nonempty"});
            continue;
        }
        if (auto scheme_text = jsonutil::opt_string(item, "scheme"); !scheme_text.empty()) {
            auto scheme = scheme_from_string(scheme_text);
            if (!scheme) {
                out.errors.push_back({filename, path, scheme.error()});
                continue;
            }
            if (scheme.value() != requirement.id.scheme) {
                out.errors.push_back(
                    {filename, path, "scheme field disagrees with the id prefix"});
                continue;
            }
        }
        requirement.body_items =
            jsonutil::opt_string_array(item, "body_items", filename, path, out.errors);
        requirement.locations =
            jsonutil::opt_string_array(item, "locations", filename, path, out.errors);
        requirement.threat_labels =
            jsonutil::opt_string_array(item, "threat_labels", filename, path, out.errors);
        requirement.principles =
            jsonutil::opt_string_array(item, "principles", filename, path, out.errors);
        requirement.reconstructed = jsonutil::opt_bool(item, "reconstructed");
        requirement.provenance = jsonutil::opt_string(item, "provenance");
        if (requirement.id.scheme == Scheme::Ours && requirement.principles.empty()) {
            out.errors.push_back(
                {filename, path, "Ours entries must carry at least one principle tag"});
            continue;
        }
        bool bad_tag = false;
        for (const std::string& tag : requirement.principles) {
            if (!principles.empty() && !known_principle(tag)) {
                out.errors.push_back({filename, path, "unknown principle tag '" + tag + "'"});
                bad_tag = true;
            }
        }
        if (bad_tag) continue;
        bool bad_ref = false;
        for (const std::string& ref :
             jsonutil::opt_string_array(item, "framework_refs", filename, path, out.errors)) {
            auto ref_id = RequirementId::parse(ref);
            if (!ref_id) {
                out.errors.push_back({filename, path, ref_id.error()});
                bad_ref = true;
                continue;
            }
            requirement.framework_refs.push_back(ref_id.value());
        }
        if (bad_ref) continue;
        if (!catalog.insert(std::move(requirement))) {
            out.errors.push_back({filename, path, "duplicate id " + *id_text});
        }
    }

    // Framework cross-references must resolve inside the same catalog.
    for (const auto& [id, entry] : catalog.entries()) {
        for (const RequirementId& ref : entry.framework_refs) {
            if (catalog.find(ref) == nullptr) {
                out.errors.push_back({filename, id.text(),
                                      "framework_ref " + ref.text() + " does not resolve"});
            }
        }
    }

    if (!out.errors.empty()) return out;
    out.value = std::move(catalog);
    return out;
}

PrincipleCoverage principle_coverage(const RequirementsCatalog& catalog) {
    PrincipleCoverage coverage;
    for (const PrincipleInfo& principle : catalog.principles()) {
        coverage.by_principle[principle.tag] = {};
    }
    for (const auto& [id, entry] : catalog.entries()) {
        for (const std::string& tag : entry.principles) {
            coverage.by_principle[tag].push_back(id);
        }
    }
    for (auto& [tag, ids] : coverage.by_principle) {
        std::sort(ids.begin(), ids.end());
        if (ids.empty()) coverage.uncovered.push_back(tag);
    }
    return coverage;
}

std::vector<Requirement> lookup_by_location(const RequirementsCatalog& catalog,
                                            std::string_view location) {
    std::vector<Requirement> out;
    for (const auto& [id, entry] : catalog.entries()) {
        if (std::find(entry.locations.begin(), entry.locations.end(), location) !=
            entry.locations.end()) {
            out.push_back(entry);
        }
    }
    return out;  // map iteration is already id-ordered
}

}  // namespace tmforge
