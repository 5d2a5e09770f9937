#include "tmforge/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tmforge {

std::string to_string(Severity severity) {
    return severity == Severity::Error ? "error" : "warning";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
    std::stable_sort(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         if (a.level_rank != b.level_rank) return a.level_rank < b.level_rank;
                         if (a.subject != b.subject) return id_less(a.subject, b.subject);
                         return a.message < b.message;
                     });
}

std::string format_diagnostic(const Diagnostic& diagnostic) {
    std::string out = to_string(diagnostic.severity);
    if (!diagnostic.location.empty()) {
        out += ": " + diagnostic.location;
    }
    out += ": " + diagnostic.message;
    return out;
}

std::string format_parse_error(const ParseError& error) {
    std::ostringstream out;
    if (!error.span.file.empty()) out << error.span.file << ":";
    out << error.span.line << ":" << error.span.column << ": " << error.message;
    return out.str();
}

std::string format_schema_error(const SchemaError& error) {
    std::string out;
    if (!error.file.empty()) out += error.file + ": ";
    if (!error.path.empty()) out += error.path + ": ";
    out += error.message;
    return out;
}

char kind_prefix(ElementKind kind) {
    switch (kind) {
        case ElementKind::ExternalEntity: return 'E';
        case ElementKind::Process: return 'P';
        case ElementKind::DataStore: return 'D';
    }
    return '?';
}

std::optional<ElementKind> kind_from_prefix(char prefix) {
    switch (prefix) {
        case 'E': return ElementKind::ExternalEntity;
        case 'P': return ElementKind::Process;
        case 'D': return ElementKind::DataStore;
        default: return std::nullopt;
    }
}

std::string to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::ExternalEntity: return "entity";
        case ElementKind::Process: return "process";
        case ElementKind::DataStore: return "store";
    }
    return "?";
}

const Element* DfdLevel::find_element(std::string_view id) const {
    for (const Element& e : elements) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

const TrustBoundary* DfdLevel::find_boundary(std::string_view id) const {
    for (const TrustBoundary& b : boundaries) {
        if (b.id == id) return &b;
    }
    return nullptr;
}

const DfdLevel* DfdModel::find_level(int rank) const {
    for (const DfdLevel& level : levels) {
        if (level.rank == rank) return &level;
    }
    return nullptr;
}

std::string level_display_name(int rank) {
    if (rank == 0) return "Context Level";
    return "Level " + std::to_string(rank - 1);
}

std::optional<int> level_rank_from_token(std::string_view token) {
    if (token == "context") return 0;
    if (token.empty()) return std::nullopt;
    int value = 0;
    for (char c : token) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        value = value * 10 + (c - '0');
        if (value > 1000) return std::nullopt;
    }
    return value + 1;
}

std::string level_token(int rank) {
    return rank == 0 ? "context" : std::to_string(rank - 1);
}

bool valid_id(std::string_view id, char prefix) {
    if (id.size() < 2 || id[0] != prefix) return false;
    return std::all_of(id.begin() + 1, id.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool id_less(std::string_view a, std::string_view b) {
    auto split = [](std::string_view id) -> std::pair<std::string_view, long long> {
        size_t i = 0;
        while (i < id.size() && !std::isdigit(static_cast<unsigned char>(id[i]))) ++i;
        size_t j = i;
        long long n = -1;
        while (j < id.size() && std::isdigit(static_cast<unsigned char>(id[j]))) {
            if (n < 0) n = 0;
            n = n * 10 + (id[j] - '0');
            ++j;
        }
        if (j != id.size()) return {id, -1};  // trailing junk: not natural
        return {id.substr(0, i), n};
    };
    auto [pa, na] = split(a);
    auto [pb, nb] = split(b);
    if (na >= 0 && nb >= 0) {
        if (pa != pb) return pa < pb;
        if (na != nb) return na < nb;
    }
    return a < b;
}

namespace {

void sort_unique(std::vector<std::string>& values) {
    std::sort(values.begin(), values.end(),
              [](const std::string& a, const std::string& b) { return id_less(a, b); });
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

std::vector<std::string> symmetric_difference(std::vector<std::string> a,
                                              std::vector<std::string> b) {
    sort_unique(a);
    sort_unique(b);
    std::vector<std::string> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(out),
                                  [](const std::string& x, const std::string& y) {
                                      return id_less(x, y);
                                  });
    return out;
}

}  // namespace

std::vector<std::string> compute_crosses(const DfdLevel& level, const DataFlow& flow) {
    const Element* src = level.find_element(flow.src);
    const Element* dst = level.find_element(flow.dst);
    if (src == nullptr || dst == nullptr) return {};
    return symmetric_difference(src->boundary_ids, dst->boundary_ids);
}

void refresh_derived(DfdModel& model) {
    for (DfdLevel& level : model.levels) {
        for (Element& element : level.elements) {
            sort_unique(element.boundary_ids);
            std::sort(element.tags.begin(), element.tags.end());
            element.tags.erase(std::unique(element.tags.begin(), element.tags.end()),
                               element.tags.end());
        }
        for (TrustBoundary& boundary : level.boundaries) {
            boundary.member_ids.clear();
            for (const Element& element : level.elements) {
                if (std::find(element.boundary_ids.begin(), element.boundary_ids.end(),
                              boundary.id) != element.boundary_ids.end()) {
                    boundary.member_ids.push_back(element.id);
                }
            }
            sort_unique(boundary.member_ids);
        }
        for (DataFlow& flow : level.flows) {
            flow.crosses = compute_crosses(level, flow);
        }
    }
    for (RefinementLink& link : model.refinements) {
        sort_unique(link.child_ids);
    }
}

DfdModel canonical(const DfdModel& model) {
    DfdModel out = model;
    std::sort(out.levels.begin(), out.levels.end(),
              [](const DfdLevel& a, const DfdLevel& b) { return a.rank < b.rank; });
    for (DfdLevel& level : out.levels) {
        std::sort(level.elements.begin(), level.elements.end(),
                  [](const Element& a, const Element& b) { return id_less(a.id, b.id); });
        std::sort(level.flows.begin(), level.flows.end(),
                  [](const DataFlow& a, const DataFlow& b) { return id_less(a.id, b.id); });
        std::sort(level.boundaries.begin(), level.boundaries.end(),
                  [](const TrustBoundary& a, const TrustBoundary& b) {
                      return id_less(a.id, b.id);
                  });
        for (Element& element : level.elements) {
            sort_unique(element.boundary_ids);
            std::sort(element.tags.begin(), element.tags.end());
        }
        for (TrustBoundary& boundary : level.boundaries) sort_unique(boundary.member_ids);
        for (DataFlow& flow : level.flows) sort_unique(flow.crosses);
    }
    std::sort(out.refinements.begin(), out.refinements.end(),
              [](const RefinementLink& a, const RefinementLink& b) {
                  if (a.parent_rank != b.parent_rank) return a.parent_rank < b.parent_rank;
                  return id_less(a.parent_id, b.parent_id);
              });
    for (RefinementLink& link : out.refinements) sort_unique(link.child_ids);
    return out;
}

bool structurally_equal(const DfdModel& a, const DfdModel& b) {
    const DfdModel ca = canonical(a);
    const DfdModel cb = canonical(b);
    if (ca.title != cb.title) return false;
    if (ca.levels.size() != cb.levels.size()) return false;
    for (size_t i = 0; i < ca.levels.size(); ++i) {
        const DfdLevel& la = ca.levels[i];
        const DfdLevel& lb = cb.levels[i];
        if (la.rank != lb.rank) return false;
        if (la.elements.size() != lb.elements.size()) return false;
        for (size_t j = 0; j < la.elements.size(); ++j) {
            const Element& ea = la.elements[j];
            const Element& eb = lb.elements[j];
            if (ea.id != eb.id || ea.kind != eb.kind || ea.name != eb.name ||
                ea.is_log_store != eb.is_log_store || ea.boundary_ids != eb.boundary_ids ||
                ea.tags != eb.tags) {
                return false;
            }
        }
        if (la.flows.size() != lb.flows.size()) return false;
        for (size_t j = 0; j < la.flows.size(); ++j) {
            const DataFlow& fa = la.flows[j];
            const DataFlow& fb = lb.flows[j];
            if (fa.id != fb.id || fa.src != fb.src || fa.dst != fb.dst ||
                fa.label != fb.label || fa.crosses != fb.crosses) {
                return false;
            }
        }
        if (la.boundaries.size() != lb.boundaries.size()) return false;
        for (size_t j = 0; j < la.boundaries.size(); ++j) {
            const TrustBoundary& ba = la.boundaries[j];
            const TrustBoundary& bb = lb.boundaries[j];
            if (ba.id != bb.id || ba.name != bb.name || ba.member_ids != bb.member_ids) {
                return false;
            }
        }
    }
    if (ca.refinements.size() != cb.refinements.size()) return false;
    for (size_t i = 0; i < ca.refinements.size(); ++i) {
        const RefinementLink& ra = ca.refinements[i];
        const RefinementLink& rb = cb.refinements[i];
        if (ra.parent_rank != rb.parent_rank || ra.parent_id != rb.parent_id ||
            ra.child_ids != rb.child_ids) {
            return false;
        }
    }
    return true;
}

namespace {

struct DiagnosticSink {
    std::vector<Diagnostic> items;

    void add(Severity severity, int rank, const std::string& subject,
             const std::string& message) {
        std::string location = level_display_name(rank);
        if (!subject.empty()) location += ": " + subject;
        items.push_back({severity, location, message, rank, subject});
    }

    void add_model(Severity severity, const std::string& subject, const std::string& message) {
        items.push_back({severity, subject.empty() ? "model" : subject, message, -1, subject});
    }
};

void validate_level_into(const DfdLevel& level, DiagnosticSink& sink) {
    const int rank = level.rank;

    std::unordered_map<std::string, int> element_count;
    for (const Element& e : level.elements) element_count[e.id]++;
    std::unordered_set<std::string> reported_dup;
    for (const Element& e : level.elements) {
        if (element_count[e.id] > 1 && reported_dup.insert(e.id).second) {
            sink.add(Severity::Error, rank, e.id, "duplicate element id " + e.id);
        }
    }

    std::unordered_map<std::string, int> boundary_count;
    for (const TrustBoundary& b : level.boundaries) boundary_count[b.id]++;
    reported_dup.clear();
    for (const TrustBoundary& b : level.boundaries) {
        if (boundary_count[b.id] > 1 && reported_dup.insert(b.id).second) {
            sink.add(Severity::Error, rank, b.id, "duplicate boundary id " + b.id);
        }
    }

    std::unordered_map<std::string, int> flow_count;
    for (const DataFlow& f : level.flows) flow_count[f.id]++;
    reported_dup.clear();
    for (const DataFlow& f : level.flows) {
        if (flow_count[f.id] > 1 && reported_dup.insert(f.id).second) {
            sink.add(Severity::Error, rank, f.id, "duplicate flow id " + f.id);
        }
    }

    for (const Element& e : level.elements) {
        const char prefix = kind_prefix(e.kind);
        if (!valid_id(e.id, prefix)) {
            sink.add(Severity::Error, rank, e.id,
                     "element id " + e.id + " does not match the " + to_string(e.kind) +
                         " pattern " + std::string(1, prefix) + "<number>");
        }
        if (e.is_log_store && e.kind != ElementKind::DataStore) {
            sink.add(Severity::Error, rank, e.id,
                     "log flag set on " + e.id + " which is not a data store");
        }
        for (const std::string& bid : e.boundary_ids) {
            if (level.find_boundary(bid) == nullptr) {
                sink.add(Severity::Error, rank, e.id,
                         "element " + e.id + " references undefined boundary " + bid);
            }
        }
    }

    for (const TrustBoundary& b : level.boundaries) {
        if (!valid_id(b.id, 'B')) {
            sink.add(Severity::Error, rank, b.id,
                     "boundary id " + b.id + " does not match the pattern B<number>");
        }
        for (const std::string& member : b.member_ids) {
            if (level.find_element(member) == nullptr) {
                sink.add(Severity::Error, rank, b.id,
                         "boundary " + b.id + " references undefined element " + member);
            }
        }
        // Derived-field consistency: the member list must mirror the
        // elements' declared boundary memberships.
        std::vector<std::string> derived;
        for (const Element& e : level.elements) {
            if (std::find(e.boundary_ids.begin(), e.boundary_ids.end(), b.id) !=
                e.boundary_ids.end()) {
                derived.push_back(e.id);
            }
        }
        sort_unique(derived);
        std::vector<std::string> stored = b.member_ids;
        sort_unique(stored);
        if (stored != derived) {
            sink.add(Severity::Error, rank, b.id,
                     "boundary " + b.id +
                         " member list is out of sync with element memberships");
        }
    }

    for (const DataFlow& f : level.flows) {
        if (!valid_id(f.id, 'F')) {
            sink.add(Severity::Error, rank, f.id,
                     "flow id " + f.id + " does not match the pattern F<number>");
        }
        if (f.src == f.dst) {
            sink.add(Severity::Error, rank, f.id,
                     "flow " + f.id + " has identical source and destination " + f.src);
        }
        const Element* src = level.find_element(f.src);
        const Element* dst = level.find_element(f.dst);
        if (src == nullptr) {
            sink.add(Severity::Error, rank, f.id,
                     "flow " + f.id + " references undefined element " + f.src);
        }
        if (dst == nullptr) {
            sink.add(Severity::Error, rank, f.id,
                     "flow " + f.id + " references undefined element " + f.dst);
        }
        if (src != nullptr && dst != nullptr) {
            std::vector<std::string> stored = f.crosses;
            sort_unique(stored);
            if (stored != compute_crosses(level, f)) {
                sink.add(Severity::Error, rank, f.id,
                         "flow " + f.id +
                             " crossing set is out of sync with boundary memberships");
            }
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_level(const DfdLevel& level) {
    DiagnosticSink sink;
    validate_level_into(level, sink);
    sort_diagnostics(sink.items);
    return sink.items;
}

std::vector<Diagnostic> validate_model(const DfdModel& model) {
    DiagnosticSink sink;

    std::set<int> ranks;
    for (const DfdLevel& level : model.levels) {
        if (!ranks.insert(level.rank).second) {
            sink.add(Severity::Error, level.rank, "",
                     "duplicate level rank " + std::to_string(level.rank));
        }
    }
    int expected = 0;
    for (int rank : ranks) {
        if (rank != expected) {
            sink.add_model(Severity::Error, "",
                           "level ranks are not contiguous from 0 (missing rank " +
                               std::to_string(expected) + ")");
            break;
        }
        ++expected;
    }

    for (const DfdLevel& level : model.levels) validate_level_into(level, sink);

    // Refinement link well-formedness. Each child may refine exactly one
    // parent within its level.
    std::map<std::pair<int, std::string>, int> child_link_count;
    for (const RefinementLink& link : model.refinements) {
        const DfdLevel* parent_level = model.find_level(link.parent_rank);
        const DfdLevel* child_level = model.find_level(link.parent_rank + 1);
        if (parent_level == nullptr) {
            sink.add_model(Severity::Error, link.parent_id,
                           "refinement parent level " + level_display_name(link.parent_rank) +
                               " does not exist");
            continue;
        }
        if (parent_level->find_element(link.parent_id) == nullptr) {
            sink.add(Severity::Error, link.parent_rank, link.parent_id,
                     "refinement parent " + link.parent_id + " is not an element of " +
                         level_display_name(link.parent_rank));
        }
        if (link.child_ids.empty()) {
            sink.add(Severity::Error, link.parent_rank, link.parent_id,
                     "refinement of " + link.parent_id + " has no children");
        }
        if (child_level == nullptr) {
            sink.add(Severity::Error, link.parent_rank, link.parent_id,
                     "refinement of " + link.parent_id + " targets missing level " +
                         level_display_name(link.parent_rank + 1));
            continue;
        }
        for (const std::string& child : link.child_ids) {
            if (child_level->find_element(child) == nullptr) {
                sink.add(Severity::Error, link.parent_rank + 1, child,
                         "refinement child " + child + " is not an element of " +
                             level_display_name(link.parent_rank + 1));
            }
            child_link_count[{link.parent_rank + 1, child}]++;
        }
    }
    for (const auto& [key, count] : child_link_count) {
        if (count > 1) {
            sink.add(Severity::Error, key.first, key.second,
                     "element " + key.second + " is a refinement child of multiple parents");
        }
    }

    sort_diagnostics(sink.items);
    return sink.items;
}

std::vector<Diagnostic> check_refinement_soundness(const DfdModel& model) {
    if (has_errors(validate_model(model))) {
        throw InputError("check_refinement_soundness requires a model that validates cleanly");
    }

    DiagnosticSink sink;
    for (size_t i = 0; i + 1 < model.levels.size(); ++i) {
        const DfdLevel& parent = model.levels[i];
        const DfdLevel& child = model.levels[i + 1];

        std::unordered_map<std::string, std::vector<std::string>> children_of;
        std::unordered_set<std::string> parented;
        for (const RefinementLink& link : model.refinements) {
            if (link.parent_rank != parent.rank) continue;
            auto& bucket = children_of[link.parent_id];
            bucket.insert(bucket.end(), link.child_ids.begin(), link.child_ids.end());
            for (const std::string& c : link.child_ids) parented.insert(c);
        }

        for (const Element& e : parent.elements) {
            auto it = children_of.find(e.id);
            if (it == children_of.end() || it->second.empty()) {
                sink.add(Severity::Error, parent.rank, e.id,
                         "element " + e.id + " (" + e.name + ") is not refined at " +
                             level_display_name(child.rank));
            }
        }

        for (const DataFlow& f : parent.flows) {
            const auto src_it = children_of.find(f.src);
            const auto dst_it = children_of.find(f.dst);
            // Skip flows with an unrefined endpoint: the missing-refinement
            // error above is the root cause.
            if (src_it == children_of.end() || src_it->second.empty() ||
                dst_it == children_of.end() || dst_it->second.empty()) {
                continue;
            }
            const std::unordered_set<std::string> src_children(src_it->second.begin(),
                                                               src_it->second.end());
            const std::unordered_set<std::string> dst_children(dst_it->second.begin(),
                                                               dst_it->second.end());
            const bool covered =
                std::any_of(child.flows.begin(), child.flows.end(), [&](const DataFlow& g) {
                    return src_children.count(g.src) > 0 && dst_children.count(g.dst) > 0;
                });
            if (!covered) {
                sink.add(Severity::Error, parent.rank, f.id,
                         "flow " + f.id + " (" + f.src + " -> " + f.dst +
                             ") is not covered by any flow at " +
                             level_display_name(child.rank));
            }
        }

        for (const Element& e : child.elements) {
            if (parented.count(e.id) == 0) {
                sink.add(Severity::Warning, child.rank, e.id,
                         "element " + e.id + " (" + e.name +
                             ") has no refinement parent; treated as internal detail");
            }
        }
    }

    sort_diagnostics(sink.items);
    return sink.items;
}

}  // namespace tmforge
