#include "tmforge/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace tmforge {

namespace {

struct Token {
    std::string text;
    int column = 1;      // 1-based
    bool quoted = false; // came from a "..." literal
};

struct LineTokens {
    int line = 1;
    std::vector<Token> tokens;
};

struct Lexer {
    const std::string& filename;
    std::optional<ParseError> error;

    std::optional<std::vector<LineTokens>> run(const std::string& text) {
        std::vector<LineTokens> out;
        int line_no = 1;
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t eol = text.find('\n', pos);
            std::string_view line;
            if (eol == std::string::npos) {
                if (pos >= text.size()) break;
                line = std::string_view(text).substr(pos);
                pos = text.size() + 1;
            } else {
                line = std::string_view(text).substr(pos, eol - pos);
                pos = eol + 1;
            }
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            LineTokens lt{line_no, {}};
            if (!tokenize(line, line_no, lt.tokens)) return std::nullopt;
            if (!lt.tokens.empty()) out.push_back(std::move(lt));
            ++line_no;
        }
        return out;
    }

    bool tokenize(std::string_view line, int line_no, std::vector<Token>& out) {
        size_t i = 0;
        while (i < line.size()) {
            char c = line[i];
            if (c == ' ' || c == '\t') {
                ++i;
                continue;
            }
            if (c == '#') break;  // comment to end of line
            const int column = static_cast<int>(i) + 1;
            if (c == '"') {
                std::string value;
                ++i;
                bool closed = false;
                while (i < line.size()) {
                    char d = line[i];
                    if (d == '\\') {
                        if (i + 1 >= line.size()) break;
                        char e = line[i + 1];
                        if (e == '"' || e == '\\') {
                            value.push_back(e);
                            i += 2;
                            continue;
                        }
                        value.push_back(d);
                        ++i;
                        continue;
                    }
                    if (d == '"') {
                        closed = true;
                        ++i;
                        break;
                    }
                    value.push_back(d);
                    ++i;
                }
                if (!closed) {
                    error = ParseError{{filename, line_no, column}, "unterminated string"};
                    return false;
                }
                out.push_back({std::move(value), column, true});
                continue;
            }
            std::string word;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '#' &&
                   line[i] != '"') {
                word.push_back(line[i]);
                ++i;
            }
            out.push_back({std::move(word), column, false});
        }
        return true;
    }
};

std::string escape(const std::string& value) {
    std::string out;
    out.reserve(value.size() + 2);
    for (char c : value) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

bool plausible_id(const std::string& text) {
    static const std::string prefixes = "EPDFB";
    return text.size() >= 2 && prefixes.find(text[0]) != std::string::npos &&
           std::all_of(text.begin() + 1, text.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

struct Parser {
    std::string filename;
    DfdModel model;
    std::optional<ParseError> error;
    bool saw_header = false;
    DfdLevel* current_level = nullptr;
    std::map<int, size_t> level_index;  // rank -> index into model.levels

    void fail(int line, int column, std::string message) {
        if (!error) error = ParseError{{filename, line, column}, std::move(message)};
    }

    DfdLevel* open_level(int rank) {
        auto [it, inserted] = level_index.try_emplace(rank, model.levels.size());
        if (inserted) {
            model.levels.push_back(DfdLevel{rank, {}, {}, {}});
        }
        return &model.levels[it->second];
    }

    bool expect_id(const Token& token, int line, const char* what) {
        if (token.quoted || !plausible_id(token.text)) {
            fail(line, token.column,
                 std::string("malformed ") + what + " '" + token.text +
                     "' (expected a letter-prefixed id such as E1, P2, D3, F4 or B5)");
            return false;
        }
        return true;
    }

    void parse_line(const LineTokens& lt) {
        const auto& tokens = lt.tokens;
        const Token& head = tokens.front();
        if (head.quoted) {
            fail(lt.line, head.column, "expected a statement keyword");
            return;
        }
        const std::string& keyword = head.text;
        if (keyword == "model") {
            parse_header(lt);
        } else if (keyword == "level") {
            parse_level(lt);
        } else if (keyword == "entity" || keyword == "process" || keyword == "store") {
            parse_element(lt);
        } else if (keyword == "boundary") {
            parse_boundary(lt);
        } else if (keyword == "flow") {
            parse_flow(lt);
        } else if (keyword == "refine") {
            parse_refine(lt);
        } else {
            fail(lt.line, head.column, "unknown keyword '" + keyword + "'");
        }
    }

    void require_header(const LineTokens& lt) {
        if (!saw_header) {
            fail(lt.line, lt.tokens.front().column, "missing model header");
        }
    }

    void parse_header(const LineTokens& lt) {
        if (saw_header) {
            fail(lt.line, lt.tokens.front().column, "duplicate model header");
            return;
        }
        if (lt.tokens.size() != 2 || !lt.tokens[1].quoted) {
            fail(lt.line, lt.tokens.front().column, "expected: model \"<title>\"");
            return;
        }
        model.title = lt.tokens[1].text;
        saw_header = true;
    }

    void parse_level(const LineTokens& lt) {
        require_header(lt);
        if (error) return;
        if (lt.tokens.size() != 2 || lt.tokens[1].quoted) {
            fail(lt.line, lt.tokens.front().column, "expected: level <context|0|1|...>");
            return;
        }
        auto rank = level_rank_from_token(lt.tokens[1].text);
        if (!rank) {
            fail(lt.line, lt.tokens[1].column,
                 "unknown level '" + lt.tokens[1].text + "' (use context, 0, 1, ...)");
            return;
        }
        if (level_index.count(*rank) != 0) {
            fail(lt.line, lt.tokens[1].column,
                 "duplicate level " + lt.tokens[1].text);
            return;
        }
        current_level = open_level(*rank);
    }

    // entity/process/store <id> "<name>" [log] [tag "<t>"...] [in <b>...]
    void parse_element(const LineTokens& lt) {
        require_header(lt);
        if (error) return;
        const std::string& keyword = lt.tokens.front().text;
        if (current_level == nullptr) {
            fail(lt.line, lt.tokens.front().column,
                 keyword + " statement outside a level block");
            return;
        }
        if (lt.tokens.size() < 3 || lt.tokens[1].quoted || !lt.tokens[2].quoted) {
            fail(lt.line, lt.tokens.front().column,
                 "expected: " + keyword + " <id> \"<name>\" ...");
            return;
        }
        if (!expect_id(lt.tokens[1], lt.line, "id")) return;

        Element element;
        element.id = lt.tokens[1].text;
        element.name = lt.tokens[2].text;
        element.kind = keyword == "entity"    ? ElementKind::ExternalEntity
                       : keyword == "process" ? ElementKind::Process
                                              : ElementKind::DataStore;

        size_t i = 3;
        enum class Clause { None, Tag, In };
        Clause clause = Clause::None;
        while (i < lt.tokens.size()) {
            const Token& token = lt.tokens[i];
            if (!token.quoted && token.text == "log") {
                if (keyword != "store") {
                    fail(lt.line, token.column, "log flag is only valid on store statements");
                    return;
                }
                element.is_log_store = true;
                clause = Clause::None;
                ++i;
                continue;
            }
            if (!token.quoted && token.text == "tag") {
                clause = Clause::Tag;
                ++i;
                continue;
            }
            if (!token.quoted && token.text == "in") {
                clause = Clause::In;
                ++i;
                continue;
            }
            if (clause == Clause::Tag) {
                if (!token.quoted) {
                    fail(lt.line, token.column, "tags must be quoted strings");
                    return;
                }
                element.tags.push_back(token.text);
                ++i;
                continue;
            }
            if (clause == Clause::In) {
                if (!expect_id(token, lt.line, "boundary id")) return;
                element.boundary_ids.push_back(token.text);
                ++i;
                continue;
            }
            fail(lt.line, token.column, "unexpected token '" + token.text + "'");
            return;
        }
        if (clause == Clause::Tag && element.tags.empty()) {
            fail(lt.line, lt.tokens.back().column, "tag clause lists no tags");
            return;
        }
        if (clause == Clause::In && element.boundary_ids.empty()) {
            fail(lt.line, lt.tokens.back().column, "in clause lists no boundary ids");
            return;
        }
        current_level->elements.push_back(std::move(element));
    }

    void parse_boundary(const LineTokens& lt) {
        require_header(lt);
        if (error) return;
        if (current_level == nullptr) {
            fail(lt.line, lt.tokens.front().column, "boundary statement outside a level block");
            return;
        }
        if (lt.tokens.size() != 3 || lt.tokens[1].quoted || !lt.tokens[2].quoted) {
            fail(lt.line, lt.tokens.front().column, "expected: boundary <id> \"<name>\"");
            return;
        }
        if (!expect_id(lt.tokens[1], lt.line, "boundary id")) return;
        current_level->boundaries.push_back({lt.tokens[1].text, lt.tokens[2].text, {}});
    }

    void parse_flow(const LineTokens& lt) {
        require_header(lt);
        if (error) return;
        if (current_level == nullptr) {
            fail(lt.line, lt.tokens.front().column, "flow statement outside a level block");
            return;
        }
        if (lt.tokens.size() != 6 || lt.tokens[1].quoted || lt.tokens[2].quoted ||
            lt.tokens[3].quoted || lt.tokens[3].text != "->" || lt.tokens[4].quoted ||
            !lt.tokens[5].quoted) {
            fail(lt.line, lt.tokens.front().column,
                 "expected: flow <id> <src-id> -> <dst-id> \"<label>\"");
            return;
        }
        if (!expect_id(lt.tokens[1], lt.line, "flow id")) return;
        if (!expect_id(lt.tokens[2], lt.line, "source id")) return;
        if (!expect_id(lt.tokens[4], lt.line, "destination id")) return;
        current_level->flows.push_back(
            {lt.tokens[1].text, lt.tokens[2].text, lt.tokens[4].text, lt.tokens[5].text, {}});
    }

    // refine <parent-level>:<parent-id> -> <child> [, <child>...]
    void parse_refine(const LineTokens& lt) {
        require_header(lt);
        if (error) return;
        if (lt.tokens.size() < 4) {
            fail(lt.line, lt.tokens.front().column,
                 "expected: refine <level>:<parent-id> -> <child-id> [, <child-id>...]");
            return;
        }
        const Token& parent_token = lt.tokens[1];
        const size_t colon = parent_token.text.find(':');
        if (parent_token.quoted || colon == std::string::npos) {
            fail(lt.line, parent_token.column,
                 "expected <level>:<parent-id> (e.g. context:P1)");
            return;
        }
        auto rank = level_rank_from_token(parent_token.text.substr(0, colon));
        if (!rank) {
            fail(lt.line, parent_token.column,
                 "unknown level '" + parent_token.text.substr(0, colon) + "'");
            return;
        }
        std::string parent_id = parent_token.text.substr(colon + 1);
        if (!plausible_id(parent_id)) {
            fail(lt.line, parent_token.column, "malformed parent id '" + parent_id + "'");
            return;
        }
        if (lt.tokens[2].quoted || lt.tokens[2].text != "->") {
            fail(lt.line, lt.tokens[2].column, "expected '->' after the refinement parent");
            return;
        }
        RefinementLink link{*rank, std::move(parent_id), {}};
        for (size_t i = 3; i < lt.tokens.size(); ++i) {
            std::string text = lt.tokens[i].text;
            bool trailing_comma = false;
            while (!text.empty() && text.back() == ',') {
                text.pop_back();
                trailing_comma = true;
            }
            if (text.empty()) {
                if (!trailing_comma) {
                    fail(lt.line, lt.tokens[i].column, "empty child id");
                    return;
                }
                continue;
            }
            if (lt.tokens[i].quoted || !plausible_id(text)) {
                fail(lt.line, lt.tokens[i].column, "malformed child id '" + text + "'");
                return;
            }
            link.child_ids.push_back(std::move(text));
        }
        if (link.child_ids.empty()) {
            fail(lt.line, lt.tokens.back().column, "refinement lists no children");
            return;
        }
        model.refinements.push_back(std::move(link));
    }
};

}  // namespace

ParseOutcome parse_model(const std::string& text, const std::string& filename) {
    ParseOutcome outcome;
    Lexer lexer{filename, std::nullopt};
    auto lines = lexer.run(text);
    if (!lines) {
        outcome.error = lexer.error;
        return outcome;
    }
    if (lines->empty()) {
        outcome.error = ParseError{{filename, 1, 1}, "missing model header"};
        return outcome;
    }

    Parser parser;
    parser.filename = filename;
    for (const LineTokens& lt : *lines) {
        parser.parse_line(lt);
        if (parser.error) {
            outcome.error = parser.error;
            return outcome;
        }
    }
    if (!parser.saw_header) {
        outcome.error = ParseError{{filename, 1, 1}, "missing model header"};
        return outcome;
    }

    DfdModel model = std::move(parser.model);
    std::sort(model.levels.begin(), model.levels.end(),
              [](const DfdLevel& a, const DfdLevel& b) { return a.rank < b.rank; });
    refresh_derived(model);
    outcome.diagnostics = validate_model(model);
    outcome.model = std::move(model);
    return outcome;
}

namespace {

bool single_line(const std::string& text) {
    return text.find('\n') == std::string::npos && text.find('\r') == std::string::npos;
}

}  // namespace

std::string serialize_model(const DfdModel& model) {
    if (has_errors(validate_model(model))) {
        throw InputError("serialize_model requires a model that validates cleanly");
    }
    const DfdModel m = canonical(model);
    for (const DfdLevel& level : m.levels) {
        for (const Element& e : level.elements) {
            if (!single_line(e.name) ||
                !std::all_of(e.tags.begin(), e.tags.end(), single_line)) {
                throw InputError("element " + e.id + " has a name or tag spanning lines");
            }
        }
        for (const DataFlow& f : level.flows) {
            if (!single_line(f.label)) {
                throw InputError("flow " + f.id + " has a label spanning lines");
            }
        }
        for (const TrustBoundary& b : level.boundaries) {
            if (!single_line(b.name)) {
                throw InputError("boundary " + b.id + " has a name spanning lines");
            }
        }
    }
    if (!single_line(m.title)) throw InputError("model title spans lines");

    std::ostringstream out;
    out << "model \"" << escape(m.title) << "\"\n";
    for (const DfdLevel& level : m.levels) {
        out << "\n" << "level " << level_token(level.rank) << "\n";
        for (const TrustBoundary& b : level.boundaries) {
            out << "boundary " << b.id << " \"" << escape(b.name) << "\"\n";
        }
        for (const Element& e : level.elements) {
            out << to_string(e.kind) << " " << e.id << " \"" << escape(e.name) << "\"";
            if (e.is_log_store) out << " log";
            if (!e.tags.empty()) {
                out << " tag";
                for (const std::string& t : e.tags) out << " \"" << escape(t) << "\"";
            }
            if (!e.boundary_ids.empty()) {
                out << " in";
                for (const std::string& b : e.boundary_ids) out << " " << b;
            }
            out << "\n";
        }
        for (const DataFlow& f : level.flows) {
            out << "flow " << f.id << " " << f.src << " -> " << f.dst << " \""
                << escape(f.label) << "\"\n";
        }
    }
    if (!m.refinements.empty()) {
        out << "\n";
        for (const RefinementLink& link : m.refinements) {
            out << "refine " << level_token(link.parent_rank) << ":" << link.parent_id
                << " ->";
            for (size_t i = 0; i < link.child_ids.size(); ++i) {
                out << (i == 0 ? " " : ", ") << link.child_ids[i];
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace tmforge
