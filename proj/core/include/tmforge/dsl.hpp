#pragma once

#include <optional>
#include <string>

#include "tmforge/diagnostics.hpp"
#include "tmforge/model.hpp"

namespace tmforge {

// Result of parsing a `.tmf` model file. Either `error` is set (the text
// could not be parsed at all) or `model` is set and `diagnostics` carries
// whatever validate_model found on the parsed result.
struct ParseOutcome {
    std::optional<DfdModel> model;
    std::optional<ParseError> error;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return model.has_value(); }
};

// Line-oriented model format. `#` starts a comment outside quoted
// strings; LF and CRLF both accepted. Statements:
//
//   model "<title>"
//   level <context|0|1|...>
//   entity <id> "<name>" [tag "<t>"...] [in <boundary-id>...]
//   process <id> "<name>" [tag "<t>"...] [in <boundary-id>...]
//   store <id> "<name>" [log] [tag "<t>"...] [in <boundary-id>...]
//   boundary <id> "<name>"
//   flow <id> <src-id> -> <dst-id> "<label>"
//   refine <parent-level>:<parent-id> -> <child-id> [, <child-id>...]
ParseOutcome parse_model(const std::string& text, const std::string& filename = "");

// Canonical text form: levels ascending, statements sorted by id, refine
// lines last. Re-parsing the output yields a structurally equal model and
// serialization is a fixed point. Precondition: the model validates with
// no errors (throws InputError).
std::string serialize_model(const DfdModel& model);

}  // namespace tmforge
