#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tmforge {

enum class Severity { Warning, Error };

std::string to_string(Severity severity);

// A single validation finding. `location` is the display form shown to
// users; `level_rank` and `subject` are the ordering keys (level rank,
// then offending id).
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string location;
    std::string message;
    int level_rank = -1;
    std::string subject;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);
void sort_diagnostics(std::vector<Diagnostic>& diagnostics);
std::string format_diagnostic(const Diagnostic& diagnostic);

// Thrown when an operation's precondition is violated (bad input, not a
// model defect). Kept distinct from Diagnostic lists on purpose.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SourceSpan {
    std::string file;
    int line = 1;
    int column = 1;
};

struct ParseError {
    SourceSpan span;
    std::string message;
};

std::string format_parse_error(const ParseError& error);

struct SchemaError {
    std::string file;
    std::string path;  // JSON pointer-ish location, e.g. "entries[3].id"
    std::string message;
};

std::string format_schema_error(const SchemaError& error);

// Loader result: either a value or a list of schema errors.
template <typename T>
struct Loaded {
    std::optional<T> value;
    std::vector<SchemaError> errors;

    bool ok() const { return value.has_value() && errors.empty(); }
};

// Parse result for small value types (ids, enums).
template <typename T>
class Fallible {
public:
    Fallible(T value) : state_(std::move(value)) {}
    static Fallible failure(std::string message) {
        return Fallible(Fail{std::move(message)});
    }

    bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }
    const T& value() const { return std::get<T>(state_); }
    const std::string& error() const { return std::get<Fail>(state_).message; }

private:
    struct Fail {
        std::string message;
    };
    explicit Fallible(Fail fail) : state_(std::move(fail)) {}
    std::variant<T, Fail> state_;
};

}  // namespace tmforge
