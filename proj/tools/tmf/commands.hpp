#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tmf {

// Exit codes: 0 = success / nothing found, 1 = analysis completed and
// found errors or gaps, 2 = input or usage error.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitInputError = 2;

enum class Format { Markdown, Json };

struct CheckArgs {
    std::string model_path;
};

struct ThreatsArgs {
    std::string model_path;
    std::string level = "context";
    std::string rules_path;
    std::string matrix_path;
    std::string catalog_path;  // attack library
    Format format = Format::Markdown;
};

struct TreeArgs {
    std::string tree_path;
    bool cutsets = false;
    bool coverage = false;
    bool dot = false;
    std::string catalog_path;  // requirements
    Format format = Format::Markdown;
};

struct DreadArgs {
    std::string inline_factors;  // "d,r,e,a,di"
    std::string input_path;
    Format format = Format::Markdown;
};

struct ComplyArgs {
    std::vector<std::string> matrix_paths;
    std::string catalog_path;  // requirements
    std::string findings_path;
    std::string framework;  // optional filter: ours|nist|dod
    bool summary = true;
    bool gaps = true;
    std::string partial_weight;  // e.g. "0.5"; empty = off
    bool ascii = false;
    Format format = Format::Markdown;
};

struct ReportArgs {
    std::string model_path;
    std::string level;
    std::string rules_path;
    std::string attack_lib_path;
    std::vector<std::string> tree_paths;
    std::string dread_rows_path;
    std::vector<std::string> matrix_paths;
    std::string catalog_path;
    std::string findings_path;
    std::string output_path;
    bool ascii = false;
    Format format = Format::Markdown;
};

int cmd_check(const CheckArgs& args, const std::string& fixtures_root);
int cmd_threats(const ThreatsArgs& args, const std::string& fixtures_root);
int cmd_tree(const TreeArgs& args, const std::string& fixtures_root);
int cmd_dread(const DreadArgs& args, const std::string& fixtures_root);
int cmd_comply(const ComplyArgs& args, const std::string& fixtures_root);
int cmd_report(const ReportArgs& args, const std::string& fixtures_root);

}  // namespace tmf
