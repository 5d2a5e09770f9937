#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "tmforge/fixtures.hpp"

int main(int argc, char** argv) {
    CLI::App app{"tmforge: threat modeling as code (DFD validation, STRIDE "
                 "enumeration, attack trees, DREAD ranking, compliance reports)"};
    app.require_subcommand(1);

    std::string fixtures_root = tmforge::default_fixture_root();
    app.add_option("--fixtures", fixtures_root,
                   "Fixture root directory (default: $TMFORGE_FIXTURES or ./fixtures)");

    auto add_format = [](CLI::App* cmd, tmf::Format& format) {
        cmd->add_option_function<std::string>(
               "--format,-f",
               [&format](const std::string& value) {
                   if (value == "json") {
                       format = tmf::Format::Json;
                   } else if (value == "md") {
                       format = tmf::Format::Markdown;
                   } else {
                       throw CLI::ValidationError("--format must be md or json");
                   }
               },
               "Output format: md or json")
            ->default_str("md");
    };

    tmf::CheckArgs check_args;
    CLI::App* check = app.add_subcommand(
        "check", "Validate a model and its refinement soundness");
    check->add_option("model", check_args.model_path, "Model file (.tmf)")->required();

    tmf::ThreatsArgs threats_args;
    CLI::App* threats =
        app.add_subcommand("threats", "Enumerate STRIDE-per-element threats for one level");
    threats->add_option("model", threats_args.model_path, "Model file (.tmf)")->required();
    threats->add_option("--level,-l", threats_args.level, "Level selector (context, 0, 1, ...)")
        ->required();
    threats->add_option("--rules,-r", threats_args.rules_path,
                        "Attack-library correlation rules (JSON)");
    threats->add_option("--matrix,-m", threats_args.matrix_path,
                        "STRIDE rule matrix override (JSON)");
    threats->add_option("--catalog,-c", threats_args.catalog_path,
                        "Attack-library catalog (JSON; defaults to the fixture catalog "
                        "when rules are given)");
    add_format(threats, threats_args.format);

    tmf::TreeArgs tree_args;
    CLI::App* tree = app.add_subcommand(
        "tree", "Validate an attack tree; enumerate cut sets and check coverage");
    tree->add_option("tree", tree_args.tree_path, "Attack tree (JSON)")->required();
    tree->add_flag("--cutsets,-s", tree_args.cutsets, "Print minimal cut sets");
    tree->add_flag("--coverage,-v", tree_args.coverage,
                   "Check countermeasure coverage against a requirements catalog");
    tree->add_option("--catalog,-c", tree_args.catalog_path, "Requirements catalog (JSON)");
    tree->add_flag("--dot,-d", tree_args.dot, "Emit Graphviz DOT instead of a report");
    add_format(tree, tree_args.format);

    tmf::DreadArgs dread_args;
    CLI::App* dread = app.add_subcommand("dread", "DREAD scoring, ranking and score audit");
    CLI::Option* inline_opt = dread->add_option(
        "--dread,-d", dread_args.inline_factors, "Inline factors d,r,e,a,di (prints the total)");
    dread->add_option("--input,-i", dread_args.input_path, "Rows file (JSON)")
        ->excludes(inline_opt);
    add_format(dread, dread_args.format);

    tmf::ComplyArgs comply_args;
    CLI::App* comply = app.add_subcommand(
        "comply", "Summarize compliance matrices and report unmet requirements");
    comply->add_option("matrices", comply_args.matrix_paths,
                       "Matrix files (single matrices or per-provider bundles)")
        ->required();
    comply->add_option("--catalog,-c", comply_args.catalog_path,
                       "Requirements catalog (JSON)")
        ->required();
    comply->add_option("--findings,-F", comply_args.findings_path,
                       "Finding records to attach to gaps (JSON)");
    comply->add_option("--framework,-k", comply_args.framework,
                       "Only consider matrices of this framework (ours, nist, dod)");
    comply->add_flag("!--no-summary", comply_args.summary, "Skip the summary table");
    comply->add_flag("!--no-gaps", comply_args.gaps, "Skip the gap report");
    comply->add_option("--partial-weight,-w", comply_args.partial_weight,
                       "Also report a weighted unsatisfied rate counting partial cells at "
                       "this weight (not a headline number)");
    comply->add_flag("--ascii,-a", comply_args.ascii, "Use Y/P/N instead of rating glyphs");
    add_format(comply, comply_args.format);

    tmf::ReportArgs report_args;
    CLI::App* report =
        app.add_subcommand("report", "Compose a full report from any mix of inputs");
    report->add_option("--model", report_args.model_path, "Model file (.tmf)");
    report->add_option("--level,-l", report_args.level, "Level to enumerate threats for");
    report->add_option("--rules,-r", report_args.rules_path, "Correlation rules (JSON)");
    report->add_option("--attack-lib", report_args.attack_lib_path,
                       "Attack-library catalog (JSON)");
    report->add_option("--tree,-t", report_args.tree_paths, "Attack tree files (JSON)");
    report->add_option("--dread-rows", report_args.dread_rows_path, "DREAD rows (JSON)");
    report->add_option("--matrix,-m", report_args.matrix_paths, "Compliance matrix files");
    report->add_option("--catalog,-c", report_args.catalog_path,
                       "Requirements catalog (JSON)");
    report->add_option("--findings,-F", report_args.findings_path, "Finding records (JSON)");
    report->add_option("--output,-o", report_args.output_path,
                       "Write the report here instead of stdout");
    report->add_flag("--ascii,-a", report_args.ascii, "Use Y/P/N instead of rating glyphs");
    add_format(report, report_args.format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return tmf::kExitInputError;
    }

    try {
        if (check->parsed()) return tmf::cmd_check(check_args, fixtures_root);
        if (threats->parsed()) return tmf::cmd_threats(threats_args, fixtures_root);
        if (tree->parsed()) return tmf::cmd_tree(tree_args, fixtures_root);
        if (dread->parsed()) return tmf::cmd_dread(dread_args, fixtures_root);
        if (comply->parsed()) return tmf::cmd_comply(comply_args, fixtures_root);
        if (report->parsed()) return tmf::cmd_report(report_args, fixtures_root);
    } catch (const tmforge::InputError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return tmf::kExitInputError;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return tmf::kExitInputError;
    }
    return tmf::kExitInputError;
}
