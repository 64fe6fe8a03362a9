#include "scenarios.hpp"

#include "startrace/errors.hpp"
#include "startrace/parse.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

using namespace startrace;

int main(int argc, char** argv) {
    CLI::App app{"Exact traces of star products on flat phase space"};
    app.require_subcommand(1);

    cli::Scenario scenario;
    std::string format = "text";
    std::string out_file;
    double tolerance = 0.0;
    auto* run = app.add_subcommand("run", "Run a verification scenario");
    run->add_option("scenario", scenario.name, "Scenario name (see list-scenarios)")->required();
    run->add_option("--n", scenario.n, "Half dimension")->check(CLI::Range(1, kMaxHalfDimension));
    run->add_option("--order", scenario.order, "Truncation order K")->check(CLI::PositiveNumber);
    run->add_option("--seed", scenario.seed, "Random seed");
    auto* tol = run->add_option("--tol", tolerance, "Tolerance for numeric scenarios");
    run->add_option("--equiv", scenario.equiv_file, "Equivalence JSON file")->check(CLI::ExistingFile);
    run->add_option("--grid", scenario.grid_file, "Grid JSON file")->check(CLI::ExistingFile);
    run->add_option("--probes", scenario.probes_file, "Probe battery JSON file")->check(CLI::ExistingFile);
    run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
    run->add_option("--out", out_file, "Write the report here instead of stdout");

    std::string expression;
    int parse_n = 0;
    auto* parse = app.add_subcommand("parse", "Parse an expression and print its canonical form");
    parse->add_option("expr", expression, "Expression")->required();
    parse->add_option("--n", parse_n, "Half dimension (default: inferred)")->check(CLI::Range(1, kMaxHalfDimension));

    auto* list = app.add_subcommand("list-scenarios", "List scenario names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& info : cli::scenario_list()) std::cout << info.name << "\t" << info.summary << "\n";
            return 0;
        }
        if (*parse) {
            const int n = parse_n > 0 ? parse_n : infer_half_dimension(expression);
            const ParsedValue v = parse_expression(expression, PhaseSpace(n));
            std::cout << kind_name(v) << ": " << to_string(v) << "\n";
            return 0;
        }
        if (*tol) scenario.tolerance = tolerance;
        const cli::Report report = cli::run_scenario(scenario);
        const std::string text = cli::emit_report(report, format == "json" ? cli::Format::Json : cli::Format::Text);
        if (out_file.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_file, std::ios::binary);
            if (!out) throw InputError("cannot write " + out_file);
            out << text;
        }
        return report.pass() ? 0 : 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
