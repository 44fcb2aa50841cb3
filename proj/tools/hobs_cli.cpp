// hobs: batch front end for the observer toolkit.
//
//   hobs run    (--scenario <path> | --preset <name>) --out <dir> [--seed N] [--quiet]
//   hobs verify [--scenario <path> | --preset <name>] --out <dir> [--seed N] [--quiet]
//   hobs sweep  (--scenario <path> | --preset <name>) --out <dir> [--seed N] [--quiet]
//   hobs preset list
//   hobs preset show <name>
//
// Exit codes: 0 success, 1 property failure, 2 input error, 3 runtime abort.

#include "hobs/hobs.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Options {
    std::string scenario_path;
    std::string preset_name;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool quiet = false;
};

hobs::Scenario load(const Options& o, CLI::Option* seed_opt, bool scenario_optional)
{
    hobs::Scenario s;
    if (!o.scenario_path.empty()) {
        std::ifstream in(o.scenario_path, std::ios::binary);
        if (!in) {
            throw hobs::ScenarioError("<document>", "cannot read " + o.scenario_path);
        }
        std::ostringstream text;
        text << in.rdbuf();
        s = hobs::parse_scenario(text.str());
    } else if (!o.preset_name.empty()) {
        s = hobs::preset(o.preset_name);
    } else if (scenario_optional) {
        s = hobs::default_scenario(hobs::Instance::So3S2);
    } else {
        throw hobs::ScenarioError("<arguments>", "one of --scenario or --preset is required");
    }
    if (seed_opt->count() > 0) {
        s.seed = o.seed;
    }
    return s;
}

void report(const hobs::RunOutcome& r, const std::string& out_dir, bool quiet)
{
    if (quiet) {
        return;
    }
    for (const auto& p : r.properties) {
        std::cout << (p.pass ? "PASS " : "FAIL ") << p.name << "  value=" << hobs::format_double(p.value)
                  << (p.bound == hobs::PropertyResult::Bound::AtMost ? "  <= " : "  >= ")
                  << hobs::format_double(p.tolerance) << "\n";
    }
    std::cout << "artifacts written to " << out_dir << "\n";
}

int execute(const Options& o, CLI::Option* seed_opt, std::optional<hobs::Mode> forced, bool scenario_optional)
{
    try {
        hobs::Scenario s = load(o, seed_opt, scenario_optional);
        if (forced) {
            s.mode = *forced;
        }
        const hobs::RunOutcome r = hobs::run(s, o.out_dir);
        report(r, o.out_dir, o.quiet);
        return r.exit_code;
    } catch (const hobs::ScenarioError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return hobs::kExitInputError;
    } catch (const hobs::UnknownPreset& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return hobs::kExitInputError;
    } catch (const hobs::SimulationAborted& e) {
        std::cerr << "simulation aborted: " << e.what() << "\n";
        return hobs::kExitRuntimeAbort;
    } catch (const hobs::DegenerateInput& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return hobs::kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return hobs::kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return hobs::kExitRuntimeAbort;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gradient observers on SO(3)/S^2 and SO(2)/S^1: simulation and verification"};
    app.require_subcommand(1);

    Options run_o, verify_o, sweep_o;
    auto add_common = [](CLI::App* sub, Options& o) {
        auto* sc = sub->add_option("--scenario", o.scenario_path, "Scenario JSON file");
        auto* pr = sub->add_option("--preset", o.preset_name, "Named preset scenario");
        sc->excludes(pr);
        sub->add_option("--out", o.out_dir, "Output directory")->required();
        sub->add_flag("--quiet", o.quiet, "Suppress progress output");
        return sub->add_option("--seed", o.seed, "Override the scenario seed");
    };

    auto* run_cmd = app.add_subcommand("run", "Run a scenario in its own mode");
    auto* run_seed = add_common(run_cmd, run_o);
    auto* verify_cmd = app.add_subcommand("verify", "Run the randomized residual checks");
    auto* verify_seed = add_common(verify_cmd, verify_o);
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over observer initial conditions");
    auto* sweep_seed = add_common(sweep_cmd, sweep_o);

    auto* preset_cmd = app.add_subcommand("preset", "Inspect the built-in scenarios");
    preset_cmd->require_subcommand(1);
    auto* list_cmd = preset_cmd->add_subcommand("list", "List preset names");
    std::string show_name;
    auto* show_cmd = preset_cmd->add_subcommand("show", "Print a preset as scenario JSON");
    show_cmd->add_option("name", show_name, "Preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hobs::kExitInputError;
    }

    if (*run_cmd) {
        return execute(run_o, run_seed, std::nullopt, false);
    }
    if (*verify_cmd) {
        return execute(verify_o, verify_seed, hobs::Mode::Verify, true);
    }
    if (*sweep_cmd) {
        return execute(sweep_o, sweep_seed, hobs::Mode::MonteCarlo, false);
    }
    if (*list_cmd) {
        for (const auto& n : hobs::preset_names()) {
            std::cout << n << "\n";
        }
        return 0;
    }
    if (*show_cmd) {
        try {
            std::cout << hobs::scenario_to_json(hobs::preset(show_name)).dump(2) << "\n";
            return 0;
        } catch (const hobs::UnknownPreset& e) {
            std::cerr << "input error: " << e.what() << "\n";
            return hobs::kExitInputError;
        }
    }
    return hobs::kExitInputError;
}
