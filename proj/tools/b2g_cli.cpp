#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "b2g/cli/run.hpp"

namespace {

using namespace b2g;

int fail(const std::string& stage, const std::string& message) {
    std::cerr << "b2g: stage " << stage << " failed: " << message << "\n";
    return 1;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "override the spec seed");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--format", format, "plot and table output")->check(CLI::IsMember({"csv", "svg", "both"}));
    }

    cli::TaskSpec load(const std::string& path) const {
        auto spec = cli::load_task_spec(path);
        if (seed) spec.seed = *seed;
        if (out) spec.outputs.dir = *out;
        if (format) spec.outputs.format = cli::output_format_from_string(*format);
        spec.validate();
        return spec;
    }
};

int report(const cli::RunOutcome& outcome) {
    const auto& m = outcome.manifest;
    if (!m.ok()) return fail(m.failed_stage, m.error);
    std::cout << "wrote " << m.files.size() << " files and manifest.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Building-to-grid co-simulation and analysis"};
    app.require_subcommand(1);

    std::string spec_path, network_name, network_path;
    Overrides overrides;

    auto* run = app.add_subcommand("run", "run every stage requested by a task spec");
    run->add_option("spec", spec_path, "task spec file")->required();
    overrides.attach(run);

    auto* train = app.add_subcommand("train", "train the droop policy of a task spec");
    train->add_option("spec", spec_path, "task spec file")->required();
    overrides.attach(train);

    auto* validate = app.add_subcommand("validate-spec", "parse and check a task spec");
    validate->add_option("spec", spec_path, "task spec file")->required();
    overrides.attach(validate);

    auto* exp = app.add_subcommand("export-network", "write a built-in network to a file");
    exp->add_option("network", network_name, "built-in network name")->required()->check(CLI::IsMember({"ieee33"}));
    exp->add_option("path", network_path, "destination file")->required();

    CLI11_PARSE(app, argc, argv);

    if (exp->parsed()) {
        try {
            power::save_network(power::build_ieee33(), network_path);
        } catch (const std::exception& e) {
            return fail("export", e.what());
        }
        std::cout << "wrote " << network_path << "\n";
        return 0;
    }

    cli::TaskSpec spec;
    try {
        spec = overrides.load(spec_path);
    } catch (const std::exception& e) {
        return fail("load_spec", e.what());
    }

    if (validate->parsed()) {
        std::cout << cli::task_spec_to_json(spec).dump(2) << "\n";
        return 0;
    }
    if (train->parsed()) {
        const auto outcome = cli::train_only(spec);
        for (const auto& t : outcome.trained)
            std::cout << policy::to_string(t.mode) << ": deadband " << t.result.best.deadband_pu << " p.u., slope "
                      << t.result.best.slope << ", score " << t.result.best_score << "\n";
        return report(outcome);
    }
    return report(cli::run(spec, &std::cout));
}
