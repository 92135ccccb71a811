#include "toponet/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "experiment config file (JSON)")->required();
    sub->add_option("--out", args.out_dir, "output directory (default: output_dir from the config)");
    sub->add_option("--seed", args.seed, "override both dataset and training seeds")
        ->each([&args](const std::string&) { args.seed_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toponet: trace, classify and verify the topological moves of softmax classification nets"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string stage_name = "report";

    const std::vector<std::pair<std::string, std::string>> stages = {
        {"generate", "sample the dataset into <out>/dataset.csv"},
        {"train", "train the network on <out>/dataset.csv"},
        {"trace", "export per-layer activation clouds"},
        {"analyze", "move reports, separation verdicts, component counts"},
        {"isomap", "project activation clouds (if enabled in the config)"},
        {"report", "aggregate stage outputs into report.json"},
    };
    for (const auto& [name, desc] : stages) add_common(app.add_subcommand(name, desc), args);
    CLI::App* run = app.add_subcommand("run", "full pipeline: generate, train, trace, analyze, isomap, report");
    add_common(run, args);
    run->add_option("--stage", stage_name, "stop after this stage (default: report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        toponet::ExperimentConfig config = toponet::load_config(args.config_path);
        if (args.seed_given) {
            config.dataset.seed = args.seed;
            config.train.seed = args.seed;
        }
        const std::string out = args.out_dir.empty() ? config.output_dir : args.out_dir;
        if (out.empty())
            throw std::invalid_argument("no output directory: pass --out or set output_dir in the config");

        if (run->parsed()) {
            const toponet::Stage last = toponet::stage_from_string(stage_name);
            if (last == toponet::Stage::Report) {
                const toponet::RunSummary summary = toponet::run_experiment(config, out);
                std::cout << "accuracy " << summary.final_accuracy << ", separated "
                          << (summary.separated ? "true" : "false") << ", report " << summary.report_path << "\n";
            } else {
                for (toponet::Stage s : {toponet::Stage::Generate, toponet::Stage::Train, toponet::Stage::Trace,
                                         toponet::Stage::Analyze, toponet::Stage::Isomap, toponet::Stage::Report}) {
                    toponet::run_stage(config, out, s);
                    std::cout << "stage " << toponet::to_string(s) << " done\n";
                    if (s == last) break;
                }
            }
        } else {
            for (const auto& [name, desc] : stages)
                if (app.get_subcommand(name)->parsed()) {
                    toponet::run_stage(config, out, toponet::stage_from_string(name));
                    std::cout << "stage " << name << " done\n";
                }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
