#include <CLI11.hpp>

#include <iostream>

#include "curate/pipeline.hpp"

using namespace curate;

namespace {

constexpr int kOk = 0;
constexpr int kStageFailure = 1;
constexpr int kConfigError = 2;

struct Globals {
    std::string config = "cotcurate.ini";
    std::optional<std::uint64_t> seed;
    std::string workspace;
    bool allow_unscored = false;
    bool force = false;
};

int run_stages(const Globals& g, const std::vector<Stage>& stages, bool full_run) {
    PipelineConfig cfg;
    try {
        cfg = load_config(g.config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    if (g.seed) cfg.seed = *g.seed;
    if (!g.workspace.empty()) cfg.workspace = g.workspace;

    bool samples = full_run || std::find(stages.begin(), stages.end(), Stage::Sample) != stages.end() ||
                   (std::find(stages.begin(), stages.end(), Stage::Score) != stages.end() &&
                    cfg.difficulty.scorer == ScorerKind::Remote);
    auto violations = validate_config(cfg, samples);
    if (!violations.empty()) {
        std::cerr << "config has " << violations.size() << " violation(s):\n";
        for (const auto& v : violations) std::cerr << "  " << v << "\n";
        return kConfigError;
    }

    Pipeline pipeline(cfg, {g.allow_unscored, g.force}, std::cout);
    try {
        if (full_run) {
            pipeline.run_all();
        } else {
            for (auto s : stages) {
                auto outcome = pipeline.run_stage(s);
                if (s == Stage::Stats && outcome.skipped) std::cout << jsonl::read_file(pipeline.workspace().stats_txt());
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kStageFailure;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long chain-of-thought data curation: sample, filter, verify and package datasets."};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Pipeline config (INI)");
    app.add_option("--seed", g.seed, "Override run.seed");
    app.add_option("--workspace", g.workspace, "Override paths.workspace");
    app.add_flag("--allow-unscored", g.allow_unscored, "Drop prompts the scorer could not rate instead of failing");
    app.add_flag("--force", g.force, "Rerun stages even when their markers match");

    auto* run = app.add_subcommand("run", "Run every stage in order, skipping up-to-date ones");
    std::string only;
    run->add_option("--stage", only, "Run a single stage instead");

    std::vector<std::pair<Stage, CLI::App*>> verbs;
    for (auto s : all_stages()) {
        verbs.emplace_back(s, app.add_subcommand(std::string(to_string(s)), "Run the " + std::string(to_string(s)) + " stage"));
    }
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    if (run->parsed()) {
        if (only.empty()) return run_stages(g, {}, true);
        auto s = parse_stage(only);
        if (!s) {
            std::cerr << "unknown stage: " << only << "\n";
            return kConfigError;
        }
        return run_stages(g, {*s}, false);
    }
    for (const auto& [s, sub] : verbs) {
        if (sub->parsed()) return run_stages(g, {s}, false);
    }
    return kConfigError;
}
