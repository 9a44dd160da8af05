#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curate/code_verifier.hpp"
#include "curate/config.hpp"
#include "curate/step_verifier.hpp"

namespace curate {

enum class Stage { Ingest, Score, Sample, Filter, Verify, Reward, BuildSft, BuildDpo, BuildRl, VerifySteps, Stats };

std::string_view to_string(Stage s);  // CLI verb, e.g. "build-sft"
std::optional<Stage> parse_stage(std::string_view s);
const std::vector<Stage>& all_stages();

class StageDependencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// File names inside the workspace.
struct Workspace {
    std::filesystem::path root;

    std::filesystem::path prompts() const { return root / "prompts.jsonl"; }
    std::filesystem::path ingest_report() const { return root / "ingest.json"; }
    std::filesystem::path scored() const { return root / "scored.jsonl"; }
    std::filesystem::path selected() const { return root / "selected.jsonl"; }
    std::filesystem::path scoring_report() const { return root / "scoring.json"; }
    std::filesystem::path completions() const { return root / "completions.jsonl"; }
    std::filesystem::path filtered() const { return root / "filtered.jsonl"; }
    std::filesystem::path verified() const { return root / "verified.jsonl"; }
    std::filesystem::path labeled() const { return root / "labeled.jsonl"; }
    std::filesystem::path sft() const { return root / "sft.jsonl"; }
    std::filesystem::path dpo() const { return root / "dpo.jsonl"; }
    std::filesystem::path rl() const { return root / "rl.jsonl"; }
    std::filesystem::path step_strict() const { return root / "step_strict.jsonl"; }
    std::filesystem::path step_loose() const { return root / "step_loose.jsonl"; }
    std::filesystem::path step_report() const { return root / "step_verification.json"; }
    std::filesystem::path stats_json() const { return root / "stats.json"; }
    std::filesystem::path stats_txt() const { return root / "stats.txt"; }
    std::filesystem::path run_state() const { return root / "run_state.json"; }
};

struct RunOptions {
    bool allow_unscored = false;
    bool force = false;  // ignore matching stage markers
};

struct StageOutcome {
    Stage stage = Stage::Ingest;
    bool skipped = false;  // marker matched, outputs reused
    std::string note;
};

// Per-stage completion markers. A stage is skipped iff its stored hash equals the hash of
// its config section and current input files, and its outputs still exist.
class RunState {
public:
    static RunState load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::optional<std::string> marker(Stage s) const;
    void set(Stage s, std::string hash);
    void clear(Stage s);

private:
    std::map<std::string, std::string> markers_;
};

class Pipeline {
public:
    Pipeline(PipelineConfig cfg, RunOptions opts, std::ostream& log);
    ~Pipeline();

    // Overrides for tests; not owned.
    void set_backend(ChatBackend* backend) { backend_override_ = backend; }
    void set_judge(Judge* judge) { judge_override_ = judge; }
    void set_critic(Critic* critic) { critic_override_ = critic; }
    void set_sleeper(Sleeper s) { sleeper_ = std::move(s); }

    // Throws StageDependencyError when an input file is missing and lets stage errors
    // propagate. Outputs are written atomically before the marker.
    StageOutcome run_stage(Stage s);

    // Every stage in order; verify-steps only when enabled.
    std::vector<StageOutcome> run_all();

    const Workspace& workspace() const { return ws_; }
    const PipelineConfig& config() const { return cfg_; }

private:
    std::string stage_hash(Stage s) const;
    void execute(Stage s);

    PipelineConfig cfg_;
    RunOptions opts_;
    std::ostream& log_;
    Workspace ws_;
    ChatBackend* backend_override_ = nullptr;
    Judge* judge_override_ = nullptr;
    Critic* critic_override_ = nullptr;
    Sleeper sleeper_;
};

}  // namespace curate
