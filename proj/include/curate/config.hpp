#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "curate/code_verifier.hpp"
#include "curate/dataset_builder.hpp"
#include "curate/difficulty.hpp"
#include "curate/filters.hpp"
#include "curate/math_verifier.hpp"
#include "curate/sampler.hpp"
#include "curate/step_verifier.hpp"
#include "curate/stub_backend.hpp"

namespace curate {

struct InputSpec {
    std::filesystem::path path;
    std::optional<Domain> domain;  // empty = mixed-domain file
};

enum class BackendKind { Stub, Http };

struct BackendConfig {
    BackendKind kind = BackendKind::Stub;
    std::string url;
    std::string model = "stub";
    std::string api_key_env;  // name of the variable holding the key, never the key
    std::size_t max_in_flight = 16;
    int timeout_s = 600;
    StubOptions stub;
};

enum class ScorerKind { Passthrough, Length, Remote };

struct DifficultyConfig {
    ScorerKind scorer = ScorerKind::Passthrough;
    bool select = true;
    int min_level = 7;
    std::string template_text = "Rate the difficulty of this problem from 1 to 10. Reply with one integer.\n\n{question}";
};

struct JudgeConfig {
    std::vector<std::string> worker_command;
    std::size_t pool_size = 4;
};

enum class CriticKind { Stub, Http };

struct StepConfig {
    bool enabled = false;
    int k = kDefaultVotes;
    CriticKind critic = CriticKind::Stub;
    std::string url;
    std::string model;
    std::string api_key_env;
    std::string compact_template;
    std::string error_template;
    std::string no_error_token = "no error";
    std::vector<int> stub_pattern{0, 1, 2, 3};
};

struct PipelineConfig {
    std::filesystem::path config_path;
    std::vector<InputSpec> inputs;
    std::filesystem::path workspace = "workspace";
    std::uint64_t seed = 0;
    BackendConfig backend;
    SamplingParams sampling;
    BudgetSchedule budget;
    DifficultyConfig difficulty;
    FilterConfig filters;
    NormalizeOptions normalize;
    JudgeConfig judge;
    ExecutionLimits limits;
    int dpo_cap = kDefaultDpoCap;
    RlSelection rl = RlFraction{1.0};
    StepConfig steps;
};

// Raised for unreadable files and values that cannot be parsed at all.
class ConfigLoadError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Relative paths resolve against the config file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

// Each violation is "Code: detail". Empty iff the config is usable. Backend checks apply only when sampling is selected.
std::vector<std::string> validate_config(const PipelineConfig& cfg, bool sampling_selected = true);

// Loads and validates; a load failure is reported as a single violation.
std::vector<std::string> validate_config(const std::filesystem::path& path);

}  // namespace curate
