#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "curate/chat_backend.hpp"
#include "curate/completion.hpp"
#include "curate/concurrency.hpp"
#include "curate/difficulty.hpp"
#include "curate/prompt_store.hpp"

namespace curate {

struct SamplingParams {
    std::string model;
    int n_samples = 10;
    double temperature = 1.0;
    int max_tokens = 16384;
    std::string system_template;
    std::int64_t seed_base = 0;

    std::vector<std::string> problems() const;
};

// FNV-1a over (prompt_id, sample_index); stable across platforms and runs.
std::uint64_t stable_hash(std::string_view prompt_id, int sample_index);

// seed_base + stable_hash, folded into a non-negative 31-bit integer for backends that
// expect an int seed.
std::int64_t request_seed(std::int64_t seed_base, std::string_view prompt_id, int sample_index);

struct SamplerOptions {
    std::size_t max_in_flight = 16;
    RetryPolicy retry;
    Sleeper sleeper;  // empty = real sleep
};

class Sampler {
public:
    Sampler(ChatBackend& backend, SamplingParams params, SamplerOptions opts = {});

    // Exactly `budget` completions with dense sample indices. Requests that fail after
    // retries come back as Error completions with empty text.
    std::vector<Completion> sample(const Prompt& p, int budget);

    Completion sample_one(const Prompt& p, int sample_index, int budget);
    ChatRequest build_request(const Prompt& p, int sample_index) const;

    const InFlightGauge& gauge() const { return gauge_; }
    std::size_t max_in_flight() const { return opts_.max_in_flight; }
    const SamplingParams& params() const { return params_; }

private:
    ChatBackend& backend_;
    SamplingParams params_;
    SamplerOptions opts_;
    InFlightGauge gauge_;
};

struct CompletionStore {
    std::vector<Completion> completions;       // prompt-set order, then sample_index
    std::set<std::string> complete_prompts;    // prompts whose full budget is recorded

    std::size_t count_for(std::string_view prompt_id) const;
};

struct SamplingRunReport {
    CompletionStore store;
    std::size_t resumed_prompts = 0;
    std::size_t sampled_prompts = 0;
};

// Path of the per-prompt validity markers kept next to a completion store.
std::filesystem::path progress_path(const std::filesystem::path& store_path);

// Samples every prompt's budget into `store_path`. Prompts already marked complete with
// the same budget are kept; anything else is (re)sampled. Each prompt's block is
// appended and then marked, so an interrupted run leaves a valid partial store. The
// finished store is rewritten in prompt order.
SamplingRunReport run_sampling(const PromptSet& set, Sampler& sampler, const BudgetSchedule& sched,
                               const std::filesystem::path& store_path);

// Loads only prompts whose validity marker matches their records.
CompletionStore load_completion_store(const std::filesystem::path& store_path);

}  // namespace curate
