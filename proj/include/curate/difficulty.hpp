#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curate/chat_backend.hpp"
#include "curate/prompt_store.hpp"

namespace curate {

enum class BucketName { Low, Medium, High };

std::string_view to_string(BucketName b);

struct DifficultyBucket {
    BucketName name;
    int min_level;
    int max_level;

    bool contains(int level) const { return level >= min_level && level <= max_level; }
    bool operator==(const DifficultyBucket&) const = default;
};

inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 10;

// Low = [3,3], Medium = [4,6], High = [7,9]. Levels 1, 2 and 10 are unbucketed.
const std::vector<DifficultyBucket>& difficulty_buckets();

// Throws std::out_of_range when level is outside 1..10.
std::optional<DifficultyBucket> bucket_of(int level);

enum class BudgetMode { Uniform, MonotoneByLevel };

struct BudgetSchedule {
    int base_samples = 10;
    BudgetMode mode = BudgetMode::Uniform;
    std::map<int, int> level_multipliers;
    // Replaces base_samples for prompts of the listed domains (geometry uses 8).
    std::map<Domain, int> domain_base_samples;

    // Empty iff the schedule is usable: positive base, positive multipliers that do not
    // decrease with level.
    std::vector<std::string> problems() const;
};

// Throws std::out_of_range for a level outside 1..10 and ConfigError when a
// MonotoneByLevel schedule has no multiplier for the level.
int sample_budget(int level, const BudgetSchedule& sched);

// Uniform schedules ignore the level, so unscored prompts still get a budget there.
int sample_budget(std::optional<int> level, const BudgetSchedule& sched);

// Budget for a concrete prompt, honouring domain_base_samples.
int sample_budget(const Prompt& p, const BudgetSchedule& sched);

class ScorerUnreachable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ScoreParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DifficultyScorer {
public:
    virtual ~DifficultyScorer() = default;
    // Returns a level in 1..10. Throws ScorerUnreachable (retryable) or ScoreParseError.
    virtual int score(const Prompt& p) = 0;
};

// Returns the prompt's existing level.
class PassthroughScorer final : public DifficultyScorer {
public:
    int score(const Prompt& p) override;
};

// Offline deterministic scorer: the level is the text-length decile relative to a
// reference corpus, 1 for the shortest tenth through 10 for the longest.
class LengthDecileScorer final : public DifficultyScorer {
public:
    explicit LengthDecileScorer(std::vector<std::size_t> corpus_lengths);
    explicit LengthDecileScorer(const PromptSet& corpus);
    int score(const Prompt& p) override;
    int level_for_length(std::size_t length) const;

private:
    std::vector<std::size_t> sorted_;
};

// One chat call per prompt; `question_template` contains a {question} placeholder and
// the reply must be a single integer 1..10.
class RemoteScorer final : public DifficultyScorer {
public:
    RemoteScorer(ChatBackend& backend, std::string model, std::string question_template,
                 RetryPolicy retry = {}, Sleeper sleeper = {});
    int score(const Prompt& p) override;

private:
    ChatBackend& backend_;
    std::string model_;
    std::string template_;
    RetryPolicy retry_;
    Sleeper sleeper_;
};

// Accepts "7", " 7 ", "7." and nothing else.
std::optional<int> parse_level_reply(std::string_view reply);

std::string fill_template(std::string_view tmpl, std::string_view placeholder, std::string_view value);

// Throws ScorerUnreachable / ScoreParseError from the scorer, and ScoreParseError for an
// out-of-range level.
int assign_difficulty(const Prompt& p, DifficultyScorer& scorer);

struct ScoringReport {
    PromptSet scored;  // same order as input; unscored prompts keep difficulty_level empty
    std::vector<std::string> unscored_ids;
    std::size_t scored_count = 0;
};

// Scores every prompt with at most `max_in_flight` concurrent scorer calls. Unreachable
// scorers are retried up to `attempts` times before the prompt is flagged unscored.
ScoringReport score_prompts(const PromptSet& set, DifficultyScorer& scorer, std::size_t max_in_flight = 16,
                            int attempts = 3);

class UnscoredPromptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Keeps prompts with difficulty_level >= min_level. Unscored prompts throw
// UnscoredPromptError unless allow_unscored, in which case they are dropped.
PromptSet select_for_augmentation(const PromptSet& set, int min_level, bool allow_unscored = false);

}  // namespace curate
