#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curate/chat_backend.hpp"
#include "curate/records.hpp"

namespace curate {

struct CompactSolution {
    std::vector<std::string> steps;
    std::string source_completion;  // CompletionRecord::key()
};

struct ErrorVote {
    int iteration = 0;
    std::optional<int> first_error_step;  // 1-based, empty = no error found
    bool parse_failure = false;

    // Parse failures count as detections so the strict subset stays strict.
    bool detected() const { return first_error_step.has_value() || parse_failure; }
    bool operator==(const ErrorVote&) const = default;
};

struct VerificationRule {
    StepRule name = StepRule::Strict;
    int max_detected_errors = 0;
};

inline constexpr VerificationRule kStrictRule{StepRule::Strict, 0};
inline constexpr VerificationRule kLooseRule{StepRule::Loose, 2};
inline constexpr int kDefaultVotes = 5;

enum class CriticTask { Compact, FindError };

struct CriticQuery {
    CriticTask task = CriticTask::Compact;
    std::string completion_key;
    std::string text;    // the long CoT for Compact, the numbered steps for FindError
    int iteration = 0;   // vote index for FindError
    int attempt = 0;     // 0 first try, 1 retry
};

class CriticUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Critic {
public:
    virtual ~Critic() = default;
    // Throws CriticUnavailable when the critic cannot be reached.
    virtual std::string ask(const CriticQuery& q) = 0;
};

struct ChatCriticOptions {
    std::string model;
    std::string compact_template = "Rewrite the following solution as a short numbered list of steps.\n\n{solution}";
    std::string error_template =
        "Find the first incorrect step in this solution. Answer with \\boxed{N} for step N, or \\boxed{-1} if "
        "every step is correct.\n\n{solution}";
    double temperature = 0.7;
    int max_tokens = 2048;
    std::int64_t seed_base = 0;
    RetryPolicy retry;
    Sleeper sleeper;
};

// Critic backed by a chat endpoint. Templates use a `{solution}` placeholder.
class ChatCritic final : public Critic {
public:
    ChatCritic(ChatBackend& backend, ChatCriticOptions opts);
    std::string ask(const CriticQuery& q) override;

private:
    ChatBackend& backend_;
    ChatCriticOptions opts_;
};

// Test and stub critic driven by a function.
class ScriptedCritic final : public Critic {
public:
    using Script = std::function<std::string(const CriticQuery&)>;
    explicit ScriptedCritic(Script s) : script_(std::move(s)) {}
    std::string ask(const CriticQuery& q) override { return script_(q); }

private:
    Script script_;
};

// Deterministic offline critic: compacts any CoT to a fixed 4-step template and returns
// `detections` detected errors (at step 2) followed by no-error replies per solution,
// where detections = detection_pattern[sample_index % size] (sample index read from the key).
std::unique_ptr<Critic> make_stub_critic(std::vector<int> detection_pattern, int k = kDefaultVotes);

// Numbered-line splitting ("1. ...", "2) ..."). Unnumbered lines continue the current
// step. Empty when no numbered line is found.
std::vector<std::string> parse_numbered_steps(std::string_view reply);

// Accepted forms, in order: \boxed{N}, "error step: N", the no-error token, a bare
// integer. N = -1 or 0 means no error. Anything else, or N beyond step_count, is a parse
// failure.
ErrorVote parse_error_vote(std::string_view reply, int step_count, int iteration,
                           std::string_view no_error_token = "no error");

// Asks once, retries once on an unparseable reply, then gives up.
std::optional<CompactSolution> extract_compact_solution(const CompletionRecord& r, Critic& critic);

std::vector<ErrorVote> vote_first_error(const CompactSolution& sol, Critic& critic, int k = kDefaultVotes,
                                        std::string_view no_error_token = "no error");

int detected_errors(const std::vector<ErrorVote>& votes);
// Throws std::invalid_argument on an empty vote list.
bool accept(const std::vector<ErrorVote>& votes, const VerificationRule& rule);

struct StepVerificationOutcome {
    std::string key;
    bool extractable = false;
    std::vector<ErrorVote> votes;
};

struct VerifiedSubsets {
    bool skipped = false;  // critic unavailable; subsets are absent rather than empty
    std::string skip_reason;
    std::vector<CompletionRecord> strict;
    std::vector<CompletionRecord> loose;
    std::vector<StepVerificationOutcome> outcomes;  // one per reward-1 record
    std::vector<std::string> unextractable;
};

// Only reward-1 records are examined. Output records carry step_verified set to the
// subset they belong to.
VerifiedSubsets build_verified_subsets(const std::vector<CompletionRecord>& labeled, Critic& critic,
                                       int k = kDefaultVotes, std::size_t max_in_flight = 16,
                                       std::string_view no_error_token = "no error");

}  // namespace curate
