#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curate/code_verifier.hpp"
#include "curate/completion.hpp"
#include "curate/filters.hpp"
#include "curate/math_verifier.hpp"

namespace curate {

// Rule reward: 1 verified, 0 rejected by the verifier, -1 no valid answer format.
enum class Reward : int { Negative = -1, Zero = 0, Positive = 1 };

inline int value(Reward r) { return static_cast<int>(r); }
std::optional<Reward> reward_from_int(int v);

struct VerificationRecord {
    VerifierOutcome outcome = VerifierOutcome::NoValidFormat;
    std::optional<std::string> extracted;
    std::optional<std::string> normalized;
    std::optional<JudgeResult> judge;
};

enum class StepRule { Strict, Loose };

std::string_view to_string(StepRule r);

// A completion plus whatever later stages have appended to it. On disk every stage's
// fields sit flat next to the completion fields.
struct CompletionRecord {
    Completion completion;
    std::optional<FilterVerdict> filter;
    std::optional<VerificationRecord> verification;
    std::optional<Reward> reward;
    std::optional<StepRule> step_verified;

    std::string key() const { return completion.prompt_id + "#" + std::to_string(completion.sample_index); }
};

Json record_to_json(const CompletionRecord& r);
// Throws std::invalid_argument on malformed records.
CompletionRecord record_from_json(const Json& j);

std::vector<CompletionRecord> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path, const std::vector<CompletionRecord>& records);

}  // namespace curate
