#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "curate/code_verifier.hpp"
#include "curate/records.hpp"

namespace curate {

struct RewardInput {
    std::string prompt_id;  // provenance only
    std::string response;
    std::variant<std::string, std::vector<TestCase>> reference;
};

using RewardEvidence = std::variant<VerifierOutcome, CodeVerification>;

class MissingOutcomeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

constexpr Reward reward_for(VerifierOutcome o) {
    switch (o) {
        case VerifierOutcome::True: return Reward::Positive;
        case VerifierOutcome::False: return Reward::Zero;
        case VerifierOutcome::NoValidFormat: return Reward::Negative;
    }
    return Reward::Negative;
}

// Code judging onto the three branches: all cases pass -> True, a judged failure ->
// False, no extractable program -> NoValidFormat.
VerifierOutcome outcome_of(const CodeVerification& v);

// Throws MissingOutcomeError when no outcome is supplied or the reference is empty.
Reward reward(const RewardInput& input, const std::optional<RewardEvidence>& outcome);

struct RewardCounts {
    std::size_t positive = 0;
    std::size_t zero = 0;
    std::size_t negative = 0;
};

struct LabeledStore {
    std::vector<CompletionRecord> records;
    RewardCounts counts;
};

class UnverifiedRecordError : public std::runtime_error {
public:
    explicit UnverifiedRecordError(std::vector<std::string> ids);
    const std::vector<std::string>& ids() const { return ids_; }

private:
    std::vector<std::string> ids_;
};

// Attaches a reward to every record. Throws UnverifiedRecordError listing every record
// that has no verification outcome.
LabeledStore label_store(std::vector<CompletionRecord> records);

}  // namespace curate
