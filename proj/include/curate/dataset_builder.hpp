#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "curate/prompt_store.hpp"
#include "curate/records.hpp"

namespace curate {

struct PosNeg {
    std::vector<CompletionRecord> positives;
    std::vector<CompletionRecord> negatives;
};

// Throws std::invalid_argument on a record without a reward.
PosNeg split_pos_neg(const std::vector<CompletionRecord>& labeled);

struct SFTRecord {
    std::string prompt_id;
    int sample_index = 0;
    std::string prompt_text;
    std::string response_text;
    std::optional<int> difficulty_level;
    Domain domain = Domain::Math;
    std::string source;

    bool operator==(const SFTRecord&) const = default;
};

enum class RejectedReason { WrongAnswer, NoValidFormat };

std::string_view to_string(RejectedReason r);
std::optional<RejectedReason> parse_rejected_reason(std::string_view s);

struct PreferencePair {
    std::string prompt_id;
    std::string prompt_text;
    int chosen_index = 0;
    int rejected_index = 0;
    std::string chosen;
    std::string rejected;
    RejectedReason rejected_reason = RejectedReason::WrongAnswer;
    Domain domain = Domain::Math;

    bool operator==(const PreferencePair&) const = default;
};

struct RLPromptRecord {
    std::string prompt_id;
    std::string prompt_text;
    std::variant<std::string, std::vector<TestCase>> reference;
    std::optional<int> difficulty_level;
    Domain domain = Domain::Math;

    bool operator==(const RLPromptRecord&) const = default;
};

class UnknownPromptError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// One record per positive, in input order. Prompt text and metadata come from `prompts`;
// throws UnknownPromptError for a positive whose prompt is missing.
std::vector<SFTRecord> build_sft(const std::vector<CompletionRecord>& positives, const PromptSet& prompts);

inline constexpr int kDefaultDpoCap = 4;

// Per prompt (in order of first appearance among positives), rejected responses ordered
// reward 0 before -1 then by sample_index, chosen by sample_index; pairs are taken
// rejected-major until `cap` is reached.
std::vector<PreferencePair> build_dpo_pairs(const std::vector<CompletionRecord>& positives,
                                            const std::vector<CompletionRecord>& negatives, const PromptSet& prompts,
                                            int cap = kDefaultDpoCap);

struct RlCount {
    std::size_t n = 0;
};
struct RlFraction {
    double f = 1.0;
};
using RlSelection = std::variant<RlCount, RlFraction>;

class OversizedSelectionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Seeded subsample of the distinct SFT prompts. Chosen prompts keep their SFT order.
std::vector<RLPromptRecord> build_rl_prompts(const std::vector<SFTRecord>& sft, const PromptSet& prompts,
                                             const RlSelection& selection, std::uint64_t seed);

Json sft_to_json(const SFTRecord& r);
SFTRecord sft_from_json(const Json& j);
Json dpo_to_json(const PreferencePair& p);
PreferencePair dpo_from_json(const Json& j);
Json rl_to_json(const RLPromptRecord& r);
RLPromptRecord rl_from_json(const Json& j);

template <class T>
void write_dataset(const std::filesystem::path& path, const std::vector<T>& records, Json (*to_json)(const T&)) {
    std::string out;
    for (const auto& r : records) {
        out += jsonl::dump(to_json(r));
        out += '\n';
    }
    jsonl::write_atomic(path, out);
}

template <class T>
std::vector<T> read_dataset(const std::filesystem::path& path, T (*from_json)(const Json&)) {
    std::vector<T> out;
    jsonl::for_each_line(path, [&](std::size_t, std::string_view line) { out.push_back(from_json(Json::parse(line))); });
    return out;
}

// Everything compute_stats looks at. All fields are optional in spirit: an empty run
// leaves them at zero / empty.
struct RunArtifacts {
    std::size_t ingested = 0;
    std::size_t skipped_lines = 0;
    std::size_t deduped = 0;
    std::size_t scored = 0;
    std::size_t unscored = 0;
    std::size_t selected = 0;
    std::vector<Completion> completions;
    std::vector<CompletionRecord> filtered;  // every non-error completion with its verdict
    std::vector<CompletionRecord> labeled;   // records that reached verification
    std::size_t sft_records = 0;
    std::size_t dpo_pairs = 0;
    std::size_t rl_prompts = 0;
    std::optional<std::size_t> strict_verified;
    std::optional<std::size_t> loose_verified;
};

struct CurationStats {
    std::size_t ingested = 0;
    std::size_t skipped_lines = 0;
    std::size_t deduped = 0;
    std::size_t scored = 0;
    std::size_t unscored = 0;
    std::size_t selected = 0;
    std::size_t sampled = 0;
    std::size_t sample_errors = 0;
    std::size_t filter_passed = 0;
    std::map<std::string, std::size_t> filter_failures;  // rule name -> completions failing it
    std::size_t verification_input = 0;
    std::size_t verified_true = 0;
    std::size_t verified_false = 0;
    std::size_t no_valid_format = 0;
    std::size_t sft_records = 0;
    std::size_t dpo_pairs = 0;
    std::size_t rl_prompts = 0;
    std::optional<std::size_t> strict_verified;
    std::optional<std::size_t> loose_verified;

    bool operator==(const CurationStats&) const = default;
};

CurationStats compute_stats(const RunArtifacts& a);
Json stats_to_json(const CurationStats& s);
CurationStats stats_from_json(const Json& j);
std::string stats_report(const CurationStats& s);

}  // namespace curate
