#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "curate/domain.hpp"
#include "curate/jsonl.hpp"

namespace curate {

enum class CompareMode { Exact, TrimmedLines };

std::string_view to_string(CompareMode m);
std::optional<CompareMode> parse_compare_mode(std::string_view s);

struct TestCase {
    std::string input;
    std::string expected_output;
    CompareMode compare_mode = CompareMode::TrimmedLines;
    // Cases whose correct output is empty must say so explicitly.
    bool allow_empty_output = false;

    bool operator==(const TestCase&) const = default;
};

struct Prompt {
    std::string id;
    Domain domain = Domain::Math;
    std::string text;
    std::optional<std::string> reference_answer;
    std::optional<std::vector<TestCase>> test_cases;
    std::optional<int> difficulty_level;
    std::string source;
    std::optional<std::string> image_ref;

    bool operator==(const Prompt&) const = default;
};

enum class Violation {
    EmptyId,
    EmptyText,
    WrongPayloadForDomain,
    MissingPayload,
    DifficultyOutOfRange,
    EmptyExpectedOutput,
    ImageRefOnNonGeo,
};

std::string_view to_string(Violation v);

// Empty iff every Prompt invariant holds.
std::vector<Violation> validate_prompt(const Prompt& p);

struct Manifest {
    std::vector<std::string> source_paths;
    std::string ingest_timestamp;  // ISO-8601 UTC
    std::size_t count = 0;
};

struct PromptSet {
    std::vector<Prompt> prompts;
    Manifest manifest;

    std::size_t size() const { return prompts.size(); }
    const Prompt* find(std::string_view id) const;
};

struct SkippedLine {
    std::size_t line_number = 0;
    std::string reason;  // a Violation name, or ParseError / MissingField / DomainMismatch / DuplicateId
    std::string detail;
};

struct IngestResult {
    PromptSet set;
    std::vector<SkippedLine> skipped;
};

Json test_cases_to_json(const std::vector<TestCase>& cases);
// Throws std::invalid_argument like prompt_from_json.
std::vector<TestCase> test_cases_from_json(const Json& j);

Json prompt_to_json(const Prompt& p);
// Throws std::invalid_argument with a reason code as the message prefix ("MissingField: text").
Prompt prompt_from_json(const Json& j);

// Streams `path`, validating every line. Malformed lines are reported in `skipped`.
// Throws std::runtime_error if the file cannot be read.
IngestResult ingest_prompts(const std::filesystem::path& path, Domain domain);

// Reads a file in the canonical schema regardless of domain (mixed-domain sets).
IngestResult ingest_prompts(const std::filesystem::path& path);

void emit_prompts(const std::filesystem::path& path, const PromptSet& set);

// Whitespace runs collapsed to one space, ends trimmed, case preserved.
std::string normalize_prompt_text(std::string_view text);

// First occurrence of each normalized text wins; survivor order is preserved.
PromptSet dedupe_prompts(const PromptSet& set);

std::string utc_timestamp_now();

}  // namespace curate
