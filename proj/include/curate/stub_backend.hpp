#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "curate/chat_backend.hpp"
#include "curate/prompt_store.hpp"

namespace curate {

// What a stub completion is built to exercise downstream.
enum class StubCategory {
    Correct,      // boxed reference answer / program passing every case
    Wrong,        // well-formed but wrong answer / program
    Unformatted,  // no box / unclosed code fence
    Repetitive,   // correct answer buried in looping text (fails the repetition filter)
    Foreign,      // wrong answer written in Han script (fails the language filter)
};

inline constexpr std::size_t kStubCategoryCount = 5;

std::string_view to_string(StubCategory c);

struct StubMix {
    // Fractions per category in StubCategory order; must sum to 1.
    std::array<double, kStubCategoryCount> fractions{0.6, 0.2, 0.2, 0.0, 0.0};

    std::vector<std::string> problems() const;
    // Per-prompt category counts for `n` samples by largest-remainder rounding.
    std::array<int, kStubCategoryCount> counts(int n) const;
};

enum class StubCodeLanguage { Mock, Python };

struct StubOptions {
    StubMix mix;
    std::uint64_t seed = 0;
    StubCodeLanguage code_language = StubCodeLanguage::Mock;
    bool down = false;  // every call fails as retryable
};

// Deterministic in-process backend. Every prompt gets exactly mix.counts(budget)
// completions of each category, placed at seeded positions among its sample indices.
class StubBackend final : public ChatBackend {
public:
    explicit StubBackend(StubOptions opts);

    CallResult complete(const ChatRequest& req, const RequestContext& ctx) override;

    StubCategory category_of(const Prompt& p, int sample_index, int sample_count) const;
    std::string render(const Prompt& p, StubCategory category, int sample_index) const;

    std::size_t calls() const { return calls_.load(); }

private:
    StubOptions opts_;
    std::atomic<std::size_t> calls_{0};
};

// An answer guaranteed not to be equivalent to `reference`.
std::string stub_wrong_answer(std::string_view reference);

}  // namespace curate
