#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "curate/completion.hpp"
#include "curate/domain.hpp"

namespace curate {

enum class TargetScript { Latin, Han, Mixed };

std::string_view to_string(TargetScript s);
std::optional<TargetScript> parse_target_script(std::string_view s);

enum class FilterRule { Repetition, Language, AnswerFormat, IncompleteCode, NonReflective, ExcessiveWait };

std::string_view to_string(FilterRule r);
std::optional<FilterRule> parse_filter_rule(std::string_view s);

struct FilterConfig {
    int ngram_window = 32;
    int max_ngram_repeats = 4;
    TargetScript target_script = TargetScript::Latin;
    double max_foreign_char_ratio = 0.2;
    std::vector<std::string> reflective_markers = {"wait", "let me", "double-check", "re-examine", "hmm"};
    std::vector<std::string> wait_markers = {"wait"};
    int max_wait_marker_count = 8;

    std::vector<std::string> problems() const;
};

struct FilterVerdict {
    bool passed = true;
    std::vector<FilterRule> failed_rules;  // sorted in enum order

    bool operator==(const FilterVerdict&) const = default;
};

Json verdict_to_json(const FilterVerdict& v);
FilterVerdict verdict_from_json(const Json& j);

// True iff some run of `ngram_window` consecutive whitespace tokens occurs more than
// `max_ngram_repeats` times (overlapping occurrences count).
bool detect_repetition(std::string_view text, const FilterConfig& cfg);

struct ScriptCounts {
    std::size_t target = 0;
    std::size_t foreign = 0;
};

// Letters only; digits, punctuation, Greek letters, math symbols and LaTeX control words
// are ignored.
ScriptCounts count_script_letters(std::string_view text, TargetScript target);
double foreign_letter_ratio(std::string_view text, TargetScript target);
bool detect_foreign_language(std::string_view text, const FilterConfig& cfg);

struct FencedBlock {
    std::string language;
    std::string body;
};

struct FenceScan {
    std::vector<FencedBlock> closed;
    bool unclosed = false;  // a fence was opened and never closed
};

// Markdown ``` fences at line starts.
FenceScan scan_code_fences(std::string_view text);

// Math/Geo: the last \boxed{} is well-bracketed. Code: at least one closed fenced block
// and no dangling open fence.
bool has_answer_format(std::string_view text, Domain domain);

enum class Reflectiveness { Ok, NonReflective, ExcessiveWait };

std::string_view to_string(Reflectiveness r);

// Case-insensitive, non-overlapping.
std::size_t count_occurrences(std::string_view text, std::string_view needle);

Reflectiveness check_reflectiveness(std::string_view text, const FilterConfig& cfg);

FilterVerdict apply_filters(std::string_view text, Domain domain, const FilterConfig& cfg);
inline FilterVerdict apply_filters(const Completion& c, Domain domain, const FilterConfig& cfg) {
    return apply_filters(c.text, domain, cfg);
}

// Rules whose failure still lets a completion reach verification, where it becomes a
// NoValidFormat negative.
bool is_format_rule(FilterRule r);

}  // namespace curate
