#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "curate/jsonl.hpp"

namespace curate {

enum class FinishReason { Stop, Length, Error };

std::string_view to_string(FinishReason r);
std::optional<FinishReason> parse_finish_reason(std::string_view s);

// Maps a backend finish_reason string ("stop", "length", ...) onto the enum.
FinishReason finish_reason_from_backend(std::string_view s);

struct Completion {
    std::string prompt_id;
    int sample_index = 0;
    std::string text;
    FinishReason finish_reason = FinishReason::Stop;
    std::int64_t latency_ms = 0;
    std::string error;  // set only for Error completions

    bool operator==(const Completion&) const = default;
};

Json completion_to_json(const Completion& c);
// Throws std::invalid_argument on a record missing a required field.
Completion completion_from_json(const Json& j);

}  // namespace curate
