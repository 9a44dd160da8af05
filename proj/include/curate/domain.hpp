#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace curate {

enum class Domain { Math, Code, Geo };

std::string_view to_string(Domain d);
std::optional<Domain> parse_domain(std::string_view s);

// Math and Geo prompts are judged by final-answer equivalence; Code by test cases.
inline bool uses_reference_answer(Domain d) { return d != Domain::Code; }

// Raised for configuration problems that should abort a run (exit status 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace curate
