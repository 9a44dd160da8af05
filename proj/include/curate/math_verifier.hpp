#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace curate {

enum class VerifierOutcome { True, False, NoValidFormat };

std::string_view to_string(VerifierOutcome o);  // "true" | "false" | "no_valid_format"
std::optional<VerifierOutcome> parse_verifier_outcome(std::string_view s);

struct ExtractedAnswer {
    std::string raw;
    std::size_t begin = 0;  // offsets of `raw` inside the source text
    std::size_t end = 0;
};

// Content of the last \boxed{...} (or \fbox{...}) marker. Returns nullopt when there is
// no marker, when the last marker's braces never balance, or when it is empty.
std::optional<ExtractedAnswer> extract_final_answer(std::string_view text);

// Exact fraction in lowest terms with a positive denominator.
class Rational {
public:
    using Int = boost::multiprecision::cpp_int;

    Rational() = default;
    explicit Rational(Int numerator, Int denominator = 1);

    const Int& numerator() const { return num_; }
    const Int& denominator() const { return den_; }
    std::string str() const;  // "p" or "p/q"

    friend bool operator==(const Rational&, const Rational&) = default;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;

private:
    Int num_ = 0;
    Int den_ = 1;
};

enum class ValueKind { Rational, DecimalRational, SymbolicText, Tuple, Interval };

std::string_view to_string(ValueKind k);

struct NormalizedValue {
    ValueKind kind = ValueKind::SymbolicText;
    Rational rational;                     // Rational / DecimalRational
    std::string text;                      // SymbolicText
    std::vector<NormalizedValue> elements;  // Tuple (any arity >= 2) / Interval (exactly 2)
    char open = 0;                         // Interval brackets: '[' or '('
    char close = 0;                        // ']' or ')'

    bool is_rational() const { return kind == ValueKind::Rational || kind == ValueKind::DecimalRational; }
    // Canonical rendering; normalize(canonical()) reproduces this value.
    std::string canonical() const;
};

// Kind-aware structural equality. The two rational kinds compare by value.
bool operator==(const NormalizedValue& a, const NormalizedValue& b);

// Measure words stripped from the end of numeric answers ("12 cm" -> "12").
std::vector<std::string> default_unit_words();

struct NormalizeOptions {
    std::vector<std::string> unit_words = default_unit_words();
};

NormalizedValue normalize(std::string_view raw, const NormalizeOptions& opts = {});

// Rationals compare exactly, tuples elementwise with equal arity, intervals by brackets
// and endpoints, text by canonical form. Rational vs text is never equivalent.
bool equivalent(const NormalizedValue& a, const NormalizedValue& b);

struct MathVerification {
    VerifierOutcome outcome = VerifierOutcome::NoValidFormat;
    std::optional<std::string> extracted;
    std::optional<std::string> normalized;
};

// Throws std::invalid_argument for an empty reference.
MathVerification verify_answer(std::string_view completion_text, std::string_view reference,
                               const NormalizeOptions& opts = {});

// Fraction of (completion text, reference) pairs that verify True. Throws
// std::invalid_argument on an empty list.
double score_benchmark(const std::vector<std::pair<std::string, std::string>>& responses,
                       const NormalizeOptions& opts = {});

}  // namespace curate
