#include "curate/math_verifier.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <stdexcept>

namespace curate {

std::string_view to_string(VerifierOutcome o) {
    switch (o) {
        case VerifierOutcome::True: return "true";
        case VerifierOutcome::False: return "false";
        case VerifierOutcome::NoValidFormat: return "no_valid_format";
    }
    return "no_valid_format";
}

std::optional<VerifierOutcome> parse_verifier_outcome(std::string_view s) {
    if (s == "true") return VerifierOutcome::True;
    if (s == "false") return VerifierOutcome::False;
    if (s == "no_valid_format") return VerifierOutcome::NoValidFormat;
    return std::nullopt;
}

std::string_view to_string(ValueKind k) {
    switch (k) {
        case ValueKind::Rational: return "rational";
        case ValueKind::DecimalRational: return "decimal_rational";
        case ValueKind::SymbolicText: return "symbolic_text";
        case ValueKind::Tuple: return "tuple";
        case ValueKind::Interval: return "interval";
    }
    return "symbolic_text";
}

// ---------------------------------------------------------------------------
// Extraction

namespace {

// Index one past the brace that closes the '{' at `open`, or npos. Escaped braces
// (\{ and \}) do not count.
std::size_t matching_brace(std::string_view s, std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < s.size(); ++i) {
        char c = s[i];
        if (c == '\\' && i + 1 < s.size() && (s[i + 1] == '{' || s[i + 1] == '}')) {
            ++i;
            continue;
        }
        if (c == '{') ++depth;
        if (c == '}') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::optional<ExtractedAnswer> extract_final_answer(std::string_view text) {
    static constexpr std::array<std::string_view, 2> markers = {"\\boxed", "\\fbox"};
    std::size_t best = std::string_view::npos;
    std::size_t best_len = 0;
    for (auto marker : markers) {
        for (auto pos = text.rfind(marker); pos != std::string_view::npos;
             pos = pos == 0 ? std::string_view::npos : text.rfind(marker, pos - 1)) {
            auto after = pos + marker.size();
            // Reject longer command names such as \boxedx.
            if (after < text.size() && std::isalpha(static_cast<unsigned char>(text[after]))) continue;
            if (best == std::string_view::npos || pos > best) {
                best = pos;
                best_len = marker.size();
            }
            break;
        }
    }
    if (best == std::string_view::npos) return std::nullopt;
    auto open = best + best_len;
    while (open < text.size() && (text[open] == ' ' || text[open] == '\t')) ++open;
    if (open >= text.size() || text[open] != '{') return std::nullopt;
    auto close = matching_brace(text, open);
    if (close == std::string_view::npos) return std::nullopt;
    ExtractedAnswer ans;
    ans.begin = open + 1;
    ans.end = close - 1;
    ans.raw = std::string(text.substr(ans.begin, ans.end - ans.begin));
    if (is_blank(ans.raw)) return std::nullopt;
    return ans;
}

// ---------------------------------------------------------------------------
// Rational

Rational::Rational(Int numerator, Int denominator) : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (den_ == 0) throw std::domain_error("zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    Int g = boost::multiprecision::gcd(boost::multiprecision::abs(num_), den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

std::string Rational::str() const {
    if (den_ == 1) return num_.str();
    return num_.str() + "/" + den_.str();
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) { return Rational(a.num_ * b.num_, a.den_ * b.den_); }

Rational operator/(const Rational& a, const Rational& b) { return Rational(a.num_ * b.den_, a.den_ * b.num_); }

Rational Rational::operator-() const { return Rational(-num_, den_); }

// ---------------------------------------------------------------------------
// Canonical text

std::vector<std::string> default_unit_words() {
    return {"units",  "unit",   "cm",      "mm",     "km",      "m",       "meters",  "meter",  "metres",
            "inches", "inch",   "feet",    "foot",   "ft",      "yards",   "yard",    "miles",  "mile",
            "mph",    "kg",     "g",       "grams",  "gram",    "pounds",  "pound",   "lbs",    "lb",
            "liters", "liter",  "ml",      "degrees", "degree", "dollars", "dollar",  "cents",  "cent",
            "hours",  "hour",   "hrs",     "minutes", "minute", "seconds", "second",  "days",   "day",
            "weeks",  "week",   "years",   "year",   "square",  "sq",      "cubic"};
}

namespace {

bool is_word_byte(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    if (from.empty()) return;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

// Replaces every occurrence of the control word `cmd` (e.g. "\left") not followed by a
// letter.
void remove_command(std::string& s, std::string_view cmd, std::string_view with = "") {
    std::size_t pos = 0;
    while ((pos = s.find(cmd, pos)) != std::string::npos) {
        auto after = pos + cmd.size();
        if (after < s.size() && std::isalpha(static_cast<unsigned char>(s[after]))) {
            pos = after;
            continue;
        }
        s.replace(pos, cmd.size(), with);
        pos += with.size();
    }
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// \text{X} -> X for each wrapper command.
void unwrap_commands(std::string& s) {
    static constexpr std::array<std::string_view, 11> wrappers = {
        "\\text{", "\\textbf{", "\\textit{", "\\textrm{", "\\mathrm{", "\\mathbf{",
        "\\mathit{", "\\mbox{", "\\boxed{", "\\fbox{", "\\textnormal{"};
    for (auto w : wrappers) {
        std::size_t pos = 0;
        while ((pos = s.find(w, pos)) != std::string::npos) {
            auto open = pos + w.size() - 1;
            auto close = matching_brace(s, open);
            if (close == std::string::npos) {
                pos = open;
                continue;
            }
            std::string inner = s.substr(open + 1, close - open - 2);
            s.replace(pos, close - pos, inner);
        }
    }
}

void strip_enclosing_delimiters(std::string& s) {
    struct Pair {
        std::string_view open, close;
    };
    static constexpr std::array<Pair, 4> pairs = {{{"$$", "$$"}, {"\\[", "\\]"}, {"\\(", "\\)"}, {"$", "$"}}};
    for (const auto& p : pairs) {
        if (s.size() >= p.open.size() + p.close.size() && s.starts_with(p.open) && s.ends_with(p.close)) {
            s = s.substr(p.open.size(), s.size() - p.open.size() - p.close.size());
            return;
        }
    }
}

// Keeps a single space only between two word characters.
std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending = true;
            continue;
        }
        if (pending && !out.empty() && is_word_byte(out.back()) && is_word_byte(c)) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void strip_unit_words(std::string& s, const std::vector<std::string>& units) {
    while (true) {
        auto sp = s.rfind(' ');
        if (sp == std::string::npos) return;
        auto last = lower(std::string_view(s).substr(sp + 1));
        if (std::find(units.begin(), units.end(), last) == units.end()) return;
        s.erase(sp);
    }
}

// "x=5" -> "5" when the left side is a single variable letter.
void strip_variable_assignment(std::string& s) {
    if (s.size() >= 3 && std::isalpha(static_cast<unsigned char>(s[0])) && s[1] == '=' &&
        s.find('=', 2) == std::string::npos) {
        s.erase(0, 2);
    }
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

// 1,234,567.5 -> 1234567.5
void strip_thousands_separators(std::string& s) {
    static const std::regex grouped(R"(^[+-]?\d{1,3}(,\d{3})+(\.\d*)?%?$)");
    if (s.find(',') == std::string::npos || !std::regex_match(s, grouped)) return;
    s.erase(std::remove(s.begin(), s.end(), ','), s.end());
}

// Index of the top-level comma positions inside s[1, size-1).
std::vector<std::size_t> top_level_commas(std::string_view s) {
    std::vector<std::size_t> commas;
    int depth = 0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char c = s[i];
        if (c == '\\' && i + 1 < s.size()) {
            ++i;
            continue;
        }
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') --depth;
        if (depth < 0) return {};
        if (c == ',' && depth == 0) commas.push_back(i);
    }
    return depth == 0 ? commas : std::vector<std::size_t>{};
}

// True if the opening bracket at 0 is matched by the final character.
bool wraps_whole(std::string_view s, char open, char close) {
    if (s.size() < 2 || s.front() != open || s.back() != close) return false;
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            ++i;
            continue;
        }
        if (s[i] == open) ++depth;
        if (s[i] == close && --depth == 0) return i + 1 == s.size();
    }
    return false;
}

void strip_redundant_wrappers(std::string& s) {
    while (true) {
        if (wraps_whole(s, '{', '}')) {
            s = s.substr(1, s.size() - 2);
        } else if (wraps_whole(s, '(', ')') && top_level_commas(s).empty()) {
            s = s.substr(1, s.size() - 2);
        } else {
            return;
        }
    }
}

// \sqrt2 -> \sqrt{2}, \frac12 -> \frac{1}{2}
void expand_shorthand(std::string& s) {
    std::size_t pos = 0;
    while ((pos = s.find("\\sqrt", pos)) != std::string::npos) {
        auto a = pos + 5;
        if (a < s.size() && std::isalnum(static_cast<unsigned char>(s[a])) &&
            !(std::isalpha(static_cast<unsigned char>(s[a])) && a + 1 < s.size() &&
              std::isalpha(static_cast<unsigned char>(s[a + 1])))) {
            if (!std::isalpha(static_cast<unsigned char>(s[a]))) {
                s.replace(a, 1, std::string("{") + s[a] + "}");
            }
        }
        pos = a;
    }
    pos = 0;
    while ((pos = s.find("\\frac", pos)) != std::string::npos) {
        auto a = pos + 5;
        if (a + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[a])) &&
            std::isdigit(static_cast<unsigned char>(s[a + 1]))) {
            s.replace(a, 2, std::string("{") + s[a] + "}{" + s[a + 1] + "}");
        }
        pos = a;
    }
}

std::string canonical_step(std::string s, const NormalizeOptions& opts) {
    s = trim(s);
    replace_all(s, "\xE2\x88\x92", "-");  // U+2212 minus sign
    replace_all(s, "\\%", "%");
    replace_all(s, "\\$", "");
    strip_enclosing_delimiters(s);
    for (auto cmd : {"\\left", "\\right", "\\displaystyle"}) remove_command(s, cmd);
    for (auto cmd : {"\\,", "\\;", "\\:", "\\!", "\\ "}) replace_all(s, cmd, " ");
    for (auto cmd : {"\\quad", "\\qquad"}) remove_command(s, cmd, " ");
    replace_all(s, "~", " ");
    remove_command(s, "\\dfrac", "\\frac");
    remove_command(s, "\\tfrac", "\\frac");
    unwrap_commands(s);
    replace_all(s, "^{\\circ}", "");
    replace_all(s, "^\\circ", "");
    replace_all(s, "\xC2\xB0", "");  // degree sign
    replace_all(s, "{,}", ",");
    replace_all(s, "$", "");
    s = collapse_whitespace(s);
    while (!s.empty() && s.back() == '.') s.pop_back();
    strip_unit_words(s, opts.unit_words);
    strip_variable_assignment(s);
    strip_thousands_separators(s);
    strip_redundant_wrappers(s);
    expand_shorthand(s);
    return trim(s);
}

std::string canonical_text(std::string_view raw, const NormalizeOptions& opts) {
    std::string s(raw);
    for (int i = 0; i < 32; ++i) {
        auto next = canonical_step(s, opts);
        if (next == s) break;
        s = std::move(next);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Numeric parsing over canonical text

// cpp_int's string constructor reads a leading 0 as an octal prefix.
Rational::Int decimal_int(std::string_view digits) {
    auto first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) return 0;
    return Rational::Int(std::string(digits.substr(first)));
}

class NumberParser {
public:
    explicit NumberParser(std::string_view s) : s_(s) {}

    // Parses the whole input as one scalar. `decimal` reports whether a decimal point,
    // exponent or percent was involved.
    std::optional<Rational> parse_all(bool& decimal) {
        decimal = false;
        pos_ = 0;
        std::string_view body = s_;
        bool percent = false;
        if (!body.empty() && body.back() == '%') {
            percent = true;
            body.remove_suffix(1);
        }
        NumberParser inner(body);
        auto v = inner.scalar(decimal);
        if (!v || inner.pos_ != body.size()) return std::nullopt;
        if (percent) {
            decimal = true;
            return *v / Rational(100);
        }
        return v;
    }

private:
    std::optional<Rational> scalar(bool& decimal) {
        bool negative = false;
        if (peek('-') || peek('+')) {
            negative = s_[pos_] == '-';
            ++pos_;
        }
        auto v = body(decimal);
        if (!v) return std::nullopt;
        return negative ? -*v : *v;
    }

    std::optional<Rational> body(bool& decimal) {
        if (starts("\\frac{")) return frac(decimal);
        auto start = pos_;
        auto lead = unsigned_decimal(decimal);
        if (!lead) return std::nullopt;
        // Mixed number: 2\frac{1}{2} or "2 1/2".
        if (starts("\\frac{") && all_digits(s_.substr(start, pos_ - start))) {
            bool d = false;
            auto f = frac(d);
            if (!f || f->numerator() < 0) return std::nullopt;
            return *lead + *f;
        }
        if (peek(' ') && all_digits(s_.substr(start, pos_ - start))) {
            auto save = pos_++;
            bool d = false;
            auto num = unsigned_integer();
            if (num && peek('/')) {
                ++pos_;
                auto den = unsigned_integer();
                if (den && *den != 0 && pos_ == s_.size()) return *lead + Rational(*num, *den);
            }
            pos_ = save;
            (void)d;
            return std::nullopt;
        }
        if (peek('/')) {
            ++pos_;
            bool d = false;
            auto den = unsigned_decimal(d);
            if (!den || den->numerator() == 0) return std::nullopt;
            decimal = decimal || d;
            return *lead / *den;
        }
        if (starts("\\times10^") || starts("\\cdot10^")) {
            pos_ += starts("\\times") ? 9 : 8;
            auto exp = exponent_group();
            if (!exp) return std::nullopt;
            decimal = true;
            return *lead * pow10(*exp);
        }
        return lead;
    }

    std::optional<Rational> frac(bool& decimal) {
        pos_ += 5;  // "\frac"
        auto num = braced_scalar(decimal);
        if (!num) return std::nullopt;
        auto den = braced_scalar(decimal);
        if (!den || den->numerator() == 0) return std::nullopt;
        return *num / *den;
    }

    std::optional<Rational> braced_scalar(bool& decimal) {
        if (!peek('{')) return std::nullopt;
        auto close = matching_brace(s_, pos_);
        if (close == std::string_view::npos) return std::nullopt;
        NumberParser inner(s_.substr(pos_ + 1, close - pos_ - 2));
        auto v = inner.scalar(decimal);
        if (!v || inner.pos_ != inner.s_.size()) return std::nullopt;
        pos_ = close;
        return v;
    }

    std::optional<long> exponent_group() {
        bool braced = peek('{');
        if (braced) ++pos_;
        bool negative = false;
        if (peek('-') || peek('+')) {
            negative = s_[pos_] == '-';
            ++pos_;
        }
        auto start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start || pos_ - start > 4) return std::nullopt;
        if (!braced && pos_ - start > 1) {
            // 10^12 without braces only binds the first digit in LaTeX.
            return std::nullopt;
        }
        long e = std::stol(std::string(s_.substr(start, pos_ - start)));
        if (braced) {
            if (!peek('}')) return std::nullopt;
            ++pos_;
        }
        return negative ? -e : e;
    }

    std::optional<Rational::Int> unsigned_integer() {
        auto start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start) return std::nullopt;
        return decimal_int(s_.substr(start, pos_ - start));
    }

    // digits[.digits][e[+-]digits] or .digits
    std::optional<Rational> unsigned_decimal(bool& decimal) {
        auto start = pos_;
        std::string digits;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) digits.push_back(s_[pos_++]);
        long scale = 0;
        if (peek('.')) {
            ++pos_;
            decimal = true;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                digits.push_back(s_[pos_++]);
                ++scale;
            }
        }
        if (digits.empty()) {
            pos_ = start;
            return std::nullopt;
        }
        long exp = 0;
        if (peek('e') || peek('E')) {
            auto save = pos_++;
            bool negative = false;
            if (peek('-') || peek('+')) {
                negative = s_[pos_] == '-';
                ++pos_;
            }
            auto estart = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == estart || pos_ - estart > 4) {
                pos_ = save;
            } else {
                exp = std::stol(std::string(s_.substr(estart, pos_ - estart)));
                if (negative) exp = -exp;
                decimal = true;
            }
        }
        return Rational(decimal_int(digits)) * pow10(exp - scale);
    }

    static Rational pow10(long e) {
        Rational::Int p = boost::multiprecision::pow(Rational::Int(10), static_cast<unsigned>(std::labs(e)));
        return e >= 0 ? Rational(p) : Rational(1, p);
    }

    bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
    bool starts(std::string_view p) const { return s_.substr(pos_).starts_with(p); }

    std::string_view s_;
    std::size_t pos_ = 0;
};

constexpr long kMaxExponent = 400;

bool exponent_in_range(std::string_view s) {
    // Cheap guard against "1e9999"-style inputs exploding the big-integer arithmetic.
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == 'e' || s[i] == 'E' || s[i] == '^') {
            std::size_t j = i + 1;
            while (j < s.size() && (s[j] == '{' || s[j] == '-' || s[j] == '+')) ++j;
            std::size_t k = j;
            while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
            if (k > j && k - j <= 4 && std::stol(std::string(s.substr(j, k - j))) > kMaxExponent) return false;
        }
    }
    return true;
}

std::optional<NormalizedValue> as_rational(std::string_view s) {
    if (s.empty() || !exponent_in_range(s)) return std::nullopt;
    bool decimal = false;
    NumberParser parser(s);
    auto v = parser.parse_all(decimal);
    if (!v) return std::nullopt;
    NormalizedValue out;
    out.kind = decimal ? ValueKind::DecimalRational : ValueKind::Rational;
    out.rational = *v;
    return out;
}

NormalizedValue classify(const std::string& s, const NormalizeOptions& opts);

std::optional<NormalizedValue> as_sequence(const std::string& s, const NormalizeOptions& opts) {
    if (s.size() < 3) return std::nullopt;
    char open = s.front();
    char close = s.back();
    if ((open != '(' && open != '[') || (close != ')' && close != ']')) return std::nullopt;
    auto commas = top_level_commas(s);
    if (commas.empty()) return std::nullopt;
    bool interval = open == '[' || close == ']';
    if (interval && commas.size() != 1) {
        if (open != '[' || close != ']') return std::nullopt;
    }
    NormalizedValue out;
    std::size_t from = 1;
    commas.push_back(s.size() - 1);
    for (auto c : commas) {
        auto part = s.substr(from, c - from);
        if (part.empty()) return std::nullopt;
        out.elements.push_back(classify(canonical_text(part, opts), opts));
        from = c + 1;
    }
    if (interval && out.elements.size() == 2) {
        out.kind = ValueKind::Interval;
        out.open = open;
        out.close = close;
    } else {
        out.kind = ValueKind::Tuple;
        out.open = open;
        out.close = close;
    }
    return out;
}

NormalizedValue classify(const std::string& s, const NormalizeOptions& opts) {
    if (auto r = as_rational(s)) return *r;
    if (auto seq = as_sequence(s, opts)) return *seq;
    NormalizedValue out;
    out.kind = ValueKind::SymbolicText;
    out.text = s;
    return out;
}

}  // namespace

std::string NormalizedValue::canonical() const {
    switch (kind) {
        case ValueKind::Rational:
        case ValueKind::DecimalRational: return rational.str();
        case ValueKind::SymbolicText: return text;
        case ValueKind::Tuple:
        case ValueKind::Interval: {
            std::string out(1, open);
            for (std::size_t i = 0; i < elements.size(); ++i) {
                if (i) out.push_back(',');
                out += elements[i].canonical();
            }
            out.push_back(close);
            return out;
        }
    }
    return text;
}

bool operator==(const NormalizedValue& a, const NormalizedValue& b) {
    if (a.is_rational() || b.is_rational()) return a.is_rational() && b.is_rational() && a.rational == b.rational;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ValueKind::SymbolicText: return a.text == b.text;
        case ValueKind::Tuple:
        case ValueKind::Interval:
            return a.open == b.open && a.close == b.close && a.elements == b.elements;
        default: return false;
    }
}

NormalizedValue normalize(std::string_view raw, const NormalizeOptions& opts) {
    return classify(canonical_text(raw, opts), opts);
}

bool equivalent(const NormalizedValue& a, const NormalizedValue& b) {
    if (a.is_rational() || b.is_rational()) return a.is_rational() && b.is_rational() && a.rational == b.rational;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ValueKind::SymbolicText: return a.text == b.text;
        case ValueKind::Tuple:
        case ValueKind::Interval: {
            if (a.kind == ValueKind::Interval && (a.open != b.open || a.close != b.close)) return false;
            if (a.kind == ValueKind::Tuple && a.open != b.open) return false;
            if (a.elements.size() != b.elements.size()) return false;
            for (std::size_t i = 0; i < a.elements.size(); ++i) {
                if (!equivalent(a.elements[i], b.elements[i])) return false;
            }
            return true;
        }
        default: return false;
    }
}

MathVerification verify_answer(std::string_view completion_text, std::string_view reference,
                               const NormalizeOptions& opts) {
    if (is_blank(reference)) throw std::invalid_argument("reference answer is empty");
    MathVerification out;
    auto extracted = extract_final_answer(completion_text);
    if (!extracted) return out;
    auto value = normalize(extracted->raw, opts);
    out.extracted = extracted->raw;
    out.normalized = value.canonical();
    out.outcome = equivalent(value, normalize(reference, opts)) ? VerifierOutcome::True : VerifierOutcome::False;
    return out;
}

double score_benchmark(const std::vector<std::pair<std::string, std::string>>& responses,
                       const NormalizeOptions& opts) {
    if (responses.empty()) throw std::invalid_argument("score_benchmark needs at least one response");
    std::size_t correct = 0;
    for (const auto& [text, reference] : responses) {
        if (verify_answer(text, reference, opts).outcome == VerifierOutcome::True) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(responses.size());
}

}  // namespace curate
