#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "curate/filters.hpp"
#include "curate/math_verifier.hpp"

using namespace curate;

namespace {

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

// Brute-force sliding-window count, independent of the rolling hash.
bool repetition_oracle(const std::string& text, int window, int max_repeats) {
    auto toks = tokens(text);
    if (toks.size() < static_cast<std::size_t>(window)) return false;
    std::map<std::vector<std::string>, int> counts;
    for (std::size_t s = 0; s + static_cast<std::size_t>(window) <= toks.size(); ++s) {
        std::vector<std::string> key(toks.begin() + static_cast<long>(s), toks.begin() + static_cast<long>(s) + window);
        if (++counts[key] > max_repeats) return true;
    }
    return false;
}

std::string sentence(int n_tokens, const std::string& stem = "tok") {
    std::string out;
    for (int i = 0; i < n_tokens; ++i) out += stem + std::to_string(i) + " ";
    return out;
}

std::string repeat(const std::string& s, int times) {
    std::string out;
    for (int i = 0; i < times; ++i) out += s;
    return out;
}

const char* kHan = "\xe8\xa7\xa3";  // one CJK ideograph, 3 bytes

}  // namespace

TEST_CASE("repetition rule") {
    FilterConfig cfg;
    auto s = sentence(40);
    CHECK(detect_repetition(repeat(s, 6), cfg));
    CHECK(repetition_oracle(repeat(s, 6), 32, 4));
    CHECK_FALSE(detect_repetition(s, cfg));
    CHECK_FALSE(detect_repetition("", cfg));

    // Threshold flip: the 32-token prefix occurs once per copy, so >4 needs 5 copies.
    auto prefix = sentence(32) ;
    std::string four, five;
    for (int i = 0; i < 4; ++i) four += prefix + "sep" + std::to_string(i) + " ";
    five = four + prefix;
    CHECK_FALSE(detect_repetition(four, cfg));
    CHECK(detect_repetition(five, cfg));
}

TEST_CASE("repetition agrees with a brute-force window oracle") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 400; ++round) {
        FilterConfig cfg;
        cfg.ngram_window = static_cast<int>(1 + rng() % 6);
        cfg.max_ngram_repeats = static_cast<int>(1 + rng() % 4);
        std::string text;
        auto n = rng() % 60;
        for (std::size_t i = 0; i < n; ++i) text += std::string(1, static_cast<char>('a' + rng() % 3)) + (rng() % 5 ? " " : "\n ");
        CHECK(detect_repetition(text, cfg) == repetition_oracle(text, cfg.ngram_window, cfg.max_ngram_repeats));
    }
}

TEST_CASE("repetition is monotone under appended copies") {
    std::mt19937_64 rng(23);
    FilterConfig cfg;
    cfg.ngram_window = 8;
    cfg.max_ngram_repeats = 3;
    for (int round = 0; round < 50; ++round) {
        auto unit = sentence(8 + static_cast<int>(rng() % 8), "w" + std::to_string(round) + "_");
        auto text = repeat(unit, 5);
        REQUIRE(detect_repetition(text, cfg));
        for (int k = 1; k <= 4; ++k) CHECK(detect_repetition(text + repeat(unit, k), cfg));
    }
}

TEST_CASE("language rule") {
    FilterConfig cfg;
    CHECK_FALSE(detect_foreign_language("We compute x^2 + 3x = 10, so x = 2.", cfg));
    CHECK_FALSE(detect_foreign_language("1234 5678 + = 9", cfg));
    CHECK(foreign_letter_ratio("12345", TargetScript::Latin) == 0.0);

    // Half of the letters are Han: 10 Latin + 10 Han.
    std::string half = "abcdefghij";
    for (int i = 0; i < 10; ++i) half += kHan;
    CHECK(foreign_letter_ratio(half, TargetScript::Latin) == doctest::Approx(0.5));
    CHECK(detect_foreign_language(half, cfg));
    CHECK_FALSE(detect_foreign_language(half, FilterConfig{.target_script = TargetScript::Mixed}));

    // LaTeX control words and Greek do not count as letters.
    CHECK(count_script_letters("\\frac{\\alpha}{\\beta}", TargetScript::Latin).target == 0);
    CHECK(count_script_letters("\xce\xb1\xce\xb2", TargetScript::Latin).target == 0);
}

TEST_CASE("language ratio matches a character-class count") {
    std::mt19937_64 rng(29);
    for (int round = 0; round < 300; ++round) {
        std::string text;
        std::size_t latin = 0, han = 0;
        for (std::size_t i = 0, n = rng() % 80; i < n; ++i) {
            switch (rng() % 4) {
                case 0: text += static_cast<char>('a' + rng() % 26); ++latin; break;
                case 1: text += kHan; ++han; break;
                case 2: text += static_cast<char>('0' + rng() % 10); break;
                default: text += " +=()"[rng() % 5]; break;
            }
        }
        double expected = latin + han == 0 ? 0.0 : static_cast<double>(han) / static_cast<double>(latin + han);
        CHECK(foreign_letter_ratio(text, TargetScript::Latin) == doctest::Approx(expected));
        double cap = static_cast<double>(rng() % 11) / 10.0;
        FilterConfig cfg;
        cfg.max_foreign_char_ratio = cap;
        CHECK(detect_foreign_language(text, cfg) == (expected > cap));
    }
}

TEST_CASE("answer format") {
    CHECK(has_answer_format("... thus \\boxed{17}.", Domain::Math));
    CHECK_FALSE(has_answer_format("the answer is plainly 17", Domain::Math));
    CHECK_FALSE(has_answer_format("\\boxed{1+{2}", Domain::Geo));
    CHECK(has_answer_format("```python\nprint(1)\n```\n", Domain::Code));
    CHECK_FALSE(has_answer_format("```python\nprint(1)\n```\nthen\n```python\nprint(", Domain::Code));
    CHECK_FALSE(has_answer_format("no code here", Domain::Code));

    auto scan = scan_code_fences("intro\n```cpp\nint x;\n```\n```\nopen");
    REQUIRE(scan.closed.size() == 1);
    CHECK(scan.closed[0].language == "cpp");
    CHECK(scan.closed[0].body == "int x;\n");
    CHECK(scan.unclosed);
}

TEST_CASE("reflectiveness") {
    FilterConfig cfg;
    CHECK(check_reflectiveness("Now let me double-check the angle.", cfg) == Reflectiveness::Ok);
    CHECK(check_reflectiveness("The angle is 30 degrees.", cfg) == Reflectiveness::NonReflective);

    std::string waits;
    for (int i = 0; i < 12; ++i) waits += "Wait, recheck. ";
    CHECK(count_occurrences(waits, "wait") == 12);
    CHECK(check_reflectiveness(waits, cfg) == Reflectiveness::ExcessiveWait);

    std::string eight;
    for (int i = 0; i < 8; ++i) eight += "wait. ";
    CHECK(check_reflectiveness(eight, cfg) == Reflectiveness::Ok);
    CHECK(check_reflectiveness(eight + "wait", cfg) == Reflectiveness::ExcessiveWait);
}

TEST_CASE("apply_filters unions the rules") {
    FilterConfig cfg;
    CHECK(apply_filters("We get 3. Hmm, wait, check: \\boxed{3}", Domain::Math, cfg) == FilterVerdict{true, {}});
    auto v = apply_filters(repeat(sentence(40), 6), Domain::Math, cfg);
    CHECK_FALSE(v.passed);
    CHECK(v.failed_rules == std::vector{FilterRule::Repetition, FilterRule::AnswerFormat});
    CHECK(apply_filters("Use a dict.\n```python\nprint(1)\n```\n", Domain::Code, cfg).passed);
    CHECK(apply_filters("```python\nprint(", Domain::Code, cfg).failed_rules ==
          std::vector{FilterRule::AnswerFormat, FilterRule::IncompleteCode});
    CHECK(apply_filters("So \\boxed{3}", Domain::Geo, cfg).failed_rules == std::vector{FilterRule::NonReflective});
    // Reflectiveness applies to geo only.
    CHECK(apply_filters("So \\boxed{3}", Domain::Math, cfg).passed);

    auto j = verdict_to_json(v);
    CHECK(j.at("failed_rules") == Json::array({"Repetition", "AnswerFormat"}));
    CHECK(verdict_from_json(j) == v);
    CHECK(is_format_rule(FilterRule::AnswerFormat));
    CHECK(is_format_rule(FilterRule::IncompleteCode));
    CHECK_FALSE(is_format_rule(FilterRule::Repetition));
}

TEST_CASE("filters are deterministic and format failures imply no True verdict") {
    std::mt19937_64 rng(31);
    const char* pieces[] = {"wait ", "\\boxed{", "}", "2 ", "x ", "```\n", "let me ", kHan, "\n", "{", "4"};
    FilterConfig cfg;
    cfg.ngram_window = 3;
    cfg.max_ngram_repeats = 2;
    for (int round = 0; round < 1000; ++round) {
        std::string text;
        for (std::size_t i = 0, n = rng() % 30; i < n; ++i) text += pieces[rng() % std::size(pieces)];
        for (auto d : {Domain::Math, Domain::Code, Domain::Geo}) {
            auto a = apply_filters(text, d, cfg);
            CHECK(a == apply_filters(text, d, cfg));
            CHECK(a.passed == a.failed_rules.empty());
            CHECK(std::is_sorted(a.failed_rules.begin(), a.failed_rules.end()));
        }
        if (!has_answer_format(text, Domain::Math)) {
            CHECK(verify_answer(text, "2").outcome == VerifierOutcome::NoValidFormat);
        }
    }
}

TEST_CASE("config problems") {
    CHECK(FilterConfig{}.problems().empty());
    FilterConfig bad;
    bad.max_foreign_char_ratio = 1.5;
    bad.ngram_window = 0;
    CHECK(bad.problems().size() == 2);
}
