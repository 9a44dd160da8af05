#include <doctest.h>

#include <numeric>
#include <random>

#include "curate/math_verifier.hpp"

using namespace curate;

namespace {

struct Frac {
    long long p, q;  // reduced, q > 0
};

Frac reduce(long long p, long long q) {
    if (q < 0) p = -p, q = -q;
    auto g = std::gcd(p < 0 ? -p : p, q);
    return {p / g, q / g};
}

std::string frac_text(Frac f) { return f.q == 1 ? std::to_string(f.p) : std::to_string(f.p) + "/" + std::to_string(f.q); }

// Exact decimal expansion by long division; q must be of the form 2^a 5^b.
std::string decimal_text(long long p, long long q) {
    std::string out = p < 0 ? "-" : "";
    long long a = p < 0 ? -p : p;
    out += std::to_string(a / q);
    long long r = a % q;
    if (r) out += ".";
    while (r) {
        r *= 10;
        out += static_cast<char>('0' + r / q);
        r %= q;
    }
    return out;
}

Frac random_terminating(std::mt19937_64& rng) {
    long long q = 1;
    for (auto a = rng() % 6; a > 0; --a) q *= 2;
    for (auto b = rng() % 5; b > 0; --b) q *= 5;
    long long p = static_cast<long long>(rng() % 20001) - 10000;
    return {p, q};
}

}  // namespace

TEST_CASE("extract_final_answer") {
    auto a = extract_final_answer("so \\boxed{42}.");
    REQUIRE(a);
    CHECK(a->raw == "42");
    CHECK(std::string_view("so \\boxed{42}.").substr(a->begin, a->end - a->begin) == "42");
    CHECK(extract_final_answer("\\boxed{1} then \\boxed{2}")->raw == "2");
    CHECK_FALSE(extract_final_answer("\\boxed{1+{2}"));
    CHECK_FALSE(extract_final_answer("no box"));
    CHECK_FALSE(extract_final_answer("\\boxed{}"));
    CHECK(extract_final_answer("\\boxed{\\frac{1}{2}}")->raw == "\\frac{1}{2}");
    CHECK(extract_final_answer("\\fbox{7}")->raw == "7");
}

TEST_CASE("normalize examples") {
    auto half = normalize("3/6");
    CHECK(half.kind == ValueKind::Rational);
    CHECK(half.rational == Rational(1, 2));
    CHECK(normalize("50%").rational == Rational(1, 2));
    CHECK(normalize("50\\%").rational == Rational(1, 2));
    auto west = normalize("\\text{west}");
    CHECK(west.kind == ValueKind::SymbolicText);
    CHECK(west.text == "west");
    CHECK(normalize("1,024").rational == Rational(1024));
    CHECK(normalize("$12$ cm.").rational == Rational(12));
    CHECK(normalize("2\\frac{1}{2}").rational == Rational(5, 2));
    CHECK(normalize("\\dfrac{5}{6}").rational == Rational(5, 6));
    CHECK(normalize("1.5e3").rational == Rational(1500));
    CHECK(normalize("3\\times10^{-2}").rational == Rational(3, 100));
    CHECK(normalize("x=5").rational == Rational(5));
    CHECK(normalize("(1, 2)").kind == ValueKind::Tuple);
    CHECK(normalize("[0, 1)").kind == ValueKind::Interval);
    CHECK(normalize("{{7}}").rational == Rational(7));
    CHECK(normalize("12 parsecs").kind == ValueKind::SymbolicText);
    CHECK(Rational(4, -6).str() == "-2/3");
}

TEST_CASE("equivalent examples") {
    CHECK(equivalent(normalize("1/2"), normalize("0.5")));
    CHECK_FALSE(equivalent(normalize("0.3333"), normalize("1/3")));
    CHECK(equivalent(normalize("(1, 0.5)"), normalize("(1,\\frac{1}{2})")));
    CHECK_FALSE(equivalent(normalize("(1, 2)"), normalize("(1, 2, 3)")));
    CHECK_FALSE(equivalent(normalize("[0, 1)"), normalize("[0, 1]")));
    CHECK_FALSE(equivalent(normalize("2"), normalize("\\text{2 apples}")));
    // Documented gap: no algebraic simplification of radicals.
    CHECK_FALSE(equivalent(normalize("\\sqrt{8}"), normalize("2\\sqrt{2}")));
    CHECK(equivalent(normalize("\\sqrt2"), normalize("\\sqrt{2}")));
}

TEST_CASE("verify_answer and score_benchmark") {
    CHECK(verify_answer("... \\boxed{42}", "42").outcome == VerifierOutcome::True);
    CHECK(verify_answer("... \\boxed{41}", "42").outcome == VerifierOutcome::False);
    auto none = verify_answer("it is 42", "42");
    CHECK(none.outcome == VerifierOutcome::NoValidFormat);
    CHECK_FALSE(none.extracted);
    auto v = verify_answer("\\boxed{0.75}", "\\frac{3}{4}");
    CHECK(v.outcome == VerifierOutcome::True);
    CHECK(v.extracted == "0.75");
    CHECK(v.normalized == "3/4");
    CHECK_THROWS_AS(verify_answer("\\boxed{1}", " "), std::invalid_argument);

    CHECK(score_benchmark({{"\\boxed{1}", "1"}, {"\\boxed{2}", "2"}, {"\\boxed{0}", "3"}, {"none", "4"}}) == 0.5);
    CHECK(score_benchmark({{"\\boxed{1}", "1"}}) == 1.0);
    CHECK(score_benchmark({{"x", "1"}, {"y", "2"}}) == 0.0);
    CHECK_THROWS_AS(score_benchmark({}), std::invalid_argument);

    for (auto o : {VerifierOutcome::True, VerifierOutcome::False, VerifierOutcome::NoValidFormat}) {
        CHECK(parse_verifier_outcome(to_string(o)) == o);
    }
}

TEST_CASE("fraction, decimal and percent renderings agree with an exact oracle") {
    std::mt19937_64 rng(101);
    for (int i = 0; i < 1000; ++i) {
        auto [p, q] = random_terminating(rng);
        auto expected = reduce(p, q);
        auto as_frac = normalize(std::to_string(p) + "/" + std::to_string(q));
        auto as_latex = normalize("\\frac{" + std::to_string(p) + "}{" + std::to_string(q) + "}");
        auto as_decimal = normalize(decimal_text(p, q));
        auto as_percent = normalize(decimal_text(p * 100, q) + "%");
        for (const auto* v : {&as_frac, &as_latex, &as_decimal, &as_percent}) {
            REQUIRE(v->is_rational());
            CHECK(v->canonical() == frac_text(expected));
        }
        CHECK(equivalent(as_frac, as_decimal));
        CHECK(equivalent(as_decimal, as_percent));
    }
}

TEST_CASE("equivalence relation and idempotent normalization") {
    std::mt19937_64 rng(103);
    const char* texts[] = {"\\pi", "west", "\\sqrt{2}", "B", "x+1"};
    auto gen = [&]() -> std::string {
        switch (rng() % 4) {
            case 0: {
                // Small values so that distinct renderings of the same number collide often.
                long long p = static_cast<long long>(rng() % 9) - 4;
                long long q = 1LL << (rng() % 3);
                return rng() % 2 ? decimal_text(p, q) : std::to_string(p * 2) + "/" + std::to_string(q * 2);
            }
            case 1: return texts[rng() % std::size(texts)];
            case 2: return "(" + std::to_string(rng() % 3) + ", " + std::to_string(rng() % 3) + ")";
            default: return std::string(rng() % 2 ? "[" : "(") + std::to_string(rng() % 2) + ", 1" + (rng() % 2 ? "]" : ")");
        }
    };
    for (int i = 0; i < 10000; ++i) {
        auto a = normalize(gen());
        auto b = normalize(gen());
        auto c = normalize(gen());
        CHECK(equivalent(a, a));
        CHECK(equivalent(a, b) == equivalent(b, a));
        if (equivalent(a, b) && equivalent(b, c)) CHECK(equivalent(a, c));
        auto again = normalize(a.canonical());
        CHECK(again.canonical() == a.canonical());
        CHECK(equivalent(again, a));
    }
}
