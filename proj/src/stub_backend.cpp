#include "curate/stub_backend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "curate/math_verifier.hpp"
#include "curate/sampler.hpp"

namespace curate {

std::string_view to_string(StubCategory c) {
    switch (c) {
        case StubCategory::Correct: return "correct";
        case StubCategory::Wrong: return "wrong";
        case StubCategory::Unformatted: return "unformatted";
        case StubCategory::Repetitive: return "repetitive";
        case StubCategory::Foreign: return "foreign";
    }
    return "correct";
}

std::vector<std::string> StubMix::problems() const {
    std::vector<std::string> out;
    double sum = 0;
    for (double f : fractions) {
        if (!(f >= 0.0 && f <= 1.0)) out.push_back("stub mix fractions must be in [0,1]");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) out.push_back("stub mix fractions must sum to 1");
    return out;
}

std::array<int, kStubCategoryCount> StubMix::counts(int n) const {
    std::array<int, kStubCategoryCount> out{};
    std::array<double, kStubCategoryCount> rem{};
    int assigned = 0;
    for (std::size_t k = 0; k < kStubCategoryCount; ++k) {
        double exact = fractions[k] * n;
        // Snap values that are integral up to rounding noise (0.6 * 10 = 5.999...).
        double floor_v = std::floor(exact + 1e-9);
        out[k] = static_cast<int>(floor_v);
        rem[k] = exact - floor_v;
        assigned += out[k];
    }
    std::array<std::size_t, kStubCategoryCount> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; assigned < n && k < kStubCategoryCount; ++k, ++assigned) ++out[order[k]];
    return out;
}

StubBackend::StubBackend(StubOptions opts) : opts_(std::move(opts)) {}

StubCategory StubBackend::category_of(const Prompt& p, int sample_index, int sample_count) const {
    auto counts = opts_.mix.counts(sample_count);
    std::vector<StubCategory> slots;
    slots.reserve(static_cast<std::size_t>(sample_count));
    for (std::size_t k = 0; k < kStubCategoryCount; ++k) {
        for (int i = 0; i < counts[k]; ++i) slots.push_back(static_cast<StubCategory>(k));
    }
    std::mt19937_64 rng(opts_.seed ^ stable_hash(p.id, -1));
    for (std::size_t i = slots.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(rng() % i);
        std::swap(slots[i - 1], slots[j]);
    }
    return slots.at(static_cast<std::size_t>(sample_index));
}

namespace {

constexpr std::array<std::string_view, 8> kReasoning = {
    "First, restate what the question is asking and list the known quantities.",
    "Next, set up the relationship between the quantities and simplify it carefully.",
    "Substituting the given values into the expression keeps every step exact.",
    "It helps to check the boundary cases before trusting the general formula.",
    "Working through the algebra one line at a time avoids sign mistakes.",
    "A quick estimate shows the result should be of moderate size.",
    "The constraints in the statement rule out the degenerate configuration.",
    "Combining the partial results gives a single closed form.",
};

constexpr std::string_view kLoop =
    "I will now restate the same observation again because the previous line seemed incomplete and the argument "
    "needs to be repeated once more in exactly the same words to make sure nothing in it was missed at all ";

constexpr std::string_view kHan =
    "首先我们仔细阅读题目并找出所有已知条件。然后根据这些条件建立方程并逐步化简。"
    "接着代入数值进行计算并检查每一步是否正确。最后把各部分结果合并得到最终答案。";

std::string reasoning(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::array<std::size_t, kReasoning.size()> idx{};
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
    std::string out;
    for (std::size_t k = 0; k < 3; ++k) {
        if (k) out += ' ';
        out += kReasoning[idx[k]];
    }
    return out;
}

std::string looping_text() {
    std::string out;
    for (int i = 0; i < 6; ++i) out += kLoop;
    return out;
}

std::string lookup_program(const Prompt& p, StubCodeLanguage lang) {
    Json table = Json::object();
    if (p.test_cases) {
        for (const auto& tc : *p.test_cases) table[tc.input] = tc.expected_output;
    }
    if (lang == StubCodeLanguage::Mock) return "lookup " + jsonl::dump(table) + "\n";
    return "import sys\nTABLE = " + jsonl::dump(table) + "\nsys.stdout.write(TABLE.get(sys.stdin.read(), \"\"))\n";
}

std::string constant_program(StubCodeLanguage lang) {
    if (lang == StubCodeLanguage::Mock) return "const WRONG\n";
    return "print(\"WRONG\")\n";
}

std::string_view fence_tag(StubCodeLanguage lang) { return lang == StubCodeLanguage::Mock ? "mock" : "python"; }

}  // namespace

std::string stub_wrong_answer(std::string_view reference) {
    auto v = normalize(reference);
    if (v.is_rational()) return (v.rational + Rational(1)).str();
    if (v.kind == ValueKind::SymbolicText && v.text.size() == 1 && v.text[0] >= 'A' && v.text[0] <= 'Z') {
        return std::string(1, v.text[0] == 'Z' ? 'A' : static_cast<char>(v.text[0] + 1));
    }
    return "\\text{not " + std::string(reference) + "}";
}

std::string StubBackend::render(const Prompt& p, StubCategory category, int sample_index) const {
    auto seed = opts_.seed ^ stable_hash(p.id, sample_index);
    std::string text = "Let me work through this carefully. " + reasoning(seed) + "\n\n";
    bool wrong = category == StubCategory::Wrong || category == StubCategory::Foreign;
    if (category == StubCategory::Foreign) text = std::string(kHan) + "\n\n";
    if (category == StubCategory::Repetitive) text += looping_text() + "\n\n";

    if (p.domain == Domain::Code) {
        auto lang = opts_.code_language;
        auto program = wrong ? constant_program(lang) : lookup_program(p, lang);
        text += "Wait, let me double-check the edge cases before writing the final program.\n\n";
        text += "```" + std::string(fence_tag(lang)) + "\n" + program;
        if (category != StubCategory::Unformatted) text += "```\n";
        return text;
    }

    const std::string reference = p.reference_answer.value_or("0");
    const std::string answer = wrong ? stub_wrong_answer(reference) : reference;
    text += "Wait, let me double-check the computation before committing to it.\n\n";
    if (category == StubCategory::Unformatted) {
        text += "So the answer is " + answer + ".";
    } else {
        text += "Therefore the final answer is $\\boxed{" + answer + "}$.";
    }
    return text;
}

CallResult StubBackend::complete(const ChatRequest&, const RequestContext& ctx) {
    calls_.fetch_add(1);
    CallResult out;
    if (opts_.down) {
        out.status = CallStatus::Retryable;
        out.error = "stub backend is down";
        return out;
    }
    if (!ctx.prompt) {
        out.status = CallStatus::Failed;
        out.error = "stub backend needs the prompt in the request context";
        return out;
    }
    auto category = category_of(*ctx.prompt, ctx.sample_index, ctx.sample_count);
    ChatChoice choice;
    choice.content = render(*ctx.prompt, category, ctx.sample_index);
    choice.finish_reason = "stop";
    out.reply.choices.push_back(std::move(choice));
    out.reply.reported_latency_ms = 40 + static_cast<std::int64_t>(out.reply.choices.front().content.size() % 997);
    out.status = CallStatus::Ok;
    return out;
}

}  // namespace curate
