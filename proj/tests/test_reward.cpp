#include <doctest.h>

#include <random>
#include <set>

#include "curate/dataset_builder.hpp"
#include "curate/filters.hpp"
#include "curate/reward.hpp"

using namespace curate;

namespace {

CompletionRecord record(std::string id, int index, std::optional<VerifierOutcome> outcome) {
    CompletionRecord r;
    r.completion.prompt_id = std::move(id);
    r.completion.sample_index = index;
    r.completion.text = "t";
    if (outcome) {
        r.verification = VerificationRecord{};
        r.verification->outcome = *outcome;
    }
    return r;
}

RewardInput math_input() { return {"p", "\\boxed{1}", std::string("1")}; }

}  // namespace

TEST_CASE("reward truth table") {
    CHECK(reward(math_input(), VerifierOutcome::True) == Reward::Positive);
    CHECK(reward(math_input(), VerifierOutcome::False) == Reward::Zero);
    CHECK(reward(math_input(), VerifierOutcome::NoValidFormat) == Reward::Negative);
    CHECK(value(Reward::Positive) == 1);
    CHECK(value(Reward::Zero) == 0);
    CHECK(value(Reward::Negative) == -1);

    std::set<int> image;
    for (auto o : {VerifierOutcome::True, VerifierOutcome::False, VerifierOutcome::NoValidFormat}) {
        image.insert(value(reward_for(o)));
    }
    CHECK(image == std::set<int>{-1, 0, 1});
    for (int v : {-1, 0, 1}) CHECK(value(*reward_from_int(v)) == v);
    CHECK_FALSE(reward_from_int(2));
}

TEST_CASE("code evidence maps onto the same branches") {
    RewardInput code{"c", "```\nx\n```", std::vector<TestCase>{{"1", "1"}}};
    CodeVerification pass;
    pass.candidate = CodeCandidate{"x", ""};
    pass.judge = JudgeResult::from_cases({CaseStatus::Pass});
    CHECK(reward(code, RewardEvidence{pass}) == Reward::Positive);

    auto fail = pass;
    fail.judge = JudgeResult::from_cases({CaseStatus::Pass, CaseStatus::Timeout});
    CHECK(reward(code, RewardEvidence{fail}) == Reward::Zero);

    CHECK(reward(code, RewardEvidence{CodeVerification{}}) == Reward::Negative);
}

TEST_CASE("missing outcome or reference") {
    CHECK_THROWS_AS(reward(math_input(), std::nullopt), MissingOutcomeError);
    RewardInput empty{"p", "x", std::string()};
    CHECK_THROWS_AS(reward(empty, VerifierOutcome::True), MissingOutcomeError);
    RewardInput no_cases{"c", "x", std::vector<TestCase>{}};
    CHECK_THROWS_AS(reward(no_cases, VerifierOutcome::True), MissingOutcomeError);
}

TEST_CASE("label_store") {
    auto labeled = label_store({record("a", 0, VerifierOutcome::True), record("a", 1, VerifierOutcome::False),
                                record("a", 2, VerifierOutcome::NoValidFormat)});
    REQUIRE(labeled.records.size() == 3);
    CHECK(labeled.records[0].reward == Reward::Positive);
    CHECK(labeled.records[1].reward == Reward::Zero);
    CHECK(labeled.records[2].reward == Reward::Negative);
    CHECK(labeled.counts.positive == 1);

    auto empty = label_store({});
    CHECK(empty.records.empty());
    CHECK(empty.counts.positive + empty.counts.zero + empty.counts.negative == 0);

    std::vector<CompletionRecord> ten;
    for (int i = 0; i < 10; ++i) ten.push_back(record("b", i, i < 6 ? VerifierOutcome::True : VerifierOutcome::False));
    auto l = label_store(ten);
    CHECK(l.counts.positive == 6);
    CHECK(l.counts.zero == 4);

    try {
        label_store({record("x", 0, VerifierOutcome::True), record("x", 1, std::nullopt), record("y", 3, std::nullopt)});
        FAIL("expected UnverifiedRecordError");
    } catch (const UnverifiedRecordError& e) {
        CHECK(e.ids() == std::vector<std::string>{"x#1", "y#3"});
    }
}

TEST_CASE("reward 1 exactly when split_pos_neg keeps a positive") {
    std::mt19937_64 rng(41);
    const VerifierOutcome outcomes[] = {VerifierOutcome::True, VerifierOutcome::False, VerifierOutcome::NoValidFormat};
    for (int round = 0; round < 100; ++round) {
        std::vector<CompletionRecord> recs;
        for (int i = 0; i < 20; ++i) recs.push_back(record("p" + std::to_string(i % 4), i, outcomes[rng() % 3]));
        auto labeled = label_store(recs);
        auto split = split_pos_neg(labeled.records);
        CHECK(split.positives.size() == labeled.counts.positive);
        CHECK(split.negatives.size() == labeled.counts.zero + labeled.counts.negative);
        for (const auto& r : split.positives) CHECK(r.reward == Reward::Positive);
        for (const auto& r : split.negatives) CHECK(r.reward != Reward::Positive);
    }
}

TEST_CASE("a filter-flagged missing answer format yields -1") {
    FilterConfig cfg;
    for (const char* text : {"no box at all", "\\boxed{1+{2}", "half \\boxed{"}) {
        auto verdict = apply_filters(text, Domain::Math, cfg);
        REQUIRE(std::count(verdict.failed_rules.begin(), verdict.failed_rules.end(), FilterRule::AnswerFormat) == 1);
        auto outcome = verify_answer(text, "2").outcome;
        CHECK(reward({"p", text, std::string("2")}, outcome) == Reward::Negative);
    }
}
