#include <doctest.h>

#include <chrono>
#include <random>
#include <sstream>
#include <thread>

#include "curate/code_verifier.hpp"
#include "test_util.hpp"

using namespace curate;

namespace {

std::vector<TestCase> sum_cases() {
    return {{"1 2\n", "3"}, {"10 20 30\n", "60"}, {"-5 5\n", "0"}};
}

// Reference sum program run in-process; expected outputs come from here, not from the
// worker.
std::string sum_oracle(const std::string& input) {
    std::istringstream in(input);
    long long v = 0, s = 0;
    while (in >> v) s += v;
    return std::to_string(s);
}

CodeCandidate mock(std::string src) { return {std::move(src), "mock"}; }

ExecutionLimits fast_limits(int timeout_ms = 300) {
    ExecutionLimits l;
    l.per_case_timeout_ms = timeout_ms;
    return l;
}

WorkerPool make_pool(std::size_t size = 2) { return WorkerPool({testutil::mock_worker().string()}, size); }

}  // namespace

TEST_CASE("extract_code") {
    auto one = extract_code("Here:\n```python\nprint(1)\n```\n");
    REQUIRE(one);
    CHECK(one->source == "print(1)\n");
    CHECK(one->language_hint == "python");
    auto two = extract_code("```text\nexplain\n```\nthen\n```cpp\nint main(){}\n```");
    REQUIRE(two);
    CHECK(two->source == "int main(){}\n");
    CHECK_FALSE(extract_code("```python\nprint(1)\n"));
    CHECK_FALSE(extract_code("plain words"));
    CHECK_FALSE(extract_code("```\n  \n```"));
}

TEST_CASE("outputs_match") {
    CHECK(outputs_match("3\n", "3", CompareMode::TrimmedLines));
    CHECK(outputs_match("a  \nb\n\n\n", "a\nb", CompareMode::TrimmedLines));
    CHECK_FALSE(outputs_match(" a", "a", CompareMode::TrimmedLines));
    CHECK_FALSE(outputs_match("3\n", "3", CompareMode::Exact));
    CHECK(outputs_match("3", "3", CompareMode::Exact));
}

TEST_CASE("limits and statuses") {
    CHECK(ExecutionLimits{}.problems().empty());
    CHECK(ExecutionLimits{}.per_case_timeout_ms == 10'000);
    ExecutionLimits bad;
    bad.memory_limit_mb = 0;
    CHECK(bad.problems().size() == 1);
    CHECK(parse_case_status("WrongOutput") == CaseStatus::WrongOutput);
    CHECK(parse_case_status("wrong_output") == CaseStatus::WrongOutput);
    CHECK(parse_case_status("TIMEOUT") == CaseStatus::Timeout);
    CHECK_FALSE(parse_case_status("maybe"));
    auto all = JudgeResult::from_cases({CaseStatus::Pass, CaseStatus::Pass});
    CHECK(all.all_pass);
    CHECK_FALSE(JudgeResult::from_cases({CaseStatus::Pass, CaseStatus::Timeout}).all_pass);
}

TEST_CASE("job and report records") {
    auto job = make_job_record("j1", mock("echo-sum"), sum_cases(), fast_limits());
    CHECK(job.at("job_id") == "j1");
    CHECK(job.at("source") == "echo-sum");
    CHECK(job.at("language_hint") == "mock");
    CHECK(job.at("cases").size() == 3);
    CHECK(job.at("cases")[0].at("compare_mode") == "trimmed_lines");
    CHECK(job.at("limits").at("per_case_timeout_ms") == 300);

    auto r = parse_worker_report(
        R"({"job_id":"j1","case_results":[{"status":"Pass","actual_output_prefix":"3"},{"status":"Timeout","actual_output_prefix":""}],"all_pass":false})",
        2);
    CHECK(r.job_id == "j1");
    CHECK(r.result.case_results == std::vector{CaseStatus::Pass, CaseStatus::Timeout});
    CHECK(judge_result_from_json(judge_result_to_json(r.result)).case_results == r.result.case_results);

    CHECK_THROWS_AS(parse_worker_report("not json", 1), WorkerProtocolError);
    CHECK_THROWS_AS(parse_worker_report(R"({"job_id":"j","case_results":[],"all_pass":true})", 1), WorkerProtocolError);
    // all_pass must agree with the statuses.
    CHECK_THROWS_AS(
        parse_worker_report(R"({"job_id":"j","case_results":[{"status":"WrongOutput"}],"all_pass":true})", 1),
        WorkerProtocolError);
}

TEST_CASE("worker pool judges against the mock worker") {
    auto pool = make_pool();
    auto cases = sum_cases();
    for (const auto& c : cases) REQUIRE(sum_oracle(c.input) == c.expected_output);

    auto pass = pool.judge(mock("echo-sum"), cases, fast_limits());
    CHECK(pass.case_results == std::vector(3, CaseStatus::Pass));
    CHECK(pass.all_pass);

    auto wrong = pool.judge(mock("const 3"), cases, fast_limits());
    CHECK_FALSE(wrong.all_pass);
    CHECK(wrong.case_results[0] == CaseStatus::Pass);
    CHECK(wrong.case_results[1] == CaseStatus::WrongOutput);

    CHECK(pool.judge(mock("raise"), cases, fast_limits()).case_results == std::vector(3, CaseStatus::RuntimeError));
    CHECK(pool.judge(mock("flood"), {cases[0]}, fast_limits()).case_results == std::vector{CaseStatus::OutputTruncated});

    CHECK_THROWS_AS(pool.judge(mock("echo-sum"), {}, fast_limits()), std::invalid_argument);

    // Deterministic programs judge identically on repeat.
    for (int i = 0; i < 5; ++i) CHECK(pool.judge(mock("const 3"), cases, fast_limits()).case_results == wrong.case_results);
}

TEST_CASE("timeouts stay within the limit plus grace") {
    auto pool = make_pool(1);
    const int timeout = 200;
    auto t0 = std::chrono::steady_clock::now();
    auto r = pool.judge(mock("loop"), {{"1\n", "1"}}, fast_limits(timeout));
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    CHECK(r.case_results == std::vector{CaseStatus::Timeout});
    CHECK(elapsed < timeout + WorkerPool::kPerCaseGraceMs + WorkerPool::kStartupSlackMs);
    // The worker survives a timeout and the next job is judged normally.
    CHECK(pool.judge(mock("echo-sum"), sum_cases(), fast_limits()).all_pass);
    CHECK(pool.restarts() == 0);
}

TEST_CASE("crashed and hung workers are replaced") {
    auto pool = make_pool(1);
    auto crashed = pool.judge(mock("crash"), sum_cases(), fast_limits());
    CHECK(crashed.case_results == std::vector(3, CaseStatus::RuntimeError));
    CHECK(pool.restarts() == 1);
    CHECK(pool.judge(mock("echo-sum"), sum_cases(), fast_limits()).all_pass);

    auto hung = pool.judge(mock("hang"), {{"1\n", "1"}}, fast_limits(100));
    CHECK(hung.case_results == std::vector{CaseStatus::RuntimeError});
    CHECK(pool.restarts() == 2);
    CHECK(pool.judge(mock("echo-sum"), sum_cases(), fast_limits()).all_pass);
}

TEST_CASE("protocol violations are fatal") {
    auto pool = make_pool(1);
    CHECK_THROWS_AS(pool.judge(mock("garbage"), sum_cases(), fast_limits()), WorkerProtocolError);
    CHECK_THROWS_AS(pool.judge(mock("wrong-id"), sum_cases(), fast_limits()), WorkerProtocolError);
    // The pool remains usable afterwards.
    CHECK(pool.judge(mock("echo-sum"), sum_cases(), fast_limits()).all_pass);
}

TEST_CASE("a timeout in one case does not affect the next") {
    struct ScriptedJudge : Judge {
        JudgeResult judge(const CodeCandidate&, const std::vector<TestCase>& cases, const ExecutionLimits&) override {
            std::vector<CaseStatus> st;
            for (const auto& c : cases) st.push_back(c.input == "slow" ? CaseStatus::Timeout : CaseStatus::Pass);
            return JudgeResult::from_cases(st);
        }
    } scripted;
    auto v = verify_code("```py\nx\n```", {{"slow", "1"}, {"fast", "1"}}, scripted, fast_limits());
    REQUIRE(v.judge);
    CHECK(v.judge->case_results == std::vector{CaseStatus::Timeout, CaseStatus::Pass});
    CHECK(v.outcome == VerifierOutcome::False);
}

TEST_CASE("verify_code outcomes") {
    auto pool = make_pool();
    auto ok = verify_code("Sum them.\n```mock\necho-sum\n```\n", sum_cases(), pool, fast_limits());
    CHECK(ok.outcome == VerifierOutcome::True);
    REQUIRE(ok.candidate);
    CHECK(ok.candidate->source == "echo-sum\n");
    CHECK(verify_code("```mock\nconst 3\n```", sum_cases(), pool, fast_limits()).outcome == VerifierOutcome::False);
    auto none = verify_code("```mock\necho-sum\n", sum_cases(), pool, fast_limits());
    CHECK(none.outcome == VerifierOutcome::NoValidFormat);
    CHECK_FALSE(none.judge);
}

TEST_CASE("concurrent judging through a small pool") {
    auto pool = make_pool(3);
    std::vector<std::thread> threads;
    std::vector<int> ok(12, 0);
    for (int i = 0; i < 12; ++i) {
        threads.emplace_back([&, i] {
            auto src = i % 2 ? "echo-sum" : "const 0";
            auto r = pool.judge(mock(src), sum_cases(), fast_limits());
            ok[static_cast<std::size_t>(i)] = r.all_pass == (i % 2 == 1);
        });
    }
    for (auto& t : threads) t.join();
    CHECK(std::count(ok.begin(), ok.end(), 1) == 12);
}
