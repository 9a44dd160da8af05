#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curate/jsonl.hpp"
#include "curate/math_verifier.hpp"
#include "curate/prompt_store.hpp"

namespace curate {

struct CodeCandidate {
    std::string source;
    std::string language_hint;
};

// Contents of the last closed ``` block; nullopt when there is none or it is blank.
std::optional<CodeCandidate> extract_code(std::string_view text);

struct ExecutionLimits {
    int per_case_timeout_ms = 10'000;
    int memory_limit_mb = 512;
    int max_output_bytes = 1 << 20;

    std::vector<std::string> problems() const;
};

enum class CaseStatus { Pass, WrongOutput, Timeout, RuntimeError, OutputTruncated };

std::string_view to_string(CaseStatus s);
// Accepts "WrongOutput", "wrong_output" and other casings.
std::optional<CaseStatus> parse_case_status(std::string_view s);

struct JudgeResult {
    std::vector<CaseStatus> case_results;
    std::vector<std::string> output_prefixes;  // diagnostics only, parallel to case_results
    bool all_pass = false;

    static JudgeResult from_cases(std::vector<CaseStatus> cases, std::vector<std::string> prefixes = {});
};

Json judge_result_to_json(const JudgeResult& r);
JudgeResult judge_result_from_json(const Json& j);

// Exact: byte equality. TrimmedLines: trailing whitespace stripped per line and trailing
// blank lines ignored.
bool outputs_match(std::string_view actual, std::string_view expected, CompareMode mode);

// Worker protocol, one JSON object per line in each direction.
Json make_job_record(const std::string& job_id, const CodeCandidate& cand, const std::vector<TestCase>& cases,
                     const ExecutionLimits& limits);

struct WorkerReport {
    std::string job_id;
    JudgeResult result;
};

class WorkerProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws WorkerProtocolError on anything that is not a well-formed report with
// `expected_cases` case results.
WorkerReport parse_worker_report(std::string_view line, std::size_t expected_cases);

class Judge {
public:
    virtual ~Judge() = default;
    // Throws std::invalid_argument for an empty case list.
    virtual JudgeResult judge(const CodeCandidate& cand, const std::vector<TestCase>& cases,
                              const ExecutionLimits& limits) = 0;
};

// Persistent worker processes, each handling one job at a time. A worker that dies or
// overruns its deadline is killed and respawned, and the job is reported as all
// RuntimeError. Protocol violations throw WorkerProtocolError.
class WorkerPool final : public Judge {
public:
    WorkerPool(std::vector<std::string> command, std::size_t size = 4);
    ~WorkerPool() override;

    JudgeResult judge(const CodeCandidate& cand, const std::vector<TestCase>& cases,
                      const ExecutionLimits& limits) override;

    std::size_t size() const { return size_; }
    std::size_t restarts() const { return restarts_.load(); }

    // Slack added to the per-job deadline on top of cases * (timeout + 500ms).
    static constexpr int kStartupSlackMs = 2000;
    static constexpr int kPerCaseGraceMs = 500;

private:
    struct Slot;
    Slot* acquire();
    void release(Slot* slot);

    std::vector<std::string> command_;
    std::size_t size_;
    std::vector<std::unique_ptr<Slot>> slots_;
    std::vector<Slot*> idle_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::atomic<std::uint64_t> next_job_{0};
    std::atomic<std::size_t> restarts_{0};
};

struct CodeVerification {
    VerifierOutcome outcome = VerifierOutcome::NoValidFormat;
    std::optional<CodeCandidate> candidate;
    std::optional<JudgeResult> judge;
};

// NoValidFormat when the response has no usable fenced block; otherwise True iff every
// case passes.
CodeVerification verify_code(std::string_view completion_text, const std::vector<TestCase>& cases, Judge& judge,
                             const ExecutionLimits& limits);

}  // namespace curate
