#include "curate/code_verifier.hpp"

#include <algorithm>
#include <cctype>
#include <csignal>

#include "curate/filters.hpp"
#include "curate/subprocess.hpp"

namespace curate {

std::optional<CodeCandidate> extract_code(std::string_view text) {
    auto scan = scan_code_fences(text);
    if (scan.closed.empty()) return std::nullopt;
    auto& last = scan.closed.back();
    if (last.body.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
    return CodeCandidate{std::move(last.body), std::move(last.language)};
}

std::vector<std::string> ExecutionLimits::problems() const {
    std::vector<std::string> out;
    if (per_case_timeout_ms <= 0) out.push_back("per_case_timeout_ms must be positive");
    if (memory_limit_mb <= 0) out.push_back("memory_limit_mb must be positive");
    if (max_output_bytes <= 0) out.push_back("max_output_bytes must be positive");
    return out;
}

std::string_view to_string(CaseStatus s) {
    switch (s) {
        case CaseStatus::Pass: return "Pass";
        case CaseStatus::WrongOutput: return "WrongOutput";
        case CaseStatus::Timeout: return "Timeout";
        case CaseStatus::RuntimeError: return "RuntimeError";
        case CaseStatus::OutputTruncated: return "OutputTruncated";
    }
    return "RuntimeError";
}

std::optional<CaseStatus> parse_case_status(std::string_view s) {
    std::string key;
    for (char c : s) {
        if (c != '_' && c != '-' && c != ' ') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    for (auto st : {CaseStatus::Pass, CaseStatus::WrongOutput, CaseStatus::Timeout, CaseStatus::RuntimeError,
                    CaseStatus::OutputTruncated}) {
        std::string name;
        for (char c : to_string(st)) name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        if (name == key) return st;
    }
    return std::nullopt;
}

JudgeResult JudgeResult::from_cases(std::vector<CaseStatus> cases, std::vector<std::string> prefixes) {
    JudgeResult r;
    r.all_pass = !cases.empty() && std::all_of(cases.begin(), cases.end(), [](CaseStatus s) { return s == CaseStatus::Pass; });
    r.case_results = std::move(cases);
    r.output_prefixes = std::move(prefixes);
    return r;
}

Json judge_result_to_json(const JudgeResult& r) {
    Json cases = Json::array();
    for (std::size_t i = 0; i < r.case_results.size(); ++i) {
        Json c;
        c["status"] = to_string(r.case_results[i]);
        c["actual_output_prefix"] = i < r.output_prefixes.size() ? r.output_prefixes[i] : "";
        cases.push_back(std::move(c));
    }
    return Json{{"case_results", std::move(cases)}, {"all_pass", r.all_pass}};
}

namespace {

// A case entry is either {status, actual_output_prefix} or [status, actual_output_prefix].
std::pair<CaseStatus, std::string> parse_case_entry(const Json& c) {
    const Json* status = nullptr;
    const Json* prefix = nullptr;
    if (c.is_object()) {
        if (auto it = c.find("status"); it != c.end()) status = &*it;
        if (auto it = c.find("actual_output_prefix"); it != c.end()) prefix = &*it;
    } else if (c.is_array() && !c.empty()) {
        status = &c[0];
        if (c.size() > 1) prefix = &c[1];
    } else if (c.is_string()) {
        status = &c;
    }
    if (!status || !status->is_string()) throw std::invalid_argument("case result has no status");
    auto parsed = parse_case_status(status->get<std::string>());
    if (!parsed) throw std::invalid_argument("unknown case status " + status->get<std::string>());
    std::string out;
    if (prefix && prefix->is_string()) out = prefix->get<std::string>();
    return {*parsed, out};
}

}  // namespace

JudgeResult judge_result_from_json(const Json& j) {
    std::vector<CaseStatus> cases;
    std::vector<std::string> prefixes;
    for (const auto& c : j.at("case_results")) {
        auto [st, pre] = parse_case_entry(c);
        cases.push_back(st);
        prefixes.push_back(std::move(pre));
    }
    return JudgeResult::from_cases(std::move(cases), std::move(prefixes));
}

namespace {

std::vector<std::string_view> trimmed_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto nl = s.find('\n', pos);
        auto line = s.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        auto end = line.find_last_not_of(" \t\r\f\v");
        lines.push_back(end == std::string_view::npos ? std::string_view{} : line.substr(0, end + 1));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

}  // namespace

bool outputs_match(std::string_view actual, std::string_view expected, CompareMode mode) {
    if (mode == CompareMode::Exact) return actual == expected;
    return trimmed_lines(actual) == trimmed_lines(expected);
}

Json make_job_record(const std::string& job_id, const CodeCandidate& cand, const std::vector<TestCase>& cases,
                     const ExecutionLimits& limits) {
    Json j;
    j["job_id"] = job_id;
    j["source"] = cand.source;
    j["language_hint"] = cand.language_hint;
    Json cs = Json::array();
    for (const auto& tc : cases) {
        cs.push_back({{"input", tc.input}, {"expected_output", tc.expected_output},
                      {"compare_mode", to_string(tc.compare_mode)}});
    }
    j["cases"] = std::move(cs);
    j["limits"] = {{"per_case_timeout_ms", limits.per_case_timeout_ms},
                   {"memory_limit_mb", limits.memory_limit_mb},
                   {"max_output_bytes", limits.max_output_bytes}};
    return j;
}

WorkerReport parse_worker_report(std::string_view line, std::size_t expected_cases) {
    auto fail = [&](const std::string& why) -> WorkerProtocolError {
        std::string shown(line.substr(0, 200));
        return WorkerProtocolError("worker protocol violation (" + why + "): " + shown);
    };
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error&) {
        throw fail("report is not JSON");
    }
    if (!j.is_object()) throw fail("report is not an object");
    auto id = j.find("job_id");
    if (id == j.end() || !id->is_string()) throw fail("missing job_id");
    auto cases = j.find("case_results");
    if (cases == j.end() || !cases->is_array()) throw fail("missing case_results");
    WorkerReport report;
    report.job_id = id->get<std::string>();
    try {
        report.result = judge_result_from_json(j);
    } catch (const std::exception& e) {
        throw fail(e.what());
    }
    if (report.result.case_results.size() != expected_cases) {
        throw fail("expected " + std::to_string(expected_cases) + " case results, got " +
                   std::to_string(report.result.case_results.size()));
    }
    if (auto ap = j.find("all_pass"); ap != j.end()) {
        if (!ap->is_boolean() || ap->get<bool>() != report.result.all_pass) throw fail("all_pass disagrees with case results");
    }
    return report;
}

// ---------------------------------------------------------------------------

struct WorkerPool::Slot {
    std::unique_ptr<Subprocess> process;
};

WorkerPool::WorkerPool(std::vector<std::string> command, std::size_t size)
    : command_(std::move(command)), size_(std::max<std::size_t>(1, size)) {
    std::signal(SIGPIPE, SIG_IGN);
    for (std::size_t i = 0; i < size_; ++i) {
        auto slot = std::make_unique<Slot>();
        slot->process = std::make_unique<Subprocess>(command_);
        idle_.push_back(slot.get());
        slots_.push_back(std::move(slot));
    }
}

WorkerPool::~WorkerPool() = default;

WorkerPool::Slot* WorkerPool::acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !idle_.empty(); });
    auto* slot = idle_.back();
    idle_.pop_back();
    return slot;
}

void WorkerPool::release(Slot* slot) {
    {
        std::lock_guard lock(mu_);
        idle_.push_back(slot);
    }
    cv_.notify_one();
}

JudgeResult WorkerPool::judge(const CodeCandidate& cand, const std::vector<TestCase>& cases,
                              const ExecutionLimits& limits) {
    if (cases.empty()) throw std::invalid_argument("judge needs at least one test case");
    auto job_id = "job-" + std::to_string(next_job_.fetch_add(1));
    auto line = jsonl::dump(make_job_record(job_id, cand, cases, limits));

    auto* slot = acquire();
    struct Releaser {
        WorkerPool* pool;
        Slot* slot;
        ~Releaser() { pool->release(slot); }
    } releaser{this, slot};

    auto restart = [&] {
        slot->process = std::make_unique<Subprocess>(command_);
        restarts_.fetch_add(1);
    };
    auto crashed = [&] {
        restart();
        return JudgeResult::from_cases(std::vector<CaseStatus>(cases.size(), CaseStatus::RuntimeError));
    };

    if (!slot->process->write_line(line)) return crashed();
    auto budget = static_cast<std::int64_t>(cases.size()) * (limits.per_case_timeout_ms + kPerCaseGraceMs) +
                  kStartupSlackMs;
    std::string reply;
    auto status = slot->process->read_line(reply, std::chrono::milliseconds(budget));
    if (status != Subprocess::ReadStatus::Line) return crashed();
    WorkerReport report;
    try {
        report = parse_worker_report(reply, cases.size());
    } catch (const WorkerProtocolError&) {
        restart();
        throw;
    }
    if (report.job_id != job_id) {
        restart();
        throw WorkerProtocolError("worker protocol violation (job_id " + report.job_id + " does not match " + job_id +
                                  ")");
    }
    return report.result;
}

CodeVerification verify_code(std::string_view completion_text, const std::vector<TestCase>& cases, Judge& judge,
                             const ExecutionLimits& limits) {
    CodeVerification out;
    if (!has_answer_format(completion_text, Domain::Code)) return out;
    out.candidate = extract_code(completion_text);
    if (!out.candidate) return out;
    out.judge = judge.judge(*out.candidate, cases, limits);
    out.outcome = out.judge->all_pass ? VerifierOutcome::True : VerifierOutcome::False;
    return out;
}

}  // namespace curate
