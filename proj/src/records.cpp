#include "curate/records.hpp"

#include <stdexcept>

namespace curate {

std::optional<Reward> reward_from_int(int v) {
    switch (v) {
        case -1: return Reward::Negative;
        case 0: return Reward::Zero;
        case 1: return Reward::Positive;
        default: return std::nullopt;
    }
}

std::string_view to_string(StepRule r) { return r == StepRule::Strict ? "strict" : "loose"; }

Json record_to_json(const CompletionRecord& r) {
    Json j = completion_to_json(r.completion);
    if (r.filter) {
        auto verdict = verdict_to_json(*r.filter);
        for (auto& [k, v] : verdict.items()) j[k] = v;
    }
    if (r.verification) {
        const auto& v = *r.verification;
        j["outcome"] = to_string(v.outcome);
        j["extracted"] = v.extracted ? Json(*v.extracted) : Json(nullptr);
        j["normalized"] = v.normalized ? Json(*v.normalized) : Json(nullptr);
        if (v.judge) {
            auto jr = judge_result_to_json(*v.judge);
            j["case_results"] = jr["case_results"];
            j["all_pass"] = jr["all_pass"];
        }
    }
    if (r.reward) j["reward"] = value(*r.reward);
    if (r.step_verified) j["step_verified"] = to_string(*r.step_verified);
    return j;
}

CompletionRecord record_from_json(const Json& j) {
    CompletionRecord r;
    r.completion = completion_from_json(j);
    try {
        if (j.contains("passed")) r.filter = verdict_from_json(j);
        if (auto it = j.find("outcome"); it != j.end()) {
            VerificationRecord v;
            auto o = parse_verifier_outcome(it->get<std::string>());
            if (!o) throw std::invalid_argument("unknown outcome " + it->get<std::string>());
            v.outcome = *o;
            if (auto e = j.find("extracted"); e != j.end() && e->is_string()) v.extracted = e->get<std::string>();
            if (auto n = j.find("normalized"); n != j.end() && n->is_string()) v.normalized = n->get<std::string>();
            if (j.contains("case_results")) v.judge = judge_result_from_json(j);
            r.verification = std::move(v);
        }
        if (auto it = j.find("reward"); it != j.end()) {
            auto rw = reward_from_int(it->get<int>());
            if (!rw) throw std::invalid_argument("reward out of range");
            r.reward = *rw;
        }
        if (auto it = j.find("step_verified"); it != j.end()) {
            auto s = it->get<std::string>();
            if (s == "strict") {
                r.step_verified = StepRule::Strict;
            } else if (s == "loose") {
                r.step_verified = StepRule::Loose;
            } else {
                throw std::invalid_argument("unknown step_verified " + s);
            }
        }
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("bad completion record: ") + e.what());
    }
    return r;
}

std::vector<CompletionRecord> read_records(const std::filesystem::path& path) {
    std::vector<CompletionRecord> out;
    for (const auto& j : jsonl::read_all(path)) out.push_back(record_from_json(j));
    return out;
}

void write_records(const std::filesystem::path& path, const std::vector<CompletionRecord>& records) {
    std::vector<Json> js;
    js.reserve(records.size());
    for (const auto& r : records) js.push_back(record_to_json(r));
    jsonl::write_all(path, js);
}

}  // namespace curate
