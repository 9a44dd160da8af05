#include "curate/dataset_builder.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace curate {

PosNeg split_pos_neg(const std::vector<CompletionRecord>& labeled) {
    PosNeg out;
    for (const auto& r : labeled) {
        if (!r.reward) throw std::invalid_argument("record " + r.key() + " has no reward");
        (*r.reward == Reward::Positive ? out.positives : out.negatives).push_back(r);
    }
    return out;
}

std::string_view to_string(RejectedReason r) {
    return r == RejectedReason::WrongAnswer ? "wrong_answer" : "no_valid_format";
}

std::optional<RejectedReason> parse_rejected_reason(std::string_view s) {
    if (s == "wrong_answer") return RejectedReason::WrongAnswer;
    if (s == "no_valid_format") return RejectedReason::NoValidFormat;
    return std::nullopt;
}

namespace {

const Prompt& prompt_for(const PromptSet& prompts, const std::string& id) {
    const auto* p = prompts.find(id);
    if (!p) throw UnknownPromptError("no prompt with id " + id);
    return *p;
}

bool by_index(const CompletionRecord& a, const CompletionRecord& b) {
    return a.completion.sample_index < b.completion.sample_index;
}

}  // namespace

std::vector<SFTRecord> build_sft(const std::vector<CompletionRecord>& positives, const PromptSet& prompts) {
    std::vector<SFTRecord> out;
    out.reserve(positives.size());
    for (const auto& r : positives) {
        const auto& p = prompt_for(prompts, r.completion.prompt_id);
        out.push_back({p.id, r.completion.sample_index, p.text, r.completion.text, p.difficulty_level, p.domain,
                       p.source});
    }
    return out;
}

std::vector<PreferencePair> build_dpo_pairs(const std::vector<CompletionRecord>& positives,
                                            const std::vector<CompletionRecord>& negatives, const PromptSet& prompts,
                                            int cap) {
    if (cap < 1) throw std::invalid_argument("dpo cap must be positive");
    std::vector<std::string> order;
    std::map<std::string, std::vector<CompletionRecord>> chosen;
    std::map<std::string, std::vector<CompletionRecord>> rejected;
    for (const auto& r : positives) {
        auto& bucket = chosen[r.completion.prompt_id];
        if (bucket.empty()) order.push_back(r.completion.prompt_id);
        bucket.push_back(r);
    }
    for (const auto& r : negatives) rejected[r.completion.prompt_id].push_back(r);

    std::vector<PreferencePair> out;
    for (const auto& id : order) {
        auto neg = rejected.find(id);
        if (neg == rejected.end()) continue;
        const auto& p = prompt_for(prompts, id);
        auto& pos = chosen[id];
        std::sort(pos.begin(), pos.end(), by_index);
        auto& rej = neg->second;
        std::sort(rej.begin(), rej.end(), [](const CompletionRecord& a, const CompletionRecord& b) {
            int ra = a.reward ? value(*a.reward) : -1;
            int rb = b.reward ? value(*b.reward) : -1;
            if (ra != rb) return ra > rb;
            return by_index(a, b);
        });
        int made = 0;
        for (const auto& r : rej) {
            for (const auto& c : pos) {
                if (made == cap) break;
                PreferencePair pair;
                pair.prompt_id = id;
                pair.prompt_text = p.text;
                pair.chosen_index = c.completion.sample_index;
                pair.rejected_index = r.completion.sample_index;
                pair.chosen = c.completion.text;
                pair.rejected = r.completion.text;
                pair.rejected_reason =
                    r.reward == Reward::Zero ? RejectedReason::WrongAnswer : RejectedReason::NoValidFormat;
                pair.domain = p.domain;
                out.push_back(std::move(pair));
                ++made;
            }
            if (made == cap) break;
        }
    }
    return out;
}

std::vector<RLPromptRecord> build_rl_prompts(const std::vector<SFTRecord>& sft, const PromptSet& prompts,
                                             const RlSelection& selection, std::uint64_t seed) {
    std::vector<std::string> distinct;
    std::set<std::string> seen;
    for (const auto& r : sft) {
        if (seen.insert(r.prompt_id).second) distinct.push_back(r.prompt_id);
    }
    const auto n = distinct.size();
    std::size_t want = 0;
    if (const auto* c = std::get_if<RlCount>(&selection)) {
        want = c->n;
    } else {
        double f = std::get<RlFraction>(selection).f;
        if (!(f >= 0.0 && f <= 1.0)) throw OversizedSelectionError("rl fraction must be in [0,1]");
        want = static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
    }
    if (want > n) {
        throw OversizedSelectionError("requested " + std::to_string(want) + " RL prompts but only " +
                                      std::to_string(n) + " distinct SFT prompts exist");
    }

    // Fisher-Yates on raw engine output so the selection is identical across standard
    // library implementations.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
    idx.resize(want);
    std::sort(idx.begin(), idx.end());

    std::vector<RLPromptRecord> out;
    out.reserve(want);
    for (auto i : idx) {
        const auto& p = prompt_for(prompts, distinct[i]);
        RLPromptRecord r;
        r.prompt_id = p.id;
        r.prompt_text = p.text;
        if (p.domain == Domain::Code) {
            if (!p.test_cases) throw std::invalid_argument("code prompt " + p.id + " has no test cases");
            r.reference = *p.test_cases;
        } else {
            if (!p.reference_answer) throw std::invalid_argument("prompt " + p.id + " has no reference answer");
            r.reference = *p.reference_answer;
        }
        r.difficulty_level = p.difficulty_level;
        r.domain = p.domain;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

std::optional<int> level_from(const Json& j) {
    auto it = j.find("difficulty_level");
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<int>();
}

Domain domain_from(const Json& j) {
    auto d = parse_domain(j.at("domain").get<std::string>());
    if (!d) throw std::invalid_argument("unknown domain in dataset record");
    return *d;
}

void put_level(Json& j, const std::optional<int>& level) {
    if (level) {
        j["difficulty_level"] = *level;
    } else {
        j["difficulty_level"] = nullptr;
    }
}

}  // namespace

Json sft_to_json(const SFTRecord& r) {
    Json j;
    j["prompt"] = r.prompt_text;
    j["response"] = r.response_text;
    j["prompt_id"] = r.prompt_id;
    j["sample_index"] = r.sample_index;
    j["domain"] = to_string(r.domain);
    put_level(j, r.difficulty_level);
    j["source"] = r.source;
    return j;
}

SFTRecord sft_from_json(const Json& j) {
    SFTRecord r;
    r.prompt_text = j.at("prompt").get<std::string>();
    r.response_text = j.at("response").get<std::string>();
    r.prompt_id = j.at("prompt_id").get<std::string>();
    r.sample_index = j.at("sample_index").get<int>();
    r.domain = domain_from(j);
    r.difficulty_level = level_from(j);
    r.source = j.at("source").get<std::string>();
    return r;
}

Json dpo_to_json(const PreferencePair& p) {
    Json j;
    j["prompt"] = p.prompt_text;
    j["chosen"] = p.chosen;
    j["rejected"] = p.rejected;
    j["prompt_id"] = p.prompt_id;
    j["chosen_index"] = p.chosen_index;
    j["rejected_index"] = p.rejected_index;
    j["rejected_reason"] = to_string(p.rejected_reason);
    j["domain"] = to_string(p.domain);
    return j;
}

PreferencePair dpo_from_json(const Json& j) {
    PreferencePair p;
    p.prompt_text = j.at("prompt").get<std::string>();
    p.chosen = j.at("chosen").get<std::string>();
    p.rejected = j.at("rejected").get<std::string>();
    p.prompt_id = j.at("prompt_id").get<std::string>();
    p.chosen_index = j.at("chosen_index").get<int>();
    p.rejected_index = j.at("rejected_index").get<int>();
    auto reason = parse_rejected_reason(j.at("rejected_reason").get<std::string>());
    if (!reason) throw std::invalid_argument("unknown rejected_reason");
    p.rejected_reason = *reason;
    p.domain = domain_from(j);
    return p;
}

Json rl_to_json(const RLPromptRecord& r) {
    Json j;
    j["prompt"] = r.prompt_text;
    if (const auto* ans = std::get_if<std::string>(&r.reference)) {
        j["reference_answer"] = *ans;
    } else {
        j["test_cases"] = test_cases_to_json(std::get<std::vector<TestCase>>(r.reference));
    }
    j["prompt_id"] = r.prompt_id;
    j["domain"] = to_string(r.domain);
    put_level(j, r.difficulty_level);
    return j;
}

RLPromptRecord rl_from_json(const Json& j) {
    RLPromptRecord r;
    r.prompt_text = j.at("prompt").get<std::string>();
    if (auto it = j.find("reference_answer"); it != j.end()) {
        r.reference = it->get<std::string>();
    } else {
        r.reference = test_cases_from_json(j.at("test_cases"));
    }
    r.prompt_id = j.at("prompt_id").get<std::string>();
    r.domain = domain_from(j);
    r.difficulty_level = level_from(j);
    return r;
}

CurationStats compute_stats(const RunArtifacts& a) {
    CurationStats s;
    s.ingested = a.ingested;
    s.skipped_lines = a.skipped_lines;
    s.deduped = a.deduped;
    s.scored = a.scored;
    s.unscored = a.unscored;
    s.selected = a.selected;
    s.sampled = a.completions.size();
    s.sample_errors = static_cast<std::size_t>(std::count_if(
        a.completions.begin(), a.completions.end(), [](const Completion& c) { return c.finish_reason == FinishReason::Error; }));
    for (const auto& r : a.filtered) {
        if (!r.filter) continue;
        if (r.filter->passed) ++s.filter_passed;
        for (auto rule : r.filter->failed_rules) ++s.filter_failures[std::string(to_string(rule))];
    }
    s.verification_input = a.labeled.size();
    for (const auto& r : a.labeled) {
        if (!r.verification) continue;
        switch (r.verification->outcome) {
            case VerifierOutcome::True: ++s.verified_true; break;
            case VerifierOutcome::False: ++s.verified_false; break;
            case VerifierOutcome::NoValidFormat: ++s.no_valid_format; break;
        }
    }
    s.sft_records = a.sft_records;
    s.dpo_pairs = a.dpo_pairs;
    s.rl_prompts = a.rl_prompts;
    s.strict_verified = a.strict_verified;
    s.loose_verified = a.loose_verified;
    return s;
}

Json stats_to_json(const CurationStats& s) {
    Json j;
    j["ingested"] = s.ingested;
    j["skipped_lines"] = s.skipped_lines;
    j["deduped"] = s.deduped;
    j["scored"] = s.scored;
    j["unscored"] = s.unscored;
    j["selected"] = s.selected;
    j["sampled"] = s.sampled;
    j["sample_errors"] = s.sample_errors;
    j["filter_passed"] = s.filter_passed;
    Json failures = Json::object();
    for (const auto& [rule, n] : s.filter_failures) failures[rule] = n;
    j["filter_failures"] = std::move(failures);
    j["verification_input"] = s.verification_input;
    j["verified_true"] = s.verified_true;
    j["verified_false"] = s.verified_false;
    j["no_valid_format"] = s.no_valid_format;
    j["sft_records"] = s.sft_records;
    j["dpo_pairs"] = s.dpo_pairs;
    j["rl_prompts"] = s.rl_prompts;
    j["strict_verified"] = s.strict_verified ? Json(*s.strict_verified) : Json(nullptr);
    j["loose_verified"] = s.loose_verified ? Json(*s.loose_verified) : Json(nullptr);
    return j;
}

CurationStats stats_from_json(const Json& j) {
    CurationStats s;
    auto n = [&](const char* key) { return j.at(key).get<std::size_t>(); };
    s.ingested = n("ingested");
    s.skipped_lines = n("skipped_lines");
    s.deduped = n("deduped");
    s.scored = n("scored");
    s.unscored = n("unscored");
    s.selected = n("selected");
    s.sampled = n("sampled");
    s.sample_errors = n("sample_errors");
    s.filter_passed = n("filter_passed");
    for (const auto& [rule, count] : j.at("filter_failures").items()) s.filter_failures[rule] = count.get<std::size_t>();
    s.verification_input = n("verification_input");
    s.verified_true = n("verified_true");
    s.verified_false = n("verified_false");
    s.no_valid_format = n("no_valid_format");
    s.sft_records = n("sft_records");
    s.dpo_pairs = n("dpo_pairs");
    s.rl_prompts = n("rl_prompts");
    if (!j.at("strict_verified").is_null()) s.strict_verified = n("strict_verified");
    if (!j.at("loose_verified").is_null()) s.loose_verified = n("loose_verified");
    return s;
}

std::string stats_report(const CurationStats& s) {
    std::ostringstream out;
    auto row = [&](std::string_view label, std::size_t v) {
        out << "  " << label << std::string(22 - std::min<std::size_t>(label.size(), 21), ' ') << v << '\n';
    };
    out << "prompts\n";
    row("ingested", s.ingested);
    row("skipped lines", s.skipped_lines);
    row("after dedupe", s.deduped);
    row("scored", s.scored);
    row("unscored", s.unscored);
    row("selected", s.selected);
    out << "completions\n";
    row("sampled", s.sampled);
    row("sample errors", s.sample_errors);
    row("passed filters", s.filter_passed);
    for (const auto& [rule, n] : s.filter_failures) row("failed " + rule, n);
    row("verified", s.verification_input);
    row("  true", s.verified_true);
    row("  false", s.verified_false);
    row("  no valid format", s.no_valid_format);
    out << "datasets\n";
    row("sft records", s.sft_records);
    row("dpo pairs", s.dpo_pairs);
    row("rl prompts", s.rl_prompts);
    if (s.strict_verified) row("step strict", *s.strict_verified);
    if (s.loose_verified) row("step loose", *s.loose_verified);
    if (!s.strict_verified && !s.loose_verified) out << "  step verification     not run\n";
    return out.str();
}

}  // namespace curate
