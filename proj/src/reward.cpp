#include "curate/reward.hpp"

namespace curate {

VerifierOutcome outcome_of(const CodeVerification& v) {
    if (!v.candidate || !v.judge) return VerifierOutcome::NoValidFormat;
    return v.judge->all_pass ? VerifierOutcome::True : VerifierOutcome::False;
}

Reward reward(const RewardInput& input, const std::optional<RewardEvidence>& outcome) {
    if (!outcome) throw MissingOutcomeError("no verifier outcome for " + input.prompt_id);
    bool empty_reference = std::visit(
        [](const auto& ref) { return ref.empty(); }, input.reference);
    if (empty_reference) throw MissingOutcomeError("no reference for " + input.prompt_id);
    auto o = std::visit(
        [](const auto& ev) {
            if constexpr (std::is_same_v<std::decay_t<decltype(ev)>, VerifierOutcome>) {
                return ev;
            } else {
                return outcome_of(ev);
            }
        },
        *outcome);
    return reward_for(o);
}

namespace {
std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < 20; ++i) {
        if (i) out += ", ";
        out += ids[i];
    }
    if (ids.size() > 20) out += ", ... (" + std::to_string(ids.size()) + " total)";
    return out;
}
}  // namespace

UnverifiedRecordError::UnverifiedRecordError(std::vector<std::string> ids)
    : std::runtime_error("unverified records: " + join_ids(ids)), ids_(std::move(ids)) {}

LabeledStore label_store(std::vector<CompletionRecord> records) {
    std::vector<std::string> missing;
    for (const auto& r : records) {
        if (!r.verification) missing.push_back(r.key());
    }
    if (!missing.empty()) throw UnverifiedRecordError(std::move(missing));
    LabeledStore out;
    for (auto& r : records) {
        r.reward = reward_for(r.verification->outcome);
        switch (*r.reward) {
            case Reward::Positive: ++out.counts.positive; break;
            case Reward::Zero: ++out.counts.zero; break;
            case Reward::Negative: ++out.counts.negative; break;
        }
    }
    out.records = std::move(records);
    return out;
}

}  // namespace curate
