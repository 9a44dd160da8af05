#include "curate/step_verifier.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <regex>

#include "curate/concurrency.hpp"
#include "curate/difficulty.hpp"
#include "curate/sampler.hpp"

namespace curate {

ChatCritic::ChatCritic(ChatBackend& backend, ChatCriticOptions opts) : backend_(backend), opts_(std::move(opts)) {}

std::string ChatCritic::ask(const CriticQuery& q) {
    const auto& tmpl = q.task == CriticTask::Compact ? opts_.compact_template : opts_.error_template;
    ChatRequest req;
    req.model = opts_.model;
    req.messages.push_back({"user", fill_template(tmpl, "{solution}", q.text)});
    req.temperature = opts_.temperature;
    req.max_tokens = opts_.max_tokens;
    int salt = (q.task == CriticTask::Compact ? 1000 : 2000) + q.iteration * 10 + q.attempt;
    req.seed = request_seed(opts_.seed_base, q.completion_key, salt);
    auto res = call_with_retry(backend_, req, {}, opts_.retry, opts_.sleeper);
    if (res.status != CallStatus::Ok) throw CriticUnavailable(res.error);
    if (res.reply.choices.empty()) throw CriticUnavailable("critic returned no choices");
    return res.reply.choices.front().content;
}

namespace {

int sample_index_of(std::string_view key) {
    auto hash = key.rfind('#');
    if (hash == std::string_view::npos) return 0;
    try {
        return std::stoi(std::string(key.substr(hash + 1)));
    } catch (const std::exception&) {
        return 0;
    }
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::unique_ptr<Critic> make_stub_critic(std::vector<int> detection_pattern, int k) {
    if (detection_pattern.empty()) detection_pattern = {0};
    return std::make_unique<ScriptedCritic>([pattern = std::move(detection_pattern), k](const CriticQuery& q) {
        if (q.task == CriticTask::Compact) {
            return std::string(
                "1. Identify the quantities given in the problem.\n"
                "2. Set up the governing relation.\n"
                "3. Solve the relation exactly.\n"
                "4. State the final answer.\n");
        }
        auto idx = static_cast<std::size_t>(std::max(0, sample_index_of(q.completion_key)));
        int detections = std::min(pattern[idx % pattern.size()], k);
        return q.iteration < detections ? std::string("The first error is in step 2. \\boxed{2}")
                                        : std::string("All steps check out. \\boxed{-1}");
    });
}

std::vector<std::string> parse_numbered_steps(std::string_view reply) {
    static const std::regex numbered(R"(^\s*\d+[.)]\s+(.*)$)");
    std::vector<std::string> steps;
    std::size_t pos = 0;
    while (pos <= reply.size()) {
        auto nl = reply.find('\n', pos);
        auto line = std::string(reply.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        std::smatch m;
        if (std::regex_match(line, m, numbered)) {
            steps.push_back(trim(m[1].str()));
        } else if (!steps.empty()) {
            auto extra = trim(line);
            if (!extra.empty()) steps.back() += (steps.back().empty() ? "" : " ") + extra;
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    std::erase_if(steps, [](const std::string& s) { return s.empty(); });
    return steps;
}

ErrorVote parse_error_vote(std::string_view reply, int step_count, int iteration, std::string_view no_error_token) {
    ErrorVote vote;
    vote.iteration = iteration;
    const std::string text(reply);

    auto from_number = [&](long long n) {
        if (n == -1 || n == 0) return;
        if (n >= 1 && n <= step_count) {
            vote.first_error_step = static_cast<int>(n);
        } else {
            vote.parse_failure = true;
        }
    };

    static const std::regex boxed(R"(\\boxed\{\s*([+-]?\d+)\s*\})");
    std::smatch m;
    std::optional<long long> last_boxed;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), boxed); it != std::sregex_iterator(); ++it) {
        last_boxed = std::stoll((*it)[1].str());
    }
    if (last_boxed) {
        from_number(*last_boxed);
        return vote;
    }
    static const std::regex declared(R"(error\s+step\s*[:=]?\s*([+-]?\d+))", std::regex::icase);
    if (std::regex_search(text, m, declared)) {
        from_number(std::stoll(m[1].str()));
        return vote;
    }
    if (!no_error_token.empty() && lower(text).find(lower(no_error_token)) != std::string::npos) return vote;
    static const std::regex bare(R"(^\s*([+-]?\d+)\s*\.?\s*$)");
    if (std::regex_match(text, m, bare)) {
        try {
            from_number(std::stoll(m[1].str()));
        } catch (const std::out_of_range&) {
            vote.parse_failure = true;
        }
        return vote;
    }
    vote.parse_failure = true;
    return vote;
}

std::optional<CompactSolution> extract_compact_solution(const CompletionRecord& r, Critic& critic) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        CriticQuery q{CriticTask::Compact, r.key(), r.completion.text, 0, attempt};
        auto steps = parse_numbered_steps(critic.ask(q));
        if (!steps.empty()) return CompactSolution{std::move(steps), r.key()};
    }
    return std::nullopt;
}

std::vector<ErrorVote> vote_first_error(const CompactSolution& sol, Critic& critic, int k,
                                        std::string_view no_error_token) {
    if (k < 1) throw std::invalid_argument("vote count k must be >= 1");
    std::string numbered;
    for (std::size_t i = 0; i < sol.steps.size(); ++i) {
        numbered += std::to_string(i + 1) + ". " + sol.steps[i] + "\n";
    }
    std::vector<ErrorVote> votes;
    votes.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        CriticQuery q{CriticTask::FindError, sol.source_completion, numbered, i, 0};
        votes.push_back(parse_error_vote(critic.ask(q), static_cast<int>(sol.steps.size()), i, no_error_token));
    }
    return votes;
}

int detected_errors(const std::vector<ErrorVote>& votes) {
    return static_cast<int>(std::count_if(votes.begin(), votes.end(), [](const ErrorVote& v) { return v.detected(); }));
}

bool accept(const std::vector<ErrorVote>& votes, const VerificationRule& rule) {
    if (votes.empty()) throw std::invalid_argument("accept needs at least one vote");
    return detected_errors(votes) <= rule.max_detected_errors;
}

VerifiedSubsets build_verified_subsets(const std::vector<CompletionRecord>& labeled, Critic& critic, int k,
                                       std::size_t max_in_flight, std::string_view no_error_token) {
    if (k < 1) throw std::invalid_argument("vote count k must be >= 1");
    std::vector<const CompletionRecord*> positives;
    for (const auto& r : labeled) {
        if (r.reward == Reward::Positive) positives.push_back(&r);
    }

    VerifiedSubsets out;
    out.outcomes.resize(positives.size());
    std::mutex mu;
    std::optional<std::string> unavailable;
    try {
        bounded_for_each(positives.size(), max_in_flight, [&](std::size_t i) {
            {
                std::lock_guard lock(mu);
                if (unavailable) return;
            }
            auto& outcome = out.outcomes[i];
            outcome.key = positives[i]->key();
            auto sol = extract_compact_solution(*positives[i], critic);
            if (!sol) return;
            outcome.extractable = true;
            outcome.votes = vote_first_error(*sol, critic, k, no_error_token);
        });
    } catch (const CriticUnavailable& e) {
        unavailable = e.what();
    }
    if (unavailable) {
        VerifiedSubsets skipped;
        skipped.skipped = true;
        skipped.skip_reason = *unavailable;
        return skipped;
    }

    for (std::size_t i = 0; i < positives.size(); ++i) {
        const auto& outcome = out.outcomes[i];
        if (!outcome.extractable) {
            out.unextractable.push_back(outcome.key);
            continue;
        }
        if (accept(outcome.votes, kLooseRule)) {
            auto rec = *positives[i];
            rec.step_verified = StepRule::Loose;
            out.loose.push_back(rec);
        }
        if (accept(outcome.votes, kStrictRule)) {
            auto rec = *positives[i];
            rec.step_verified = StepRule::Strict;
            out.strict.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace curate
