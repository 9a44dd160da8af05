#include "curate/difficulty.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>

#include "curate/concurrency.hpp"

namespace curate {

std::string_view to_string(BucketName b) {
    switch (b) {
        case BucketName::Low: return "low";
        case BucketName::Medium: return "medium";
        case BucketName::High: return "high";
    }
    return "low";
}

const std::vector<DifficultyBucket>& difficulty_buckets() {
    static const std::vector<DifficultyBucket> buckets = {
        {BucketName::Low, 3, 3},
        {BucketName::Medium, 4, 6},
        {BucketName::High, 7, 9},
    };
    return buckets;
}

namespace {
void require_level(int level) {
    if (level < kMinLevel || level > kMaxLevel) {
        throw std::out_of_range("difficulty level " + std::to_string(level) + " outside 1..10");
    }
}
}  // namespace

std::optional<DifficultyBucket> bucket_of(int level) {
    require_level(level);
    for (const auto& b : difficulty_buckets()) {
        if (b.contains(level)) return b;
    }
    return std::nullopt;
}

std::vector<std::string> BudgetSchedule::problems() const {
    std::vector<std::string> out;
    if (base_samples < 1) out.push_back("base_samples must be positive");
    if (mode == BudgetMode::MonotoneByLevel) {
        if (level_multipliers.empty()) out.push_back("MonotoneByLevel requires level multipliers");
        int prev = 0;
        for (const auto& [level, mult] : level_multipliers) {
            if (level < kMinLevel || level > kMaxLevel) {
                out.push_back("multiplier for level " + std::to_string(level) + " outside 1..10");
            }
            if (mult < 1) out.push_back("multiplier for level " + std::to_string(level) + " must be positive");
            if (mult < prev) out.push_back("multipliers decrease at level " + std::to_string(level));
            prev = std::max(prev, mult);
        }
    }
    for (const auto& [domain, n] : domain_base_samples) {
        if (n < 1) out.push_back("base samples for " + std::string(to_string(domain)) + " must be positive");
    }
    return out;
}

int sample_budget(int level, const BudgetSchedule& sched) {
    require_level(level);
    if (sched.mode == BudgetMode::Uniform) return sched.base_samples;
    auto it = sched.level_multipliers.find(level);
    if (it == sched.level_multipliers.end()) {
        throw ConfigError("no budget multiplier for difficulty level " + std::to_string(level));
    }
    return sched.base_samples * it->second;
}

int sample_budget(std::optional<int> level, const BudgetSchedule& sched) {
    if (level) return sample_budget(*level, sched);
    if (sched.mode == BudgetMode::Uniform) return sched.base_samples;
    throw ConfigError("MonotoneByLevel budget requires a scored prompt");
}

int sample_budget(const Prompt& p, const BudgetSchedule& sched) {
    auto adjusted = sched;
    if (auto it = sched.domain_base_samples.find(p.domain); it != sched.domain_base_samples.end()) {
        adjusted.base_samples = it->second;
    }
    return sample_budget(p.difficulty_level, adjusted);
}

int PassthroughScorer::score(const Prompt& p) {
    if (!p.difficulty_level) throw ScoreParseError("prompt " + p.id + " has no difficulty_level to pass through");
    return *p.difficulty_level;
}

LengthDecileScorer::LengthDecileScorer(std::vector<std::size_t> corpus_lengths) : sorted_(std::move(corpus_lengths)) {
    std::sort(sorted_.begin(), sorted_.end());
}

LengthDecileScorer::LengthDecileScorer(const PromptSet& corpus) {
    sorted_.reserve(corpus.size());
    for (const auto& p : corpus.prompts) sorted_.push_back(p.text.size());
    std::sort(sorted_.begin(), sorted_.end());
}

int LengthDecileScorer::level_for_length(std::size_t length) const {
    if (sorted_.empty()) return kMinLevel;
    auto shorter = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), length) - sorted_.begin());
    auto level = 1 + static_cast<int>((10 * shorter) / sorted_.size());
    return std::clamp(level, kMinLevel, kMaxLevel);
}

int LengthDecileScorer::score(const Prompt& p) { return level_for_length(p.text.size()); }

std::optional<int> parse_level_reply(std::string_view reply) {
    auto first = reply.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return std::nullopt;
    auto last = reply.find_last_not_of(" \t\r\n");
    auto body = reply.substr(first, last - first + 1);
    if (!body.empty() && body.back() == '.') body.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
    if (value < kMinLevel || value > kMaxLevel) return std::nullopt;
    return value;
}

std::string fill_template(std::string_view tmpl, std::string_view placeholder, std::string_view value) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto hit = tmpl.find(placeholder, pos);
        if (hit == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            return out;
        }
        out.append(tmpl.substr(pos, hit - pos));
        out.append(value);
        pos = hit + placeholder.size();
    }
}

RemoteScorer::RemoteScorer(ChatBackend& backend, std::string model, std::string question_template, RetryPolicy retry,
                           Sleeper sleeper)
    : backend_(backend),
      model_(std::move(model)),
      template_(std::move(question_template)),
      retry_(retry),
      sleeper_(std::move(sleeper)) {}

int RemoteScorer::score(const Prompt& p) {
    ChatRequest req;
    req.model = model_;
    req.messages.push_back({"user", fill_template(template_, "{question}", p.text)});
    req.temperature = 0.0;
    req.max_tokens = 8;
    RequestContext ctx;
    ctx.prompt = &p;
    auto res = call_with_retry(backend_, req, ctx, retry_, sleeper_);
    if (res.status == CallStatus::Retryable) throw ScorerUnreachable(res.error);
    if (res.status == CallStatus::Failed) throw ScoreParseError(res.error);
    auto level = parse_level_reply(res.reply.choices.front().content);
    if (!level) throw ScoreParseError("non-integer scorer reply: " + res.reply.choices.front().content);
    return *level;
}

int assign_difficulty(const Prompt& p, DifficultyScorer& scorer) {
    int level = scorer.score(p);
    if (level < kMinLevel || level > kMaxLevel) {
        throw ScoreParseError("scorer returned level " + std::to_string(level) + " outside 1..10");
    }
    return level;
}

ScoringReport score_prompts(const PromptSet& set, DifficultyScorer& scorer, std::size_t max_in_flight, int attempts) {
    ScoringReport report;
    report.scored = set;
    std::vector<char> ok(set.size(), 0);
    bounded_for_each(set.size(), max_in_flight, [&](std::size_t i) {
        auto& prompt = report.scored.prompts[i];
        for (int attempt = 1; attempt <= std::max(1, attempts); ++attempt) {
            try {
                prompt.difficulty_level = assign_difficulty(set.prompts[i], scorer);
                ok[i] = 1;
                return;
            } catch (const ScorerUnreachable&) {
                continue;
            } catch (const ScoreParseError&) {
                break;
            }
        }
        prompt.difficulty_level.reset();
    });
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (ok[i]) {
            ++report.scored_count;
        } else {
            report.unscored_ids.push_back(set.prompts[i].id);
        }
    }
    return report;
}

PromptSet select_for_augmentation(const PromptSet& set, int min_level, bool allow_unscored) {
    PromptSet out;
    out.manifest = set.manifest;
    for (const auto& p : set.prompts) {
        if (!p.difficulty_level) {
            if (!allow_unscored) throw UnscoredPromptError("prompt " + p.id + " has no difficulty level");
            continue;
        }
        if (*p.difficulty_level >= min_level) out.prompts.push_back(p);
    }
    out.manifest.count = out.prompts.size();
    return out;
}

}  // namespace curate
