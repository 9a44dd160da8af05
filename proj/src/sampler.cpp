#include "curate/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>

namespace curate {

std::vector<std::string> SamplingParams::problems() const {
    std::vector<std::string> out;
    if (n_samples < 1) out.push_back("n_samples must be >= 1");
    if (max_tokens < 1) out.push_back("max_tokens must be >= 1");
    if (!(temperature >= 0.0)) out.push_back("temperature must be non-negative");
    return out;
}

std::uint64_t stable_hash(std::string_view prompt_id, int sample_index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](unsigned char b) {
        h ^= b;
        h *= 0x100000001b3ULL;
    };
    for (char c : prompt_id) mix(static_cast<unsigned char>(c));
    mix(0);
    auto idx = static_cast<std::uint32_t>(sample_index);
    for (int k = 0; k < 4; ++k) mix(static_cast<unsigned char>((idx >> (8 * k)) & 0xFF));
    return h;
}

std::int64_t request_seed(std::int64_t seed_base, std::string_view prompt_id, int sample_index) {
    auto s = static_cast<std::uint64_t>(seed_base) + stable_hash(prompt_id, sample_index);
    return static_cast<std::int64_t>(s & 0x7FFFFFFFULL);
}

Sampler::Sampler(ChatBackend& backend, SamplingParams params, SamplerOptions opts)
    : backend_(backend), params_(std::move(params)), opts_(std::move(opts)) {}

ChatRequest Sampler::build_request(const Prompt& p, int sample_index) const {
    ChatRequest req;
    req.model = params_.model;
    if (!params_.system_template.empty()) req.messages.push_back({"system", params_.system_template});
    req.messages.push_back({"user", p.text});
    req.temperature = params_.temperature;
    req.max_tokens = params_.max_tokens;
    req.n = 1;
    req.seed = request_seed(params_.seed_base, p.id, sample_index);
    return req;
}

Completion Sampler::sample_one(const Prompt& p, int sample_index, int budget) {
    Completion c;
    c.prompt_id = p.id;
    c.sample_index = sample_index;
    auto req = build_request(p, sample_index);
    RequestContext ctx{&p, sample_index, budget};

    auto start = std::chrono::steady_clock::now();
    CallResult res;
    {
        InFlightGauge::Guard guard(&gauge_);
        res = call_with_retry(backend_, req, ctx, opts_.retry, opts_.sleeper);
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

    if (res.status != CallStatus::Ok) {
        c.finish_reason = FinishReason::Error;
        c.error = res.error.empty() ? "backend error" : res.error;
        c.latency_ms = res.reply.reported_latency_ms.value_or(elapsed.count());
        return c;
    }
    const auto& choice = res.reply.choices.front();
    c.text = choice.content;
    c.finish_reason = finish_reason_from_backend(choice.finish_reason);
    c.latency_ms = res.reply.reported_latency_ms.value_or(elapsed.count());
    return c;
}

std::vector<Completion> Sampler::sample(const Prompt& p, int budget) {
    std::vector<Completion> out(static_cast<std::size_t>(std::max(0, budget)));
    bounded_for_each(out.size(), opts_.max_in_flight,
                     [&](std::size_t i) { out[i] = sample_one(p, static_cast<int>(i), budget); });
    return out;
}

std::size_t CompletionStore::count_for(std::string_view prompt_id) const {
    return static_cast<std::size_t>(std::count_if(completions.begin(), completions.end(),
                                                  [&](const Completion& c) { return c.prompt_id == prompt_id; }));
}

std::filesystem::path progress_path(const std::filesystem::path& store_path) {
    auto p = store_path;
    p += ".progress";
    return p;
}

namespace {

struct RawStore {
    std::map<std::string, std::vector<Completion>> by_prompt;
    std::map<std::string, std::size_t> markers;
};

RawStore read_raw(const std::filesystem::path& store_path) {
    RawStore raw;
    if (std::filesystem::exists(store_path)) {
        jsonl::for_each_line(store_path, [&](std::size_t, std::string_view line) {
            try {
                auto c = completion_from_json(Json::parse(line));
                raw.by_prompt[c.prompt_id].push_back(std::move(c));
            } catch (const std::exception&) {
                // torn trailing write from an interrupted run
            }
        });
    }
    auto prog = progress_path(store_path);
    if (std::filesystem::exists(prog)) {
        jsonl::for_each_line(prog, [&](std::size_t, std::string_view line) {
            try {
                auto j = Json::parse(line);
                raw.markers[j.at("prompt_id").get<std::string>()] = j.at("count").get<std::size_t>();
            } catch (const std::exception&) {
            }
        });
    }
    return raw;
}

// Records for a prompt are valid when a marker exists and the indices are exactly
// 0..count-1.
bool block_valid(const std::vector<Completion>& block, std::size_t marker) {
    if (block.size() != marker) return false;
    std::vector<char> seen(marker, 0);
    for (const auto& c : block) {
        if (c.sample_index < 0 || static_cast<std::size_t>(c.sample_index) >= marker || seen[c.sample_index]) return false;
        seen[c.sample_index] = 1;
    }
    return true;
}

std::string marker_line(const std::string& id, std::size_t count) {
    return jsonl::dump(Json{{"prompt_id", id}, {"count", count}});
}

void write_store(const std::filesystem::path& store_path, const std::vector<std::string>& order,
                 std::map<std::string, std::vector<Completion>>& blocks) {
    std::string store;
    std::string progress;
    for (const auto& id : order) {
        auto it = blocks.find(id);
        if (it == blocks.end()) continue;
        auto& block = it->second;
        std::sort(block.begin(), block.end(),
                  [](const Completion& a, const Completion& b) { return a.sample_index < b.sample_index; });
        for (const auto& c : block) {
            store += jsonl::dump(completion_to_json(c));
            store += '\n';
        }
        progress += marker_line(id, block.size());
        progress += '\n';
    }
    jsonl::write_atomic(store_path, store);
    jsonl::write_atomic(progress_path(store_path), progress);
}

}  // namespace

SamplingRunReport run_sampling(const PromptSet& set, Sampler& sampler, const BudgetSchedule& sched,
                               const std::filesystem::path& store_path) {
    SamplingRunReport report;
    std::vector<int> budgets;
    std::vector<std::string> order;
    for (const auto& p : set.prompts) {
        budgets.push_back(sample_budget(p, sched));
        order.push_back(p.id);
    }

    auto raw = read_raw(store_path);
    std::map<std::string, std::vector<Completion>> done;
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& id = set.prompts[i].id;
        auto marker = raw.markers.find(id);
        auto block = raw.by_prompt.find(id);
        if (marker != raw.markers.end() && block != raw.by_prompt.end() &&
            marker->second == static_cast<std::size_t>(budgets[i]) && block_valid(block->second, marker->second)) {
            done[id] = std::move(block->second);
            ++report.resumed_prompts;
        } else {
            todo.push_back(i);
        }
    }
    // Drop invalid or stale records before appending new blocks.
    write_store(store_path, order, done);

    struct Task {
        std::size_t prompt;
        int index;
    };
    std::vector<Task> tasks;
    for (auto i : todo) {
        for (int k = 0; k < budgets[i]; ++k) tasks.push_back({i, k});
    }
    std::vector<std::vector<Completion>> pending(set.size());
    std::vector<int> remaining(set.size(), 0);
    for (auto i : todo) {
        pending[i].resize(static_cast<std::size_t>(budgets[i]));
        remaining[i] = budgets[i];
    }

    std::mutex append_mu;
    std::ofstream store_out(store_path, std::ios::binary | std::ios::app);
    std::ofstream progress_out(progress_path(store_path), std::ios::binary | std::ios::app);
    if (!store_out || !progress_out) throw std::runtime_error("cannot append to " + store_path.string());

    bounded_for_each(tasks.size(), sampler.max_in_flight(), [&](std::size_t t) {
        const auto& task = tasks[t];
        const auto& prompt = set.prompts[task.prompt];
        auto c = sampler.sample_one(prompt, task.index, budgets[task.prompt]);
        std::lock_guard lock(append_mu);
        pending[task.prompt][static_cast<std::size_t>(task.index)] = std::move(c);
        if (--remaining[task.prompt] == 0) {
            for (const auto& done_c : pending[task.prompt]) store_out << jsonl::dump(completion_to_json(done_c)) << '\n';
            store_out.flush();
            progress_out << marker_line(prompt.id, pending[task.prompt].size()) << '\n';
            progress_out.flush();
        }
    });
    store_out.close();
    progress_out.close();

    for (auto i : todo) done[set.prompts[i].id] = std::move(pending[i]);
    report.sampled_prompts = todo.size();
    write_store(store_path, order, done);

    for (const auto& id : order) {
        auto& block = done[id];
        report.store.complete_prompts.insert(id);
        for (auto& c : block) report.store.completions.push_back(std::move(c));
    }
    return report;
}

CompletionStore load_completion_store(const std::filesystem::path& store_path) {
    if (!std::filesystem::exists(store_path)) throw std::runtime_error("no completion store at " + store_path.string());
    CompletionStore store;
    std::vector<std::string> order;
    {
        // Preserve on-disk prompt order.
        std::set<std::string> seen;
        jsonl::for_each_line(store_path, [&](std::size_t, std::string_view line) {
            try {
                auto id = Json::parse(line).at("prompt_id").get<std::string>();
                if (seen.insert(id).second) order.push_back(id);
            } catch (const std::exception&) {
            }
        });
    }
    auto raw = read_raw(store_path);
    for (const auto& id : order) {
        auto m = raw.markers.find(id);
        auto& block = raw.by_prompt[id];
        if (m == raw.markers.end() || !block_valid(block, m->second)) continue;
        std::sort(block.begin(), block.end(),
                  [](const Completion& a, const Completion& b) { return a.sample_index < b.sample_index; });
        store.complete_prompts.insert(id);
        for (auto& c : block) store.completions.push_back(std::move(c));
    }
    return store;
}

}  // namespace curate
