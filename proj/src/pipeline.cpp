#include "curate/pipeline.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <mutex>
#include <ostream>
#include <unordered_map>

#include "curate/reward.hpp"

namespace curate {

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::Ingest, "ingest"},          {Stage::Score, "score"},         {Stage::Sample, "sample"},
    {Stage::Filter, "filter"},          {Stage::Verify, "verify"},       {Stage::Reward, "reward"},
    {Stage::BuildSft, "build-sft"},     {Stage::BuildDpo, "build-dpo"},  {Stage::BuildRl, "build-rl"},
    {Stage::VerifySteps, "verify-steps"}, {Stage::Stats, "stats"},
};

}  // namespace

std::string_view to_string(Stage s) {
    for (const auto& [stage, name] : kStageNames) {
        if (stage == s) return name;
    }
    return "unknown";
}

std::optional<Stage> parse_stage(std::string_view s) {
    for (const auto& [stage, name] : kStageNames) {
        if (name == s) return stage;
    }
    return std::nullopt;
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages = [] {
        std::vector<Stage> out;
        for (const auto& [stage, _] : kStageNames) out.push_back(stage);
        return out;
    }();
    return stages;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

RunState RunState::load(const std::filesystem::path& path) {
    RunState st;
    if (!std::filesystem::exists(path)) return st;
    try {
        auto j = Json::parse(jsonl::read_file(path));
        for (const auto& [stage, body] : j.at("stages").items()) st.markers_[stage] = body.at("hash").get<std::string>();
    } catch (const std::exception&) {
        // An unreadable state file only costs a rerun.
        st.markers_.clear();
    }
    return st;
}

void RunState::save(const std::filesystem::path& path) const {
    Json stages = Json::object();
    for (const auto& s : all_stages()) {
        auto it = markers_.find(std::string(to_string(s)));
        if (it != markers_.end()) stages[it->first] = Json{{"hash", it->second}};
    }
    jsonl::write_atomic(path, Json{{"stages", stages}}.dump(2) + "\n");
}

std::optional<std::string> RunState::marker(Stage s) const {
    auto it = markers_.find(std::string(to_string(s)));
    if (it == markers_.end()) return std::nullopt;
    return it->second;
}

void RunState::set(Stage s, std::string hash) { markers_[std::string(to_string(s))] = std::move(hash); }
void RunState::clear(Stage s) { markers_.erase(std::string(to_string(s))); }

namespace {

struct StageFiles {
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> optional_inputs;
    std::vector<std::filesystem::path> outputs;
};

StageFiles files_for(Stage s, const PipelineConfig& cfg, const Workspace& ws) {
    StageFiles f;
    switch (s) {
        case Stage::Ingest:
            for (const auto& in : cfg.inputs) f.inputs.push_back(in.path);
            f.outputs = {ws.prompts(), ws.ingest_report()};
            break;
        case Stage::Score:
            f.inputs = {ws.prompts()};
            f.outputs = {ws.scored(), ws.selected(), ws.scoring_report()};
            break;
        case Stage::Sample:
            f.inputs = {ws.selected()};
            f.outputs = {ws.completions()};
            break;
        case Stage::Filter:
            f.inputs = {ws.completions(), ws.selected()};
            f.outputs = {ws.filtered()};
            break;
        case Stage::Verify:
            f.inputs = {ws.filtered(), ws.selected()};
            f.outputs = {ws.verified()};
            break;
        case Stage::Reward:
            f.inputs = {ws.verified()};
            f.outputs = {ws.labeled()};
            break;
        case Stage::BuildSft:
            f.inputs = {ws.labeled(), ws.selected()};
            f.outputs = {ws.sft()};
            break;
        case Stage::BuildDpo:
            f.inputs = {ws.labeled(), ws.selected()};
            f.outputs = {ws.dpo()};
            break;
        case Stage::BuildRl:
            f.inputs = {ws.sft(), ws.selected()};
            f.outputs = {ws.rl()};
            break;
        case Stage::VerifySteps:
            f.inputs = {ws.labeled()};
            f.outputs = {ws.step_report()};
            break;
        case Stage::Stats:
            f.optional_inputs = {ws.ingest_report(), ws.scoring_report(), ws.completions(), ws.filtered(),
                                 ws.labeled(),       ws.sft(),            ws.dpo(),         ws.rl(),
                                 ws.step_report()};
            f.outputs = {ws.stats_json(), ws.stats_txt()};
            break;
    }
    return f;
}

Stage producer_of(const std::filesystem::path& file, const PipelineConfig& cfg, const Workspace& ws) {
    for (auto s : all_stages()) {
        for (const auto& out : files_for(s, cfg, ws).outputs) {
            if (out == file) return s;
        }
    }
    return Stage::Ingest;
}

Json backend_section(const PipelineConfig& cfg) {
    const auto& b = cfg.backend;
    Json j;
    j["kind"] = b.kind == BackendKind::Stub ? "stub" : "http";
    j["url"] = b.url;
    j["model"] = b.model;
    if (b.kind == BackendKind::Stub) {
        j["mix"] = b.stub.mix.fractions;
        j["code_language"] = b.stub.code_language == StubCodeLanguage::Mock ? "mock" : "python";
        j["down"] = b.stub.down;
    }
    return j;
}

Json section_for(Stage s, const PipelineConfig& cfg, const RunOptions& opts) {
    Json j = Json::object();
    switch (s) {
        case Stage::Ingest: {
            Json inputs = Json::array();
            for (const auto& in : cfg.inputs) {
                inputs.push_back({{"path", in.path.filename().string()},
                                  {"domain", in.domain ? std::string(to_string(*in.domain)) : "mixed"}});
            }
            j["inputs"] = inputs;
            break;
        }
        case Stage::Score:
            j["scorer"] = static_cast<int>(cfg.difficulty.scorer);
            j["select"] = cfg.difficulty.select;
            j["min_level"] = cfg.difficulty.min_level;
            j["template"] = cfg.difficulty.template_text;
            j["allow_unscored"] = opts.allow_unscored;
            if (cfg.difficulty.scorer == ScorerKind::Remote) j["backend"] = backend_section(cfg);
            break;
        case Stage::Sample: {
            j["backend"] = backend_section(cfg);
            j["seed"] = cfg.seed;
            j["n_samples"] = cfg.sampling.n_samples;
            j["temperature"] = cfg.sampling.temperature;
            j["max_tokens"] = cfg.sampling.max_tokens;
            j["system_template"] = cfg.sampling.system_template;
            j["budget_mode"] = static_cast<int>(cfg.budget.mode);
            Json mult = Json::object();
            for (const auto& [level, m] : cfg.budget.level_multipliers) mult[std::to_string(level)] = m;
            j["multipliers"] = mult;
            Json dom = Json::object();
            for (const auto& [d, n] : cfg.budget.domain_base_samples) dom[std::string(to_string(d))] = n;
            j["domain_samples"] = dom;
            break;
        }
        case Stage::Filter: {
            const auto& f = cfg.filters;
            j["ngram_window"] = f.ngram_window;
            j["max_ngram_repeats"] = f.max_ngram_repeats;
            j["target_script"] = static_cast<int>(f.target_script);
            j["max_foreign_char_ratio"] = f.max_foreign_char_ratio;
            j["reflective_markers"] = f.reflective_markers;
            j["wait_markers"] = f.wait_markers;
            j["max_wait_marker_count"] = f.max_wait_marker_count;
            break;
        }
        case Stage::Verify:
            j["unit_words"] = cfg.normalize.unit_words;
            j["per_case_timeout_ms"] = cfg.limits.per_case_timeout_ms;
            j["memory_limit_mb"] = cfg.limits.memory_limit_mb;
            j["max_output_bytes"] = cfg.limits.max_output_bytes;
            j["worker_command"] = cfg.judge.worker_command;
            break;
        case Stage::BuildDpo:
            j["cap"] = cfg.dpo_cap;
            break;
        case Stage::BuildRl:
            if (const auto* c = std::get_if<RlCount>(&cfg.rl)) {
                j["count"] = c->n;
            } else {
                j["fraction"] = std::get<RlFraction>(cfg.rl).f;
            }
            j["seed"] = cfg.seed;
            break;
        case Stage::VerifySteps: {
            const auto& st = cfg.steps;
            j["enabled"] = st.enabled;
            j["k"] = st.k;
            j["critic"] = st.critic == CriticKind::Stub ? "stub" : "http";
            j["url"] = st.url;
            j["model"] = st.model;
            j["compact_template"] = st.compact_template;
            j["error_template"] = st.error_template;
            j["no_error_token"] = st.no_error_token;
            j["stub_pattern"] = st.stub_pattern;
            j["seed"] = cfg.seed;
            break;
        }
        case Stage::Reward:
        case Stage::BuildSft:
        case Stage::Stats:
            break;
    }
    return j;
}

std::string env_or_empty(const std::string& name) {
    if (name.empty()) return {};
    const char* v = std::getenv(name.c_str());
    return v ? std::string(v) : std::string();
}

PromptSet read_prompt_file(const std::filesystem::path& path) {
    auto res = ingest_prompts(path);
    if (!res.skipped.empty()) {
        const auto& s = res.skipped.front();
        throw std::runtime_error(path.filename().string() + " line " + std::to_string(s.line_number) + ": " +
                                 s.reason + " " + s.detail);
    }
    return res.set;
}

std::unordered_map<std::string, const Prompt*> index_prompts(const PromptSet& set) {
    std::unordered_map<std::string, const Prompt*> out;
    for (const auto& p : set.prompts) out[p.id] = &p;
    return out;
}

const Prompt& lookup(const std::unordered_map<std::string, const Prompt*>& index, const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw std::runtime_error("completion refers to unknown prompt " + id);
    return *it->second;
}

bool only_format_failures(const FilterVerdict& v) {
    return std::all_of(v.failed_rules.begin(), v.failed_rules.end(), is_format_rule);
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, RunOptions opts, std::ostream& log)
    : cfg_(std::move(cfg)), opts_(opts), log_(log), ws_{cfg_.workspace} {
    // run.seed is the single source; callers may have changed it after loading.
    cfg_.backend.stub.seed = cfg_.seed;
    cfg_.sampling.seed_base = static_cast<std::int64_t>(cfg_.seed);
}

Pipeline::~Pipeline() = default;

std::string Pipeline::stage_hash(Stage s) const {
    auto files = files_for(s, cfg_, ws_);
    std::string material(to_string(s));
    material += '\n';
    material += jsonl::dump(section_for(s, cfg_, opts_));
    material += '\n';
    auto add = [&](const std::filesystem::path& p) {
        material += p.filename().string();
        material += ' ';
        material += std::filesystem::exists(p) ? sha256_hex(jsonl::read_file(p)) : "absent";
        material += '\n';
    };
    for (const auto& p : files.inputs) add(p);
    for (const auto& p : files.optional_inputs) add(p);
    return sha256_hex(material);
}

StageOutcome Pipeline::run_stage(Stage s) {
    auto files = files_for(s, cfg_, ws_);
    for (const auto& in : files.inputs) {
        if (!std::filesystem::exists(in)) {
            if (s == Stage::Ingest) throw std::runtime_error("input not found: " + in.string());
            throw StageDependencyError("stage dependency unmet: " + std::string(to_string(s)) + " needs " +
                                       in.filename().string() + " (run " +
                                       std::string(to_string(producer_of(in, cfg_, ws_))) + " first)");
        }
    }
    std::filesystem::create_directories(ws_.root);
    auto state = RunState::load(ws_.run_state());
    auto hash = stage_hash(s);
    bool outputs_present = std::all_of(files.outputs.begin(), files.outputs.end(),
                                       [](const std::filesystem::path& p) { return std::filesystem::exists(p); });
    if (!opts_.force && outputs_present && state.marker(s) == hash) {
        log_ << "[" << to_string(s) << "] up to date, skipped\n";
        return {s, true, {}};
    }
    state.clear(s);
    state.save(ws_.run_state());
    execute(s);
    state = RunState::load(ws_.run_state());
    state.set(s, hash);
    state.save(ws_.run_state());
    return {s, false, {}};
}

std::vector<StageOutcome> Pipeline::run_all() {
    std::vector<StageOutcome> out;
    for (auto s : all_stages()) {
        if (s == Stage::VerifySteps && !cfg_.steps.enabled) continue;
        out.push_back(run_stage(s));
    }
    return out;
}

void Pipeline::execute(Stage s) {
    auto say = [&](const std::string& msg) { log_ << "[" << to_string(s) << "] " << msg << "\n"; };

    switch (s) {
        case Stage::Ingest: {
            PromptSet merged;
            std::size_t ingested = 0;
            Json skipped = Json::array();
            std::set<std::string> ids;
            for (const auto& in : cfg_.inputs) {
                auto res = in.domain ? ingest_prompts(in.path, *in.domain) : ingest_prompts(in.path);
                for (const auto& sk : res.skipped) {
                    skipped.push_back({{"file", in.path.filename().string()},
                                       {"line_number", sk.line_number},
                                       {"reason", sk.reason},
                                       {"detail", sk.detail}});
                }
                for (auto& p : res.set.prompts) {
                    if (!ids.insert(p.id).second) {
                        skipped.push_back({{"file", in.path.filename().string()},
                                           {"line_number", 0},
                                           {"reason", "DuplicateId"},
                                           {"detail", p.id}});
                        continue;
                    }
                    ++ingested;
                    merged.prompts.push_back(std::move(p));
                }
                merged.manifest.source_paths.push_back(in.path.string());
            }
            merged.manifest.ingest_timestamp = utc_timestamp_now();
            auto deduped = dedupe_prompts(merged);
            emit_prompts(ws_.prompts(), deduped);
            Json report;
            report["manifest"] = {{"source_paths", deduped.manifest.source_paths},
                                  {"ingest_timestamp", deduped.manifest.ingest_timestamp},
                                  {"count", deduped.manifest.count}};
            report["ingested"] = ingested;
            report["deduped"] = deduped.size();
            report["skipped"] = skipped;
            jsonl::write_atomic(ws_.ingest_report(), report.dump(2) + "\n");
            say(std::to_string(ingested) + " prompts ingested, " + std::to_string(deduped.size()) +
                " after dedupe, " + std::to_string(skipped.size()) + " lines skipped");
            return;
        }
        case Stage::Score: {
            auto set = read_prompt_file(ws_.prompts());
            std::unique_ptr<DifficultyScorer> scorer;
            std::unique_ptr<ChatBackend> owned;
            switch (cfg_.difficulty.scorer) {
                case ScorerKind::Passthrough: scorer = std::make_unique<PassthroughScorer>(); break;
                case ScorerKind::Length: scorer = std::make_unique<LengthDecileScorer>(set); break;
                case ScorerKind::Remote: {
                    ChatBackend* backend = backend_override_;
                    if (!backend) {
                        owned = make_http_backend({cfg_.backend.url, env_or_empty(cfg_.backend.api_key_env),
                                                   std::chrono::seconds(cfg_.backend.timeout_s)});
                        backend = owned.get();
                    }
                    scorer = std::make_unique<RemoteScorer>(*backend, cfg_.backend.model, cfg_.difficulty.template_text,
                                                            RetryPolicy{}, sleeper_);
                    break;
                }
            }
            auto report = score_prompts(set, *scorer, cfg_.backend.max_in_flight);
            PromptSet selected;
            if (cfg_.difficulty.select) {
                selected = select_for_augmentation(report.scored, cfg_.difficulty.min_level, opts_.allow_unscored);
            } else {
                selected = report.scored;
                if (!report.unscored_ids.empty() && !opts_.allow_unscored) {
                    throw UnscoredPromptError(std::to_string(report.unscored_ids.size()) +
                                              " prompts are unscored; pass --allow-unscored to proceed");
                }
            }
            emit_prompts(ws_.scored(), report.scored);
            emit_prompts(ws_.selected(), selected);
            Json j;
            j["scored"] = report.scored_count;
            j["unscored"] = report.unscored_ids.size();
            j["unscored_ids"] = report.unscored_ids;
            j["selected"] = selected.size();
            j["min_level"] = cfg_.difficulty.select ? Json(cfg_.difficulty.min_level) : Json(nullptr);
            jsonl::write_atomic(ws_.scoring_report(), j.dump(2) + "\n");
            say(std::to_string(report.scored_count) + " scored, " + std::to_string(report.unscored_ids.size()) +
                " unscored, " + std::to_string(selected.size()) + " selected");
            return;
        }
        case Stage::Sample: {
            auto set = read_prompt_file(ws_.selected());
            // A store written under a different sampling config is discarded, not resumed.
            auto tag = ws_.completions();
            tag += ".config";
            auto section = sha256_hex(jsonl::dump(section_for(s, cfg_, opts_)));
            if (!std::filesystem::exists(tag) || jsonl::read_file(tag) != section) {
                std::filesystem::remove(ws_.completions());
                std::filesystem::remove(progress_path(ws_.completions()));
                jsonl::write_atomic(tag, section);
            }
            std::unique_ptr<ChatBackend> owned;
            ChatBackend* backend = backend_override_;
            if (!backend) {
                if (cfg_.backend.kind == BackendKind::Stub) {
                    owned = std::make_unique<StubBackend>(cfg_.backend.stub);
                } else {
                    owned = make_http_backend({cfg_.backend.url, env_or_empty(cfg_.backend.api_key_env),
                                               std::chrono::seconds(cfg_.backend.timeout_s)});
                }
                backend = owned.get();
            }
            SamplerOptions sopts;
            sopts.max_in_flight = cfg_.backend.max_in_flight;
            sopts.sleeper = sleeper_;
            Sampler sampler(*backend, cfg_.sampling, sopts);
            auto report = run_sampling(set, sampler, cfg_.budget, ws_.completions());
            std::size_t errors = 0;
            for (const auto& c : report.store.completions) errors += c.finish_reason == FinishReason::Error;
            say(std::to_string(report.store.completions.size()) + " completions (" +
                std::to_string(report.resumed_prompts) + " prompts resumed, " + std::to_string(errors) + " errors)");
            return;
        }
        case Stage::Filter: {
            auto set = read_prompt_file(ws_.selected());
            auto index = index_prompts(set);
            auto store = load_completion_store(ws_.completions());
            std::vector<CompletionRecord> out;
            std::size_t passed = 0;
            for (const auto& c : store.completions) {
                if (c.finish_reason == FinishReason::Error) continue;
                CompletionRecord r;
                r.completion = c;
                r.filter = apply_filters(c, lookup(index, c.prompt_id).domain, cfg_.filters);
                passed += r.filter->passed;
                out.push_back(std::move(r));
            }
            write_records(ws_.filtered(), out);
            say(std::to_string(passed) + " of " + std::to_string(out.size()) + " completions passed every filter");
            return;
        }
        case Stage::Verify: {
            auto set = read_prompt_file(ws_.selected());
            auto index = index_prompts(set);
            std::vector<CompletionRecord> todo;
            for (auto& r : read_records(ws_.filtered())) {
                if (r.filter && only_format_failures(*r.filter)) todo.push_back(std::move(r));
            }
            bool needs_judge = std::any_of(todo.begin(), todo.end(), [&](const CompletionRecord& r) {
                return lookup(index, r.completion.prompt_id).domain == Domain::Code && r.filter->passed;
            });
            std::unique_ptr<Judge> owned;
            Judge* judge = judge_override_;
            if (needs_judge && !judge) {
                if (cfg_.judge.worker_command.empty()) {
                    throw std::runtime_error("judge.worker_command is required to verify code completions");
                }
                owned = std::make_unique<WorkerPool>(cfg_.judge.worker_command, cfg_.judge.pool_size);
                judge = owned.get();
            }
            bounded_for_each(todo.size(), std::max<std::size_t>(1, cfg_.judge.pool_size), [&](std::size_t i) {
                auto& r = todo[i];
                const auto& p = lookup(index, r.completion.prompt_id);
                VerificationRecord v;
                if (!r.filter->passed) {
                    // Failed only a format rule: no answer to check.
                    v.outcome = VerifierOutcome::NoValidFormat;
                } else if (p.domain == Domain::Code) {
                    auto cv = verify_code(r.completion.text, p.test_cases.value_or(std::vector<TestCase>{}), *judge,
                                          cfg_.limits);
                    v.outcome = outcome_of(cv);
                    if (cv.candidate) v.extracted = cv.candidate->source;
                    v.judge = cv.judge;
                } else {
                    auto mv = verify_answer(r.completion.text, p.reference_answer.value_or(""), cfg_.normalize);
                    v.outcome = mv.outcome;
                    v.extracted = mv.extracted;
                    v.normalized = mv.normalized;
                }
                r.verification = std::move(v);
            });
            write_records(ws_.verified(), todo);
            say(std::to_string(todo.size()) + " completions verified");
            return;
        }
        case Stage::Reward: {
            auto labeled = label_store(read_records(ws_.verified()));
            write_records(ws_.labeled(), labeled.records);
            say(std::to_string(labeled.counts.positive) + " positive, " + std::to_string(labeled.counts.zero) +
                " zero, " + std::to_string(labeled.counts.negative) + " negative");
            return;
        }
        case Stage::BuildSft: {
            auto set = read_prompt_file(ws_.selected());
            auto split = split_pos_neg(read_records(ws_.labeled()));
            auto sft = build_sft(split.positives, set);
            write_dataset(ws_.sft(), sft, &sft_to_json);
            say(std::to_string(sft.size()) + " records");
            return;
        }
        case Stage::BuildDpo: {
            auto set = read_prompt_file(ws_.selected());
            auto split = split_pos_neg(read_records(ws_.labeled()));
            auto pairs = build_dpo_pairs(split.positives, split.negatives, set, cfg_.dpo_cap);
            write_dataset(ws_.dpo(), pairs, &dpo_to_json);
            say(std::to_string(pairs.size()) + " pairs");
            return;
        }
        case Stage::BuildRl: {
            auto set = read_prompt_file(ws_.selected());
            auto sft = read_dataset(ws_.sft(), &sft_from_json);
            auto rl = build_rl_prompts(sft, set, cfg_.rl, cfg_.seed);
            write_dataset(ws_.rl(), rl, &rl_to_json);
            say(std::to_string(rl.size()) + " prompts");
            return;
        }
        case Stage::VerifySteps: {
            auto labeled = read_records(ws_.labeled());
            std::unique_ptr<Critic> owned_critic;
            std::unique_ptr<ChatBackend> owned_backend;
            Critic* critic = critic_override_;
            if (!critic) {
                if (cfg_.steps.critic == CriticKind::Stub) {
                    owned_critic = make_stub_critic(cfg_.steps.stub_pattern, cfg_.steps.k);
                } else {
                    owned_backend = make_http_backend({cfg_.steps.url, env_or_empty(cfg_.steps.api_key_env),
                                                       std::chrono::seconds(cfg_.backend.timeout_s)});
                    ChatCriticOptions copts;
                    copts.model = cfg_.steps.model;
                    copts.compact_template = cfg_.steps.compact_template;
                    copts.error_template = cfg_.steps.error_template;
                    copts.seed_base = static_cast<std::int64_t>(cfg_.seed);
                    copts.sleeper = sleeper_;
                    owned_critic = std::make_unique<ChatCritic>(*owned_backend, copts);
                }
                critic = owned_critic.get();
            }
            auto subsets = build_verified_subsets(labeled, *critic, cfg_.steps.k, cfg_.backend.max_in_flight,
                                                  cfg_.steps.no_error_token);
            Json j;
            if (subsets.skipped) {
                std::filesystem::remove(ws_.step_strict());
                std::filesystem::remove(ws_.step_loose());
                j["skipped"] = true;
                j["reason"] = subsets.skip_reason;
                say("skipped: critic unavailable (" + subsets.skip_reason + ")");
            } else {
                write_records(ws_.step_strict(), subsets.strict);
                write_records(ws_.step_loose(), subsets.loose);
                j["skipped"] = false;
                j["k"] = cfg_.steps.k;
                j["strict"] = subsets.strict.size();
                j["loose"] = subsets.loose.size();
                j["unextractable"] = subsets.unextractable;
                say(std::to_string(subsets.strict.size()) + " strict, " + std::to_string(subsets.loose.size()) +
                    " loose, " + std::to_string(subsets.unextractable.size()) + " unextractable");
            }
            jsonl::write_atomic(ws_.step_report(), j.dump(2) + "\n");
            return;
        }
        case Stage::Stats: {
            RunArtifacts a;
            auto read_json = [](const std::filesystem::path& p) -> std::optional<Json> {
                if (!std::filesystem::exists(p)) return std::nullopt;
                return Json::parse(jsonl::read_file(p));
            };
            auto count_lines = [](const std::filesystem::path& p) -> std::size_t {
                if (!std::filesystem::exists(p)) return 0;
                std::size_t n = 0;
                jsonl::for_each_line(p, [&](std::size_t, std::string_view) { ++n; });
                return n;
            };
            if (auto j = read_json(ws_.ingest_report())) {
                a.ingested = j->at("ingested").get<std::size_t>();
                a.deduped = j->at("deduped").get<std::size_t>();
                a.skipped_lines = j->at("skipped").size();
            }
            if (auto j = read_json(ws_.scoring_report())) {
                a.scored = j->at("scored").get<std::size_t>();
                a.unscored = j->at("unscored").get<std::size_t>();
                a.selected = j->at("selected").get<std::size_t>();
            }
            if (std::filesystem::exists(ws_.completions())) a.completions = load_completion_store(ws_.completions()).completions;
            if (std::filesystem::exists(ws_.filtered())) a.filtered = read_records(ws_.filtered());
            if (std::filesystem::exists(ws_.labeled())) a.labeled = read_records(ws_.labeled());
            a.sft_records = count_lines(ws_.sft());
            a.dpo_pairs = count_lines(ws_.dpo());
            a.rl_prompts = count_lines(ws_.rl());
            if (auto j = read_json(ws_.step_report()); j && !j->at("skipped").get<bool>()) {
                a.strict_verified = j->at("strict").get<std::size_t>();
                a.loose_verified = j->at("loose").get<std::size_t>();
            }
            auto stats = compute_stats(a);
            jsonl::write_atomic(ws_.stats_json(), stats_to_json(stats).dump(2) + "\n");
            auto report = stats_report(stats);
            jsonl::write_atomic(ws_.stats_txt(), report);
            log_ << report;
            return;
        }
    }
}

}  // namespace curate
