#include "curate/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <set>
#include <sstream>

namespace curate {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// INI values cannot hold raw newlines; "\n" in a template stands for one.
std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == 'n') {
            out += '\n';
            ++i;
        } else {
            out += s[i];
        }
    }
    return out;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) {
        known_.insert(key);
        auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    void str(const std::string& key, std::string& out) {
        if (auto v = raw(key)) out = unescape(*v);
    }

    template <class T>
    void num(const std::string& key, T& out) {
        auto v = raw(key);
        if (!v) return;
        try {
            std::size_t used = 0;
            if constexpr (std::is_floating_point_v<T>) {
                out = static_cast<T>(std::stod(*v, &used));
            } else if constexpr (std::is_unsigned_v<T>) {
                if (!v->empty() && v->front() == '-') throw std::invalid_argument("negative");
                out = static_cast<T>(std::stoull(*v, &used));
            } else {
                out = static_cast<T>(std::stoll(*v, &used));
            }
            if (used != v->size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ConfigLoadError("BadValue: " + key + " = " + *v);
        }
    }

    void flag(const std::string& key, bool& out) {
        auto v = raw(key);
        if (!v) return;
        if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
            out = true;
        } else if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
            out = false;
        } else {
            throw ConfigLoadError("BadValue: " + key + " = " + *v);
        }
    }

    template <class E>
    void choice(const std::string& key, E& out, std::initializer_list<std::pair<std::string_view, E>> options) {
        auto v = raw(key);
        if (!v) return;
        for (const auto& [name, e] : options) {
            if (*v == name) {
                out = e;
                return;
            }
        }
        throw ConfigLoadError("BadValue: " + key + " = " + *v);
    }

    std::vector<std::string> unknown_keys() const {
        std::vector<std::string> out;
        for (const auto& [section, body] : tree_) {
            if (body.empty()) {
                out.push_back(section);
                continue;
            }
            for (const auto& [key, _] : body) {
                auto full = section + "." + key;
                if (!known_.contains(full)) out.push_back(full);
            }
        }
        return out;
    }

private:
    const pt::ptree& tree_;
    std::set<std::string> known_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigLoadError("Unreadable: " + std::string(e.what()));
    }
    Reader r(tree);
    PipelineConfig cfg;
    cfg.config_path = path;
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    if (auto v = r.raw("paths.inputs")) {
        for (const auto& item : split_list(*v)) {
            InputSpec spec;
            auto colon = item.find(':');
            std::string file = item;
            if (colon != std::string::npos) {
                auto d = parse_domain(item.substr(0, colon));
                if (d) {
                    spec.domain = d;
                    file = item.substr(colon + 1);
                }
            }
            spec.path = resolve(base, trim(file));
            cfg.inputs.push_back(std::move(spec));
        }
    }
    if (auto v = r.raw("paths.workspace")) cfg.workspace = resolve(base, *v);
    else cfg.workspace = base / "workspace";
    r.num("run.seed", cfg.seed);

    auto& b = cfg.backend;
    r.choice("backend.kind", b.kind, {{"stub", BackendKind::Stub}, {"http", BackendKind::Http}});
    r.str("backend.url", b.url);
    r.str("backend.model", b.model);
    r.str("backend.api_key_env", b.api_key_env);
    r.num("backend.max_in_flight", b.max_in_flight);
    r.num("backend.timeout_s", b.timeout_s);

    auto& mix = b.stub.mix.fractions;
    r.num("stub.correct", mix[static_cast<std::size_t>(StubCategory::Correct)]);
    r.num("stub.wrong", mix[static_cast<std::size_t>(StubCategory::Wrong)]);
    r.num("stub.unformatted", mix[static_cast<std::size_t>(StubCategory::Unformatted)]);
    r.num("stub.repetitive", mix[static_cast<std::size_t>(StubCategory::Repetitive)]);
    r.num("stub.foreign", mix[static_cast<std::size_t>(StubCategory::Foreign)]);
    r.choice("stub.code_language", b.stub.code_language,
             {{"mock", StubCodeLanguage::Mock}, {"python", StubCodeLanguage::Python}});
    r.flag("stub.down", b.stub.down);

    auto& s = cfg.sampling;
    s.model = b.model;
    r.num("sampling.n_samples", s.n_samples);
    r.num("sampling.temperature", s.temperature);
    r.num("sampling.max_tokens", s.max_tokens);
    r.str("sampling.system_template", s.system_template);

    cfg.budget.domain_base_samples[Domain::Geo] = 8;
    r.choice("budget.mode", cfg.budget.mode,
             {{"uniform", BudgetMode::Uniform}, {"monotone", BudgetMode::MonotoneByLevel}});
    r.num("budget.geo_samples", cfg.budget.domain_base_samples[Domain::Geo]);
    if (auto v = r.raw("budget.multipliers")) {
        for (const auto& item : split_list(*v)) {
            auto colon = item.find(':');
            try {
                if (colon == std::string::npos) throw std::invalid_argument("missing ':'");
                cfg.budget.level_multipliers[std::stoi(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
            } catch (const std::exception&) {
                throw ConfigLoadError("BadValue: budget.multipliers entry " + item);
            }
        }
    }

    auto& d = cfg.difficulty;
    r.choice("difficulty.scorer", d.scorer,
             {{"passthrough", ScorerKind::Passthrough}, {"length", ScorerKind::Length}, {"remote", ScorerKind::Remote}});
    r.flag("difficulty.select", d.select);
    r.num("difficulty.min_level", d.min_level);
    r.str("difficulty.template", d.template_text);

    auto& f = cfg.filters;
    r.num("filters.ngram_window", f.ngram_window);
    r.num("filters.max_ngram_repeats", f.max_ngram_repeats);
    r.choice("filters.target_script", f.target_script,
             {{"latin", TargetScript::Latin}, {"han", TargetScript::Han}, {"mixed", TargetScript::Mixed}});
    r.num("filters.max_foreign_char_ratio", f.max_foreign_char_ratio);
    if (auto v = r.raw("filters.reflective_markers")) f.reflective_markers = split_list(*v);
    if (auto v = r.raw("filters.wait_markers")) f.wait_markers = split_list(*v);
    r.num("filters.max_wait_marker_count", f.max_wait_marker_count);

    if (auto v = r.raw("verifier.unit_words")) cfg.normalize.unit_words = split_list(*v);

    if (auto v = r.raw("judge.worker_command")) {
        cfg.judge.worker_command = split_list(*v, ' ');
        if (!cfg.judge.worker_command.empty()) {
            auto& exe = cfg.judge.worker_command.front();
            if (exe.find('/') != std::string::npos) exe = resolve(base, exe).string();
        }
    }
    r.num("judge.pool_size", cfg.judge.pool_size);

    r.num("limits.per_case_timeout_ms", cfg.limits.per_case_timeout_ms);
    r.num("limits.memory_limit_mb", cfg.limits.memory_limit_mb);
    r.num("limits.max_output_bytes", cfg.limits.max_output_bytes);

    r.num("dataset.dpo_cap", cfg.dpo_cap);
    auto count = r.raw("dataset.rl_count");
    auto fraction = r.raw("dataset.rl_fraction");
    if (count && fraction) throw ConfigLoadError("Conflict: dataset.rl_count and dataset.rl_fraction are exclusive");
    if (count) {
        RlCount c;
        r.num("dataset.rl_count", c.n);
        cfg.rl = c;
    } else if (fraction) {
        RlFraction fr;
        r.num("dataset.rl_fraction", fr.f);
        cfg.rl = fr;
    }

    auto& st = cfg.steps;
    ChatCriticOptions critic_defaults;
    st.compact_template = critic_defaults.compact_template;
    st.error_template = critic_defaults.error_template;
    r.flag("step_verification.enabled", st.enabled);
    r.num("step_verification.k", st.k);
    r.choice("step_verification.critic", st.critic, {{"stub", CriticKind::Stub}, {"http", CriticKind::Http}});
    r.str("step_verification.url", st.url);
    r.str("step_verification.model", st.model);
    r.str("step_verification.api_key_env", st.api_key_env);
    r.str("step_verification.compact_template", st.compact_template);
    r.str("step_verification.error_template", st.error_template);
    r.str("step_verification.no_error_token", st.no_error_token);
    if (auto v = r.raw("step_verification.stub_pattern")) {
        st.stub_pattern.clear();
        for (const auto& item : split_list(*v)) {
            try {
                st.stub_pattern.push_back(std::stoi(item));
            } catch (const std::exception&) {
                throw ConfigLoadError("BadValue: step_verification.stub_pattern entry " + item);
            }
        }
    }

    b.stub.seed = cfg.seed;
    s.seed_base = static_cast<std::int64_t>(cfg.seed);
    s.model = b.model;
    cfg.budget.base_samples = s.n_samples;

    auto unknown = r.unknown_keys();
    if (!unknown.empty()) {
        std::string all;
        for (const auto& k : unknown) all += (all.empty() ? "" : ", ") + k;
        throw ConfigLoadError("UnknownKey: " + all);
    }
    return cfg;
}

std::vector<std::string> validate_config(const PipelineConfig& cfg, bool sampling_selected) {
    std::vector<std::string> out;
    auto add_all = [&](std::string_view code, const std::vector<std::string>& problems) {
        for (const auto& p : problems) out.push_back(std::string(code) + ": " + p);
    };
    if (cfg.inputs.empty()) out.push_back("MissingInput: paths.inputs is empty");
    for (const auto& in : cfg.inputs) {
        if (!std::filesystem::exists(in.path)) out.push_back("InputNotFound: " + in.path.string());
    }
    if (cfg.dpo_cap < 1) out.push_back("CapMustBePositive: dataset.dpo_cap = " + std::to_string(cfg.dpo_cap));
    if (const auto* f = std::get_if<RlFraction>(&cfg.rl); f && !(f->f >= 0.0 && f->f <= 1.0)) {
        out.push_back("FractionOutOfRange: dataset.rl_fraction must be in [0,1]");
    }
    if (cfg.difficulty.min_level < 1 || cfg.difficulty.min_level > 10) {
        out.push_back("LevelOutOfRange: difficulty.min_level must be in 1..10");
    }
    if (cfg.backend.max_in_flight < 1) out.push_back("InFlightMustBePositive: backend.max_in_flight");
    if (sampling_selected) {
        if (cfg.backend.kind == BackendKind::Http && cfg.backend.url.empty()) {
            out.push_back("MissingBackendUrl: backend.url is required for an http backend");
        }
        if (cfg.backend.kind == BackendKind::Http && cfg.backend.model.empty()) {
            out.push_back("MissingModel: backend.model is required for an http backend");
        }
    }
    // The scorer talks to the sampling backend; the stub only writes solutions.
    if (cfg.difficulty.scorer == ScorerKind::Remote && cfg.backend.kind != BackendKind::Http) {
        out.push_back("RemoteScorerNeedsHttp: difficulty.scorer = remote requires backend.kind = http");
    }
    if (cfg.backend.kind == BackendKind::Stub) add_all("InvalidStubMix", cfg.backend.stub.mix.problems());
    add_all("InvalidSampling", cfg.sampling.problems());
    add_all("InvalidBudget", cfg.budget.problems());
    add_all("InvalidFilters", cfg.filters.problems());
    add_all("InvalidLimits", cfg.limits.problems());
    if (cfg.judge.pool_size < 1) out.push_back("PoolMustBePositive: judge.pool_size");
    if (cfg.steps.enabled) {
        if (cfg.steps.k < 1) out.push_back("VotesMustBePositive: step_verification.k");
        if (cfg.steps.critic == CriticKind::Http && cfg.steps.url.empty()) {
            out.push_back("MissingCriticUrl: step_verification.url is required for an http critic");
        }
    }
    return out;
}

std::vector<std::string> validate_config(const std::filesystem::path& path) {
    try {
        return validate_config(load_config(path));
    } catch (const ConfigError& e) {
        return {e.what()};
    }
}

}  // namespace curate
