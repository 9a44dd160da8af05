#include "curate/prompt_store.hpp"

#include <chrono>
#include <ctime>
#include <stdexcept>
#include <unordered_set>

namespace curate {

std::string_view to_string(Domain d) {
    switch (d) {
        case Domain::Math: return "math";
        case Domain::Code: return "code";
        case Domain::Geo: return "geo";
    }
    return "math";
}

std::optional<Domain> parse_domain(std::string_view s) {
    if (s == "math") return Domain::Math;
    if (s == "code") return Domain::Code;
    if (s == "geo") return Domain::Geo;
    return std::nullopt;
}

std::string_view to_string(CompareMode m) {
    return m == CompareMode::Exact ? "exact" : "trimmed_lines";
}

std::optional<CompareMode> parse_compare_mode(std::string_view s) {
    if (s == "exact") return CompareMode::Exact;
    if (s == "trimmed_lines") return CompareMode::TrimmedLines;
    return std::nullopt;
}

std::string_view to_string(Violation v) {
    switch (v) {
        case Violation::EmptyId: return "EmptyId";
        case Violation::EmptyText: return "EmptyText";
        case Violation::WrongPayloadForDomain: return "WrongPayloadForDomain";
        case Violation::MissingPayload: return "MissingPayload";
        case Violation::DifficultyOutOfRange: return "DifficultyOutOfRange";
        case Violation::EmptyExpectedOutput: return "EmptyExpectedOutput";
        case Violation::ImageRefOnNonGeo: return "ImageRefOnNonGeo";
    }
    return "Unknown";
}

std::vector<Violation> validate_prompt(const Prompt& p) {
    std::vector<Violation> out;
    if (p.id.empty()) out.push_back(Violation::EmptyId);
    if (p.text.find_first_not_of(" \t\r\n") == std::string::npos) out.push_back(Violation::EmptyText);

    if (uses_reference_answer(p.domain)) {
        if (p.test_cases.has_value()) {
            out.push_back(Violation::WrongPayloadForDomain);
        } else if (!p.reference_answer || p.reference_answer->empty()) {
            out.push_back(Violation::MissingPayload);
        }
    } else {
        if (p.reference_answer.has_value()) {
            out.push_back(Violation::WrongPayloadForDomain);
        } else if (!p.test_cases || p.test_cases->empty()) {
            out.push_back(Violation::MissingPayload);
        }
    }
    if (p.test_cases) {
        for (const auto& tc : *p.test_cases) {
            if (tc.expected_output.empty() && !tc.allow_empty_output) {
                out.push_back(Violation::EmptyExpectedOutput);
                break;
            }
        }
    }
    if (p.difficulty_level && (*p.difficulty_level < 1 || *p.difficulty_level > 10)) {
        out.push_back(Violation::DifficultyOutOfRange);
    }
    if (p.image_ref && p.domain != Domain::Geo) out.push_back(Violation::ImageRefOnNonGeo);
    return out;
}

const Prompt* PromptSet::find(std::string_view id) const {
    for (const auto& p : prompts) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

Json test_cases_to_json(const std::vector<TestCase>& cases) {
    Json out = Json::array();
    for (const auto& tc : cases) {
        Json c;
        c["input"] = tc.input;
        c["expected_output"] = tc.expected_output;
        c["compare_mode"] = to_string(tc.compare_mode);
        if (tc.allow_empty_output) c["allow_empty_output"] = true;
        out.push_back(std::move(c));
    }
    return out;
}

Json prompt_to_json(const Prompt& p) {
    Json j;
    j["id"] = p.id;
    j["domain"] = to_string(p.domain);
    j["text"] = p.text;
    if (p.reference_answer) j["reference_answer"] = *p.reference_answer;
    if (p.test_cases) j["test_cases"] = test_cases_to_json(*p.test_cases);
    if (p.difficulty_level) j["difficulty_level"] = *p.difficulty_level;
    j["source"] = p.source;
    if (p.image_ref) j["image_ref"] = *p.image_ref;
    return j;
}

namespace {

[[noreturn]] void reject(std::string_view code, const std::string& detail) {
    throw std::invalid_argument(std::string(code) + ": " + detail);
}

std::string required_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) reject("MissingField", key);
    if (!it->is_string()) reject("WrongFieldType", key);
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) reject("WrongFieldType", key);
    return it->get<std::string>();
}

TestCase case_from_json(const Json& c) {
    if (!c.is_object()) reject("WrongFieldType", "test_cases[]");
    TestCase tc;
    tc.input = required_string(c, "input");
    tc.expected_output = required_string(c, "expected_output");
    if (auto mode = optional_string(c, "compare_mode")) {
        auto parsed = parse_compare_mode(*mode);
        if (!parsed) reject("WrongFieldType", "compare_mode=" + *mode);
        tc.compare_mode = *parsed;
    }
    if (auto it = c.find("allow_empty_output"); it != c.end() && !it->is_null()) {
        if (!it->is_boolean()) reject("WrongFieldType", "allow_empty_output");
        tc.allow_empty_output = it->get<bool>();
    }
    return tc;
}

}  // namespace

std::vector<TestCase> test_cases_from_json(const Json& j) {
    if (!j.is_array()) reject("WrongFieldType", "test_cases");
    std::vector<TestCase> cases;
    for (const auto& c : j) cases.push_back(case_from_json(c));
    return cases;
}

Prompt prompt_from_json(const Json& j) {
    if (!j.is_object()) reject("ParseError", "record is not an object");
    Prompt p;
    p.id = required_string(j, "id");
    auto domain = required_string(j, "domain");
    auto parsed = parse_domain(domain);
    if (!parsed) reject("WrongFieldType", "domain=" + domain);
    p.domain = *parsed;
    p.text = required_string(j, "text");
    p.reference_answer = optional_string(j, "reference_answer");
    if (auto it = j.find("test_cases"); it != j.end() && !it->is_null()) {
        p.test_cases = test_cases_from_json(*it);
    }
    if (auto it = j.find("difficulty_level"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) reject("WrongFieldType", "difficulty_level");
        p.difficulty_level = it->get<int>();
    }
    p.source = required_string(j, "source");
    p.image_ref = optional_string(j, "image_ref");
    return p;
}

namespace {

IngestResult ingest_impl(const std::filesystem::path& path, std::optional<Domain> domain) {
    IngestResult result;
    std::unordered_set<std::string> ids;
    jsonl::for_each_line(path, [&](std::size_t number, std::string_view line) {
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            result.skipped.push_back({number, "ParseError", e.what()});
            return;
        }
        Prompt p;
        try {
            p = prompt_from_json(j);
        } catch (const std::invalid_argument& e) {
            std::string msg = e.what();
            auto colon = msg.find(':');
            result.skipped.push_back({number, msg.substr(0, colon),
                                      colon == std::string::npos ? "" : msg.substr(colon + 2)});
            return;
        }
        if (domain && p.domain != *domain) {
            result.skipped.push_back({number, "DomainMismatch", std::string(to_string(p.domain))});
            return;
        }
        auto violations = validate_prompt(p);
        if (!violations.empty()) {
            std::string detail;
            for (auto v : violations) {
                if (!detail.empty()) detail += ",";
                detail += to_string(v);
            }
            result.skipped.push_back({number, std::string(to_string(violations.front())), detail});
            return;
        }
        if (!ids.insert(p.id).second) {
            result.skipped.push_back({number, "DuplicateId", p.id});
            return;
        }
        result.set.prompts.push_back(std::move(p));
    });
    result.set.manifest.source_paths.push_back(path.string());
    result.set.manifest.ingest_timestamp = utc_timestamp_now();
    result.set.manifest.count = result.set.prompts.size();
    return result;
}

}  // namespace

IngestResult ingest_prompts(const std::filesystem::path& path, Domain domain) {
    return ingest_impl(path, domain);
}

IngestResult ingest_prompts(const std::filesystem::path& path) { return ingest_impl(path, std::nullopt); }

void emit_prompts(const std::filesystem::path& path, const PromptSet& set) {
    std::vector<Json> records;
    records.reserve(set.prompts.size());
    for (const auto& p : set.prompts) records.push_back(prompt_to_json(p));
    jsonl::write_all(path, records);
}

std::string normalize_prompt_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char ch : text) {
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(ch);
    }
    return out;
}

PromptSet dedupe_prompts(const PromptSet& set) {
    PromptSet out;
    out.manifest = set.manifest;
    std::unordered_set<std::string> seen;
    for (const auto& p : set.prompts) {
        if (seen.insert(normalize_prompt_text(p.text)).second) out.prompts.push_back(p);
    }
    out.manifest.count = out.prompts.size();
    return out;
}

std::string utc_timestamp_now() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace curate
