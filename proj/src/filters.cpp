#include "curate/filters.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "curate/math_verifier.hpp"

namespace curate {

std::string_view to_string(TargetScript s) {
    switch (s) {
        case TargetScript::Latin: return "latin";
        case TargetScript::Han: return "han";
        case TargetScript::Mixed: return "mixed";
    }
    return "latin";
}

std::optional<TargetScript> parse_target_script(std::string_view s) {
    if (s == "latin") return TargetScript::Latin;
    if (s == "han") return TargetScript::Han;
    if (s == "mixed") return TargetScript::Mixed;
    return std::nullopt;
}

std::string_view to_string(FilterRule r) {
    switch (r) {
        case FilterRule::Repetition: return "Repetition";
        case FilterRule::Language: return "Language";
        case FilterRule::AnswerFormat: return "AnswerFormat";
        case FilterRule::IncompleteCode: return "IncompleteCode";
        case FilterRule::NonReflective: return "NonReflective";
        case FilterRule::ExcessiveWait: return "ExcessiveWait";
    }
    return "Repetition";
}

std::optional<FilterRule> parse_filter_rule(std::string_view s) {
    for (auto r : {FilterRule::Repetition, FilterRule::Language, FilterRule::AnswerFormat, FilterRule::IncompleteCode,
                   FilterRule::NonReflective, FilterRule::ExcessiveWait}) {
        if (to_string(r) == s) return r;
    }
    return std::nullopt;
}

std::string_view to_string(Reflectiveness r) {
    switch (r) {
        case Reflectiveness::Ok: return "ok";
        case Reflectiveness::NonReflective: return "non_reflective";
        case Reflectiveness::ExcessiveWait: return "excessive_wait";
    }
    return "ok";
}

std::vector<std::string> FilterConfig::problems() const {
    std::vector<std::string> out;
    if (ngram_window < 1) out.push_back("ngram_window must be positive");
    if (max_ngram_repeats < 1) out.push_back("max_ngram_repeats must be positive");
    if (!(max_foreign_char_ratio >= 0.0 && max_foreign_char_ratio <= 1.0)) {
        out.push_back("max_foreign_char_ratio must be in [0,1]");
    }
    if (max_wait_marker_count < 1) out.push_back("max_wait_marker_count must be positive");
    for (const auto& m : reflective_markers) {
        if (m.empty()) out.push_back("reflective_markers contains an empty marker");
    }
    return out;
}

Json verdict_to_json(const FilterVerdict& v) {
    Json rules = Json::array();
    for (auto r : v.failed_rules) rules.push_back(to_string(r));
    return Json{{"passed", v.passed}, {"failed_rules", std::move(rules)}};
}

FilterVerdict verdict_from_json(const Json& j) {
    FilterVerdict v;
    v.passed = j.at("passed").get<bool>();
    for (const auto& r : j.at("failed_rules")) {
        auto rule = parse_filter_rule(r.get<std::string>());
        if (!rule) throw std::invalid_argument("unknown filter rule " + r.get<std::string>());
        v.failed_rules.push_back(*rule);
    }
    return v;
}

// ---------------------------------------------------------------------------

bool detect_repetition(std::string_view text, const FilterConfig& cfg) {
    const auto window = static_cast<std::size_t>(std::max(1, cfg.ngram_window));
    const auto limit = static_cast<std::size_t>(std::max(1, cfg.max_ngram_repeats));

    std::unordered_map<std::string_view, std::uint32_t> vocab;
    std::vector<std::uint32_t> ids;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        auto start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) {
            auto [it, inserted] = vocab.try_emplace(text.substr(start, i - start), static_cast<std::uint32_t>(vocab.size()));
            ids.push_back(it->second);
        }
    }
    if (ids.size() < window) return false;

    // Rolling polynomial hash over token ids; buckets hold exact representatives so hash
    // collisions never merge distinct windows.
    constexpr std::uint64_t base = 1'000'003;
    std::uint64_t top = 1;
    for (std::size_t k = 1; k < window; ++k) top *= base;
    std::uint64_t h = 0;
    for (std::size_t k = 0; k < window; ++k) h = h * base + ids[k] + 1;

    struct Entry {
        std::size_t start;
        std::size_t count;
    };
    std::unordered_map<std::uint64_t, std::vector<Entry>> seen;
    const std::size_t windows = ids.size() - window + 1;
    for (std::size_t s = 0; s < windows; ++s) {
        if (s > 0) h = (h - (ids[s - 1] + 1) * top) * base + ids[s + window - 1] + 1;
        auto& bucket = seen[h];
        bool matched = false;
        for (auto& e : bucket) {
            if (std::memcmp(&ids[e.start], &ids[s], window * sizeof(std::uint32_t)) == 0) {
                if (++e.count > limit) return true;
                matched = true;
                break;
            }
        }
        if (!matched) bucket.push_back({s, 1});
    }
    return false;
}

namespace {

enum class Script { Latin, Han, Other, Ignored };

Script classify_codepoint(std::uint32_t cp) {
    if (cp < 0x80) return std::isalpha(static_cast<int>(cp)) ? Script::Latin : Script::Ignored;
    if ((cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7) || (cp >= 0x1E00 && cp <= 0x1EFF)) return Script::Latin;
    if ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) || (cp >= 0xF900 && cp <= 0xFAFF) ||
        (cp >= 0x20000 && cp <= 0x2FA1F)) {
        return Script::Han;
    }
    struct Range {
        std::uint32_t lo, hi;
    };
    // Letter blocks of non-Latin, non-Han scripts. Greek is left out: it is math notation here.
    static constexpr Range other[] = {
        {0x0400, 0x052F}, {0x0530, 0x058F}, {0x0590, 0x05FF}, {0x0600, 0x06FF}, {0x0750, 0x077F},
        {0x0900, 0x0DFF}, {0x0E00, 0x0EFF}, {0x10A0, 0x10FF}, {0x1100, 0x11FF}, {0x1200, 0x137F},
        {0x3040, 0x30FF}, {0x3130, 0x318F}, {0xAC00, 0xD7AF},
    };
    for (const auto& r : other) {
        if (cp >= r.lo && cp <= r.hi) return Script::Other;
    }
    return Script::Ignored;
}

// Decodes one UTF-8 sequence at text[i]; malformed bytes decode as U+FFFD, length 1.
std::uint32_t decode_utf8(std::string_view text, std::size_t& i) {
    auto b0 = static_cast<unsigned char>(text[i]);
    int len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
    if (len == 0 || i + static_cast<std::size_t>(len) > text.size()) {
        ++i;
        return 0xFFFD;
    }
    std::uint32_t cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
    for (int k = 1; k < len; ++k) {
        auto b = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
        if ((b >> 6) != 0x2) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

}  // namespace

ScriptCounts count_script_letters(std::string_view text, TargetScript target) {
    ScriptCounts counts;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '\\') {
            ++i;
            while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
            continue;
        }
        auto script = classify_codepoint(decode_utf8(text, i));
        if (script == Script::Ignored) continue;
        bool is_target = (script == Script::Latin && target != TargetScript::Han) ||
                         (script == Script::Han && target != TargetScript::Latin);
        if (is_target) {
            ++counts.target;
        } else {
            ++counts.foreign;
        }
    }
    return counts;
}

double foreign_letter_ratio(std::string_view text, TargetScript target) {
    auto c = count_script_letters(text, target);
    auto total = c.target + c.foreign;
    return total == 0 ? 0.0 : static_cast<double>(c.foreign) / static_cast<double>(total);
}

bool detect_foreign_language(std::string_view text, const FilterConfig& cfg) {
    return foreign_letter_ratio(text, cfg.target_script) > cfg.max_foreign_char_ratio;
}

FenceScan scan_code_fences(std::string_view text) {
    FenceScan scan;
    bool open = false;
    FencedBlock current;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        auto lead = line.find_first_not_of(" \t");
        auto body = lead == std::string_view::npos ? std::string_view{} : line.substr(lead);
        if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
        bool fence = body.starts_with("```");
        if (!open && fence) {
            open = true;
            current = {};
            auto ticks = body.find_first_not_of('`');
            auto info = ticks == std::string_view::npos ? std::string_view{} : body.substr(ticks);
            current.language = std::string(info.substr(0, info.find_first_of(" \t")));
        } else if (open && fence && body.find_first_not_of('`') == std::string_view::npos) {
            open = false;
            scan.closed.push_back(std::move(current));
        } else if (open) {
            current.body.append(line);
            current.body.push_back('\n');
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    scan.unclosed = open;
    return scan;
}

bool has_answer_format(std::string_view text, Domain domain) {
    if (domain == Domain::Code) {
        auto scan = scan_code_fences(text);
        return !scan.closed.empty() && !scan.unclosed;
    }
    return extract_final_answer(text).has_value();
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    if (needle.empty()) return 0;
    auto lower = [](std::string_view s) {
        std::string out(s);
        for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    };
    auto hay = lower(text);
    auto pin = lower(needle);
    std::size_t count = 0;
    for (auto pos = hay.find(pin); pos != std::string::npos; pos = hay.find(pin, pos + pin.size())) ++count;
    return count;
}

Reflectiveness check_reflectiveness(std::string_view text, const FilterConfig& cfg) {
    bool any = std::any_of(cfg.reflective_markers.begin(), cfg.reflective_markers.end(),
                           [&](const std::string& m) { return count_occurrences(text, m) > 0; });
    if (!any) return Reflectiveness::NonReflective;
    std::size_t waits = 0;
    for (const auto& m : cfg.wait_markers) waits += count_occurrences(text, m);
    if (waits > static_cast<std::size_t>(cfg.max_wait_marker_count)) return Reflectiveness::ExcessiveWait;
    return Reflectiveness::Ok;
}

FilterVerdict apply_filters(std::string_view text, Domain domain, const FilterConfig& cfg) {
    FilterVerdict v;
    if (detect_repetition(text, cfg)) v.failed_rules.push_back(FilterRule::Repetition);
    if (detect_foreign_language(text, cfg)) v.failed_rules.push_back(FilterRule::Language);
    if (!has_answer_format(text, domain)) v.failed_rules.push_back(FilterRule::AnswerFormat);
    if (domain == Domain::Code && scan_code_fences(text).unclosed) v.failed_rules.push_back(FilterRule::IncompleteCode);
    if (domain == Domain::Geo) {
        auto r = check_reflectiveness(text, cfg);
        if (r == Reflectiveness::NonReflective) v.failed_rules.push_back(FilterRule::NonReflective);
        if (r == Reflectiveness::ExcessiveWait) v.failed_rules.push_back(FilterRule::ExcessiveWait);
    }
    v.passed = v.failed_rules.empty();
    return v;
}

bool is_format_rule(FilterRule r) { return r == FilterRule::AnswerFormat || r == FilterRule::IncompleteCode; }

}  // namespace curate
