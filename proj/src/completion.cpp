#include "curate/completion.hpp"

#include <stdexcept>

namespace curate {

std::string_view to_string(FinishReason r) {
    switch (r) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::Error: return "error";
    }
    return "error";
}

std::optional<FinishReason> parse_finish_reason(std::string_view s) {
    if (s == "stop") return FinishReason::Stop;
    if (s == "length") return FinishReason::Length;
    if (s == "error") return FinishReason::Error;
    return std::nullopt;
}

FinishReason finish_reason_from_backend(std::string_view s) {
    if (s == "length" || s == "max_tokens") return FinishReason::Length;
    return FinishReason::Stop;
}

Json completion_to_json(const Completion& c) {
    Json j;
    j["prompt_id"] = c.prompt_id;
    j["sample_index"] = c.sample_index;
    j["text"] = c.text;
    j["finish_reason"] = to_string(c.finish_reason);
    j["latency_ms"] = c.latency_ms;
    if (!c.error.empty()) j["error"] = c.error;
    return j;
}

Completion completion_from_json(const Json& j) {
    try {
        Completion c;
        c.prompt_id = j.at("prompt_id").get<std::string>();
        c.sample_index = j.at("sample_index").get<int>();
        c.text = j.at("text").get<std::string>();
        auto fr = parse_finish_reason(j.at("finish_reason").get<std::string>());
        if (!fr) throw std::invalid_argument("unknown finish_reason");
        c.finish_reason = *fr;
        c.latency_ms = j.at("latency_ms").get<std::int64_t>();
        if (auto it = j.find("error"); it != j.end()) c.error = it->get<std::string>();
        return c;
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("bad completion record: ") + e.what());
    }
}

}  // namespace curate
