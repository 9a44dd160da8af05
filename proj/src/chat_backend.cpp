#include "curate/chat_backend.hpp"

#include <stdexcept>
#include <thread>

namespace curate {

Json to_wire(const ChatRequest& req) {
    Json j;
    j["model"] = req.model;
    Json messages = Json::array();
    for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    j["messages"] = std::move(messages);
    j["temperature"] = req.temperature;
    j["max_tokens"] = req.max_tokens;
    j["n"] = req.n;
    if (req.seed) j["seed"] = *req.seed;
    return j;
}

ChatReply parse_wire_reply(std::string_view body) {
    Json j;
    try {
        j = Json::parse(body);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("reply is not JSON: ") + e.what());
    }
    auto choices = j.find("choices");
    if (choices == j.end() || !choices->is_array() || choices->empty()) {
        throw std::invalid_argument("reply has no choices");
    }
    ChatReply reply;
    for (const auto& c : *choices) {
        auto msg = c.find("message");
        if (msg == c.end() || !msg->is_object()) throw std::invalid_argument("choice has no message");
        auto content = msg->find("content");
        if (content == msg->end() || !content->is_string()) {
            throw std::invalid_argument("choice message has no string content");
        }
        ChatChoice choice;
        choice.content = content->get<std::string>();
        if (auto fr = c.find("finish_reason"); fr != c.end() && fr->is_string()) {
            choice.finish_reason = fr->get<std::string>();
        }
        reply.choices.push_back(std::move(choice));
    }
    return reply;
}

CallResult call_with_retry(ChatBackend& backend, const ChatRequest& req, const RequestContext& ctx,
                           const RetryPolicy& policy, const Sleeper& sleep) {
    auto backoff = policy.initial_backoff;
    CallResult last;
    const int attempts = std::max(1, policy.max_attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        last = backend.complete(req, ctx);
        if (last.status != CallStatus::Retryable) return last;
        if (attempt == attempts) break;
        if (sleep) {
            sleep(backoff);
        } else {
            std::this_thread::sleep_for(backoff);
        }
        backoff = std::chrono::milliseconds(
            static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy.multiplier));
    }
    last.error = "retries exhausted after " + std::to_string(attempts) + " attempts: " + last.error;
    return last;
}

}  // namespace curate
