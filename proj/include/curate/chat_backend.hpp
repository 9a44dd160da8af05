#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curate/jsonl.hpp"

namespace curate {

struct Prompt;

struct ChatMessage {
    std::string role;
    std::string content;
};

// Body of an open chat-completion request.
struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 1.0;
    int max_tokens = 1024;
    int n = 1;
    std::optional<std::int64_t> seed;
};

struct ChatChoice {
    std::string content;
    std::string finish_reason;
};

struct ChatReply {
    std::vector<ChatChoice> choices;
    // In-process backends report a synthetic latency so stores stay reproducible.
    std::optional<std::int64_t> reported_latency_ms;
};

Json to_wire(const ChatRequest& req);
// Throws std::invalid_argument on a body that does not match the reply shape.
ChatReply parse_wire_reply(std::string_view body);

enum class CallStatus { Ok, Retryable, Failed };

struct CallResult {
    CallStatus status = CallStatus::Failed;
    ChatReply reply;
    std::string error;
};

// Side information for in-process backends. HTTP backends ignore it.
struct RequestContext {
    const Prompt* prompt = nullptr;
    int sample_index = 0;
    int sample_count = 1;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual CallResult complete(const ChatRequest& req, const RequestContext& ctx) = 0;
};

struct HttpBackendOptions {
    std::string url;  // e.g. http://127.0.0.1:8000/v1/chat/completions
    std::string api_key;
    std::chrono::seconds timeout{600};
};

// Transport failures, 429 and 5xx are retryable; other statuses and malformed bodies fail.
std::unique_ptr<ChatBackend> make_http_backend(HttpBackendOptions opts);

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    double multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Retries only Retryable results, sleeping initial_backoff * multiplier^k between attempts.
CallResult call_with_retry(ChatBackend& backend, const ChatRequest& req, const RequestContext& ctx,
                           const RetryPolicy& policy, const Sleeper& sleep = {});

}  // namespace curate
