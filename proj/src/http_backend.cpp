#include <httplib.h>

#include <regex>
#include <stdexcept>

#include "curate/chat_backend.hpp"

namespace curate {
namespace {

class HttpChatBackend final : public ChatBackend {
public:
    explicit HttpChatBackend(HttpBackendOptions opts) : opts_(std::move(opts)) {
        static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
        std::smatch m;
        if (!std::regex_match(opts_.url, m, url_re)) {
            throw std::invalid_argument("backend url must be http(s)://host[:port]/path: " + opts_.url);
        }
        origin_ = m[1].str();
        path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
    }

    CallResult complete(const ChatRequest& req, const RequestContext&) override {
        httplib::Client client(origin_);
        client.set_connection_timeout(std::chrono::seconds(10));
        client.set_read_timeout(opts_.timeout);
        client.set_write_timeout(std::chrono::seconds(30));
        httplib::Headers headers;
        if (!opts_.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts_.api_key);

        auto res = client.Post(path_, headers, jsonl::dump(to_wire(req)), "application/json");
        CallResult out;
        if (!res) {
            out.status = CallStatus::Retryable;
            out.error = "transport: " + httplib::to_string(res.error());
            return out;
        }
        if (res->status == 429 || res->status >= 500) {
            out.status = CallStatus::Retryable;
            out.error = "http status " + std::to_string(res->status);
            return out;
        }
        if (res->status != 200) {
            out.status = CallStatus::Failed;
            out.error = "http status " + std::to_string(res->status);
            return out;
        }
        try {
            out.reply = parse_wire_reply(res->body);
            out.status = CallStatus::Ok;
        } catch (const std::invalid_argument& e) {
            out.status = CallStatus::Failed;
            out.error = std::string("malformed reply: ") + e.what();
        }
        return out;
    }

private:
    HttpBackendOptions opts_;
    std::string origin_;
    std::string path_;
};

}  // namespace

std::unique_ptr<ChatBackend> make_http_backend(HttpBackendOptions opts) {
    return std::make_unique<HttpChatBackend>(std::move(opts));
}

}  // namespace curate
