#pragma once

#include "kgrag/gateway.hpp"
#include "kgrag/transport.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <random>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace kgrag::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "kgrag") {
        static std::atomic<unsigned> counter{0};
        auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

private:
    std::filesystem::path path_;
};

// Sleeper that records nothing and returns at once.
inline void no_sleep(std::chrono::milliseconds) {}

// OpenAI-style chat completion body carrying `content`.
inline std::string chat_reply(const std::string& content) {
    return nlohmann::json({{"choices", {{{"index", 0},
                                         {"message", {{"role", "assistant"}, {"content", content}}},
                                         {"finish_reason", "stop"}}}},
                           {"usage", {{"prompt_tokens", 1}, {"completion_tokens", 1}}}})
        .dump();
}

// Last message content of a chat request body.
inline std::string prompt_of(const HttpRequest& r) {
    return nlohmann::json::parse(r.body)["messages"].back()["content"].get<std::string>();
}

// Transport answering through a callback; records every request.
struct FnTransport : Transport {
    explicit FnTransport(std::function<HttpResponse(const HttpRequest&)> f) : fn(std::move(f)) {}
    HttpResponse send(const HttpRequest& r) override {
        {
            std::lock_guard lock(mutex);
            requests.push_back(r);
        }
        return fn(r);
    }
    std::size_t calls() {
        std::lock_guard lock(mutex);
        return requests.size();
    }
    std::function<HttpResponse(const HttpRequest&)> fn;
    std::mutex mutex;
    std::vector<HttpRequest> requests;
};

// Gateway without a cache and with a single "chat" endpoint on `t`.
inline std::unique_ptr<Gateway> chat_gateway(std::shared_ptr<Transport> t) {
    auto gw = std::make_unique<Gateway>(std::move(t), std::nullopt, RetryPolicy{}, no_sleep);
    gw->add_endpoint("chat", {"http://llm/v1", "", "m1"});
    gw->add_endpoint("embedding", {"http://llm/v1", "", "e1"});
    return gw;
}

} // namespace kgrag::testing
