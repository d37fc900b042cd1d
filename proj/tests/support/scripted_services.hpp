#pragma once

// Deterministic stand-ins for the chat, embedding and UMLS services. The
// same handler backs an in-process Transport and a local HTTP server.

#include "kgrag/config.hpp"
#include "kgrag/transport.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace kgrag::testing {

struct FailureModes {
    bool extraction_prose = false;  // extraction answers in prose, no JSON
    bool translation_error = false; // translation calls get HTTP 400
    bool kb_error = false;          // every UMLS call gets HTTP 500
    bool conversion_error = false;  // declarative conversion gets HTTP 400
    bool auth_error = false;        // every chat call gets HTTP 401
};

inline constexpr const char* kWarfarinQuestion =
    "ワルファリン（ワーファリン）を服用している人は避けるべき野菜は何ですか？";
inline constexpr const char* kWarfarinCui = "C0043031";

// Character unigram+bigram counts hashed into 64 buckets, plus a constant
// component so no vector is ever zero.
std::vector<double> scripted_embedding(const std::string& text);

class ScriptedServices {
public:
    explicit ScriptedServices(FailureModes modes = {}) : modes_(modes) {}

    // `target` is the path plus query string, e.g. "/v1/chat/completions"
    // or "/uts/search/current?string=warfarin&pageSize=5".
    HttpResponse handle(const std::string& method, const std::string& target, const std::string& body);

    void set_modes(FailureModes modes);

    std::uint64_t total_calls() const { return total_.load(); }
    std::uint64_t chat_calls() const { return chat_.load(); }
    std::uint64_t embedding_calls() const { return embedding_.load(); }
    std::uint64_t kb_calls() const { return kb_.load(); }

    // Every translation prompt received, in arrival order.
    std::vector<std::string> translation_prompts() const;
    // Authorization headers seen by the in-process transport.
    std::vector<std::string> auth_headers() const;
    void record_auth(const std::string& value);

private:
    HttpResponse chat(const std::string& body);
    HttpResponse embeddings(const std::string& body);
    HttpResponse kb(const std::string& target);
    FailureModes modes() const;

    mutable std::mutex mutex_;
    FailureModes modes_;
    std::vector<std::string> translation_prompts_;
    std::vector<std::string> auth_headers_;
    std::atomic<std::uint64_t> total_{0}, chat_{0}, embedding_{0}, kb_{0};
};

class ScriptedTransport final : public Transport {
public:
    explicit ScriptedTransport(std::shared_ptr<ScriptedServices> services) : services_(std::move(services)) {}
    HttpResponse send(const HttpRequest& request) override;

private:
    std::shared_ptr<ScriptedServices> services_;
};

// Serves ScriptedServices on 127.0.0.1 at an ephemeral port.
class ScriptedHttpServer {
public:
    explicit ScriptedHttpServer(std::shared_ptr<ScriptedServices> services, int port = 0);
    ~ScriptedHttpServer();
    ScriptedHttpServer(const ScriptedHttpServer&) = delete;
    ScriptedHttpServer& operator=(const ScriptedHttpServer&) = delete;

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    void wait() { thread_.join(); }

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

// Config pointing every endpoint at `base_url` (chat and embeddings under
// /v1, UMLS under /uts). No credentials; retries do not wait in tests.
PipelineConfig scripted_config(const std::string& base_url, const std::filesystem::path& work_dir);

// scripted_config as a config file body for CLI runs.
std::string scripted_config_json(const std::string& base_url, const std::filesystem::path& work_dir,
                                 const std::filesystem::path& data_dir);

} // namespace kgrag::testing
