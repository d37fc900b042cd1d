#pragma once

#include "kgrag/transport.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgrag {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);

struct Message {
    Role role = Role::user;
    std::string content;
};

struct ChatCall {
    std::string endpoint;
    std::string model;
    std::vector<Message> messages;
    double temperature = 0.0;
    int max_tokens = 512;
};

struct Usage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

struct ChatResult {
    std::string content;
    std::string finish_reason;
    Usage usage;
    bool cached = false;
};

struct EmbeddingCall {
    std::string endpoint;
    std::string model;
    std::vector<std::string> inputs;
};

struct EmbeddingResult {
    std::vector<std::vector<double>> vectors;
    bool cached = false;

    std::size_t dimension() const { return vectors.empty() ? 0 : vectors.front().size(); }
};

// Content address of one request: SHA-256 over endpoint id, model name and
// the canonicalized body (JSON bodies are re-serialized with sorted keys;
// anything else is hashed verbatim). Fields are NUL-separated.
std::string cache_key(std::string_view endpoint_id, std::string_view model_name,
                      std::string_view body);

// On-disk, content-addressed store: {root}/{key[0:2]}/{key}.json, holding the
// request and response bodies verbatim. Entries are never rewritten.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path root);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, std::string_view endpoint_id, std::string_view model,
             std::string_view request_body, std::string_view response_body) const;

    std::filesystem::path path_for(const std::string& key) const;
    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path root_;
};

struct EndpointConfig {
    std::string base_url;
    std::string credential_env; // name of the env variable; empty means no auth header
    std::string model;
    int max_in_flight = 4;
};

// Client for OpenAI-compatible chat/completions and embeddings endpoints.
//
// Every call is keyed by cache_key(); a cache hit performs no network
// operation. Misses go through the endpoint's in-flight limiter and the
// retry policy, and successful responses are persisted before returning.
class Gateway {
public:
    Gateway(std::shared_ptr<Transport> transport, std::optional<std::filesystem::path> cache_root,
            RetryPolicy retry = {}, Sleeper sleeper = real_sleeper());

    // Resolves the credential from the environment now; a named but unset
    // variable is a ConfigError.
    void add_endpoint(const std::string& id, EndpointConfig config);
    bool has_endpoint(const std::string& id) const { return endpoints_.count(id) != 0; }
    const EndpointConfig& endpoint(const std::string& id) const;

    ChatResult chat_complete(const ChatCall& call);
    EmbeddingResult embed_texts(const EmbeddingCall& call);

    std::uint64_t network_calls() const noexcept { return network_calls_.load(); }
    std::uint64_t cache_hits() const noexcept { return cache_hits_.load(); }

private:
    struct Endpoint {
        EndpointConfig config;
        std::string credential;
        std::unique_ptr<InFlightLimiter> limiter;
    };

    struct Posted {
        std::string body;
        std::string key;
        bool cached = false;
    };

    Posted post(const Endpoint& ep, const std::string& path, const std::string& model,
                const std::string& body);

    std::shared_ptr<Transport> transport_;
    std::optional<ResponseCache> cache_;
    RetryPolicy retry_;
    Sleeper sleeper_;
    std::map<std::string, Endpoint> endpoints_;
    std::atomic<std::uint64_t> network_calls_{0};
    std::atomic<std::uint64_t> cache_hits_{0};
};

// Wire encoding helpers; exposed for tests.
std::string encode_chat_request(const ChatCall& call);
ChatResult decode_chat_response(std::string_view body);
std::string encode_embedding_request(const EmbeddingCall& call);
EmbeddingResult decode_embedding_response(std::string_view body, std::size_t expected_count);

} // namespace kgrag
