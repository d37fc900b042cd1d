#include "kgrag/gateway.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>

namespace kgrag {

using nlohmann::json;

std::string_view to_string(Role role) {
    switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    }
    return "user";
}

std::string cache_key(std::string_view endpoint_id, std::string_view model_name,
                      std::string_view body) {
    std::string canonical;
    auto parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (!parsed.is_discarded() && parsed.is_object())
        canonical = parsed.dump(); // object keys come out sorted
    else
        canonical = std::string(body);

    std::string material;
    material.reserve(endpoint_id.size() + model_name.size() + canonical.size() + 2);
    material.append(endpoint_id);
    material.push_back('\0');
    material.append(model_name);
    material.push_back('\0');
    material.append(canonical);
    return text::sha256_hex(material);
}

ResponseCache::ResponseCache(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
    return root_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    auto path = path_for(key);
    if (!std::filesystem::exists(path)) return std::nullopt;
    auto entry = json::parse(text::read_file(path), nullptr, false);
    if (entry.is_discarded() || !entry.contains("response") || !entry["response"].is_string())
        return std::nullopt;
    return entry["response"].get<std::string>();
}

void ResponseCache::put(const std::string& key, std::string_view endpoint_id,
                        std::string_view model, std::string_view request_body,
                        std::string_view response_body) const {
    auto path = path_for(key);
    if (std::filesystem::exists(path)) return;

    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);

    json entry = {{"key", key},
                  {"endpoint", endpoint_id},
                  {"model", model},
                  {"request", request_body},
                  {"response", response_body},
                  {"created_at", stamp}};
    text::atomic_write_file(path, entry.dump(2) + "\n");
}

std::string encode_chat_request(const ChatCall& call) {
    json messages = json::array();
    for (const auto& m : call.messages)
        messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    json body = {{"model", call.model},
                 {"messages", std::move(messages)},
                 {"temperature", call.temperature},
                 {"max_tokens", call.max_tokens}};
    return body.dump();
}

ChatResult decode_chat_response(std::string_view body) {
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw DecodeError("chat response is not a JSON object");
    if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
        throw DecodeError("chat response has no choices");
    const auto& choice = doc["choices"][0];
    if (!choice.contains("message") || !choice["message"].contains("content") ||
        !choice["message"]["content"].is_string())
        throw DecodeError("chat response choice lacks string message content");

    ChatResult result;
    result.content = choice["message"]["content"].get<std::string>();
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string())
        result.finish_reason = choice["finish_reason"].get<std::string>();
    if (doc.contains("usage") && doc["usage"].is_object()) {
        const auto& u = doc["usage"];
        if (u.contains("prompt_tokens") && u["prompt_tokens"].is_number_integer())
            result.usage.prompt_tokens = std::max<std::int64_t>(0, u["prompt_tokens"].get<std::int64_t>());
        if (u.contains("completion_tokens") && u["completion_tokens"].is_number_integer())
            result.usage.completion_tokens =
                std::max<std::int64_t>(0, u["completion_tokens"].get<std::int64_t>());
    }
    return result;
}

std::string encode_embedding_request(const EmbeddingCall& call) {
    json body = {{"model", call.model}, {"input", call.inputs}};
    return body.dump();
}

EmbeddingResult decode_embedding_response(std::string_view body, std::size_t expected_count) {
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw DecodeError("embedding response is not a JSON object");
    if (!doc.contains("data") || !doc["data"].is_array()) throw DecodeError("embedding response lacks data");

    std::vector<std::pair<std::size_t, std::vector<double>>> rows;
    std::size_t position = 0;
    for (const auto& item : doc["data"]) {
        if (!item.contains("embedding") || !item["embedding"].is_array())
            throw DecodeError("embedding item lacks an embedding array");
        std::size_t index = position++;
        if (item.contains("index") && item["index"].is_number_unsigned())
            index = item["index"].get<std::size_t>();
        std::vector<double> v;
        v.reserve(item["embedding"].size());
        for (const auto& x : item["embedding"]) {
            if (!x.is_number()) throw DecodeError("non-numeric embedding component");
            v.push_back(x.get<double>());
        }
        rows.emplace_back(index, std::move(v));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    if (rows.size() != expected_count)
        throw ProviderContractError("expected " + std::to_string(expected_count) + " vectors, got " +
                                    std::to_string(rows.size()));
    EmbeddingResult result;
    for (auto& [index, v] : rows) {
        if (v.empty()) throw ProviderContractError("zero-dimensional embedding");
        if (!result.vectors.empty() && v.size() != result.vectors.front().size())
            throw ProviderContractError("embedding dimension mismatch");
        result.vectors.push_back(std::move(v));
    }
    return result;
}

Gateway::Gateway(std::shared_ptr<Transport> transport,
                 std::optional<std::filesystem::path> cache_root, RetryPolicy retry,
                 Sleeper sleeper)
    : transport_(std::move(transport)), retry_(retry), sleeper_(std::move(sleeper)) {
    if (cache_root) cache_.emplace(*cache_root);
}

void Gateway::add_endpoint(const std::string& id, EndpointConfig config) {
    Endpoint ep;
    if (!config.credential_env.empty()) {
        const char* value = std::getenv(config.credential_env.c_str());
        if (value == nullptr)
            throw ConfigError("environment variable " + config.credential_env + " is not set (endpoint " +
                              id + ")");
        ep.credential = value;
    }
    ep.limiter = std::make_unique<InFlightLimiter>(config.max_in_flight);
    ep.config = std::move(config);
    endpoints_.insert_or_assign(id, std::move(ep));
}

const EndpointConfig& Gateway::endpoint(const std::string& id) const {
    auto it = endpoints_.find(id);
    if (it == endpoints_.end()) throw ConfigError("unknown endpoint: " + id);
    return it->second.config;
}

Gateway::Posted Gateway::post(const Endpoint& ep, const std::string& path,
                              const std::string& model, const std::string& body) {
    auto url = ep.config.base_url + path;
    // The wire URL identifies the endpoint so that two configs pointing at the
    // same server share cache entries.
    auto key = cache_key(url, model, body);
    if (cache_) {
        if (auto hit = cache_->get(key)) {
            ++cache_hits_;
            return {std::move(*hit), key, true};
        }
    }

    HttpRequest request;
    request.method = "POST";
    request.url = url;
    request.headers.emplace_back("Content-Type", "application/json");
    if (!ep.credential.empty()) request.headers.emplace_back("Authorization", "Bearer " + ep.credential);
    request.body = body;

    HttpResponse response;
    {
        InFlightLimiter::Guard guard(*ep.limiter);
        // Count every wire attempt, including retries.
        struct CountingTransport final : Transport {
            Transport& inner;
            std::atomic<std::uint64_t>& counter;
            CountingTransport(Transport& i, std::atomic<std::uint64_t>& c) : inner(i), counter(c) {}
            HttpResponse send(const HttpRequest& r) override {
                ++counter;
                return inner.send(r);
            }
        } counting(*transport_, network_calls_);
        response = send_with_retry(counting, request, retry_, sleeper_);
    }
    return {std::move(response.body), key, false};
}

ChatResult Gateway::chat_complete(const ChatCall& call) {
    if (call.messages.empty()) throw PreconditionError("chat call needs at least one message");
    if (call.max_tokens < 1) throw PreconditionError("max_tokens must be >= 1");
    if (call.temperature < 0) throw PreconditionError("temperature must be non-negative");
    auto it = endpoints_.find(call.endpoint);
    if (it == endpoints_.end()) throw ConfigError("unknown endpoint: " + call.endpoint);

    auto body = encode_chat_request(call);
    auto posted = post(it->second, "/chat/completions", call.model, body);
    auto result = decode_chat_response(posted.body);
    // Only well-formed responses are persisted.
    if (!posted.cached && cache_) cache_->put(posted.key, call.endpoint, call.model, body, posted.body);
    result.cached = posted.cached;
    return result;
}

EmbeddingResult Gateway::embed_texts(const EmbeddingCall& call) {
    if (call.inputs.empty()) throw PreconditionError("embedding call needs at least one input");
    for (const auto& input : call.inputs)
        if (text::trim(input).empty()) throw PreconditionError("embedding input is blank");
    auto it = endpoints_.find(call.endpoint);
    if (it == endpoints_.end()) throw ConfigError("unknown endpoint: " + call.endpoint);

    auto body = encode_embedding_request(call);
    auto posted = post(it->second, "/embeddings", call.model, body);
    auto result = decode_embedding_response(posted.body, call.inputs.size());
    if (!posted.cached && cache_) cache_->put(posted.key, call.endpoint, call.model, body, posted.body);
    result.cached = posted.cached;
    return result;
}

} // namespace kgrag
