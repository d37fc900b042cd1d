#include "kgrag/config.hpp"

#include "kgrag/corpus.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/prompts.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

using nlohmann::json;

namespace {

constexpr const char* kSecretKeys[] = {"api_key", "apiKey", "apikey", "key", "token", "credential",
                                       "password", "secret"};

void reject_inline_secrets(const json& obj, const std::string& where) {
    for (const char* k : kSecretKeys)
        if (obj.contains(k))
            throw ConfigError(where + ": inline credential \"" + k +
                              "\" is not allowed; name an environment variable in credential_env");
}

template <class T>
void read(const json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field ") + key + ": " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

EndpointConfig read_endpoint(const json& doc, const char* name) {
    EndpointConfig ep;
    if (!doc.contains(name)) throw ConfigError(std::string("config lacks endpoints.") + name);
    const auto& obj = doc.at(name);
    reject_inline_secrets(obj, std::string("endpoints.") + name);
    read(obj, "base_url", ep.base_url);
    read(obj, "credential_env", ep.credential_env);
    read(obj, "model", ep.model);
    read(obj, "max_in_flight", ep.max_in_flight);
    while (!ep.base_url.empty() && ep.base_url.back() == '/') ep.base_url.pop_back();
    if (ep.base_url.empty()) throw ConfigError(std::string("endpoints.") + name + ".base_url is required");
    if (ep.model.empty()) throw ConfigError(std::string("endpoints.") + name + ".model is required");
    return ep;
}

} // namespace

PipelineConfig PipelineConfig::from_json(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_inline_secrets(doc, "config");
    PipelineConfig cfg;
    cfg.prompts_dir = default_prompts_dir();
    for (auto name : kDatasetNames)
        cfg.datasets[std::string(name)] = base_dir / "data" / (std::string(name) + ".jsonl");

    if (!doc.contains("endpoints")) throw ConfigError("config lacks endpoints");
    const auto& eps = doc.at("endpoints");
    cfg.chat = read_endpoint(eps, "chat");
    cfg.embedding = read_endpoint(eps, "embedding");
    cfg.token_embedding = read_endpoint(eps, "token_embedding");
    if (eps.contains("knowledge_base")) {
        const auto& kb = eps.at("knowledge_base");
        reject_inline_secrets(kb, "endpoints.knowledge_base");
        read(kb, "base_url", cfg.knowledge_base.base_url);
        read(kb, "credential_env", cfg.knowledge_base.credential_env);
        read(kb, "version", cfg.knowledge_base.version);
        read(kb, "requests_per_second", cfg.knowledge_base.requests_per_second);
        read(kb, "search_page_size", cfg.knowledge_base.search_page_size);
        while (!cfg.knowledge_base.base_url.empty() && cfg.knowledge_base.base_url.back() == '/')
            cfg.knowledge_base.base_url.pop_back();
    }

    read(doc, "top_k", cfg.top_k);
    read(doc, "max_relations", cfg.max_relations);
    read(doc, "workers", cfg.workers);
    read(doc, "failure_threshold", cfg.failure_threshold);
    if (doc.contains("retry")) {
        const auto& r = doc.at("retry");
        read(r, "max_attempts", cfg.retry.max_attempts);
        long long initial = cfg.retry.initial_delay.count();
        read(r, "initial_delay_ms", initial);
        cfg.retry.initial_delay = std::chrono::milliseconds(initial);
        read(r, "multiplier", cfg.retry.multiplier);
    }

    std::string path;
    if (doc.contains("cache_root")) {
        read(doc, "cache_root", path);
        cfg.cache_root = resolve(base_dir, path);
    } else {
        cfg.cache_root = base_dir / "cache";
    }
    if (doc.contains("output_root")) {
        read(doc, "output_root", path);
        cfg.output_root = resolve(base_dir, path);
    } else {
        cfg.output_root = base_dir / "runs";
    }
    if (doc.contains("prompts_dir")) {
        read(doc, "prompts_dir", path);
        cfg.prompts_dir = resolve(base_dir, path);
    }
    if (doc.contains("kb_fixtures_dir")) {
        read(doc, "kb_fixtures_dir", path);
        cfg.kb_fixtures_dir = resolve(base_dir, path);
    }
    if (doc.contains("datasets")) {
        for (const auto& [name, p] : doc.at("datasets").items()) {
            if (!p.is_string()) throw ConfigError("datasets." + name + " must be a path");
            cfg.datasets[name] = resolve(base_dir, p.get<std::string>());
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    auto doc = json::parse(text::read_file(path), nullptr, false, /*ignore_comments=*/true);
    if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
    auto base = std::filesystem::absolute(path).parent_path();
    return from_json(doc, base);
}

std::filesystem::path PipelineConfig::dataset_path(const std::string& dataset) const {
    auto it = datasets.find(dataset);
    if (it == datasets.end()) throw ConfigError("unknown dataset: " + dataset);
    return it->second;
}

void PipelineConfig::validate() const {
    if (top_k < 1) throw ConfigError("top_k must be >= 1");
    if (max_relations < 1) throw ConfigError("max_relations must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
    if (!(failure_threshold > 0.0 && failure_threshold <= 1.0))
        throw ConfigError("failure_threshold must be in (0, 1]");
    if (!(knowledge_base.requests_per_second > 0)) throw ConfigError("requests_per_second must be > 0");
}

} // namespace kgrag
