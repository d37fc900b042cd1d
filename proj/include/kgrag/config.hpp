#pragma once

#include "kgrag/gateway.hpp"
#include "kgrag/umls.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace kgrag {

// Gateway endpoint ids used by the pipeline.
inline constexpr const char* kChatEndpoint = "chat";
inline constexpr const char* kEmbeddingEndpoint = "embedding";
inline constexpr const char* kTokenEmbeddingEndpoint = "token_embedding";

struct PipelineConfig {
    EndpointConfig chat;
    EndpointConfig embedding;
    EndpointConfig token_embedding;
    KnowledgeBaseConfig knowledge_base;

    int top_k = 10;
    int max_relations = 50;
    int workers = 4;
    double failure_threshold = 0.5; // abort once failed items exceed this share
    RetryPolicy retry;

    std::filesystem::path cache_root = "cache";
    std::filesystem::path output_root = "runs";
    std::filesystem::path prompts_dir;
    std::optional<std::filesystem::path> kb_fixtures_dir;
    std::map<std::string, std::filesystem::path> datasets;

    // Relative paths resolve against `base_dir`. Inline credentials are
    // rejected; endpoints name environment variables instead.
    static PipelineConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
    static PipelineConfig load(const std::filesystem::path& path);

    std::filesystem::path dataset_path(const std::string& dataset) const;
    void validate() const;
};

} // namespace kgrag
