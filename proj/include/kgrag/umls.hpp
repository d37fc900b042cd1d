#pragma once

#include "kgrag/entities.hpp"
#include "kgrag/transport.hpp"
#include "kgrag/warnings.hpp"

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

struct ConceptRef {
    std::string concept_id; // CUI
    std::string preferred_name;
    std::string matched_term;
};

struct KnowledgeTriple {
    std::string subject;
    std::string relation;
    std::string object;
    std::string source_entity;  // surface form of the entity that led here
    std::string source_concept; // CUI whose preferred name is `subject`
};

struct EntityGraph {
    std::string question_id;
    std::vector<KnowledgeTriple> triples;
    std::map<std::string, std::size_t> per_entity_counts;
};

// "C" followed by exactly seven digits.
bool is_cui(std::string_view s);

struct KnowledgeBaseConfig {
    std::string base_url = "https://uts-ws.nlm.nih.gov/rest";
    std::string credential_env = "UMLS_API_KEY";
    std::string version = "current";
    double requests_per_second = 15.0;
    int search_page_size = 5;
};

// UMLS Terminology Services REST client (search + CUI relations).
//
// Responses are stored verbatim, one file per request, under
// {dir}/{hash[0:2]}/{hash}.json where hash = request_key(relative URL). The
// relative URL never carries the API key. A read-only fixtures directory in
// the same layout is consulted before the cache and before the network.
class UmlsClient {
public:
    UmlsClient(KnowledgeBaseConfig config, std::shared_ptr<Transport> transport,
               std::optional<std::filesystem::path> cache_dir,
               std::optional<std::filesystem::path> fixtures_dir = std::nullopt, RetryPolicy retry = {},
               Sleeper sleeper = real_sleeper());

    std::optional<ConceptRef> search_concept(std::string_view term_en);
    std::vector<KnowledgeTriple> fetch_relations(const ConceptRef& cref, int limit);

    std::string search_url(std::string_view term_en) const;
    std::string relations_url(std::string_view cui, int limit) const;

    static std::string normalize_term(std::string_view term);
    static std::string request_key(std::string_view relative_url);
    static std::filesystem::path stored_path(const std::filesystem::path& dir, std::string_view relative_url);

    std::uint64_t network_calls() const noexcept { return network_calls_.load(); }

private:
    std::string fetch(const std::string& relative_url, std::string_view empty_body);

    KnowledgeBaseConfig config_;
    std::string api_key_;
    std::shared_ptr<Transport> transport_;
    std::optional<std::filesystem::path> cache_dir_;
    std::optional<std::filesystem::path> fixtures_dir_;
    RetryPolicy retry_;
    Sleeper sleeper_;
    RateLimiter rate_;
    std::atomic<std::uint64_t> network_calls_{0};
};

inline constexpr int kDefaultMaxRelations = 50;

// search_concept + fetch_relations for every translated entity. Per-entity
// failures become warnings; this never throws for a single entity.
EntityGraph retrieve_graph(const EntitySet& set, UmlsClient& client, int max_relations,
                           Warnings& warnings);

} // namespace kgrag
