#include "kgrag/umls.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>

namespace kgrag {

using nlohmann::json;

bool is_cui(std::string_view s) {
    if (s.size() != 8 || s[0] != 'C') return false;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

UmlsClient::UmlsClient(KnowledgeBaseConfig config, std::shared_ptr<Transport> transport,
                       std::optional<std::filesystem::path> cache_dir,
                       std::optional<std::filesystem::path> fixtures_dir, RetryPolicy retry,
                       Sleeper sleeper)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      cache_dir_(std::move(cache_dir)),
      fixtures_dir_(std::move(fixtures_dir)),
      retry_(retry),
      sleeper_(std::move(sleeper)),
      rate_(config_.requests_per_second) {
    if (!config_.credential_env.empty()) {
        if (const char* key = std::getenv(config_.credential_env.c_str())) api_key_ = key;
    }
}

std::string UmlsClient::normalize_term(std::string_view term) {
    return text::to_lower_ascii(text::normalize_whitespace(term));
}

std::string UmlsClient::request_key(std::string_view relative_url) {
    return text::sha256_hex(relative_url);
}

std::filesystem::path UmlsClient::stored_path(const std::filesystem::path& dir,
                                              std::string_view relative_url) {
    auto key = request_key(relative_url);
    return dir / key.substr(0, 2) / (key + ".json");
}

std::string UmlsClient::search_url(std::string_view term_en) const {
    return "search/" + config_.version + "?string=" + text::url_encode(normalize_term(term_en)) +
           "&pageSize=" + std::to_string(config_.search_page_size);
}

std::string UmlsClient::relations_url(std::string_view cui, int limit) const {
    return "content/" + config_.version + "/CUI/" + std::string(cui) + "/relations?pageSize=" +
           std::to_string(limit);
}

std::string UmlsClient::fetch(const std::string& relative_url, std::string_view empty_body) {
    if (fixtures_dir_) {
        auto path = stored_path(*fixtures_dir_, relative_url);
        if (std::filesystem::exists(path)) return text::read_file(path);
    }
    if (cache_dir_) {
        auto path = stored_path(*cache_dir_, relative_url);
        if (std::filesystem::exists(path)) return text::read_file(path);
    }
    if (!transport_) throw RetrievalError("no recorded response and no transport for " + relative_url);
    if (!config_.credential_env.empty() && api_key_.empty())
        throw RetrievalError("environment variable " + config_.credential_env + " is not set");

    HttpRequest request;
    request.method = "GET";
    request.url = config_.base_url + "/" + relative_url;
    if (!api_key_.empty()) request.url += "&apiKey=" + text::url_encode(api_key_);

    struct Limited final : Transport {
        Transport& inner;
        RateLimiter& rate;
        std::atomic<std::uint64_t>& counter;
        Limited(Transport& i, RateLimiter& r, std::atomic<std::uint64_t>& c) : inner(i), rate(r), counter(c) {}
        HttpResponse send(const HttpRequest& r) override {
            rate.acquire();
            ++counter;
            return inner.send(r);
        }
    } limited(*transport_, rate_, network_calls_);

    std::string body;
    try {
        body = send_with_retry(limited, request, retry_, sleeper_).body;
    } catch (const HttpStatusError& e) {
        // The service answers 404 for "nothing found"; record it as an empty result.
        if (e.status() != 404) throw RetrievalError(std::string("knowledge base: ") + e.what());
        body = std::string(empty_body);
    } catch (const RetryExhaustedError& e) {
        throw RetrievalError(std::string("knowledge base: ") + e.what());
    }
    if (cache_dir_) text::atomic_write_file(stored_path(*cache_dir_, relative_url), body);
    return body;
}

std::optional<ConceptRef> UmlsClient::search_concept(std::string_view term_en) {
    auto term = normalize_term(term_en);
    if (term.empty()) throw PreconditionError("search term is empty");

    auto body = fetch(search_url(term_en), R"({"result":{"results":[]}})");
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw RetrievalError("malformed search response for " + term);

    const json* results = nullptr;
    if (doc.contains("result") && doc["result"].is_object() && doc["result"].contains("results"))
        results = &doc["result"]["results"];
    if (results == nullptr || !results->is_array()) return std::nullopt;

    for (const auto& r : *results) {
        if (!r.is_object() || !r.contains("ui") || !r["ui"].is_string()) continue;
        auto ui = r["ui"].get<std::string>();
        if (!is_cui(ui)) continue; // "NONE" marks an empty result set
        auto name = r.contains("name") && r["name"].is_string() ? text::trim(r["name"].get<std::string>()) : "";
        if (name.empty()) continue;
        return ConceptRef{ui, name, std::string(term_en)};
    }
    return std::nullopt;
}

std::vector<KnowledgeTriple> UmlsClient::fetch_relations(const ConceptRef& cref, int limit) {
    if (limit < 1) throw PreconditionError("relation limit must be >= 1");
    if (!is_cui(cref.concept_id)) throw PreconditionError("not a CUI: " + cref.concept_id);
    if (cref.preferred_name.empty()) throw PreconditionError("concept lacks a preferred name");

    auto body = fetch(relations_url(cref.concept_id, limit), R"({"result":[]})");
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw RetrievalError("malformed relations response for " + cref.concept_id);

    std::vector<KnowledgeTriple> triples;
    if (!doc.contains("result") || !doc["result"].is_array()) return triples;

    auto field = [](const json& r, const char* key) {
        return r.contains(key) && r[key].is_string() ? text::trim(r[key].get<std::string>()) : std::string();
    };
    int taken = 0;
    for (const auto& r : doc["result"]) {
        if (taken++ >= limit) break;
        if (!r.is_object()) continue;
        auto label = field(r, "additionalRelationLabel");
        if (label.empty()) label = field(r, "relationLabel");
        auto related = field(r, "relatedIdName");
        if (label.empty() || related.empty()) continue;
        triples.push_back({cref.preferred_name, std::move(label), std::move(related), {}, cref.concept_id});
    }
    return triples;
}

EntityGraph retrieve_graph(const EntitySet& set, UmlsClient& client, int max_relations,
                           Warnings& warnings) {
    EntityGraph graph{set.question_id, {}, {}};
    for (const auto& entity : set.entities) {
        if (!entity.translation_en) continue;
        auto& count = graph.per_entity_counts[entity.surface_ja];
        try {
            auto cref = client.search_concept(*entity.translation_en);
            if (!cref) {
                warnings.push_back("retrieval: no concept for " + entity.surface_ja + " (" +
                                   *entity.translation_en + ")");
                continue;
            }
            auto triples = client.fetch_relations(*cref, max_relations);
            for (auto& t : triples) {
                t.source_entity = entity.surface_ja;
                graph.triples.push_back(std::move(t));
                ++count;
            }
        } catch (const Error& e) {
            warnings.push_back("retrieval: " + entity.surface_ja + ": " + e.what());
        }
    }
    return graph;
}

} // namespace kgrag
