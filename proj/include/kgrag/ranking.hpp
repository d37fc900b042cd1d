#pragma once

#include "kgrag/gateway.hpp"
#include "kgrag/umls.hpp"
#include "kgrag/warnings.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kgrag {

inline constexpr int kDefaultTopK = 10;
inline constexpr std::size_t kEmbeddingBatch = 64;

struct ScoredTriple {
    KnowledgeTriple triple;
    std::string serialized;
    double score = 0.0;
};

// "subject relation object", each field trimmed, single-space joined.
std::string serialize_triple_text(const KnowledgeTriple& t);

// dot(u,v) / (|u| |v|). Throws PreconditionError on a dimension mismatch,
// an empty vector, or an all-zero vector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// Indices of the k best scores, ordered by (score desc, index asc).
std::vector<std::size_t> select_top_k(std::span<const double> scores, std::size_t k);

// Embeds the question once and all serialized triples (in batches of
// kEmbeddingBatch), scores by cosine and keeps the top k. Triples whose
// embedding is all-zero are dropped with a warning.
std::vector<ScoredTriple> rank_triples(const std::string& question, const EntityGraph& graph, int k,
                                       Gateway& gateway, const std::string& endpoint,
                                       Warnings& warnings);

} // namespace kgrag
