#include "kgrag/ranking.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kgrag {

std::string serialize_triple_text(const KnowledgeTriple& t) {
    return text::trim(t.subject) + " " + text::trim(t.relation) + " " + text::trim(t.object);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.empty() || u.size() != v.size())
        throw PreconditionError("cosine: dimension mismatch or empty vector");
    double dot = 0, nu = 0, nv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0 || nv == 0) throw PreconditionError("cosine: zero vector");
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

std::vector<std::size_t> select_top_k(std::span<const double> scores, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    k = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);
    order.resize(k);
    return order;
}

namespace {

bool all_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

} // namespace

std::vector<ScoredTriple> rank_triples(const std::string& question, const EntityGraph& graph, int k,
                                       Gateway& gateway, const std::string& endpoint,
                                       Warnings& warnings) {
    if (k < 1) throw PreconditionError("top-k must be >= 1");
    if (graph.triples.empty()) return {};

    const auto& model = gateway.endpoint(endpoint).model;
    auto question_vec = gateway.embed_texts({endpoint, model, {question}}).vectors.front();
    if (all_zero(question_vec)) {
        warnings.emplace_back("ranking: question embedding is all-zero; no triples kept");
        return {};
    }

    std::vector<std::string> serialized;
    serialized.reserve(graph.triples.size());
    for (const auto& t : graph.triples) serialized.push_back(serialize_triple_text(t));

    std::vector<std::vector<double>> vectors;
    vectors.reserve(serialized.size());
    for (std::size_t start = 0; start < serialized.size(); start += kEmbeddingBatch) {
        auto end = std::min(serialized.size(), start + kEmbeddingBatch);
        EmbeddingCall call{endpoint, model, {serialized.begin() + static_cast<std::ptrdiff_t>(start),
                                             serialized.begin() + static_cast<std::ptrdiff_t>(end)}};
        auto result = gateway.embed_texts(call);
        if (result.dimension() != question_vec.size())
            throw ProviderContractError("triple and question embeddings differ in dimension");
        for (auto& v : result.vectors) vectors.push_back(std::move(v));
    }

    std::vector<std::size_t> valid;
    std::vector<double> scores;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (all_zero(vectors[i])) {
            warnings.push_back("ranking: zero embedding for triple \"" + serialized[i] + "\"; dropped");
            continue;
        }
        valid.push_back(i);
        scores.push_back(cosine_similarity(question_vec, vectors[i]));
    }

    std::vector<ScoredTriple> ranked;
    for (auto pos : select_top_k(scores, static_cast<std::size_t>(k))) {
        auto i = valid[pos];
        ranked.push_back({graph.triples[i], serialized[i], scores[pos]});
    }
    return ranked;
}

} // namespace kgrag
