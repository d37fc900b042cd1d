#include "test_util.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/ranking.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

using namespace kgrag;
using nlohmann::json;

namespace {

// Embedding provider answering from a fixed text -> vector table.
std::shared_ptr<testing::FnTransport> table_provider(std::map<std::string, std::vector<double>> table,
                                                     std::vector<std::size_t>* batch_sizes = nullptr) {
    return std::make_shared<testing::FnTransport>([table, batch_sizes](const HttpRequest& r) {
        auto body = json::parse(r.body);
        if (batch_sizes) batch_sizes->push_back(body["input"].size());
        json data = json::array();
        std::size_t i = 0;
        for (const auto& in : body["input"]) {
            auto it = table.find(in.get<std::string>());
            data.push_back({{"index", i++}, {"embedding", it == table.end() ? std::vector<double>{0.3, 0.3} : it->second}});
        }
        return HttpResponse{200, json({{"data", data}}).dump()};
    });
}

std::vector<double> at_cosine(double c) { return {c, std::sqrt(1 - c * c)}; }

EntityGraph graph_of(const std::vector<std::string>& objects) {
    EntityGraph g{"q", {}, {}};
    for (const auto& o : objects) g.triples.push_back({"S", "r", o, "e", "C0000001"});
    return g;
}

} // namespace

TEST_SUITE("ranking") {

TEST_CASE("triple serialization trims and joins") {
    CHECK(serialize_triple_text({"Warfarin", "isa", "Coumarin anticoagulant", "", ""}) ==
          "Warfarin isa Coumarin anticoagulant");
    CHECK(serialize_triple_text({" A ", " r", "B  ", "", ""}) == "A r B");
}

TEST_CASE("cosine worked values") {
    std::vector<double> a{0.3, 0.4};
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> x{1, 0, 0}, y{0, 1, 0};
    CHECK(cosine_similarity(x, y) == 0.0);
    std::vector<double> u{1, 1}, v{1, 0};
    CHECK(std::abs(cosine_similarity(u, v) - 0.7071067812) < 1e-9);
}

TEST_CASE("cosine rejects bad input") {
    std::vector<double> a{1, 0}, b{1, 0, 0}, z{0, 0}, e{};
    CHECK_THROWS_AS(cosine_similarity(a, b), PreconditionError);
    CHECK_THROWS_AS(cosine_similarity(a, z), PreconditionError);
    CHECK_THROWS_AS(cosine_similarity(e, e), PreconditionError);
}

TEST_CASE("select_top_k against a full-sort oracle") {
    std::mt19937 rng(7);
    for (int round = 0; round < 200; ++round) {
        std::size_t n = rng() % 60;
        std::vector<double> s(n);
        for (auto& x : s) x = static_cast<double>(rng() % 7) / 7.0; // many ties
        std::size_t k = rng() % 70;
        std::vector<std::size_t> oracle(n);
        for (std::size_t i = 0; i < n; ++i) oracle[i] = i;
        std::stable_sort(oracle.begin(), oracle.end(), [&](auto a, auto b) { return s[a] > s[b]; });
        oracle.resize(std::min(k, n));
        CHECK(select_top_k(s, k) == oracle);
    }
}

TEST_CASE("scores 0.9, 0.2, 0.5 with k=2 keep indices 0 and 2") {
    auto t = table_provider({{"question", {1, 0}},
                             {"S r a", at_cosine(0.9)},
                             {"S r b", at_cosine(0.2)},
                             {"S r c", at_cosine(0.5)}});
    auto gw = testing::chat_gateway(t);
    Warnings w;
    auto ranked = rank_triples("question", graph_of({"a", "b", "c"}), 2, *gw, "embedding", w);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].triple.object == "a");
    CHECK(ranked[1].triple.object == "c");
    CHECK(ranked[0].score == doctest::Approx(0.9));
    CHECK(ranked[0].serialized == "S r a");
}

TEST_CASE("k larger than the graph returns everything in score order") {
    auto t = table_provider({{"question", {1, 0}},
                             {"S r a", at_cosine(0.1)},
                             {"S r b", at_cosine(0.8)},
                             {"S r c", at_cosine(0.5)}});
    auto gw = testing::chat_gateway(t);
    Warnings w;
    auto ranked = rank_triples("question", graph_of({"a", "b", "c"}), 10, *gw, "embedding", w);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].triple.object == "b");
    CHECK(ranked[1].triple.object == "c");
    CHECK(ranked[2].triple.object == "a");
}

TEST_CASE("ties keep graph order") {
    auto t = table_provider({{"question", {1, 0}}, {"S r a", at_cosine(0.5)}, {"S r b", at_cosine(0.5)}});
    auto gw = testing::chat_gateway(t);
    Warnings w;
    auto ranked = rank_triples("question", graph_of({"b", "a"}), 2, *gw, "embedding", w);
    CHECK(ranked[0].triple.object == "b");
    CHECK(ranked[1].triple.object == "a");
}

TEST_CASE("zero embeddings are dropped with a warning") {
    auto t = table_provider({{"question", {1, 0}}, {"S r a", {0, 0}}, {"S r b", at_cosine(0.4)}});
    auto gw = testing::chat_gateway(t);
    Warnings w;
    auto ranked = rank_triples("question", graph_of({"a", "b"}), 5, *gw, "embedding", w);
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].triple.object == "b");
    CHECK(w.size() == 1);
}

TEST_CASE("triples are embedded in batches of at most 64") {
    std::vector<std::size_t> batches;
    auto t = table_provider({{"question", {1, 0}}}, &batches);
    auto gw = testing::chat_gateway(t);
    std::vector<std::string> objects;
    for (int i = 0; i < 130; ++i) objects.push_back("o" + std::to_string(i));
    Warnings w;
    auto ranked = rank_triples("question", graph_of(objects), 10, *gw, "embedding", w);
    CHECK(ranked.size() == 10);
    CHECK(batches == std::vector<std::size_t>{1, 64, 64, 2});
}

TEST_CASE("empty graph needs no embedding calls") {
    auto t = table_provider({});
    auto gw = testing::chat_gateway(t);
    Warnings w;
    CHECK(rank_triples("q", EntityGraph{"q", {}, {}}, 10, *gw, "embedding", w).empty());
    CHECK(t->calls() == 0);
    CHECK_THROWS_AS(rank_triples("q", graph_of({"a"}), 0, *gw, "embedding", w), PreconditionError);
}

}
