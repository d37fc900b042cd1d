#include "test_util.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/gateway.hpp"
#include "kgrag/text.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <mutex>
#include <thread>

using namespace kgrag;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

std::string chat_body(const std::string& content) {
    return json({{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}},
                               {"finish_reason", "stop"}}}},
                 {"usage", {{"prompt_tokens", 3}, {"completion_tokens", 5}}}})
        .dump();
}

// Echoes a fixed chat reply or embeddings; counts calls and peak concurrency.
struct FakeProvider : Transport {
    std::string reply = chat_body("こんにちは");
    std::string embedding_reply;
    std::atomic<int> calls{0}, current{0}, peak{0};
    std::chrono::milliseconds hold{0};
    std::mutex mutex;
    std::vector<HttpRequest> requests;

    HttpResponse send(const HttpRequest& r) override {
        ++calls;
        int now = ++current;
        int p = peak.load();
        while (now > p && !peak.compare_exchange_weak(p, now)) {}
        if (hold.count() > 0) std::this_thread::sleep_for(hold);
        {
            std::lock_guard lock(mutex);
            requests.push_back(r);
        }
        --current;
        if (r.url.ends_with("/embeddings")) return {200, embedding_reply};
        return {200, reply};
    }
};

ChatCall hello(const std::string& text = "hi") {
    return {"chat", "m1", {{Role::user, text}}};
}

} // namespace

TEST_SUITE("gateway") {

TEST_CASE("cache_key matches an independent canonical-JSON digest") {
    // Digests computed with sha256(endpoint \0 model \0 json.dumps(sort_keys, compact)).
    CHECK(cache_key("https://api.example.com/v1/chat/completions", "gpt-x",
                    R"({"temperature":0,"model":"gpt-x","messages":[{"role":"user","content":"こんにちは"}],"max_tokens":512})") ==
          "e19bcfb75d14daf4b1cb8310d233d9fced8eaf75df5d48d7a8d9da93333b5c4c");
    CHECK(cache_key("chat", "m", R"({"b":1,"a":[1,2,{"z":"x","y":0.5}]})") ==
          "21ea5d66b15d5aa8cbcf79c40a20cbbe017c7c598e78031d8b9faa790ab86a96");
}

TEST_CASE("cache_key is order-insensitive and byte-sensitive") {
    auto a = cache_key("e", "m", R"({"x":1,"y":[1,2]})");
    CHECK(a == cache_key("e", "m", R"({ "y":[1,2], "x":1 })"));
    CHECK(a != cache_key("e", "m", R"({"x":2,"y":[1,2]})"));
    CHECK(a != cache_key("e", "m2", R"({"x":1,"y":[1,2]})"));
    CHECK(a.size() == 64);
}

TEST_CASE("content passes through and the second call is a cache hit") {
    testing::TempDir dir;
    auto provider = std::make_shared<FakeProvider>();
    Gateway gw(provider, dir.path(), RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("chat", {"http://x/v1", "", "m1"});
    auto first = gw.chat_complete(hello());
    CHECK(first.content == "こんにちは");
    CHECK_FALSE(first.cached);
    CHECK(first.usage.completion_tokens == 5);
    auto second = gw.chat_complete(hello());
    CHECK(second.cached);
    CHECK(second.content == first.content);
    CHECK(provider->calls == 1);
    CHECK(gw.network_calls() == 1);
    CHECK(gw.cache_hits() == 1);
}

TEST_CASE("a fresh gateway over a warm cache makes no network calls") {
    testing::TempDir dir;
    auto provider = std::make_shared<FakeProvider>();
    {
        Gateway gw(provider, dir.path(), RetryPolicy{}, testing::no_sleep);
        gw.add_endpoint("chat", {"http://x/v1", "", "m1"});
        gw.chat_complete(hello("a"));
        gw.chat_complete(hello("b"));
    }
    Gateway again(provider, dir.path(), RetryPolicy{}, testing::no_sleep);
    again.add_endpoint("chat", {"http://x/v1", "", "m1"});
    CHECK(again.chat_complete(hello("b")).cached);
    CHECK(again.chat_complete(hello("a")).cached);
    CHECK(again.network_calls() == 0);
    CHECK(provider->calls == 2);
}

TEST_CASE("request uses temperature 0 and the configured max_tokens") {
    auto provider = std::make_shared<FakeProvider>();
    Gateway gw(provider, std::nullopt, RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("chat", {"http://x/v1", "", "m1"});
    gw.chat_complete(hello());
    auto body = json::parse(provider->requests.at(0).body);
    CHECK(body["temperature"] == 0);
    CHECK(body["max_tokens"] == 512);
    CHECK(body["model"] == "m1");
    CHECK(provider->requests[0].url == "http://x/v1/chat/completions");
}

TEST_CASE("invalid chat calls are rejected before any network use") {
    auto provider = std::make_shared<FakeProvider>();
    Gateway gw(provider, std::nullopt, RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("chat", {"http://x/v1", "", "m1"});
    CHECK_THROWS_AS(gw.chat_complete({"chat", "m1", {}}), PreconditionError);
    ChatCall bad = hello();
    bad.max_tokens = 0;
    CHECK_THROWS_AS(gw.chat_complete(bad), PreconditionError);
    CHECK_THROWS_AS(gw.chat_complete({"nope", "m1", {{Role::user, "x"}}}), ConfigError);
    CHECK(provider->calls == 0);
}

TEST_CASE("malformed response is a decode error and is not cached") {
    testing::TempDir dir;
    auto provider = std::make_shared<FakeProvider>();
    provider->reply = "not json";
    Gateway gw(provider, dir.path(), RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("chat", {"http://x/v1", "", "m1"});
    CHECK_THROWS_AS(gw.chat_complete(hello()), DecodeError);
    provider->reply = chat_body("ok");
    CHECK(gw.chat_complete(hello()).content == "ok");
    CHECK(provider->calls == 2);
}

TEST_CASE("embeddings pass through with uniform dimension") {
    auto provider = std::make_shared<FakeProvider>();
    provider->embedding_reply =
        R"({"data":[{"index":1,"embedding":[0,1,0]},{"index":0,"embedding":[1,0,0]}]})";
    Gateway gw(provider, std::nullopt, RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("emb", {"http://x/v1", "", "e1"});
    auto r = gw.embed_texts({"emb", "e1", {"a", "b"}});
    REQUIRE(r.vectors.size() == 2);
    CHECK(r.dimension() == 3);
    CHECK(r.vectors[0][0] == 1.0); // reordered by index
    CHECK_THROWS_AS(gw.embed_texts({"emb", "e1", {}}), PreconditionError);
}

TEST_CASE("embedding dimension mismatch is a provider contract error") {
    auto provider = std::make_shared<FakeProvider>();
    provider->embedding_reply = R"({"data":[{"index":0,"embedding":[1,0]},{"index":1,"embedding":[1,0,0]}]})";
    Gateway gw(provider, std::nullopt, RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("emb", {"http://x/v1", "", "e1"});
    CHECK_THROWS_AS(gw.embed_texts({"emb", "e1", {"a", "b"}}), ProviderContractError);
}

TEST_CASE("embedding count mismatch is rejected") {
    auto provider = std::make_shared<FakeProvider>();
    provider->embedding_reply = R"({"data":[{"index":0,"embedding":[1,0]}]})";
    Gateway gw(provider, std::nullopt, RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("emb", {"http://x/v1", "", "e1"});
    CHECK_THROWS_AS(gw.embed_texts({"emb", "e1", {"a", "b"}}), Error);
}

TEST_CASE("in-flight requests per endpoint never exceed the limit") {
    auto provider = std::make_shared<FakeProvider>();
    provider->hold = 10ms;
    Gateway gw(provider, std::nullopt, RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("chat", {"http://x/v1", "", "m1", 2});
    {
        std::vector<std::jthread> threads;
        for (int i = 0; i < 12; ++i)
            threads.emplace_back([&, i] { gw.chat_complete(hello("q" + std::to_string(i))); });
    }
    CHECK(provider->calls == 12);
    CHECK(provider->peak <= 2);
}

TEST_CASE("credentials come from the environment and stay out of the cache") {
    testing::TempDir dir;
    ::setenv("KGRAG_UNIT_TEST_KEY", "sk-unit-secret-7781", 1);
    auto provider = std::make_shared<FakeProvider>();
    Gateway gw(provider, dir.path(), RetryPolicy{}, testing::no_sleep);
    gw.add_endpoint("chat", {"http://x/v1", "KGRAG_UNIT_TEST_KEY", "m1"});
    gw.chat_complete(hello());
    bool has_auth = false;
    for (auto& [k, v] : provider->requests.at(0).headers)
        if (k == "Authorization") has_auth = v == "Bearer sk-unit-secret-7781";
    CHECK(has_auth);
    for (auto& e : std::filesystem::recursive_directory_iterator(dir.path()))
        if (e.is_regular_file()) CHECK(text::read_file(e.path()).find("sk-unit-secret") == std::string::npos);
    ::unsetenv("KGRAG_UNIT_TEST_KEY");
    CHECK_THROWS_AS(gw.add_endpoint("other", {"http://x/v1", "KGRAG_UNIT_TEST_KEY", "m1"}), ConfigError);
}

TEST_CASE("cache entries live under a two-character fan-out directory") {
    testing::TempDir dir;
    ResponseCache cache(dir.path());
    auto key = cache_key("e", "m", "{}");
    cache.put(key, "e", "m", "{}", R"({"ok":true})");
    CHECK(cache.path_for(key) == dir.path() / key.substr(0, 2) / (key + ".json"));
    REQUIRE(cache.get(key));
    CHECK(*cache.get(key) == R"({"ok":true})");
    CHECK_FALSE(cache.get(cache_key("e", "m", "{ }x")));
}

}
