#include "scripted_services.hpp"
#include "test_util.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/generation.hpp"

#include <doctest.h>

using namespace kgrag;
using testing::chat_reply;
using testing::FnTransport;
using testing::prompt_of;

namespace {

const PromptSet& prompts() {
    static const PromptSet p = PromptSet::load(KGRAG_TEST_PROMPTS_DIR);
    return p;
}

ScoredTriple scored(const std::string& s, const std::string& r, const std::string& o) {
    KnowledgeTriple t{s, r, o, "e", "C0000001"};
    return {t, s + " " + r + " " + o, 0.5};
}

} // namespace

TEST_SUITE("generation") {

TEST_CASE("numbered lines become sentences without markers") {
    auto s = parse_declarative_response(
        "1.ワルファリンは生理的に凝固因子濃度を低下させる効果がある。\n2.ワルファリンはクマリン系の抗凝固薬である。\n");
    REQUIRE(s.size() == 2);
    CHECK(s[0] == "ワルファリンは生理的に凝固因子濃度を低下させる効果がある。");
    CHECK(s[1] == "ワルファリンはクマリン系の抗凝固薬である。");
}

TEST_CASE("other marker styles are stripped") {
    auto s = parse_declarative_response("‐ A\n・B\n(3) C\n１．D\n4) E\n\n  \n- F");
    CHECK(s == std::vector<std::string>{"A", "B", "C", "D", "E", "F"});
}

TEST_CASE("a paragraph without line breaks is one sentence") {
    auto s = parse_declarative_response("ワルファリンは薬である。ビタミンKに注意する。");
    CHECK(s.size() == 1);
}

TEST_CASE("numbers that are part of the sentence are kept") {
    auto s = parse_declarative_response("2型糖尿病はインスリン抵抗性と関連がある。");
    REQUIRE(s.size() == 1);
    CHECK(s[0] == "2型糖尿病はインスリン抵抗性と関連がある。");
}

TEST_CASE("empty ranking means no conversion call") {
    auto t = std::make_shared<FnTransport>([](const HttpRequest&) { return HttpResponse{200, chat_reply("x")}; });
    auto gw = testing::chat_gateway(t);
    Warnings w;
    auto k = convert_declarative("q", {}, prompts().declarative, *gw, "chat", w);
    CHECK(k.sentences.empty());
    CHECK_FALSE(k.fallback);
    CHECK(t->calls() == 0);
}

TEST_CASE("scripted conversion of the warfarin triple") {
    auto services = std::make_shared<testing::ScriptedServices>();
    auto gw = testing::chat_gateway(std::make_shared<testing::ScriptedTransport>(services));
    Warnings w;
    auto k = convert_declarative("q", {scored("Warfarin", "isa", "Coumarin anticoagulant")}, prompts().declarative,
                                 *gw, "chat", w);
    REQUIRE(k.sentences.size() == 1);
    CHECK(k.sentences[0] == "ワルファリンはクマリン系の抗凝固薬である。");
    CHECK(k.source_triples.size() == 1);
}

TEST_CASE("conversion failure falls back to serialized triples and the answer prompt carries them") {
    auto t = std::make_shared<FnTransport>([](const HttpRequest& r) {
        if (prompt_of(r).find("Converted Background Knowledge:") != std::string::npos)
            return HttpResponse{400, "{}"};
        return HttpResponse{200, chat_reply("回答です。")};
    });
    auto gw = testing::chat_gateway(t);
    Warnings w;
    std::vector<ScoredTriple> ranked = {scored("A", "isa", "B"), scored("C", "may_treat", "D")};
    auto k = convert_declarative("q", ranked, prompts().declarative, *gw, "chat", w);
    CHECK(k.fallback);
    CHECK(k.sentences == std::vector<std::string>{"A isa B", "C may_treat D"});
    CHECK(w.size() == 1);
    generate_answer("q", "質問", k, prompts(), *gw, "chat");
    auto p = prompt_of(t->requests.back());
    CHECK(p.find("A isa B") != std::string::npos);
    CHECK(p.find("C may_treat D") != std::string::npos);
}

TEST_CASE("warfarin answer with knowledge") {
    auto services = std::make_shared<testing::ScriptedServices>();
    auto gw = testing::chat_gateway(std::make_shared<testing::ScriptedTransport>(services));
    DeclarativeKnowledge k{"q", {"ビタミンKは血液凝固に関与する。"}, {}, false};
    auto a = generate_answer("q", testing::kWarfarinQuestion, k, prompts(), *gw, "chat");
    CHECK(a.answer.rfind("ワルファリンを服用している人が避けるべき野菜は", 0) == 0);
    CHECK(a.mode == AnswerMode::rag);
    CHECK(a.model == "m1");
    CHECK(a.completion_tokens > 0);
}

TEST_CASE("baseline request has no knowledge block") {
    auto t = std::make_shared<FnTransport>([](const HttpRequest&) { return HttpResponse{200, chat_reply("答え")}; });
    auto gw = testing::chat_gateway(t);
    auto a = generate_answer("q", "質問", std::nullopt, prompts(), *gw, "chat");
    CHECK(a.mode == AnswerMode::baseline);
    CHECK(t->requests.at(0).body.find("- 背景知識:") == std::string::npos);
    auto body = nlohmann::json::parse(t->requests[0].body);
    CHECK(body["max_tokens"] == 512);
}

TEST_CASE("an empty answer is a contract violation") {
    auto t = std::make_shared<FnTransport>([](const HttpRequest&) { return HttpResponse{200, chat_reply("  \n")}; });
    auto gw = testing::chat_gateway(t);
    CHECK_THROWS_AS(generate_answer("q", "質問", std::nullopt, prompts(), *gw, "chat"), ProviderContractError);
}

}
