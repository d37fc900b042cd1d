#include "test_util.hpp"

#include "kgrag/corpus.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

#include <doctest.h>

using namespace kgrag;

namespace {

std::filesystem::path data_file(const std::string& name) {
    return std::filesystem::path(KGRAG_TEST_DATA_DIR) / (name + ".jsonl");
}

} // namespace

TEST_SUITE("corpus") {

TEST_CASE("generated datasets have the expected sizes") {
    CHECK(load_dataset(data_file("expertqa-bio"), "expertqa-bio").size() == 96);
    CHECK(load_dataset(data_file("expertqa-med"), "expertqa-med").size() == 504);
    CHECK(load_dataset(data_file("liveqa"), "liveqa").size() == 627);
}

TEST_CASE("order is preserved and dataset names are attached") {
    auto pairs = load_dataset(data_file("expertqa-bio"), "expertqa-bio");
    CHECK(pairs.front().id == "bio-0001");
    CHECK(pairs.back().id == "bio-0096");
    CHECK(pairs.front().dataset == "expertqa-bio");
}

TEST_CASE("upstream field names are accepted") {
    testing::TempDir dir;
    text::atomic_write_file(dir / "e.jsonl",
                            "{\"question_id\": 7, \"question_text\": \"質問\", \"answer_text\": \"回答\"}\n\n");
    text::atomic_write_file(dir / "l.jsonl", "{\"qid\": \"L1\", \"Question\": \"質問\", \"Answer\": \"回答\"}\r\n");
    auto e = load_dataset(dir / "e.jsonl", "expertqa-med");
    REQUIRE(e.size() == 1);
    CHECK(e[0].id == "7");
    CHECK_FALSE(e[0].question_en.has_value());
    auto l = load_dataset(dir / "l.jsonl", "liveqa");
    REQUIRE(l.size() == 1);
    CHECK(l[0].id == "L1");
    CHECK(l[0].reference_ja == "回答");
}

TEST_CASE("malformed lines report their line number") {
    testing::TempDir dir;
    text::atomic_write_file(dir / "bad.jsonl", "{\"id\":\"a\",\"question\":\"q\",\"answer\":\"a\"}\n{broken\n");
    try {
        load_dataset(dir / "bad.jsonl", "expertqa-bio");
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(e.line() == 2);
    }
    text::atomic_write_file(dir / "empty.jsonl", "{\"id\":\"a\",\"question\":\" \",\"answer\":\"a\"}\n");
    CHECK_THROWS_AS(load_dataset(dir / "empty.jsonl", "expertqa-bio"), LoadError);
    CHECK_THROWS_AS(load_dataset(dir / "missing.jsonl", "expertqa-bio"), LoadError);
}

TEST_CASE("duplicate ids are an integrity error naming the id") {
    testing::TempDir dir;
    text::atomic_write_file(dir / "dup.jsonl",
                            "{\"id\":\"x9\",\"question\":\"q\",\"answer\":\"a\"}\n"
                            "{\"id\":\"x9\",\"question\":\"q2\",\"answer\":\"a2\"}\n");
    try {
        load_dataset(dir / "dup.jsonl", "expertqa-bio");
        FAIL("expected IntegrityError");
    } catch (const IntegrityError& e) {
        CHECK(std::string(e.what()).find("x9") != std::string::npos);
    }
}

TEST_CASE("serialize then load round-trips") {
    testing::TempDir dir;
    auto pairs = load_dataset(data_file("liveqa"), "liveqa");
    text::atomic_write_file(dir / "rt.jsonl", serialize_dataset(pairs));
    auto again = load_dataset(dir / "rt.jsonl", "liveqa");
    REQUIRE(again.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CHECK(again[i].id == pairs[i].id);
        CHECK(again[i].question_ja == pairs[i].question_ja);
        CHECK(again[i].reference_ja == pairs[i].reference_ja);
        CHECK(again[i].question_en == pairs[i].question_en);
        CHECK(again[i].answer_en == pairs[i].answer_en);
    }
    CHECK(serialize_dataset(again) == serialize_dataset(pairs));
}

TEST_CASE("word counts") {
    CHECK(count_words("Which vegetables should people taking warfarin (Coumadin) avoid?") == 8);
    CHECK(count_words("  a  b\tc\n") == 3);
    CHECK(count_words("") == 0);
}

TEST_CASE("stats of a singleton and of an empty list") {
    QAPair p{"1", "d", "質問", "回答", "one two three four five", "six"};
    auto s = compute_stats({p});
    CHECK(s.size == 1);
    CHECK(s.mean_question_length == 5.0);
    CHECK(s.mean_answer_length == 1.0);
    CHECK(s.english_word_counts);
    CHECK_THROWS_AS(compute_stats({}), PreconditionError);
}

TEST_CASE("stats fall back to characters/2 without English text") {
    QAPair p{"1", "d", "あいうえ", "かきくけこさ", std::nullopt, std::nullopt};
    auto s = compute_stats({p});
    CHECK_FALSE(s.english_word_counts);
    CHECK(s.mean_question_length == 2.0);
    CHECK(s.mean_answer_length == 3.0);
}

TEST_CASE("stats are deterministic") {
    auto pairs = load_dataset(data_file("expertqa-med"), "expertqa-med");
    auto a = compute_stats(pairs), b = compute_stats(pairs);
    CHECK(a.mean_question_length == b.mean_question_length);
    CHECK(a.mean_answer_length == b.mean_answer_length);
    CHECK(std::abs(a.mean_question_length - 56.0) <= 0.5);
    CHECK(std::abs(a.mean_answer_length - 378.1) <= 0.5);
}

}
