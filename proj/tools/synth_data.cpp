// Writes deterministic stand-in datasets (JSON Lines) with the sizes and
// English length profile of the evaluation sets.

#include "vocabulary.hpp"

#include "kgrag/corpus.hpp"
#include "kgrag/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace {

struct Profile {
    const char* name;
    const char* id_prefix;
    std::size_t size;
    double mean_question_words;
    double mean_answer_words;
};

constexpr Profile kProfiles[] = {
    {"expertqa-bio", "bio", 96, 56.7, 410.7},
    {"expertqa-med", "med", 504, 56.0, 378.1},
    {"liveqa", "liveqa", 627, 118.9, 438.3},
};

const char* kWarfarinQuestion = "ワルファリン（ワーファリン）を服用している人は避けるべき野菜は何ですか？";
const char* kWarfarinQuestionEn = "Which vegetables should people taking warfarin (Coumadin) avoid?";
const char* kWarfarinAnswer =
    "ワーファリンを服用している人は、ビタミンKを多く含む野菜の摂取を避けるか制限する必要があります。"
    "なぜなら、それが薬の血液凝固抑制効果を妨げる可能性があるからです。";
const char* kWarfarinAnswerEn =
    "People taking warfarin should avoid or limit the intake of vegetables that are high in vitamin K, "
    "as it may interfere with the medication's blood clotting inhibition effect.";

const char* kQuestionTemplates[] = {
    "{a}と{b}の関係について教えてください。",
    "{a}の治療中に{b}について注意すべきことは何ですか？",
    "{a}がある人は{b}を避けるべきですか？",
    "{a}は{b}にどのような影響を与えますか？",
    "{a}と{b}を同時に考える必要があるのはどのような場合ですか？",
};

const char* kAnswerFiller[] = {
    "症状が続く場合は医師に相談してください。",
    "個人差があるため、定期的な検査が推奨されます。",
    "生活習慣の改善も重要な役割を果たします。",
    "自己判断で治療を中止しないでください。",
    "詳しくは専門医の診察を受けることをお勧めします。",
};

std::string fill(std::string tmpl, const std::string& a, const std::string& b) {
    tmpl.replace(tmpl.find("{a}"), 3, a);
    tmpl.replace(tmpl.find("{b}"), 3, b);
    return tmpl;
}

// Lengths around `mean` whose sum is exactly `total`.
std::vector<std::size_t> lengths_with_total(std::size_t n, double mean, std::size_t total, std::mt19937& rng) {
    std::normal_distribution<double> dist(mean, mean * 0.3);
    const std::size_t floor_len = 5;
    std::vector<std::size_t> out(n);
    long long sum = 0;
    for (auto& len : out) {
        len = static_cast<std::size_t>(std::max<double>(floor_len, std::round(dist(rng))));
        sum += static_cast<long long>(len);
    }
    long long diff = static_cast<long long>(total) - sum;
    for (std::size_t i = 0; diff != 0; i = (i + 1) % n) {
        if (diff > 0) {
            ++out[i];
            --diff;
        } else if (out[i] > floor_len) {
            --out[i];
            ++diff;
        }
    }
    return out;
}

std::string english_text(const std::vector<std::string_view>& seed_words, std::size_t words, std::mt19937& rng) {
    std::string out;
    std::size_t n = 0;
    auto push = [&](std::string_view w) {
        if (!out.empty()) out += ' ';
        out += w;
        ++n;
    };
    std::uniform_int_distribution<std::size_t> pick(0, kgrag::vocab::kEnglishFiller.size() - 1);
    std::size_t seed_i = 0;
    while (n < words) {
        // Terms may span several words; fall back to filler when a term would overshoot.
        if (seed_i < seed_words.size()) {
            auto term = seed_words[seed_i++];
            auto term_words = kgrag::count_words(term);
            if (n + term_words <= words) {
                if (!out.empty()) out += ' ';
                out += term;
                n += term_words;
                continue;
            }
        }
        push(kgrag::vocab::kEnglishFiller[pick(rng)]);
    }
    return out;
}

std::vector<kgrag::QAPair> generate(const Profile& p, std::mt19937& rng) {
    using kgrag::vocab::kTerms;
    const bool with_warfarin = std::string(p.name) == "liveqa";
    const std::size_t fixed = with_warfarin ? 1 : 0;

    auto q_total = static_cast<std::size_t>(std::llround(p.mean_question_words * static_cast<double>(p.size)));
    auto a_total = static_cast<std::size_t>(std::llround(p.mean_answer_words * static_cast<double>(p.size)));
    if (with_warfarin) {
        q_total -= kgrag::count_words(kWarfarinQuestionEn);
        a_total -= kgrag::count_words(kWarfarinAnswerEn);
    }
    auto q_len = lengths_with_total(p.size - fixed, p.mean_question_words, q_total, rng);
    auto a_len = lengths_with_total(p.size - fixed, p.mean_answer_words, a_total, rng);

    std::vector<kgrag::QAPair> pairs;
    auto id = [&](std::size_t i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s-%04zu", p.id_prefix, i + 1);
        return std::string(buf);
    };
    if (with_warfarin)
        pairs.push_back({id(0), p.name, kWarfarinQuestion, kWarfarinAnswer, kWarfarinQuestionEn, kWarfarinAnswerEn});

    std::uniform_int_distribution<std::size_t> term(0, kTerms.size() - 1);
    std::uniform_int_distribution<std::size_t> tmpl(0, std::size(kQuestionTemplates) - 1);
    std::uniform_int_distribution<std::size_t> filler(0, std::size(kAnswerFiller) - 1);
    std::uniform_int_distribution<int> extra(1, 3);
    for (std::size_t i = 0; i + fixed < p.size; ++i) {
        const auto& a = kTerms[term(rng)];
        auto bi = term(rng);
        while (kTerms[bi].ja == a.ja) bi = term(rng);
        const auto& b = kTerms[bi];

        std::string question = fill(kQuestionTemplates[tmpl(rng)], std::string(a.ja), std::string(b.ja));
        std::string answer = std::string(a.note_ja) + std::string(b.note_ja);
        for (int k = extra(rng); k > 0; --k) answer += kAnswerFiller[filler(rng)];

        auto q_en = english_text({a.en, b.en}, q_len[i], rng);
        auto a_en = english_text({a.en, b.en}, a_len[i], rng);
        pairs.push_back({id(i + fixed), p.name, question, answer, q_en, a_en});
    }
    return pairs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate synthetic Japanese medical QA datasets"};
    std::filesystem::path out = "data";
    unsigned seed = 1729;
    app.add_option("--out", out, "Output directory")->required();
    app.add_option("--seed", seed, "Random seed");
    CLI11_PARSE(app, argc, argv);

    std::mt19937 rng(seed);
    for (const auto& profile : kProfiles) {
        auto pairs = generate(profile, rng);
        kgrag::text::atomic_write_file(out / (std::string(profile.name) + ".jsonl"),
                                       kgrag::serialize_dataset(pairs));
    }
    return 0;
}
