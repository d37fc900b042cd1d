#include "kgrag/corpus.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/metrics.hpp"
#include "kgrag/text.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <unordered_set>

namespace kgrag {

using nlohmann::json;

bool is_known_dataset(std::string_view name) {
    for (auto n : kDatasetNames)
        if (n == name) return true;
    return false;
}

std::vector<std::string_view> field_aliases(std::string_view dataset, std::string_view field) {
    // ExpertQA exports carry question_id / question_text / answer_text;
    // LiveQA exports carry qid / Question / Answer.
    bool liveqa = dataset == "liveqa";
    if (field == "id") {
        if (liveqa) return {"id", "qid", "question_id"};
        return {"id", "question_id", "qid"};
    }
    if (field == "question") {
        if (liveqa) return {"question", "Question", "question_ja"};
        return {"question", "question_text", "question_ja"};
    }
    if (field == "answer") {
        if (liveqa) return {"answer", "Answer", "answer_ja"};
        return {"answer", "answer_text", "answer_ja"};
    }
    if (field == "question_en") return {"question_en", "question_original"};
    if (field == "answer_en") return {"answer_en", "answer_original"};
    return {field};
}

namespace {

std::optional<std::string> pick(const json& obj, std::string_view dataset, std::string_view field,
                                std::size_t line_no) {
    for (auto key : field_aliases(dataset, field)) {
        auto it = obj.find(std::string(key));
        if (it == obj.end() || it->is_null()) continue;
        if (it->is_string()) return it->get<std::string>();
        if (field == "id" && it->is_number_integer()) return std::to_string(it->get<long long>());
        throw LoadError("line " + std::to_string(line_no) + ": field " + std::string(key) +
                            " has the wrong type",
                        line_no);
    }
    return std::nullopt;
}

} // namespace

std::vector<QAPair> load_dataset(const std::filesystem::path& path, const std::string& dataset) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open dataset file " + path.string(), 0);

    std::vector<QAPair> pairs;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        auto obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": malformed record", line_no);

        auto fail = [&](const char* what) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + what, line_no);
        };
        auto id = pick(obj, dataset, "id", line_no);
        auto question = pick(obj, dataset, "question", line_no);
        auto answer = pick(obj, dataset, "answer", line_no);
        if (!id || text::trim(*id).empty()) fail("missing id");
        if (!question || text::trim(*question).empty()) fail("missing or empty question");
        if (!answer || text::trim(*answer).empty()) fail("missing or empty answer");
        if (!ids.insert(*id).second) throw IntegrityError("duplicate id in " + dataset + ": " + *id);

        pairs.push_back({*id, dataset, *question, *answer, pick(obj, dataset, "question_en", line_no),
                         pick(obj, dataset, "answer_en", line_no)});
    }
    return pairs;
}

std::string serialize_dataset(const std::vector<QAPair>& pairs) {
    std::string out;
    for (const auto& p : pairs) {
        json obj = {{"id", p.id}, {"question", p.question_ja}, {"answer", p.reference_ja}};
        if (p.question_en) obj["question_en"] = *p.question_en;
        if (p.answer_en) obj["answer_en"] = *p.answer_en;
        out += obj.dump() + "\n";
    }
    return out;
}

std::size_t count_words(std::string_view s) {
    std::size_t words = 0;
    bool in_word = false;
    for (char32_t cp : text::decode_utf8(s)) {
        bool space = text::is_space(cp);
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

DatasetStats compute_stats(const std::vector<QAPair>& pairs) {
    if (pairs.empty()) throw PreconditionError("cannot compute statistics of an empty dataset");
    DatasetStats stats;
    stats.size = pairs.size();
    for (const auto& p : pairs)
        if (!p.question_en || !p.answer_en) stats.english_word_counts = false;

    double q = 0, a = 0;
    for (const auto& p : pairs) {
        if (stats.english_word_counts) {
            q += static_cast<double>(count_words(*p.question_en));
            a += static_cast<double>(count_words(*p.answer_en));
        } else {
            q += static_cast<double>(metric_tokens(p.question_ja).size()) / 2.0;
            a += static_cast<double>(metric_tokens(p.reference_ja).size()) / 2.0;
        }
    }
    stats.mean_question_length = q / static_cast<double>(pairs.size());
    stats.mean_answer_length = a / static_cast<double>(pairs.size());
    return stats;
}

} // namespace kgrag
