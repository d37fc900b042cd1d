#include "kgrag/trace.hpp"

#include "kgrag/errors.hpp"

#include <sstream>

namespace kgrag {

using nlohmann::json;

bool TraceRecord::failed() const {
    if (!answer_baseline || !score_baseline) return true;
    if (rag_enabled && (!answer_rag || !score_rag)) return true;
    return false;
}

namespace {

json answer_to_json(const std::optional<AnswerRecord>& a) {
    if (!a) return nullptr;
    return {{"mode", to_string(a->mode)},
            {"answer", a->answer},
            {"model", a->model},
            {"completion_tokens", a->completion_tokens}};
}

std::optional<AnswerRecord> answer_from_json(const json& j, const std::string& qid) {
    if (j.is_null()) return std::nullopt;
    AnswerRecord a;
    a.question_id = qid;
    a.mode = j.at("mode").get<std::string>() == "rag" ? AnswerMode::rag : AnswerMode::baseline;
    a.answer = j.at("answer").get<std::string>();
    a.model = j.at("model").get<std::string>();
    a.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
    return a;
}

json score_to_json(const std::optional<MetricPair>& s) {
    if (!s) return nullptr;
    return {{"rouge_l", s->rouge_l}, {"bertscore", s->bertscore}};
}

std::optional<MetricPair> score_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return MetricPair{j.at("rouge_l").get<double>(), j.at("bertscore").get<double>()};
}

json triple_to_json(const KnowledgeTriple& t) {
    return {{"subject", t.subject},
            {"relation", t.relation},
            {"object", t.object},
            {"source_entity", t.source_entity},
            {"source_concept", t.source_concept}};
}

KnowledgeTriple triple_from_json(const json& j) {
    return {j.at("subject").get<std::string>(), j.at("relation").get<std::string>(),
            j.at("object").get<std::string>(), j.at("source_entity").get<std::string>(),
            j.at("source_concept").get<std::string>()};
}

} // namespace

json trace_to_json(const TraceRecord& t) {
    json entities = json::array();
    for (const auto& e : t.entities)
        entities.push_back({{"surface_ja", e.surface_ja},
                            {"translation_en", e.translation_en ? json(*e.translation_en) : json(nullptr)}});
    json ranked = json::array();
    for (const auto& st : t.ranked) {
        auto j = triple_to_json(st.triple);
        j["serialized"] = st.serialized;
        j["score"] = st.score;
        ranked.push_back(std::move(j));
    }
    return {{"question_id", t.question_id},
            {"dataset", t.dataset},
            {"model", t.model},
            {"question_ja", t.question_ja},
            {"reference_ja", t.reference_ja},
            {"rag_enabled", t.rag_enabled},
            {"status", t.failed() ? "failed" : "complete"},
            {"stages", t.stages},
            {"entities", std::move(entities)},
            {"triple_counts", t.triple_counts},
            {"triples_retrieved", t.triples_retrieved},
            {"ranked_triples", std::move(ranked)},
            {"knowledge", {{"sentences", t.knowledge}, {"fallback", t.knowledge_fallback}}},
            {"answer_baseline", answer_to_json(t.answer_baseline)},
            {"answer_rag", answer_to_json(t.answer_rag)},
            {"scores", {{"baseline", score_to_json(t.score_baseline)}, {"rag", score_to_json(t.score_rag)}}},
            {"warnings", t.warnings},
            {"errors", t.errors}};
}

TraceRecord trace_from_json(const json& doc) {
    try {
        TraceRecord t;
        t.question_id = doc.at("question_id").get<std::string>();
        t.dataset = doc.at("dataset").get<std::string>();
        t.model = doc.at("model").get<std::string>();
        t.question_ja = doc.at("question_ja").get<std::string>();
        t.reference_ja = doc.at("reference_ja").get<std::string>();
        t.rag_enabled = doc.at("rag_enabled").get<bool>();
        t.stages = doc.at("stages").get<std::map<std::string, std::string>>();
        for (const auto& e : doc.at("entities")) {
            MedicalEntity m{e.at("surface_ja").get<std::string>(), std::nullopt, t.question_id};
            if (!e.at("translation_en").is_null()) m.translation_en = e.at("translation_en").get<std::string>();
            t.entities.push_back(std::move(m));
        }
        t.triple_counts = doc.at("triple_counts").get<std::map<std::string, std::size_t>>();
        t.triples_retrieved = doc.at("triples_retrieved").get<std::size_t>();
        for (const auto& r : doc.at("ranked_triples"))
            t.ranked.push_back({triple_from_json(r), r.at("serialized").get<std::string>(), r.at("score").get<double>()});
        t.knowledge = doc.at("knowledge").at("sentences").get<std::vector<std::string>>();
        t.knowledge_fallback = doc.at("knowledge").at("fallback").get<bool>();
        t.answer_baseline = answer_from_json(doc.at("answer_baseline"), t.question_id);
        t.answer_rag = answer_from_json(doc.at("answer_rag"), t.question_id);
        t.score_baseline = score_from_json(doc.at("scores").at("baseline"));
        t.score_rag = score_from_json(doc.at("scores").at("rag"));
        t.warnings = doc.at("warnings").get<std::vector<std::string>>();
        t.errors = doc.at("errors").get<std::vector<std::string>>();
        return t;
    } catch (const json::exception& e) {
        throw DecodeError(std::string("malformed trace record: ") + e.what());
    }
}

std::string serialize_trace(const TraceRecord& t) {
    return trace_to_json(t).dump(2) + "\n";
}

std::string render_trace_text(const TraceRecord& t) {
    std::ostringstream out;
    out << "Question [" << t.question_id << ", " << t.dataset << "]:\n  " << t.question_ja << "\n";
    out << "Stages:";
    for (const auto& [stage, status] : t.stages) out << " " << stage << "=" << status;
    out << "\nEntities:";
    for (const auto& e : t.entities)
        out << " " << e.surface_ja << "(" << (e.translation_en ? *e.translation_en : "-") << ")";
    out << "\nRetrieved triples: " << t.triples_retrieved << "\n";
    out << "Ranked triples:\n";
    for (const auto& st : t.ranked) {
        char score[32];
        std::snprintf(score, sizeof score, "%.4f", st.score);
        out << "  [" << score << "] " << st.serialized << "\n";
    }
    out << "Retrieved Medical Knowledge:" << (t.knowledge_fallback ? " (fallback: serialized triples)" : "") << "\n";
    for (std::size_t i = 0; i < t.knowledge.size(); ++i) out << "  " << i + 1 << "." << t.knowledge[i] << "\n";
    out << "Ground Truth:\n  " << t.reference_ja << "\n";
    auto answer = [&](const char* label, const std::optional<AnswerRecord>& a, const std::optional<MetricPair>& s) {
        out << label << ":\n  " << (a ? a->answer : "(none)") << "\n";
        if (s) out << "  ROUGE-L " << format_cell(s->rouge_l) << "  BERTScore " << format_cell(s->bertscore) << "\n";
    };
    answer("Generated Answer (baseline)", t.answer_baseline, t.score_baseline);
    if (t.rag_enabled) answer("Generated Answer (RAG)", t.answer_rag, t.score_rag);
    if (!t.warnings.empty()) {
        out << "Warnings:\n";
        for (const auto& w : t.warnings) out << "  - " << w << "\n";
    }
    if (!t.errors.empty()) {
        out << "Errors:\n";
        for (const auto& e : t.errors) out << "  - " << e << "\n";
    }
    return out.str();
}

} // namespace kgrag
