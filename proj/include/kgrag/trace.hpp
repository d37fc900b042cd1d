#pragma once

#include "kgrag/entities.hpp"
#include "kgrag/generation.hpp"
#include "kgrag/metrics.hpp"
#include "kgrag/ranking.hpp"
#include "kgrag/warnings.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgrag {

// Stage names, in pipeline order.
inline constexpr const char* kStageBaseline = "baseline";
inline constexpr const char* kStageExtraction = "extraction";
inline constexpr const char* kStageTranslation = "translation";
inline constexpr const char* kStageRetrieval = "retrieval";
inline constexpr const char* kStageRanking = "ranking";
inline constexpr const char* kStageConversion = "conversion";
inline constexpr const char* kStageGeneration = "generation";
inline constexpr const char* kStageScoring = "scoring";

// complete | empty | partial | fallback | failed | skipped
using StageStatus = std::string;

struct TraceRecord {
    std::string question_id;
    std::string dataset;
    std::string model;
    std::string question_ja;
    std::string reference_ja;
    bool rag_enabled = true;

    std::map<std::string, StageStatus> stages;
    std::vector<MedicalEntity> entities;
    std::map<std::string, std::size_t> triple_counts;
    std::size_t triples_retrieved = 0;
    std::vector<ScoredTriple> ranked;
    std::vector<std::string> knowledge;
    bool knowledge_fallback = false;

    std::optional<AnswerRecord> answer_baseline;
    std::optional<AnswerRecord> answer_rag;
    std::optional<MetricPair> score_baseline;
    std::optional<MetricPair> score_rag;

    Warnings warnings;
    std::vector<std::string> errors;

    // Wall-clock milliseconds per stage. Kept out of the trace file (see
    // trace_to_json) so archives are byte-stable across replays.
    std::map<std::string, double> timing_ms;

    // A trace is failed when any leg it ran lacks a scored answer.
    bool failed() const;
};

nlohmann::json trace_to_json(const TraceRecord& t);
TraceRecord trace_from_json(const nlohmann::json& doc);

std::string serialize_trace(const TraceRecord& t);

// Plain text case-study rendering: knowledge, ground truth, both answers.
std::string render_trace_text(const TraceRecord& t);

} // namespace kgrag
