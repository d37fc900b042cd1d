#pragma once

#include "kgrag/gateway.hpp"
#include "kgrag/prompts.hpp"
#include "kgrag/ranking.hpp"
#include "kgrag/warnings.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgrag {

inline constexpr int kAnswerMaxTokens = 512;
inline constexpr const char* kNoKnowledge = "(なし)";

struct DeclarativeKnowledge {
    std::string question_id;
    std::vector<std::string> sentences;
    std::vector<KnowledgeTriple> source_triples;
    // Set when conversion failed and `sentences` holds serialized triples.
    bool fallback = false;
};

enum class AnswerMode { baseline, rag };

std::string_view to_string(AnswerMode mode);

struct AnswerRecord {
    std::string question_id;
    AnswerMode mode = AnswerMode::baseline;
    std::string answer;
    std::string model;
    std::int64_t completion_tokens = 0;
};

std::string render_declarative_prompt(std::string_view tmpl, const std::vector<KnowledgeTriple>& triples);

// One sentence per non-empty line, leading enumeration markers removed.
std::vector<std::string> parse_declarative_response(std::string_view raw);

// Empty input: no LLM call. Gateway failure: falls back to the serialized
// triples verbatim (fallback = true) and records a warning.
DeclarativeKnowledge convert_declarative(const std::string& question_id,
                                         const std::vector<ScoredTriple>& ranked,
                                         std::string_view tmpl, Gateway& gateway,
                                         const std::string& endpoint, Warnings& warnings);

std::string render_answer_prompt(std::string_view tmpl, std::string_view question,
                                 const DeclarativeKnowledge& knowledge);
std::string render_baseline_prompt(std::string_view baseline_tmpl, std::string_view question);

// RAG mode when `knowledge` is given, baseline otherwise. Throws on gateway
// errors and on an empty answer.
AnswerRecord generate_answer(const std::string& question_id, std::string_view question,
                             const std::optional<DeclarativeKnowledge>& knowledge,
                             const PromptSet& prompts, Gateway& gateway, const std::string& endpoint);

} // namespace kgrag
