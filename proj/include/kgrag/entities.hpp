#pragma once

#include "kgrag/gateway.hpp"
#include "kgrag/prompts.hpp"
#include "kgrag/warnings.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgrag {

inline constexpr std::size_t kMaxEntities = 4;

struct MedicalEntity {
    std::string surface_ja;
    std::optional<std::string> translation_en;
    std::string source_question_id;
};

struct EntitySet {
    std::string question_id;
    std::vector<MedicalEntity> entities; // at most kMaxEntities, unique surfaces
};

// Fixed micro-prompt for word-level translation; the term follows on its own line.
inline constexpr const char* kTranslationInstruction =
    "Translate this Japanese medical term into its standard English medical term. Return only the term.";

inline constexpr const char* kReturnOnlyJson = "Return only the json.";

std::string render_extraction_prompt(std::string_view tmpl, std::string_view question);

// Reads the first well-formed JSON object in `raw` (prose and code fences
// around it are ignored) and returns its "medical terminologies" strings,
// whitespace-normalized, de-duplicated in first-occurrence order and capped
// at kMaxEntities. Throws ExtractionParseError otherwise.
std::vector<std::string> parse_entity_response(std::string_view raw);

// Prompt -> chat -> parse, with exactly one reprompt on a parse failure.
// A second failure yields an empty set and a warning. Gateway errors propagate.
EntitySet extract_entities(const std::string& question_id, std::string_view question,
                           std::string_view extraction_template, Gateway& gateway,
                           const std::string& endpoint, Warnings& warnings);

std::string render_translation_prompt(std::string_view term);

// One LLM call per non-ASCII entity; ASCII-only surfaces pass through as their
// own translation. Per-entity failures leave translation_en empty and add a warning.
EntitySet translate_entities(EntitySet set, Gateway& gateway, const std::string& endpoint,
                             Warnings& warnings);

} // namespace kgrag
