#pragma once

#include <filesystem>
#include <string>

namespace kgrag {

inline constexpr const char* kQuestionSlot = "{question}";
inline constexpr const char* kTripleSlot = "{triple}";
inline constexpr const char* kKnowledgeSlot = "{background_knowledge}";

// The three prompt templates, read from a prompts/ directory. Each file holds
// one template; a single trailing newline is not part of the template.
struct PromptSet {
    std::string extraction;  // entity_extraction.txt
    std::string declarative; // declarative_conversion.txt
    std::string answer;      // answer_generation.txt

    static PromptSet load(const std::filesystem::path& dir);

    // Answer template with the background-knowledge line removed.
    std::string baseline_answer() const;
};

// Compiled-in location of the repository's prompts/ directory.
std::filesystem::path default_prompts_dir();

} // namespace kgrag
