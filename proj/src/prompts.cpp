#include "kgrag/prompts.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

namespace {

std::string load_template(const std::filesystem::path& path, const char* slot) {
    if (!std::filesystem::exists(path)) throw ConfigError("missing prompt template " + path.string());
    auto body = text::read_file(path);
    if (!body.empty() && body.back() == '\n') body.pop_back();
    if (body.find(slot) == std::string::npos)
        throw ConfigError(path.string() + " lacks placeholder " + slot);
    return body;
}

} // namespace

PromptSet PromptSet::load(const std::filesystem::path& dir) {
    PromptSet set;
    set.extraction = load_template(dir / "entity_extraction.txt", kQuestionSlot);
    set.declarative = load_template(dir / "declarative_conversion.txt", kTripleSlot);
    set.answer = load_template(dir / "answer_generation.txt", kKnowledgeSlot);
    if (set.answer.find(kQuestionSlot) == std::string::npos)
        throw ConfigError("answer_generation.txt lacks placeholder {question}");
    return set;
}

std::string PromptSet::baseline_answer() const {
    auto slot = answer.find(kKnowledgeSlot);
    auto line_start = answer.rfind('\n', slot);
    line_start = line_start == std::string::npos ? 0 : line_start + 1;
    auto line_end = answer.find('\n', slot);
    line_end = line_end == std::string::npos ? answer.size() : line_end + 1;
    return answer.substr(0, line_start) + answer.substr(line_end);
}

std::filesystem::path default_prompts_dir() {
#ifdef KGRAG_PROMPTS_DIR
    return KGRAG_PROMPTS_DIR;
#else
    return "prompts";
#endif
}

} // namespace kgrag
