#include "kgrag/generation.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

namespace kgrag {

std::string_view to_string(AnswerMode mode) {
    return mode == AnswerMode::rag ? "rag" : "baseline";
}

std::string render_declarative_prompt(std::string_view tmpl, const std::vector<KnowledgeTriple>& triples) {
    if (triples.empty()) throw PreconditionError("declarative conversion needs at least one triple");
    std::string joined;
    for (const auto& t : triples) {
        if (!joined.empty()) joined += '\n';
        joined += serialize_triple_text(t);
    }
    return text::replace_once(tmpl, kTripleSlot, joined);
}

namespace {

bool is_digit(char32_t c) { return (c >= U'0' && c <= U'9') || (c >= U'０' && c <= U'９'); }

bool is_bullet(char32_t c) {
    switch (c) {
    case U'-': case U'‐': case U'‑': case U'－': case U'・': case U'*': case U'•': case U'●': case U'◦':
        return true;
    default:
        return false;
    }
}

bool is_number_terminator(char32_t c) {
    return c == U'.' || c == U')' || c == U'．' || c == U'）' || c == U'、' || c == U':' || c == U'：';
}

std::string strip_marker(std::string_view line) {
    auto cps = text::decode_utf8(text::trim(line));
    std::size_t i = 0;
    if (i < cps.size() && (cps[i] == U'(' || cps[i] == U'（')) {
        std::size_t j = i + 1;
        while (j < cps.size() && is_digit(cps[j])) ++j;
        if (j > i + 1 && j < cps.size() && (cps[j] == U')' || cps[j] == U'）')) i = j + 1;
    } else if (i < cps.size() && is_digit(cps[i])) {
        std::size_t j = i;
        while (j < cps.size() && is_digit(cps[j])) ++j;
        if (j < cps.size() && is_number_terminator(cps[j])) i = j + 1;
    } else if (i < cps.size() && is_bullet(cps[i])) {
        i = i + 1;
    }
    std::string out;
    for (; i < cps.size(); ++i) out += text::encode_utf8(cps[i]);
    return text::trim(out);
}

} // namespace

std::vector<std::string> parse_declarative_response(std::string_view raw) {
    std::vector<std::string> sentences;
    for (const auto& line : text::split_lines(raw)) {
        auto s = strip_marker(line);
        if (!s.empty()) sentences.push_back(std::move(s));
    }
    return sentences;
}

DeclarativeKnowledge convert_declarative(const std::string& question_id,
                                         const std::vector<ScoredTriple>& ranked,
                                         std::string_view tmpl, Gateway& gateway,
                                         const std::string& endpoint, Warnings& warnings) {
    DeclarativeKnowledge knowledge{question_id, {}, {}, false};
    if (ranked.empty()) return knowledge;

    for (const auto& st : ranked) knowledge.source_triples.push_back(st.triple);
    auto prompt = render_declarative_prompt(tmpl, knowledge.source_triples);
    try {
        ChatCall call{endpoint, gateway.endpoint(endpoint).model, {{Role::user, prompt}}};
        knowledge.sentences = parse_declarative_response(gateway.chat_complete(call).content);
        if (knowledge.sentences.empty()) warnings.emplace_back("conversion: model returned no sentences");
    } catch (const Error& e) {
        warnings.push_back(std::string("conversion: ") + e.what() + "; using serialized triples");
        knowledge.fallback = true;
    }
    if (knowledge.fallback) {
        knowledge.sentences.clear();
        for (const auto& st : ranked) knowledge.sentences.push_back(st.serialized);
    }
    return knowledge;
}

std::string render_answer_prompt(std::string_view tmpl, std::string_view question,
                                 const DeclarativeKnowledge& knowledge) {
    if (question.empty()) throw PreconditionError("question is empty");
    std::string joined;
    for (const auto& s : knowledge.sentences) {
        if (!joined.empty()) joined += '\n';
        joined += s;
    }
    if (joined.empty()) joined = kNoKnowledge;
    return text::fill_slots(tmpl, {{kQuestionSlot, question}, {kKnowledgeSlot, joined}});
}

std::string render_baseline_prompt(std::string_view baseline_tmpl, std::string_view question) {
    if (question.empty()) throw PreconditionError("question is empty");
    return text::replace_once(baseline_tmpl, kQuestionSlot, question);
}

AnswerRecord generate_answer(const std::string& question_id, std::string_view question,
                             const std::optional<DeclarativeKnowledge>& knowledge,
                             const PromptSet& prompts, Gateway& gateway, const std::string& endpoint) {
    auto prompt = knowledge ? render_answer_prompt(prompts.answer, question, *knowledge)
                            : render_baseline_prompt(prompts.baseline_answer(), question);
    const auto& model = gateway.endpoint(endpoint).model;
    ChatCall call{endpoint, model, {{Role::user, std::move(prompt)}}, 0.0, kAnswerMaxTokens};
    auto result = gateway.chat_complete(call);
    auto answer = text::trim(result.content);
    if (answer.empty()) throw ProviderContractError("model returned an empty answer");
    return {question_id, knowledge ? AnswerMode::rag : AnswerMode::baseline, std::move(answer), model,
            result.usage.completion_tokens};
}

} // namespace kgrag
