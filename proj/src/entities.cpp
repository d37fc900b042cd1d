#include "kgrag/entities.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/text.hpp"

#include <nlohmann/json.hpp>

#include <unordered_set>

namespace kgrag {

using nlohmann::json;

std::string render_extraction_prompt(std::string_view tmpl, std::string_view question) {
    if (question.empty()) throw PreconditionError("question is empty");
    return text::replace_once(tmpl, kQuestionSlot, question);
}

namespace {

// Index one past the '}' closing the object opened at `open`, or npos.
std::size_t match_object(std::string_view s, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{')
            ++depth;
        else if (c == '}' && --depth == 0)
            return i + 1;
    }
    return std::string_view::npos;
}

std::optional<json> first_object(std::string_view raw) {
    std::size_t pos = 0;
    while ((pos = raw.find('{', pos)) != std::string_view::npos) {
        auto end = match_object(raw, pos);
        if (end != std::string_view::npos) {
            auto doc = json::parse(raw.substr(pos, end - pos), nullptr, false);
            if (!doc.is_discarded() && doc.is_object()) return doc;
        }
        ++pos;
    }
    return std::nullopt;
}

std::string clean_translation(std::string_view raw) {
    for (const auto& line : text::split_lines(raw)) {
        auto t = text::trim(line);
        if (t.empty()) continue;
        while (t.size() >= 2 && (t.front() == '"' || t.front() == '\'' || t.front() == '`') &&
               t.back() == t.front())
            t = text::trim(std::string_view(t).substr(1, t.size() - 2));
        if (!t.empty() && t.back() == '.') t.pop_back();
        return text::trim(t);
    }
    return {};
}

} // namespace

std::vector<std::string> parse_entity_response(std::string_view raw) {
    auto doc = first_object(raw);
    if (!doc) throw ExtractionParseError("no JSON object in extraction response", std::string(raw));
    auto it = doc->find("medical terminologies");
    if (it == doc->end() || !it->is_array())
        throw ExtractionParseError("extraction response lacks \"medical terminologies\" list", std::string(raw));

    std::vector<std::string> terms;
    std::unordered_set<std::string> seen;
    for (const auto& member : *it) {
        if (!member.is_string())
            throw ExtractionParseError("non-string member in \"medical terminologies\"", std::string(raw));
        auto term = text::normalize_whitespace(member.get<std::string>());
        if (term.empty() || !seen.insert(term).second) continue;
        if (terms.size() < kMaxEntities) terms.push_back(std::move(term));
    }
    return terms;
}

EntitySet extract_entities(const std::string& question_id, std::string_view question,
                           std::string_view extraction_template, Gateway& gateway,
                           const std::string& endpoint, Warnings& warnings) {
    auto prompt = render_extraction_prompt(extraction_template, question);
    const auto& model = gateway.endpoint(endpoint).model;

    EntitySet set{question_id, {}};
    std::vector<std::string> terms;
    bool parsed = false;
    for (int attempt = 0; attempt < 2 && !parsed; ++attempt) {
        ChatCall call{endpoint, model, {{Role::user, attempt == 0 ? prompt : prompt + "\n" + kReturnOnlyJson}}};
        auto result = gateway.chat_complete(call);
        try {
            terms = parse_entity_response(result.content);
            parsed = true;
        } catch (const ExtractionParseError& e) {
            warnings.push_back(std::string("extraction: ") + e.what() + (attempt == 0 ? "; reprompting" : ""));
        }
    }
    if (!parsed) {
        warnings.emplace_back("extraction: giving up after reprompt; continuing without entities");
        return set;
    }
    for (auto& term : terms) set.entities.push_back({std::move(term), std::nullopt, question_id});
    return set;
}

std::string render_translation_prompt(std::string_view term) {
    return std::string(kTranslationInstruction) + "\n\n" + std::string(term);
}

EntitySet translate_entities(EntitySet set, Gateway& gateway, const std::string& endpoint,
                             Warnings& warnings) {
    const auto& model = gateway.endpoint(endpoint).model;
    for (auto& entity : set.entities) {
        if (text::is_ascii(entity.surface_ja)) {
            entity.translation_en = entity.surface_ja;
            continue;
        }
        try {
            ChatCall call{endpoint, model, {{Role::user, render_translation_prompt(entity.surface_ja)}}, 0.0, 64};
            auto term = clean_translation(gateway.chat_complete(call).content);
            if (term.empty()) {
                warnings.push_back("translation: empty translation for " + entity.surface_ja);
                continue;
            }
            entity.translation_en = std::move(term);
        } catch (const HttpStatusError& e) {
            if (e.status() == 401 || e.status() == 403) throw;
            warnings.push_back("translation: " + entity.surface_ja + ": " + e.what());
        } catch (const Error& e) {
            warnings.push_back("translation: " + entity.surface_ja + ": " + e.what());
        }
    }
    return set;
}

} // namespace kgrag
