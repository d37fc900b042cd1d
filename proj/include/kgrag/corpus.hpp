#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgrag {

inline constexpr std::array<std::string_view, 3> kDatasetNames = {"expertqa-bio", "expertqa-med", "liveqa"};

bool is_known_dataset(std::string_view name);

struct QAPair {
    std::string id;
    std::string dataset;
    std::string question_ja;
    std::string reference_ja;
    std::optional<std::string> question_en;
    std::optional<std::string> answer_en;
};

struct DatasetStats {
    std::size_t size = 0;
    double mean_question_length = 0.0;
    double mean_answer_length = 0.0;
    // False when lengths fall back to Japanese characters / 2.
    bool english_word_counts = true;
};

// One JSON object per line with keys id, question, answer (optional
// question_en, answer_en). Upstream field aliases are accepted per dataset,
// see field_aliases(). Blank lines are skipped.
// Throws LoadError (with 1-based line number) or IntegrityError (duplicate id).
std::vector<QAPair> load_dataset(const std::filesystem::path& path, const std::string& dataset);

// Accepted source keys for a canonical field ("id", "question", "answer",
// "question_en", "answer_en"), most preferred first.
std::vector<std::string_view> field_aliases(std::string_view dataset, std::string_view field);

std::string serialize_dataset(const std::vector<QAPair>& pairs);

std::size_t count_words(std::string_view s);

// Table of sizes and mean lengths; whitespace word counts of the English
// counterparts when every pair carries them. Throws on an empty list.
DatasetStats compute_stats(const std::vector<QAPair>& pairs);

} // namespace kgrag
