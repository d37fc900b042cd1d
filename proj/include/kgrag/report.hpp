#pragma once

#include "kgrag/config.hpp"
#include "kgrag/metrics.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace kgrag {

// Settings stamped into every report header.
struct ReportSettings {
    int top_k = 10;
    int max_relations = 50;
    std::string embedding_model;
    std::string token_embedding_model;
    std::string kb_version;
};

ReportSettings report_settings(const PipelineConfig& config);

// Header lines ("# key: value") describing every default in force.
std::vector<std::pair<std::string, std::string>> report_header(const ReportSettings& settings);

// Rows are sorted by (model, dataset) whatever the input order.
std::string render_report_tsv(std::vector<AggregateReport> reports, const ReportSettings& settings);

// Aligned table: one "Model" and one "Model + RAG" row per model, a
// ROUGE-L/BERTScore column pair per dataset, RAG cells as "mean (+d.dd%)".
std::string render_report_text(std::vector<AggregateReport> reports, const ReportSettings& settings);

// Writes {dir}/report.tsv and {dir}/report.txt.
void emit_report(const std::vector<AggregateReport>& reports, const ReportSettings& settings,
                 const std::filesystem::path& dir);

} // namespace kgrag
