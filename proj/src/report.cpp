#include "kgrag/report.hpp"

#include "kgrag/text.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace kgrag {

ReportSettings report_settings(const PipelineConfig& config) {
    return {config.top_k, config.max_relations, config.embedding.model, config.token_embedding.model,
            config.knowledge_base.version};
}

std::vector<std::pair<std::string, std::string>> report_header(const ReportSettings& s) {
    return {
        {"top_k", std::to_string(s.top_k)},
        {"max_relations_per_concept", std::to_string(s.max_relations)},
        {"concepts_per_entity", "1 (top-ranked search hit)"},
        {"relations", "all labeled relations returned by the knowledge base (no type filter)"},
        {"knowledge_base_version", s.kb_version},
        {"relevance", "cosine(question embedding, 'subject relation object' embedding)"},
        {"embedding_model", s.embedding_model},
        {"rouge_l", "character tokens (code points, whitespace dropped), F1 with beta=1"},
        {"bertscore", "greedy max-cosine matching over character tokens, no idf, no rescaling"},
        {"token_embedding_model", s.token_embedding_model},
        {"temperature", "0"},
        {"answer_max_tokens", "512"},
        {"baseline_prompt", "answer template with the background-knowledge line removed"},
        {"empty_knowledge", "rendered as (なし)"},
        {"delta", "rag mean - baseline mean, in points"},
    };
}

namespace {

void sort_reports(std::vector<AggregateReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
        return std::tie(a.model, a.dataset) < std::tie(b.model, b.dataset);
    });
}

std::string fixed(double v, const char* fmt = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string header_block(const ReportSettings& settings) {
    std::string out;
    for (const auto& [k, v] : report_header(settings)) out += "# " + k + ": " + v + "\n";
    return out;
}

std::string pad(const std::string& s, std::size_t width) {
    // Width counts code points so Japanese labels stay roughly aligned.
    auto n = text::decode_utf8(s).size();
    return n >= width ? s : s + std::string(width - n, ' ');
}

} // namespace

std::string render_report_tsv(std::vector<AggregateReport> reports, const ReportSettings& settings) {
    sort_reports(reports);
    std::string out = header_block(settings);
    out += "model\tdataset\tpartial\tn_evaluated\tn_failed\tbaseline_rouge_l\tbaseline_bertscore\t"
           "rag_rouge_l\trag_bertscore\tdelta_rouge_l\tdelta_bertscore\n";
    for (const auto& r : reports) {
        out += r.model + "\t" + r.dataset + "\t" + (r.partial ? "yes" : "no") + "\t" +
               std::to_string(r.n_evaluated) + "\t" + std::to_string(r.n_failed) + "\t" +
               fixed(r.baseline.rouge_l) + "\t" + fixed(r.baseline.bertscore) + "\t" +
               (r.rag ? fixed(r.rag->rouge_l) : "") + "\t" + (r.rag ? fixed(r.rag->bertscore) : "") + "\t" +
               (r.delta ? fixed(r.delta->rouge_l, "%+.4f") : "") + "\t" +
               (r.delta ? fixed(r.delta->bertscore, "%+.4f") : "") + "\n";
    }
    return out;
}

std::string render_report_text(std::vector<AggregateReport> reports, const ReportSettings& settings) {
    sort_reports(reports);
    std::vector<std::string> models;
    std::set<std::string> dataset_set;
    std::map<std::pair<std::string, std::string>, const AggregateReport*> cell;
    for (const auto& r : reports) {
        if (models.empty() || models.back() != r.model) models.push_back(r.model);
        dataset_set.insert(r.dataset);
        cell[{r.model, r.dataset}] = &r;
    }
    std::vector<std::string> datasets(dataset_set.begin(), dataset_set.end());

    // rows[0..1] are header rows; each row holds 1 + 2*|datasets| cells.
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> h1{"Model"}, h2{""};
    for (const auto& d : datasets) {
        h1.push_back(d);
        h1.emplace_back("");
        h2.emplace_back("ROUGE-L");
        h2.emplace_back("BERTScore");
    }
    rows.push_back(h1);
    rows.push_back(h2);
    std::vector<std::size_t> separators; // row indices preceded by a rule
    for (const auto& m : models) {
        separators.push_back(rows.size());
        std::vector<std::string> base{m}, rag{m + " + RAG"};
        bool any_rag = false;
        for (const auto& d : datasets) {
            auto it = cell.find({m, d});
            if (it == cell.end()) {
                base.insert(base.end(), {"-", "-"});
                rag.insert(rag.end(), {"-", "-"});
                continue;
            }
            const auto& r = *it->second;
            base.push_back(format_cell(r.baseline.rouge_l));
            base.push_back(format_cell(r.baseline.bertscore));
            if (r.rag) {
                any_rag = true;
                rag.push_back(format_cell(r.rag->rouge_l, r.delta->rouge_l));
                rag.push_back(format_cell(r.rag->bertscore, r.delta->bertscore));
            } else {
                rag.insert(rag.end(), {"-", "-"});
            }
        }
        rows.push_back(base);
        if (any_rag) rows.push_back(rag);
    }

    std::vector<std::size_t> width(1 + 2 * datasets.size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], text::decode_utf8(row[c]).size());
    std::size_t total = 0;
    for (auto w : width) total += w + 2;

    std::ostringstream out;
    out << header_block(settings);
    std::string rule(total, '-');
    out << rule << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::find(separators.begin(), separators.end(), i) != separators.end()) out << rule << "\n";
        std::string line;
        for (std::size_t c = 0; c < rows[i].size(); ++c) line += pad(rows[i][c], width[c] + 2);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << "\n";
    }
    out << rule << "\n";
    for (const auto& r : reports) {
        out << r.model << " / " << r.dataset << ": n_evaluated=" << r.n_evaluated << " n_failed=" << r.n_failed;
        if (r.partial) out << " (partial)";
        out << "\n";
    }
    return out.str();
}

void emit_report(const std::vector<AggregateReport>& reports, const ReportSettings& settings,
                 const std::filesystem::path& dir) {
    text::atomic_write_file(dir / "report.tsv", render_report_tsv(reports, settings));
    text::atomic_write_file(dir / "report.txt", render_report_text(reports, settings));
}

} // namespace kgrag
