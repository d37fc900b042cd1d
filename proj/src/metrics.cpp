#include "kgrag/metrics.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/ranking.hpp"
#include "kgrag/text.hpp"

#include <cstdio>
#include <set>

namespace kgrag {

std::vector<char32_t> metric_tokens(std::string_view s) {
    std::vector<char32_t> tokens;
    for (char32_t cp : text::decode_utf8(s))
        if (!text::is_space(cp)) tokens.push_back(cp);
    return tokens;
}

namespace {

PrfScore combine(double precision, double recall) {
    PrfScore s{precision, recall, 0.0};
    if (precision + recall > 0) s.f1 = 2 * precision * recall / (precision + recall);
    return s;
}

} // namespace

PrfScore rouge_l_prf(std::string_view candidate, std::string_view reference) {
    auto cand = metric_tokens(candidate);
    auto ref = metric_tokens(reference);
    if (cand.empty() && ref.empty()) return {1.0, 1.0, 1.0};
    if (cand.empty() || ref.empty()) return {};
    auto lcs = static_cast<double>(lcs_length<char32_t>(cand, ref));
    auto m = static_cast<double>(cand.size()), n = static_cast<double>(ref.size());
    // With beta = 1, F1 reduces to 2L / (m + n); one division keeps worked values exact.
    return {lcs / m, lcs / n, 2.0 * lcs / (m + n)};
}

double rouge_l(std::string_view candidate, std::string_view reference) {
    return 100.0 * rouge_l_prf(candidate, reference).f1;
}

PrfScore bertscore_prf(std::span<const TokenVector> candidate, std::span<const TokenVector> reference) {
    if (candidate.empty() || reference.empty()) throw PreconditionError("bertscore: empty token list");
    auto dim = candidate.front().vector.size();
    for (auto side : {candidate, reference})
        for (const auto& t : side)
            if (t.vector.size() != dim) throw PreconditionError("bertscore: dimension mismatch");

    std::vector<std::vector<double>> sim(candidate.size(), std::vector<double>(reference.size()));
    for (std::size_t i = 0; i < candidate.size(); ++i)
        for (std::size_t j = 0; j < reference.size(); ++j)
            sim[i][j] = cosine_similarity(candidate[i].vector, reference[j].vector);

    double precision = 0;
    for (std::size_t i = 0; i < candidate.size(); ++i)
        precision += *std::max_element(sim[i].begin(), sim[i].end());
    precision /= static_cast<double>(candidate.size());

    double recall = 0;
    for (std::size_t j = 0; j < reference.size(); ++j) {
        double best = sim[0][j];
        for (std::size_t i = 1; i < candidate.size(); ++i) best = std::max(best, sim[i][j]);
        recall += best;
    }
    recall /= static_cast<double>(reference.size());
    return combine(precision, recall);
}

double bertscore(std::span<const TokenVector> candidate, std::span<const TokenVector> reference) {
    // Negative cosines can push F1 below zero; the reported scale is [0,100].
    return std::clamp(100.0 * bertscore_prf(candidate, reference).f1, 0.0, 100.0);
}

TokenEmbedder::TokenEmbedder(Gateway& gateway, std::string endpoint)
    : gateway_(gateway), endpoint_(std::move(endpoint)) {}

std::vector<TokenVector> TokenEmbedder::embed(std::string_view s) {
    std::vector<std::string> tokens;
    for (char32_t cp : metric_tokens(s)) tokens.push_back(text::encode_utf8(cp));

    std::set<std::string> distinct(tokens.begin(), tokens.end());
    std::vector<std::string> ordered(distinct.begin(), distinct.end());
    std::map<std::string, std::vector<double>> table;
    const auto& model = gateway_.endpoint(endpoint_).model;
    for (std::size_t start = 0; start < ordered.size(); start += kEmbeddingBatch) {
        auto end = std::min(ordered.size(), start + kEmbeddingBatch);
        EmbeddingCall call{endpoint_, model, {ordered.begin() + static_cast<std::ptrdiff_t>(start),
                                              ordered.begin() + static_cast<std::ptrdiff_t>(end)}};
        auto result = gateway_.embed_texts(call);
        for (std::size_t i = 0; i < result.vectors.size(); ++i)
            table.emplace(call.inputs[i], std::move(result.vectors[i]));
    }

    std::vector<TokenVector> out;
    out.reserve(tokens.size());
    for (auto& t : tokens) {
        auto& v = table.at(t);
        out.push_back({std::move(t), v});
    }
    return out;
}

double TokenEmbedder::score(std::string_view candidate, std::string_view reference) {
    return bertscore(embed(candidate), embed(reference));
}

namespace {

MetricPair mean_of(const std::vector<EvalScore>& scores) {
    MetricPair m;
    if (scores.empty()) return m;
    for (const auto& s : scores) {
        m.rouge_l += s.rouge_l;
        m.bertscore += s.bertscore;
    }
    m.rouge_l /= static_cast<double>(scores.size());
    m.bertscore /= static_cast<double>(scores.size());
    return m;
}

} // namespace

AggregateReport aggregate(const std::vector<EvalScore>& baseline, const std::vector<EvalScore>& rag,
                          const ReportMeta& meta) {
    std::set<std::string> b_ids, r_ids;
    for (const auto& s : baseline) b_ids.insert(s.question_id);
    for (const auto& s : rag) r_ids.insert(s.question_id);
    if (b_ids != r_ids || b_ids.size() != baseline.size() || r_ids.size() != rag.size()) {
        std::string diff;
        for (const auto& id : b_ids)
            if (!r_ids.count(id)) diff += " " + id + "(baseline only)";
        for (const auto& id : r_ids)
            if (!b_ids.count(id)) diff += " " + id + "(rag only)";
        if (diff.empty()) diff = " duplicate question ids";
        throw AggregationError("baseline and rag score sets differ:" + diff);
    }

    AggregateReport report = aggregate_baseline(baseline, meta);
    report.rag = mean_of(rag);
    report.delta = MetricPair{report.rag->rouge_l - report.baseline.rouge_l,
                              report.rag->bertscore - report.baseline.bertscore};
    return report;
}

AggregateReport aggregate_baseline(const std::vector<EvalScore>& baseline, const ReportMeta& meta) {
    AggregateReport report;
    report.dataset = meta.dataset;
    report.model = meta.model;
    report.n_failed = meta.n_failed;
    report.partial = meta.partial;
    report.n_evaluated = baseline.size();
    report.baseline = mean_of(baseline);
    return report;
}

std::string format_delta(double delta) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.2f", delta);
    std::string out = buf;
    if (out == "-0.00") out = "+0.00";
    return out + "%";
}

std::string format_cell(double mean, std::optional<double> delta) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", mean);
    std::string out = buf;
    if (delta) out += " (" + format_delta(*delta) + ")";
    return out;
}

} // namespace kgrag
