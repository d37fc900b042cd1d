#pragma once

#include "kgrag/gateway.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgrag {

// Longest common subsequence length; O(|a|*|b|) time, O(min(|a|,|b|)) memory.
template <class T>
std::size_t lcs_length(std::span<const T> a, std::span<const T> b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1, 0);
    for (const auto& x : a) {
        std::size_t diag = 0; // row[j-1] from the previous iteration of `x`
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = x == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
            diag = up;
        }
    }
    return row[b.size()];
}

// Metric tokens: one per code point, whitespace dropped.
std::vector<char32_t> metric_tokens(std::string_view text);

struct PrfScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Character-level ROUGE-L with beta = 1. Fractions in [0,1].
PrfScore rouge_l_prf(std::string_view candidate, std::string_view reference);

// 100 * F1 of rouge_l_prf. Both empty: 100; exactly one empty: 0.
double rouge_l(std::string_view candidate, std::string_view reference);

struct TokenVector {
    std::string token;
    std::vector<double> vector;
};

// Greedy-matching BERTScore without IDF weighting or baseline rescaling.
PrfScore bertscore_prf(std::span<const TokenVector> candidate, std::span<const TokenVector> reference);
double bertscore(std::span<const TokenVector> candidate, std::span<const TokenVector> reference);

// Looks up token vectors through an embeddings endpoint, one entry per
// distinct token, batched in sorted token order so requests are stable.
class TokenEmbedder {
public:
    TokenEmbedder(Gateway& gateway, std::string endpoint);

    std::vector<TokenVector> embed(std::string_view text);
    double score(std::string_view candidate, std::string_view reference);

private:
    Gateway& gateway_;
    std::string endpoint_;
};

struct EvalScore {
    std::string question_id;
    double rouge_l = 0.0;
    double bertscore = 0.0;
};

struct MetricPair {
    double rouge_l = 0.0;
    double bertscore = 0.0;
};

struct ReportMeta {
    std::string dataset;
    std::string model;
    std::size_t n_failed = 0;
    bool partial = false;
};

struct AggregateReport {
    std::string dataset;
    std::string model;
    std::size_t n_evaluated = 0;
    std::size_t n_failed = 0;
    bool partial = false;
    MetricPair baseline;
    std::optional<MetricPair> rag;
    std::optional<MetricPair> delta; // rag - baseline, in points
};

// Means over both lists (which must cover the same question ids) and
// rag - baseline deltas. Throws AggregationError listing the symmetric
// difference when the id sets disagree.
AggregateReport aggregate(const std::vector<EvalScore>& baseline, const std::vector<EvalScore>& rag,
                          const ReportMeta& meta);

// Baseline-only variant (no RAG leg was run).
AggregateReport aggregate_baseline(const std::vector<EvalScore>& baseline, const ReportMeta& meta);

// Signed two-decimal point difference with a trailing percent sign: "+0.44%".
std::string format_delta(double delta);
// "4.77 (+0.44%)", or "4.33" without a delta.
std::string format_cell(double mean, std::optional<double> delta = std::nullopt);

} // namespace kgrag
