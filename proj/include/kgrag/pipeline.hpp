#pragma once

#include "kgrag/config.hpp"
#include "kgrag/corpus.hpp"
#include "kgrag/gateway.hpp"
#include "kgrag/metrics.hpp"
#include "kgrag/prompts.hpp"
#include "kgrag/trace.hpp"
#include "kgrag/umls.hpp"

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kgrag {

// Everything run_item needs, built once per process: the gateway with its
// three endpoints, the knowledge-base client and the prompt templates.
// `transport` serves both HTTP dialects.
struct Services {
    Services(const PipelineConfig& config, std::shared_ptr<Transport> transport,
             Sleeper sleeper = real_sleeper());

    Gateway gateway;
    UmlsClient kb;
    PromptSet prompts;
};

// Baseline answer, then (when `rag`) extract -> translate -> retrieve ->
// rank -> convert -> answer, then scoring of both answers. Degrades per
// stage instead of throwing; only ConfigError escapes.
TraceRecord run_item(const QAPair& pair, const PipelineConfig& config, Services& services, bool rag = true);

struct RunOptions {
    std::optional<std::size_t> limit;
    bool rag = true;
    bool resume = true;
};

struct RunResult {
    AggregateReport report;
    std::size_t traces_written = 0;
    std::size_t traces_reused = 0;
    bool aborted = false; // circuit breaker tripped
};

// {output_root}/{model}/{dataset}
std::filesystem::path run_directory(const PipelineConfig& config, const std::string& dataset);
std::filesystem::path trace_path(const std::filesystem::path& run_dir, const std::string& question_id);

// Processes the dataset with a pool of config.workers threads, writing one
// trace per question as it completes and skipping questions whose trace
// already exists (when resuming). Aggregates all traces into a report that
// is written next to the traces.
RunResult run_dataset(const std::string& dataset, const PipelineConfig& config, Services& services,
                      const RunOptions& options = {});

// Loads every trace of a run directory, in file-name order.
std::vector<TraceRecord> load_traces(const std::filesystem::path& run_dir);

// Report from already-scored traces. Items failed in either leg count
// toward n_failed and are excluded from the means.
AggregateReport report_from_traces(const std::vector<TraceRecord>& traces, const std::string& dataset,
                                   const std::string& model, bool partial);

// Recomputes both metrics for every trace in `run_dir`, rewriting the files.
std::size_t rescore_traces(const std::filesystem::path& run_dir, Services& services);

} // namespace kgrag
