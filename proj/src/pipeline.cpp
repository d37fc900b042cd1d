#include "kgrag/pipeline.hpp"

#include "kgrag/errors.hpp"
#include "kgrag/report.hpp"
#include "kgrag/text.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace kgrag {

using nlohmann::json;

Services::Services(const PipelineConfig& config, std::shared_ptr<Transport> transport, Sleeper sleeper)
    : gateway(transport, config.cache_root, config.retry, sleeper),
      kb(config.knowledge_base, transport, config.cache_root / "umls", config.kb_fixtures_dir, config.retry,
         sleeper),
      prompts(PromptSet::load(config.prompts_dir)) {
    config.validate();
    gateway.add_endpoint(kChatEndpoint, config.chat);
    gateway.add_endpoint(kEmbeddingEndpoint, config.embedding);
    gateway.add_endpoint(kTokenEmbeddingEndpoint, config.token_embedding);
}

namespace {

// Auth failures and configuration mistakes stop the run instead of degrading.
bool is_fatal(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return true;
    auto* http = dynamic_cast<const HttpStatusError*>(&e);
    return http && (http->status() == 401 || http->status() == 403);
}

class StageTimer {
public:
    StageTimer(TraceRecord& t, const char* stage)
        : t_(t), stage_(stage), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        t_.timing_ms[stage_] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    TraceRecord& t_;
    const char* stage_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace

TraceRecord run_item(const QAPair& pair, const PipelineConfig& config, Services& services, bool rag) {
    TraceRecord t;
    t.question_id = pair.id;
    t.dataset = pair.dataset;
    t.model = config.chat.model;
    t.question_ja = pair.question_ja;
    t.reference_ja = pair.reference_ja;
    t.rag_enabled = rag;
    auto& gw = services.gateway;

    // Runs `body`, recording a failure for `stage` unless the error is fatal.
    auto guarded = [&](const char* stage, auto&& body) {
        StageTimer timer(t, stage);
        try {
            body();
            return true;
        } catch (const Error& e) {
            if (is_fatal(e)) throw;
            t.stages[stage] = "failed";
            t.warnings.push_back(std::string(stage) + ": " + e.what());
            return false;
        }
    };

    if (!guarded(kStageBaseline, [&] {
            t.answer_baseline = generate_answer(pair.id, pair.question_ja, std::nullopt, services.prompts, gw,
                                                kChatEndpoint);
            t.stages[kStageBaseline] = "complete";
        }))
        t.errors.push_back("baseline answer generation failed");

    if (rag) {
        EntitySet entities{pair.id, {}};
        guarded(kStageExtraction, [&] {
            entities = extract_entities(pair.id, pair.question_ja, services.prompts.extraction, gw, kChatEndpoint,
                                        t.warnings);
            t.stages[kStageExtraction] = entities.entities.empty() ? "empty" : "complete";
        });

        if (entities.entities.empty()) {
            t.stages[kStageTranslation] = "skipped";
        } else {
            guarded(kStageTranslation, [&] {
                entities = translate_entities(std::move(entities), gw, kChatEndpoint, t.warnings);
                std::size_t ok = 0;
                for (const auto& e : entities.entities) ok += e.translation_en.has_value();
                t.stages[kStageTranslation] =
                    ok == entities.entities.size() ? "complete" : (ok == 0 ? "failed" : "partial");
            });
        }
        t.entities = entities.entities;

        EntityGraph graph{pair.id, {}, {}};
        bool any_translated = false;
        for (const auto& e : entities.entities) any_translated |= e.translation_en.has_value();
        if (!any_translated) {
            t.stages[kStageRetrieval] = "skipped";
        } else {
            guarded(kStageRetrieval, [&] {
                graph = retrieve_graph(entities, services.kb, config.max_relations, t.warnings);
                t.stages[kStageRetrieval] = graph.triples.empty() ? "empty" : "complete";
            });
        }
        t.triple_counts = graph.per_entity_counts;
        t.triples_retrieved = graph.triples.size();

        std::vector<ScoredTriple> ranked;
        if (graph.triples.empty()) {
            t.stages[kStageRanking] = "skipped";
        } else {
            guarded(kStageRanking, [&] {
                ranked = rank_triples(pair.question_ja, graph, config.top_k, gw, kEmbeddingEndpoint, t.warnings);
                t.stages[kStageRanking] = ranked.empty() ? "empty" : "complete";
            });
        }
        t.ranked = ranked;

        DeclarativeKnowledge knowledge{pair.id, {}, {}, false};
        if (ranked.empty()) {
            t.stages[kStageConversion] = "skipped";
        } else {
            guarded(kStageConversion, [&] {
                knowledge = convert_declarative(pair.id, ranked, services.prompts.declarative, gw, kChatEndpoint,
                                                t.warnings);
                t.stages[kStageConversion] =
                    knowledge.fallback ? "fallback" : (knowledge.sentences.empty() ? "empty" : "complete");
            });
        }
        if (t.stages[kStageRetrieval] != "complete") t.warnings.emplace_back("retrieval-empty: no knowledge injected");
        t.knowledge = knowledge.sentences;
        t.knowledge_fallback = knowledge.fallback;

        if (!guarded(kStageGeneration, [&] {
                t.answer_rag = generate_answer(pair.id, pair.question_ja, knowledge, services.prompts, gw,
                                               kChatEndpoint);
                t.stages[kStageGeneration] = "complete";
            }))
            t.errors.push_back("rag answer generation failed");
    } else {
        for (auto stage : {kStageExtraction, kStageTranslation, kStageRetrieval, kStageRanking, kStageConversion,
                           kStageGeneration})
            t.stages[stage] = "skipped";
    }

    TokenEmbedder embedder(gw, kTokenEmbeddingEndpoint);
    if (!guarded(kStageScoring, [&] {
            if (t.answer_baseline)
                t.score_baseline = MetricPair{rouge_l(t.answer_baseline->answer, pair.reference_ja),
                                              embedder.score(t.answer_baseline->answer, pair.reference_ja)};
            if (t.answer_rag)
                t.score_rag = MetricPair{rouge_l(t.answer_rag->answer, pair.reference_ja),
                                         embedder.score(t.answer_rag->answer, pair.reference_ja)};
            t.stages[kStageScoring] = "complete";
        }))
        t.errors.push_back("scoring failed");
    return t;
}

std::filesystem::path run_directory(const PipelineConfig& config, const std::string& dataset) {
    return config.output_root / text::sanitize_filename(config.chat.model) / text::sanitize_filename(dataset);
}

std::filesystem::path trace_path(const std::filesystem::path& run_dir, const std::string& question_id) {
    return run_dir / "traces" / (text::sanitize_filename(question_id) + ".json");
}

std::vector<TraceRecord> load_traces(const std::filesystem::path& run_dir) {
    std::vector<std::filesystem::path> files;
    auto dir = run_dir / "traces";
    if (std::filesystem::exists(dir))
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<TraceRecord> traces;
    for (const auto& f : files) traces.push_back(trace_from_json(json::parse(text::read_file(f))));
    return traces;
}

AggregateReport report_from_traces(const std::vector<TraceRecord>& traces, const std::string& dataset,
                                   const std::string& model, bool partial) {
    std::vector<EvalScore> baseline, rag;
    ReportMeta meta{dataset, model, 0, partial};
    bool rag_run = !traces.empty();
    for (const auto& t : traces) rag_run = rag_run && t.rag_enabled;
    for (const auto& t : traces) {
        if (t.failed() || (rag_run && !t.score_rag)) {
            ++meta.n_failed;
            continue;
        }
        baseline.push_back({t.question_id, t.score_baseline->rouge_l, t.score_baseline->bertscore});
        if (rag_run) rag.push_back({t.question_id, t.score_rag->rouge_l, t.score_rag->bertscore});
    }
    return rag_run ? aggregate(baseline, rag, meta) : aggregate_baseline(baseline, meta);
}

RunResult run_dataset(const std::string& dataset, const PipelineConfig& config, Services& services,
                      const RunOptions& options) {
    auto pairs = load_dataset(config.dataset_path(dataset), dataset);
    const std::size_t total = pairs.size();
    if (options.limit && *options.limit < pairs.size()) pairs.resize(*options.limit);
    const bool partial = pairs.size() < total;

    auto run_dir = run_directory(config, dataset);
    std::filesystem::create_directories(run_dir / "traces");

    std::vector<std::optional<TraceRecord>> results(pairs.size());
    std::atomic<std::size_t> next{0}, written{0}, reused{0}, failed{0};
    std::atomic<bool> abort{false};
    std::mutex log_mutex;
    std::exception_ptr fatal;
    const auto failure_limit = config.failure_threshold * static_cast<double>(pairs.size());

    auto worker = [&] {
        while (!abort) {
            auto i = next++;
            if (i >= pairs.size()) return;
            const auto& pair = pairs[i];
            auto path = trace_path(run_dir, pair.id);
            try {
                if (options.resume && std::filesystem::exists(path)) {
                    auto existing = trace_from_json(json::parse(text::read_file(path)));
                    if (existing.rag_enabled == options.rag && existing.question_id == pair.id) {
                        if (existing.failed() && static_cast<double>(++failed) > failure_limit) abort = true;
                        results[i] = std::move(existing);
                        ++reused;
                        continue;
                    }
                }
                auto trace = run_item(pair, config, services, options.rag);
                text::atomic_write_file(path, serialize_trace(trace));
                {
                    std::lock_guard lock(log_mutex);
                    json line = {{"question_id", trace.question_id}, {"timing_ms", trace.timing_ms}};
                    std::ofstream log(run_dir / "timings.jsonl", std::ios::app);
                    log << line.dump() << "\n";
                }
                ++written;
                if (trace.failed() && static_cast<double>(++failed) > failure_limit) abort = true;
                results[i] = std::move(trace);
            } catch (...) {
                std::lock_guard lock(log_mutex);
                if (!fatal) fatal = std::current_exception();
                abort = true;
            }
        }
    };

    {
        std::vector<std::jthread> pool;
        auto n = std::min<std::size_t>(static_cast<std::size_t>(config.workers), std::max<std::size_t>(pairs.size(), 1));
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
    }
    if (fatal) std::rethrow_exception(fatal);

    std::vector<TraceRecord> traces;
    for (auto& r : results)
        if (r) traces.push_back(std::move(*r));

    RunResult result;
    result.report = report_from_traces(traces, dataset, config.chat.model, partial || abort);
    result.traces_written = written;
    result.traces_reused = reused;
    result.aborted = abort;

    json run_meta = {{"dataset", dataset},
                     {"model", config.chat.model},
                     {"rag", options.rag},
                     {"items", pairs.size()},
                     {"dataset_size", total},
                     {"partial", result.report.partial},
                     {"aborted", result.aborted}};
    text::atomic_write_file(run_dir / "run.json", run_meta.dump(2) + "\n");
    emit_report({result.report}, report_settings(config), run_dir);
    return result;
}

std::size_t rescore_traces(const std::filesystem::path& run_dir, Services& services) {
    TokenEmbedder embedder(services.gateway, kTokenEmbeddingEndpoint);
    std::size_t n = 0;
    for (auto& t : load_traces(run_dir)) {
        t.score_baseline.reset();
        t.score_rag.reset();
        try {
            if (t.answer_baseline)
                t.score_baseline = MetricPair{rouge_l(t.answer_baseline->answer, t.reference_ja),
                                              embedder.score(t.answer_baseline->answer, t.reference_ja)};
            if (t.answer_rag)
                t.score_rag = MetricPair{rouge_l(t.answer_rag->answer, t.reference_ja),
                                         embedder.score(t.answer_rag->answer, t.reference_ja)};
            t.stages[kStageScoring] = "complete";
        } catch (const Error& e) {
            if (is_fatal(e)) throw;
            t.stages[kStageScoring] = "failed";
            t.warnings.push_back(std::string("scoring: ") + e.what());
        }
        text::atomic_write_file(trace_path(run_dir, t.question_id), serialize_trace(t));
        ++n;
    }
    return n;
}

} // namespace kgrag
