#include "kgrag/config.hpp"
#include "kgrag/corpus.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/pipeline.hpp"
#include "kgrag/report.hpp"
#include "kgrag/text.hpp"
#include "kgrag/trace.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kPartial = 1, kFatal = 2 };

struct Options {
    std::string config = "kgrag.json";
    std::string dataset;
    std::optional<std::size_t> limit;
    std::optional<int> top_k;
    std::optional<int> workers;
    bool no_rag = false;
    bool resume = true;
    std::string trace_id;
};

kgrag::PipelineConfig load_config(const Options& o) {
    auto cfg = kgrag::PipelineConfig::load(o.config);
    if (o.top_k) cfg.top_k = *o.top_k;
    if (o.workers) cfg.workers = *o.workers;
    cfg.validate();
    return cfg;
}

std::vector<std::string> selected_datasets(const Options& o, const kgrag::PipelineConfig& cfg) {
    if (!o.dataset.empty()) {
        cfg.dataset_path(o.dataset); // throws on unknown names
        return {o.dataset};
    }
    std::vector<std::string> names;
    for (const auto& [name, path] : cfg.datasets) names.push_back(name);
    return names;
}

void print_report(const std::vector<kgrag::AggregateReport>& reports, const kgrag::PipelineConfig& cfg) {
    std::cout << kgrag::render_report_text(reports, kgrag::report_settings(cfg));
}

int cmd_run(const Options& o, bool rag) {
    auto cfg = load_config(o);
    kgrag::Services services(cfg, std::make_shared<kgrag::HttplibTransport>());
    kgrag::RunOptions run{o.limit, rag, o.resume};
    std::vector<kgrag::AggregateReport> reports;
    int exit = kOk;
    for (const auto& name : selected_datasets(o, cfg)) {
        auto result = kgrag::run_dataset(name, cfg, services, run);
        std::fprintf(stderr, "%s: %zu written, %zu reused, %zu failed%s\n", name.c_str(), result.traces_written,
                     result.traces_reused, result.report.n_failed, result.aborted ? " (aborted)" : "");
        if (result.aborted) exit = kFatal;
        else if (result.report.n_failed > 0 && exit == kOk) exit = kPartial;
        reports.push_back(result.report);
    }
    std::fprintf(stderr, "network calls: %llu llm, %llu knowledge base\n",
                 static_cast<unsigned long long>(services.gateway.network_calls()),
                 static_cast<unsigned long long>(services.kb.network_calls()));
    print_report(reports, cfg);
    return exit;
}

bool run_is_partial(const std::filesystem::path& dir) {
    auto meta = dir / "run.json";
    if (!std::filesystem::exists(meta)) return false;
    auto doc = nlohmann::json::parse(kgrag::text::read_file(meta), nullptr, false);
    return !doc.is_discarded() && doc.value("partial", false);
}

int cmd_eval(const Options& o) {
    auto cfg = load_config(o);
    kgrag::Services services(cfg, std::make_shared<kgrag::HttplibTransport>());
    std::vector<kgrag::AggregateReport> reports;
    int exit = kOk;
    for (const auto& name : selected_datasets(o, cfg)) {
        auto dir = kgrag::run_directory(cfg, name);
        if (!std::filesystem::exists(dir / "traces")) continue;
        auto n = kgrag::rescore_traces(dir, services);
        auto report = kgrag::report_from_traces(kgrag::load_traces(dir), name, cfg.chat.model, run_is_partial(dir));
        kgrag::emit_report({report}, kgrag::report_settings(cfg), dir);
        std::fprintf(stderr, "%s: rescored %zu traces\n", name.c_str(), n);
        if (report.n_failed > 0) exit = kPartial;
        reports.push_back(report);
    }
    print_report(reports, cfg);
    return exit;
}

int cmd_report(const Options& o) {
    auto cfg = load_config(o);
    std::vector<kgrag::AggregateReport> reports;
    for (const auto& name : selected_datasets(o, cfg)) {
        auto dir = kgrag::run_directory(cfg, name);
        auto traces = kgrag::load_traces(dir);
        if (traces.empty()) continue;
        reports.push_back(kgrag::report_from_traces(traces, name, cfg.chat.model, run_is_partial(dir)));
    }
    if (reports.empty()) {
        std::fprintf(stderr, "no traces found under %s\n", cfg.output_root.string().c_str());
        return kPartial;
    }
    auto dir = cfg.output_root / kgrag::text::sanitize_filename(cfg.chat.model);
    kgrag::emit_report(reports, kgrag::report_settings(cfg), dir);
    print_report(reports, cfg);
    return kOk;
}

int cmd_stats(const Options& o) {
    auto cfg = load_config(o);
    std::printf("%-14s %6s %16s %16s\n", "dataset", "size", "question_length", "answer_length");
    for (const auto& name : selected_datasets(o, cfg)) {
        auto stats = kgrag::compute_stats(kgrag::load_dataset(cfg.dataset_path(name), name));
        std::printf("%-14s %6zu %16.1f %16.1f%s\n", name.c_str(), stats.size, stats.mean_question_length,
                    stats.mean_answer_length, stats.english_word_counts ? "" : "  (estimated: characters/2)");
    }
    return kOk;
}

int cmd_trace_show(const Options& o) {
    auto cfg = load_config(o);
    for (const auto& name : selected_datasets(o, cfg)) {
        auto path = kgrag::trace_path(kgrag::run_directory(cfg, name), o.trace_id);
        if (!std::filesystem::exists(path)) continue;
        auto t = kgrag::trace_from_json(nlohmann::json::parse(kgrag::text::read_file(path)));
        std::cout << kgrag::render_trace_text(t);
        return kOk;
    }
    std::fprintf(stderr, "no trace for %s\n", o.trace_id.c_str());
    return kPartial;
}

void common_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "Config file (JSON)");
    cmd->add_option("--dataset", o.dataset, "Dataset name; all configured datasets when omitted");
}

void run_options(CLI::App* cmd, Options& o) {
    common_options(cmd, o);
    cmd->add_option("--limit", o.limit, "Process only the first N questions");
    cmd->add_option("--top-k", o.top_k, "Triples kept after ranking");
    cmd->add_option("--workers", o.workers, "Concurrent questions");
    cmd->add_flag("--resume,!--no-resume", o.resume, "Skip questions whose trace exists (default on)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph RAG pipeline for Japanese medical QA"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Baseline and RAG answers, scored");
    run_options(run, o);
    run->add_flag("--no-rag", o.no_rag, "Baseline answers only");
    auto* baseline = app.add_subcommand("baseline", "Baseline answers only, scored");
    run_options(baseline, o);
    auto* eval = app.add_subcommand("eval", "Rescore existing traces");
    common_options(eval, o);
    auto* stats = app.add_subcommand("stats", "Dataset sizes and mean lengths");
    common_options(stats, o);
    auto* report = app.add_subcommand("report", "Aggregate report over all runs");
    common_options(report, o);
    auto* trace = app.add_subcommand("trace", "Inspect traces");
    trace->require_subcommand(1);
    auto* show = trace->add_subcommand("show", "Print one trace");
    common_options(show, o);
    show->add_option("id", o.trace_id, "Question id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(o, !o.no_rag);
        if (baseline->parsed()) return cmd_run(o, false);
        if (eval->parsed()) return cmd_eval(o);
        if (stats->parsed()) return cmd_stats(o);
        if (report->parsed()) return cmd_report(o);
        if (show->parsed()) return cmd_trace_show(o);
    } catch (const kgrag::HttpStatusError& e) {
        std::fprintf(stderr, "fatal: %s\n", e.what());
        return kFatal;
    } catch (const kgrag::ConfigError& e) {
        std::fprintf(stderr, "config: %s\n", e.what());
        return kFatal;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFatal;
    }
    return kFatal;
}
