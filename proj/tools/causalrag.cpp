#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "causalrag/causal_engine.hpp"
#include "causalrag/config.hpp"
#include "causalrag/errors.hpp"
#include "causalrag/eval.hpp"
#include "causalrag/indexer.hpp"
#include "causalrag/retriever.hpp"
#include "causalrag/text_util.hpp"

namespace fs = std::filesystem;
using namespace causalrag;

namespace {

// exit codes: 0 success, 2 input error, 3 provider error, 64 usage error
constexpr int kExitInput = 2;
constexpr int kExitProvider = 3;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double value, const char* spec = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, value);
    return buf;
}

std::string fmt_optional(const std::optional<double>& value, const char* spec = "%.4f") {
    return value ? fmt(*value, spec) : std::string("n/a");
}

std::vector<int> parse_int_list(const std::string& raw, const std::string& flag) {
    std::vector<int> values;
    for (const std::string& token : text::split(raw, ',')) {
        const std::string t = text::trim(token);
        try {
            std::size_t consumed = 0;
            const int v = std::stoi(t, &consumed);
            if (consumed != t.size()) throw std::invalid_argument(t);
            values.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(flag + " expects a comma-separated integer list, got: " + raw);
        }
    }
    if (values.empty()) throw UsageError(flag + " expects at least one value");
    return values;
}

// --config is honored before every other flag so flags override the file.
std::optional<std::string> prescan_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return std::nullopt;
}

Gateway make_gateway(const AppConfig& config) { return Gateway(config.gateway); }

int cmd_index(const AppConfig& config, const std::string& input, const std::string& out_root) {
    const std::vector<Document> docs = load_corpus(input);
    Gateway gateway = make_gateway(config);
    for (const Document& doc : docs) {
        const BuildResult result = build_index(doc, config.segmentation, gateway, out_root);
        std::cout << "indexed " << doc.id << ": " << result.nodes << " nodes, " << result.edges
                  << " edges, " << result.segments << " segments, " << result.warnings.size()
                  << " warnings\n";
    }
    return 0;
}

void print_trace(const Answer& answer) {
    std::cout << "\n--- trace ---\n";
    std::cout << "params: k=" << answer.retrieval.params.k << " s=" << answer.retrieval.params.s
              << "\n";
    std::cout << "seeds:\n";
    for (std::size_t i = 0; i < answer.retrieval.seeds.size(); ++i) {
        const SeedMatch& seed = answer.retrieval.seeds[i];
        std::cout << "  " << (i + 1) << ". " << seed.id.value << " (" << fmt(seed.score) << ")\n";
    }
    std::cout << "frontier:\n";
    for (const auto& [id, distance] : answer.retrieval.frontier)
        std::cout << "  " << id.value << ": " << distance << "\n";
    std::cout << "paths:\n";
    for (std::size_t i = 0; i < answer.report.paths.size(); ++i) {
        const CausalPath& path = answer.report.paths[i];
        std::vector<std::string> hops;
        for (const NodeId& id : path.nodes) hops.push_back(id.value);
        std::vector<std::string> relations;
        for (std::size_t h = 0; h < path.relations.size(); ++h)
            relations.push_back(path.relations[h] + (path.inferred[h] ? "?" : ""));
        std::cout << "  " << (i + 1) << ". " << text::join(hops, " -> ");
        if (!relations.empty()) std::cout << " [" << text::join(relations, ", ") << "]";
        std::cout << "\n";
        if (!path.rationale.empty()) std::cout << "     rationale: " << path.rationale << "\n";
    }
    std::vector<std::string> cited;
    for (int idx : answer.summary.source_paths) cited.push_back(std::to_string(idx));
    std::cout << "summary source paths: " << (cited.empty() ? "none" : text::join(cited, ", "))
              << "\n";
    std::cout << "prompt digest: " << answer.prompt_digest << "\n";
    std::cout << "warnings: "
              << answer.retrieval.warnings.size() + answer.report.hallucination_warnings +
                     answer.report.parse_warnings
              << "\n";
}

int cmd_ask(const AppConfig& config, const std::string& index_dir, const std::string& query,
            bool trace) {
    const LoadedIndex index = load_index(index_dir);
    if (index.manifest.embedding_dim != config.gateway.embedding_dim)
        throw FormatError("index embedding_dim " + std::to_string(index.manifest.embedding_dim) +
                          " does not match configured dimension " +
                          std::to_string(config.gateway.embedding_dim));
    Gateway gateway = make_gateway(config);
    const Answer answer =
        answer_query(query, index, config.retrieval, config.response_type, gateway);
    std::cout << answer.text << "\n";
    if (trace) print_trace(answer);
    return 0;
}

int cmd_gen_questions(const AppConfig& config, const std::string& input, int n,
                      const std::string& out) {
    const Document doc = load_document(input);
    Gateway gateway = make_gateway(config);
    const QuestionSet set = generate_questions(doc, n, gateway);
    for (std::size_t i = 0; i < set.questions.size(); ++i) {
        std::cout << (i + 1) << ". " << set.questions[i].question << " | "
                  << set.questions[i].reference_answer << "\n";
    }
    for (const std::string& warning : set.warnings) std::cerr << "warning: " << warning << "\n";
    if (!out.empty()) {
        std::vector<EvalSample> samples;
        for (const QaPair& pair : set.questions)
            samples.push_back(EvalSample{doc.id, pair.question, {pair.reference_answer}, {}});
        save_dataset(out, samples);
    }
    return 0;
}

void print_report(const MetricsReport& report) {
    const int defined = report.n_samples - report.n_failed;
    std::cout << "samples: " << report.n_samples << "  failures: " << report.n_failed
              << "  retrieved: " << report.total_retrieved << "\n";
    std::printf("%-19s %-10s %-8s %s\n", "metric", "mean", "defined", "undefined");
    std::printf("%-19s %-10s %-8d %d\n", "context_recall",
                fmt_optional(report.context_recall).c_str(), defined, 0);
    std::printf("%-19s %-10s %-8d %d\n", "context_precision",
                fmt_optional(report.context_precision).c_str(),
                defined - report.undefined_precision_count, report.undefined_precision_count);
    std::printf("%-19s %-10s %-8d %d\n", "faithfulness",
                fmt_optional(report.faithfulness, "%.2f").c_str(),
                defined - report.undefined_faithfulness_count,
                report.undefined_faithfulness_count);
}

int cmd_eval(const AppConfig& config, const std::string& index_root, const std::string& dataset,
             const EvalOptions& options, const std::string& report_out) {
    const std::vector<EvalSample> samples = load_dataset(dataset);
    Gateway gateway = make_gateway(config);
    const MetricsReport report = run_eval(index_root, samples, options, gateway);
    print_report(report);
    if (!report_out.empty()) write_report(report_out, report);
    return 0;
}

int cmd_sweep(const AppConfig& config, const std::string& index_root, const std::string& dataset,
              const std::vector<int>& k_values, const std::vector<int>& s_values,
              const EvalOptions& options, const std::string& report_out) {
    const std::vector<EvalSample> samples = load_dataset(dataset);
    Gateway gateway = make_gateway(config);
    const SweepGrid grid = sweep(index_root, samples, k_values, s_values, options, gateway);

    std::cout << "sweep composite scores (system: " << to_string(options.system) << ")\n";
    std::printf("%-6s", "k\\s");
    for (int s : grid.s_values) std::printf("%10d", s);
    std::printf("\n");
    for (int k : grid.k_values) {
        std::printf("%-6d", k);
        for (int s : grid.s_values)
            std::printf("%10s", fmt_optional(grid.cells.at({k, s})).c_str());
        std::printf("\n");
    }
    if (!report_out.empty()) {
        std::ofstream out(report_out, std::ios::binary | std::ios::trunc);
        if (!out) throw ContractError("cannot write report: " + report_out);
        out << sweep_to_json(grid).dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    AppConfig config;
    try {
        if (const auto config_path = prescan_config_path(argc, argv))
            config = AppConfig::from_file(*config_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    CLI::App app{"CausalRAG: causal-graph retrieval-augmented generation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path_unused;
    app.add_option("--config", config_path_unused, "JSON config file (flags override it)");

    std::string mode;
    app.add_option("--mode", mode, "gateway mode: live or mock")
        ->check(CLI::IsMember({"live", "mock"}));
    auto* opt_mock_script = app.add_option("--mock-script", config.gateway.mock_script_path,
                                           "mock script file (mock mode)");
    app.add_option("--endpoint", config.gateway.endpoint, "OpenAI-compatible base URL");
    app.add_option("--model", config.gateway.model, "chat model name");
    app.add_option("--embedding-model", config.gateway.embedding_model, "embedding model name");
    app.add_option("--api-key-env", config.gateway.api_key_env,
                   "environment variable holding the API key");
    app.add_option("--dim", config.gateway.embedding_dim, "embedding dimension")
        ->check(CLI::Range(1, 1000000000));
    app.add_option("--max-retries", config.gateway.max_retries, "transient-failure retries")
        ->check(CLI::Range(0, 1000000000));
    int timeout_ms = 0;
    auto* opt_timeout = app.add_option("--timeout-ms", timeout_ms, "per-request timeout");

    auto* sub_index = app.add_subcommand("index", "build one index directory per document");
    std::string index_input;
    std::string index_out = config.paths.index_root;
    sub_index->add_option("input", index_input, "document file or directory of *.txt files")
        ->required();
    auto* opt_index_out = sub_index->add_option("--out", index_out, "output index root");
    auto* opt_max_chars =
        sub_index->add_option("--max-chars", config.segmentation.max_chars, "segment size")
            ->check(CLI::Range(1, 1000000000));
    sub_index->add_option("--overlap", config.segmentation.overlap_chars, "segment overlap")
        ->check(CLI::Range(0, 1000000000));

    auto* sub_ask = app.add_subcommand("ask", "answer a query over one document index");
    std::string ask_query;
    std::string ask_index;
    bool ask_trace = false;
    sub_ask->add_option("query", ask_query, "the user query")->required();
    sub_ask->add_option("--index", ask_index, "index directory of one document")->required();
    auto* opt_ask_k = sub_ask->add_option("--k", config.retrieval.k, "seed node count")
                          ->check(CLI::Range(1, 1000000000));
    auto* opt_ask_s = sub_ask->add_option("--s", config.retrieval.s, "expansion hops")
                          ->check(CLI::Range(0, 1000000000));
    sub_ask->add_option("--response-type", config.response_type, "target response length/format");
    sub_ask->add_flag("--trace", ask_trace, "print retrieval and reasoning provenance");

    auto* sub_gen = app.add_subcommand("gen-questions", "generate grounded questions for a document");
    std::string gen_input;
    std::string gen_out;
    int gen_n = 5;
    sub_gen->add_option("input", gen_input, "document file")->required();
    sub_gen->add_option("-n,--n", gen_n, "question count")->check(CLI::Range(1, 1000000000));
    sub_gen->add_option("--out", gen_out, "write the generated dataset to this file");

    auto* sub_eval = app.add_subcommand("eval", "run metrics over a dataset");
    std::string eval_index_root = config.paths.index_root;
    std::string eval_dataset = config.paths.dataset;
    std::string eval_report = config.paths.report_out;
    std::string eval_system = "causal";
    std::string eval_judge_mode = "annotated";
    auto* opt_eval_root = sub_eval->add_option("--index-root", eval_index_root, "index root");
    auto* opt_eval_ds = sub_eval->add_option("--dataset", eval_dataset, "dataset file");
    auto* opt_eval_report = sub_eval->add_option("--report", eval_report, "report output file");
    sub_eval->add_option("--system", eval_system, "causal or baseline")
        ->check(CLI::IsMember({"causal", "baseline"}));
    sub_eval->add_option("--judge-mode", eval_judge_mode, "annotated or judge")
        ->check(CLI::IsMember({"annotated", "judge"}));
    auto* opt_eval_k = sub_eval->add_option("--k", config.retrieval.k, "seed node count")
                           ->check(CLI::Range(1, 1000000000));
    auto* opt_eval_s = sub_eval->add_option("--s", config.retrieval.s, "expansion hops")
                           ->check(CLI::Range(0, 1000000000));
    sub_eval->add_option("--response-type", config.response_type, "target response length/format");

    auto* sub_sweep = app.add_subcommand("sweep", "k x s parameter sweep");
    std::string sweep_index_root = config.paths.index_root;
    std::string sweep_dataset = config.paths.dataset;
    std::string sweep_report;
    std::string sweep_k = "1,3,5";
    std::string sweep_s = "1,3,5";
    std::string sweep_system = "causal";
    std::string sweep_judge_mode = "annotated";
    auto* opt_sweep_root = sub_sweep->add_option("--index-root", sweep_index_root, "index root");
    auto* opt_sweep_ds = sub_sweep->add_option("--dataset", sweep_dataset, "dataset file");
    sub_sweep->add_option("--k", sweep_k, "comma-separated k values");
    sub_sweep->add_option("--s", sweep_s, "comma-separated s values");
    sub_sweep->add_option("--report", sweep_report, "grid output file");
    sub_sweep->add_option("--system", sweep_system, "causal or baseline")
        ->check(CLI::IsMember({"causal", "baseline"}));
    sub_sweep->add_option("--judge-mode", sweep_judge_mode, "annotated or judge")
        ->check(CLI::IsMember({"annotated", "judge"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (!mode.empty()) config.gateway.mode = gateway_mode_from_string(mode);
    if (opt_timeout->count() > 0) config.gateway.timeout = std::chrono::milliseconds(timeout_ms);
    (void)opt_mock_script;
    (void)opt_index_out;
    (void)opt_max_chars;
    (void)opt_ask_k;
    (void)opt_ask_s;
    (void)opt_eval_k;
    (void)opt_eval_s;
    (void)opt_eval_root;
    (void)opt_eval_ds;
    (void)opt_eval_report;
    (void)opt_sweep_root;
    (void)opt_sweep_ds;

    try {
        if (*sub_index) return cmd_index(config, index_input, index_out);
        if (*sub_ask) return cmd_ask(config, ask_index, ask_query, ask_trace);
        if (*sub_gen) return cmd_gen_questions(config, gen_input, gen_n, gen_out);
        if (*sub_eval) {
            EvalOptions options;
            options.system = system_kind_from_string(eval_system);
            options.mode = judge_mode_from_string(eval_judge_mode);
            options.params = config.retrieval;
            options.response_type = config.response_type;
            return cmd_eval(config, eval_index_root, eval_dataset, options, eval_report);
        }
        if (*sub_sweep) {
            EvalOptions options;
            options.system = system_kind_from_string(sweep_system);
            options.mode = judge_mode_from_string(sweep_judge_mode);
            options.params = config.retrieval;
            options.response_type = config.response_type;
            return cmd_sweep(config, sweep_index_root, sweep_dataset,
                             parse_int_list(sweep_k, "--k"), parse_int_list(sweep_s, "--s"),
                             options, sweep_report);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_provider_error(e) ? kExitProvider : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
