#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalrag/causal_engine.hpp"
#include "causalrag/gateway.hpp"
#include "causalrag/indexer.hpp"
#include "causalrag/json.hpp"
#include "causalrag/retriever.hpp"

namespace causalrag {

struct EvalSample {
    std::string document_id;
    std::string question;
    std::vector<std::string> reference_set;      // non-empty
    std::map<std::string, bool> annotations;     // reference -> causally relevant
};

struct RetrievedContextItem {
    std::string text;
    std::optional<std::string> matched_reference;
    std::optional<bool> judged_causal;
};

struct RecallResult {
    double value = 0.0;
    bool duplicate_match_warning = false;  // some reference was matched more than once
};

// Fraction of the reference set recovered by retrieval. Each reference
// contributes at most once to the numerator.
RecallResult context_recall(const std::vector<RetrievedContextItem>& items,
                            const std::vector<std::string>& reference_set);

// Fraction of the matched items judged causally related to the query;
// nullopt when no item matched (zero denominator).
std::optional<double> context_precision(const std::vector<RetrievedContextItem>& items);

enum class JudgeMode { Annotated, Judge };
enum class SystemKind { Causal, Baseline };

std::string_view to_string(JudgeMode mode);
JudgeMode judge_mode_from_string(std::string_view s);
std::string_view to_string(SystemKind kind);
SystemKind system_kind_from_string(std::string_view s);

// Resolves which reference each retrieved text matches (normalized substring
// containment, either direction, first reference in set order wins) and its
// causal flag: from the sample's annotations in annotated mode (unannotated
// matches default to causal), or from the causal_relevance_judge template in
// judge mode. An unparseable judge verdict after one re-prompt leaves the
// flag unset.
std::vector<RetrievedContextItem> judge_matches_and_causality(
    const std::vector<std::string>& retrieved_texts, const EvalSample& sample, JudgeMode mode,
    Gateway& gateway);

// 0-100 factual-consistency score from the faithfulness_judge template;
// nullopt when the score stays unparseable after one re-prompt.
std::optional<double> faithfulness(const std::string& answer,
                                   const std::string& reference_document, Gateway& gateway);

struct QaPair {
    std::string question;
    std::string reference_answer;
};

struct QuestionSet {
    std::vector<QaPair> questions;
    std::vector<std::string> warnings;
};

// Asks for n grounded questions whose answer spans occur verbatim in the
// document; rejected pairs are re-requested once.
QuestionSet generate_questions(const Document& doc, int n, Gateway& gateway);

// One retrieval statement per subgraph edge:
// "source relation target — descriptions".
std::vector<std::string> subgraph_statements(const KnowledgeGraph& graph);

struct EvalOptions {
    SystemKind system = SystemKind::Causal;
    JudgeMode mode = JudgeMode::Annotated;
    RetrievalParams params;
    std::string response_type = "multiple paragraphs";
};

struct SampleResult {
    std::string document_id;
    std::string question;
    int n_retrieved = 0;
    int n_matched = 0;
    int undefined_items = 0;  // matched items whose causal flag stayed unresolved
    double recall = 0.0;
    std::optional<double> precision;
    std::optional<double> faithfulness;
    bool duplicate_match_warning = false;
    std::string error;  // non-empty when the sample failed
};

struct MetricsReport {
    EvalOptions options;
    std::optional<double> context_recall;     // means over defined per-sample values
    std::optional<double> context_precision;
    std::optional<double> faithfulness;
    int n_samples = 0;
    int n_failed = 0;
    int total_retrieved = 0;
    int undefined_precision_count = 0;
    int undefined_faithfulness_count = 0;
    std::vector<SampleResult> per_sample;

    Json to_json() const;
};

std::vector<EvalSample> load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const std::vector<EvalSample>& samples);

// Evaluates every sample against its own per-document index under
// index_root/<document_id>; per-sample failures are recorded and the run
// continues.
MetricsReport run_eval(const std::filesystem::path& index_root,
                       const std::vector<EvalSample>& dataset, const EvalOptions& options,
                       Gateway& gateway);

void write_report(const std::filesystem::path& path, const MetricsReport& report);

// Mean of the defined aggregate values (recall, precision, faithfulness/100).
std::optional<double> composite_score(const MetricsReport& report);

struct SweepGrid {
    std::vector<int> k_values;
    std::vector<int> s_values;
    std::map<std::pair<int, int>, std::optional<double>> cells;  // (k, s) -> composite
};

SweepGrid sweep(const std::filesystem::path& index_root, const std::vector<EvalSample>& dataset,
                const std::vector<int>& k_values, const std::vector<int>& s_values,
                const EvalOptions& options, Gateway& gateway);

Json sweep_to_json(const SweepGrid& grid);

}  // namespace causalrag
