#include "causalrag/eval.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "causalrag/errors.hpp"
#include "causalrag/text_util.hpp"

namespace causalrag {

namespace fs = std::filesystem;

std::string_view to_string(JudgeMode mode) {
    return mode == JudgeMode::Annotated ? "annotated" : "judge";
}

JudgeMode judge_mode_from_string(std::string_view s) {
    if (s == "annotated") return JudgeMode::Annotated;
    if (s == "judge") return JudgeMode::Judge;
    throw FormatError("unknown judge mode: " + std::string(s));
}

std::string_view to_string(SystemKind kind) {
    return kind == SystemKind::Causal ? "causal" : "baseline";
}

SystemKind system_kind_from_string(std::string_view s) {
    if (s == "causal") return SystemKind::Causal;
    if (s == "baseline") return SystemKind::Baseline;
    throw FormatError("unknown system kind: " + std::string(s));
}

// -------------------------------------------------------------------- metrics

RecallResult context_recall(const std::vector<RetrievedContextItem>& items,
                            const std::vector<std::string>& reference_set) {
    if (reference_set.empty()) throw ContractError("context_recall requires a non-empty reference set");
    std::set<std::string> matched;
    bool duplicate = false;
    for (const RetrievedContextItem& item : items) {
        if (!item.matched_reference) continue;
        if (!matched.insert(*item.matched_reference).second) duplicate = true;
    }
    return RecallResult{static_cast<double>(matched.size()) /
                            static_cast<double>(reference_set.size()),
                        duplicate};
}

std::optional<double> context_precision(const std::vector<RetrievedContextItem>& items) {
    int matched = 0;
    int causal = 0;
    for (const RetrievedContextItem& item : items) {
        if (!item.matched_reference) continue;
        if (!item.judged_causal)
            throw ContractError("context_precision requires every matched item to be judged");
        ++matched;
        if (*item.judged_causal) ++causal;
    }
    if (matched == 0) return std::nullopt;
    return static_cast<double>(causal) / static_cast<double>(matched);
}

// -------------------------------------------------------------------- judging

namespace {

// Last standalone YES/NO word of the response decides the verdict.
std::optional<bool> parse_verdict(const std::string& response) {
    const std::vector<std::string> tokens = text::tokenize(response);
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        if (*it == "yes") return true;
        if (*it == "no") return false;
    }
    return std::nullopt;
}

// First "score: <number>" line, else the first bare number in the response.
std::optional<double> parse_score(const std::string& response) {
    for (const std::string& raw_line : text::lines_of(response)) {
        const std::string line = text::trim(raw_line);
        if (!text::starts_with_ci(line, "score")) continue;
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        try {
            return std::stod(line.substr(colon + 1));
        } catch (const std::exception&) {
            continue;
        }
    }
    for (std::size_t i = 0; i < response.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(response[i])) == 0) continue;
        try {
            return std::stod(response.substr(i));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<RetrievedContextItem> judge_matches_and_causality(
    const std::vector<std::string>& retrieved_texts, const EvalSample& sample, JudgeMode mode,
    Gateway& gateway) {
    if (sample.reference_set.empty())
        throw ContractError("sample has an empty reference set: " + sample.document_id);
    if (mode == JudgeMode::Annotated && sample.annotations.empty())
        throw ContractError("annotated mode requires sample annotations: " + sample.document_id);

    std::vector<RetrievedContextItem> items;
    items.reserve(retrieved_texts.size());
    for (const std::string& retrieved : retrieved_texts) {
        RetrievedContextItem item;
        item.text = retrieved;
        for (const std::string& reference : sample.reference_set) {
            if (text::normalized_match(retrieved, reference)) {
                item.matched_reference = reference;
                break;
            }
        }
        if (item.matched_reference) {
            if (mode == JudgeMode::Annotated) {
                // annotations cover a subset; unannotated matches count as causal
                auto it = sample.annotations.find(*item.matched_reference);
                item.judged_causal = it == sample.annotations.end() ? true : it->second;
            } else {
                const std::string prompt = render_template(TemplateId::CausalRelevanceJudge,
                                                           {{"question", sample.question},
                                                            {"context_item", retrieved}});
                auto verdict = parse_verdict(gateway.complete(TemplateId::CausalRelevanceJudge, prompt));
                if (!verdict)
                    verdict = parse_verdict(gateway.complete(
                        TemplateId::CausalRelevanceJudge, prompt + std::string(kReformatSuffix)));
                item.judged_causal = verdict;  // stays unset on a second parse failure
            }
        }
        items.push_back(std::move(item));
    }
    return items;
}

std::optional<double> faithfulness(const std::string& answer,
                                   const std::string& reference_document, Gateway& gateway) {
    if (text::trim(answer).empty() || text::trim(reference_document).empty())
        throw ContractError("faithfulness requires a non-empty answer and reference document");
    const std::string prompt = render_template(
        TemplateId::FaithfulnessJudge,
        {{"answer", answer}, {"reference_document", reference_document}});
    auto score = parse_score(gateway.complete(TemplateId::FaithfulnessJudge, prompt));
    if (!score)
        score = parse_score(
            gateway.complete(TemplateId::FaithfulnessJudge, prompt + std::string(kReformatSuffix)));
    if (!score) return std::nullopt;
    return std::clamp(*score, 0.0, 100.0);
}

// ---------------------------------------------------------------- questions

namespace {

std::vector<QaPair> parse_question_lines(const std::string& response) {
    std::vector<QaPair> pairs;
    for (const std::string& raw_line : text::lines_of(response)) {
        std::string line = text::trim(raw_line);
        if (line.empty()) continue;
        // numbered prefix "1." or "1)"
        std::size_t p = 0;
        while (p < line.size() && std::isdigit(static_cast<unsigned char>(line[p])) != 0) ++p;
        if (p == 0 || p >= line.size() || (line[p] != '.' && line[p] != ')')) continue;
        line = text::trim(line.substr(p + 1));
        const std::size_t bar = line.find('|');
        if (bar == std::string::npos) continue;
        QaPair pair{text::trim(line.substr(0, bar)), text::trim(line.substr(bar + 1))};
        if (!pair.question.empty() && !pair.reference_answer.empty())
            pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace

QuestionSet generate_questions(const Document& doc, int n, Gateway& gateway) {
    if (n <= 0) throw ContractError("question count must be positive");

    const std::string prompt = render_template(
        TemplateId::QuestionGeneration,
        {{"document_text", doc.text}, {"n", std::to_string(n)}});

    QuestionSet result;
    std::set<std::string> seen;
    auto absorb = [&](const std::string& response) {
        for (QaPair& pair : parse_question_lines(response)) {
            if (static_cast<int>(result.questions.size()) >= n) break;
            if (!seen.insert(text::canonical(pair.question)).second) continue;
            if (!text::normalized_contains(doc.text, pair.reference_answer)) {
                result.warnings.push_back("rejected ungrounded answer span: " +
                                          pair.reference_answer);
                continue;
            }
            result.questions.push_back(std::move(pair));
        }
    };

    absorb(gateway.complete(TemplateId::QuestionGeneration, prompt));
    if (static_cast<int>(result.questions.size()) < n)
        absorb(gateway.complete(TemplateId::QuestionGeneration,
                                prompt + std::string(kReformatSuffix)));
    if (static_cast<int>(result.questions.size()) < n)
        result.warnings.push_back("generated " + std::to_string(result.questions.size()) + " of " +
                                  std::to_string(n) + " grounded questions");
    return result;
}

// --------------------------------------------------------------- serialization

std::vector<std::string> subgraph_statements(const KnowledgeGraph& graph) {
    std::vector<std::string> statements;
    for (const auto& [key, edge] : graph.edges()) {
        const GraphNode& source = graph.node_at(edge.source);
        const GraphNode& target = graph.node_at(edge.target);
        std::string statement = source.label + " " + edge.relation + " " + target.label;
        std::vector<std::string> descriptions;
        if (!source.description.empty()) descriptions.push_back(source.description);
        if (!target.description.empty()) descriptions.push_back(target.description);
        if (!descriptions.empty()) statement += " — " + text::join(descriptions, "; ");
        statements.push_back(std::move(statement));
    }
    return statements;
}

// --------------------------------------------------------------------- dataset

std::vector<EvalSample> load_dataset(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot read dataset: " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw FormatError("dataset is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_array()) throw FormatError("dataset must be a JSON array of samples");

    std::vector<EvalSample> samples;
    int position = 0;
    for (const auto& s : doc) {
        ++position;
        const std::string where = "dataset sample " + std::to_string(position);
        try {
            EvalSample sample;
            sample.document_id = s.at("document_id").get<std::string>();
            sample.question = s.at("question").get<std::string>();
            sample.reference_set = s.at("reference_set").get<std::vector<std::string>>();
            if (sample.reference_set.empty())
                throw FormatError(where + ": reference_set is empty");
            if (s.contains("annotations")) {
                for (const auto& [ref, flag] : s.at("annotations").items()) {
                    if (std::find(sample.reference_set.begin(), sample.reference_set.end(), ref) ==
                        sample.reference_set.end())
                        throw FormatError(where + ": annotation for unknown reference: " + ref);
                    sample.annotations.emplace(ref, flag.get<bool>());
                }
            }
            samples.push_back(std::move(sample));
        } catch (const Json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    return samples;
}

void save_dataset(const fs::path& path, const std::vector<EvalSample>& samples) {
    Json doc = Json::array();
    for (const EvalSample& sample : samples) {
        Json s{{"document_id", sample.document_id},
               {"question", sample.question},
               {"reference_set", sample.reference_set}};
        if (!sample.annotations.empty()) {
            Json ann = Json::object();
            for (const auto& [ref, flag] : sample.annotations) ann[ref] = flag;
            s["annotations"] = std::move(ann);
        }
        doc.push_back(std::move(s));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError("cannot write dataset: " + path.string());
    out << doc.dump(2) << "\n";
}

// ------------------------------------------------------------------- run_eval

namespace {

Json optional_to_json(const std::optional<double>& value) {
    if (!value) return nullptr;
    return *value;
}

std::optional<double> mean_of(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

MetricsReport run_eval(const fs::path& index_root, const std::vector<EvalSample>& dataset,
                       const EvalOptions& options, Gateway& gateway) {
    validate(options.params);

    MetricsReport report;
    report.options = options;
    report.n_samples = static_cast<int>(dataset.size());

    std::map<std::string, LoadedIndex> cache;
    for (const EvalSample& sample : dataset) {
        SampleResult row;
        row.document_id = sample.document_id;
        row.question = sample.question;
        try {
            auto cached = cache.find(sample.document_id);
            if (cached == cache.end())
                cached = cache.emplace(sample.document_id,
                                       load_index(index_root / sample.document_id)).first;
            const LoadedIndex& index = cached->second;

            // every retrieved statement comes from this sample's own document index
            std::vector<std::string> statements;
            std::string answer_text;
            if (options.system == SystemKind::Causal) {
                RetrievedSubgraph retrieved =
                    retrieve_causal_context(sample.question, index, options.params, gateway);
                statements = subgraph_statements(retrieved.subgraph);
                const Answer answer = answer_from_subgraph(sample.question, std::move(retrieved),
                                                           options.response_type, gateway);
                answer_text = answer.text;
            } else {
                const ChunkContext context =
                    retrieve_baseline(sample.question, index, options.params.k, gateway);
                std::vector<std::string> chunk_texts;
                for (const ChunkMatch& chunk : context.chunks) {
                    statements.push_back(chunk.text);
                    chunk_texts.push_back(chunk.text);
                }
                answer_text = gateway.render_and_complete(
                    TemplateId::AnswerGeneration, {{"context", text::join(chunk_texts, "\n\n")},
                                                   {"query", sample.question},
                                                   {"response_type", options.response_type}});
            }

            const auto items =
                judge_matches_and_causality(statements, sample, options.mode, gateway);
            row.n_retrieved = static_cast<int>(items.size());

            const RecallResult recall = context_recall(items, sample.reference_set);
            row.recall = recall.value;
            row.duplicate_match_warning = recall.duplicate_match_warning;

            std::vector<RetrievedContextItem> judged;
            for (const RetrievedContextItem& item : items) {
                if (item.matched_reference) {
                    ++row.n_matched;
                    if (!item.judged_causal) {
                        ++row.undefined_items;  // judge verdict never resolved
                        continue;
                    }
                }
                judged.push_back(item);
            }
            row.precision = context_precision(judged);
            row.faithfulness = faithfulness(answer_text, index.document.text, gateway);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        report.per_sample.push_back(std::move(row));
    }

    std::vector<double> recalls;
    std::vector<double> precisions;
    std::vector<double> faiths;
    for (const SampleResult& row : report.per_sample) {
        if (!row.error.empty()) {
            ++report.n_failed;
            continue;
        }
        report.total_retrieved += row.n_retrieved;
        recalls.push_back(row.recall);
        if (row.precision)
            precisions.push_back(*row.precision);
        else
            ++report.undefined_precision_count;
        if (row.faithfulness)
            faiths.push_back(*row.faithfulness);
        else
            ++report.undefined_faithfulness_count;
    }
    report.context_recall = mean_of(recalls);
    report.context_precision = mean_of(precisions);
    report.faithfulness = mean_of(faiths);
    return report;
}

Json MetricsReport::to_json() const {
    Json per = Json::array();
    for (const SampleResult& row : per_sample) {
        per.push_back(Json{{"document_id", row.document_id},
                           {"question", row.question},
                           {"n_retrieved", row.n_retrieved},
                           {"n_matched", row.n_matched},
                           {"undefined_items", row.undefined_items},
                           {"recall", row.error.empty() ? Json(row.recall) : Json(nullptr)},
                           {"precision", row.error.empty() ? optional_to_json(row.precision) : Json(nullptr)},
                           {"faithfulness", row.error.empty() ? optional_to_json(row.faithfulness) : Json(nullptr)},
                           {"duplicate_match_warning", row.duplicate_match_warning},
                           {"error", row.error}});
    }
    return Json{{"system", std::string(to_string(options.system))},
                {"judge_mode", std::string(to_string(options.mode))},
                {"params", Json{{"k", options.params.k}, {"s", options.params.s}}},
                {"aggregates",
                 Json{{"context_recall", optional_to_json(context_recall)},
                      {"context_precision", optional_to_json(context_precision)},
                      {"faithfulness", optional_to_json(faithfulness)},
                      {"n_samples", n_samples},
                      {"n_failed", n_failed},
                      {"total_retrieved", total_retrieved},
                      {"undefined_precision", undefined_precision_count},
                      {"undefined_faithfulness", undefined_faithfulness_count}}},
                {"per_sample", std::move(per)}};
}

void write_report(const fs::path& path, const MetricsReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError("cannot write report: " + path.string());
    out << report.to_json().dump(2) << "\n";
}

// ---------------------------------------------------------------------- sweep

std::optional<double> composite_score(const MetricsReport& report) {
    std::vector<double> components;
    if (report.context_recall) components.push_back(*report.context_recall);
    if (report.context_precision) components.push_back(*report.context_precision);
    if (report.faithfulness) components.push_back(*report.faithfulness / 100.0);
    return mean_of(components);
}

SweepGrid sweep(const fs::path& index_root, const std::vector<EvalSample>& dataset,
                const std::vector<int>& k_values, const std::vector<int>& s_values,
                const EvalOptions& options, Gateway& gateway) {
    if (k_values.empty() || s_values.empty())
        throw ContractError("sweep requires non-empty k and s grids");

    SweepGrid grid;
    grid.k_values = k_values;
    grid.s_values = s_values;
    for (int k : k_values) {
        for (int s : s_values) {
            EvalOptions cell_options = options;
            cell_options.params = RetrievalParams{k, s};
            std::optional<double> composite;
            try {
                composite = composite_score(run_eval(index_root, dataset, cell_options, gateway));
            } catch (const std::exception&) {
                composite = std::nullopt;  // cell failure recorded as undefined
            }
            grid.cells.emplace(std::make_pair(k, s), composite);
        }
    }
    return grid;
}

Json sweep_to_json(const SweepGrid& grid) {
    Json cells = Json::array();
    for (const auto& [ks, composite] : grid.cells) {
        cells.push_back(Json{{"k", ks.first},
                             {"s", ks.second},
                             {"composite", optional_to_json(composite)}});
    }
    return Json{{"k_values", grid.k_values}, {"s_values", grid.s_values}, {"cells", std::move(cells)}};
}

}  // namespace causalrag
