#include "causalrag/causal_engine.hpp"

#include <algorithm>
#include <cctype>

#include "causalrag/digest.hpp"
#include "causalrag/errors.hpp"
#include "causalrag/text_util.hpp"

namespace causalrag {

namespace {

constexpr std::string_view kPathsHeader = "---Causal Paths---";
constexpr std::string_view kNarrativeHeader = "---Narrative---";

struct RawPath {
    std::vector<std::string> labels;
    std::vector<std::string> relations;
    std::string rationale;
};

std::vector<std::string> split_arrow_list(std::string_view s) {
    std::vector<std::string> parts;
    for (auto& part : text::split_on(s, "->")) {
        const std::string trimmed = text::trim(part);
        if (!trimmed.empty()) parts.push_back(trimmed);
    }
    return parts;
}

// Parses the report layout the causal_discovery template requests. Returns
// false when the paths header is missing entirely.
bool parse_report(const std::string& response, const KnowledgeGraph& subgraph,
                  CausalReport* report) {
    const std::vector<std::string> lines = text::lines_of(response);
    std::size_t paths_start = lines.size();
    bool found_header = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (text::trim(lines[i]) == kPathsHeader) {
            paths_start = i + 1;
            found_header = true;
            break;
        }
    }
    if (!found_header) return false;

    std::vector<RawPath> raw_paths;
    std::size_t i = paths_start;
    for (; i < lines.size(); ++i) {
        const std::string line = text::trim(lines[i]);
        if (line == kNarrativeHeader) {
            ++i;
            break;
        }
        if (text::starts_with_ci(line, "PATH:")) {
            RawPath raw;
            raw.labels = split_arrow_list(line.substr(5));
            raw_paths.push_back(std::move(raw));
        } else if (text::starts_with_ci(line, "RELATIONS:") && !raw_paths.empty()) {
            raw_paths.back().relations = split_arrow_list(line.substr(10));
        } else if (text::starts_with_ci(line, "RATIONALE:") && !raw_paths.empty()) {
            raw_paths.back().rationale = text::trim(line.substr(10));
        }
    }
    std::vector<std::string> narrative_lines(lines.begin() + static_cast<std::ptrdiff_t>(std::min(i, lines.size())),
                                             lines.end());
    report->narrative = text::trim(text::join(narrative_lines, "\n"));

    for (RawPath& raw : raw_paths) {
        if (raw.labels.size() < 2) {
            ++report->parse_warnings;
            continue;
        }
        CausalPath path;
        bool dropped = false;
        for (const std::string& label : raw.labels) {
            NodeId id = NodeId::from_label(label);
            if (!subgraph.contains(id)) {
                ++report->hallucination_warnings;
                dropped = true;
                break;
            }
            if (!path.nodes.empty() && path.nodes.back() == id) {
                ++report->parse_warnings;
                dropped = true;
                break;
            }
            path.nodes.push_back(std::move(id));
        }
        if (dropped) continue;

        const std::size_t hops = path.nodes.size() - 1;
        raw.relations.resize(hops);  // pad missing relations with ""
        path.relations = std::move(raw.relations);
        path.rationale = std::move(raw.rationale);
        for (std::size_t h = 0; h < hops; ++h)
            path.inferred.push_back(!subgraph.adjacent(path.nodes[h], path.nodes[h + 1]));
        report->paths.push_back(std::move(path));
    }
    for (const CausalPath& path : report->paths)
        for (const NodeId& id : path.nodes) report->refined_nodes.insert(id);
    return true;
}

// Last "Source paths: 1, 3" style line of the response, filtered to valid
// 1-based indices. Defaults to every path when the response does not cite.
std::vector<int> parse_source_paths(const std::string& response, std::size_t path_count) {
    std::vector<int> cited;
    for (const std::string& raw_line : text::lines_of(response)) {
        const std::string line = text::trim(raw_line);
        if (!text::starts_with_ci(line, "source paths:")) continue;
        std::vector<int> indices;
        for (const std::string& tok : text::split(line.substr(13), ',')) {
            const std::string t = text::trim(tok);
            if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) {
                    return std::isdigit(c) != 0;
                }))
                continue;
            const int idx = std::stoi(t);
            if (idx >= 1 && idx <= static_cast<int>(path_count) &&
                std::find(indices.begin(), indices.end(), idx) == indices.end())
                indices.push_back(idx);
        }
        if (!indices.empty()) cited = std::move(indices);
    }
    if (cited.empty()) {
        for (std::size_t i = 1; i <= path_count; ++i) cited.push_back(static_cast<int>(i));
    }
    return cited;
}

}  // namespace

std::string serialize_graph_data(const KnowledgeGraph& graph) {
    std::string out = "Nodes:\n";
    for (const auto& [id, node] : graph.nodes()) {
        out += "- " + node.label;
        if (!node.description.empty()) out += ": " + node.description;
        out += "\n";
    }
    out += "Edges:\n";
    for (const auto& [key, edge] : graph.edges()) {
        out += "- " + graph.node_at(edge.source).label + " -> " +
               graph.node_at(edge.target).label + " [" + edge.relation + "]\n";
    }
    return out;
}

std::string serialize_report(const CausalReport& report) {
    std::string out;
    for (std::size_t i = 0; i < report.paths.size(); ++i) {
        const CausalPath& path = report.paths[i];
        std::vector<std::string> labels;
        for (const NodeId& id : path.nodes) labels.push_back(id.value);
        out += "Path " + std::to_string(i + 1) + ": " + text::join(labels, " -> ");
        if (!path.relations.empty()) out += " (relations: " + text::join(path.relations, " -> ") + ")";
        out += "\n";
        if (!path.rationale.empty()) out += "  rationale: " + path.rationale + "\n";
    }
    if (!report.narrative.empty()) out += "Narrative:\n" + report.narrative + "\n";
    if (out.empty()) out = "(empty report)\n";
    return out;
}

CausalReport discover_causal_paths(const RetrievedSubgraph& retrieved, Gateway& gateway) {
    if (retrieved.subgraph.empty())
        throw ContractError("causal discovery requires a non-empty subgraph");

    const std::string prompt = render_template(
        TemplateId::CausalDiscovery, {{"graph_data", serialize_graph_data(retrieved.subgraph)}});

    CausalReport report;
    if (parse_report(gateway.complete(TemplateId::CausalDiscovery, prompt), retrieved.subgraph,
                     &report))
        return report;

    report = CausalReport{};
    const std::string retry_prompt = prompt + std::string(kReformatSuffix);
    if (parse_report(gateway.complete(TemplateId::CausalDiscovery, retry_prompt),
                     retrieved.subgraph, &report))
        return report;
    throw DiscoveryFailedError("causal report was unparseable after one re-prompt");
}

CausalSummary summarize_causal(const CausalReport& report, const std::string& query,
                               const std::string& response_type, Gateway& gateway) {
    if (report.paths.empty())
        return CausalSummary{std::string(kNoCausalEvidenceSummary), {}};

    const std::string response =
        gateway.render_and_complete(TemplateId::CausalSummary, {{"causal_summary", serialize_report(report)},
                                                                {"response_type", response_type},
                                                                {"query", query}});
    CausalSummary summary;
    summary.text = response;
    summary.source_paths = parse_source_paths(response, report.paths.size());
    return summary;
}

Answer answer_from_subgraph(const std::string& query, RetrievedSubgraph retrieved,
                            const std::string& response_type, Gateway& gateway) {
    Answer answer;
    answer.report = with_stage("discover", [&] { return discover_causal_paths(retrieved, gateway); });
    answer.summary = with_stage("summarize", [&] {
        return summarize_causal(answer.report, query, response_type, gateway);
    });
    const std::string prompt = render_template(TemplateId::AnswerGeneration,
                                               {{"context", answer.summary.text},
                                                {"query", query},
                                                {"response_type", response_type}});
    answer.text = with_stage("generate", [&] { return gateway.complete(TemplateId::AnswerGeneration, prompt); });
    answer.prompt_digest = "sha256:" + sha256_hex(prompt);
    answer.retrieval = std::move(retrieved);
    return answer;
}

Answer answer_query(const std::string& query, const LoadedIndex& index, RetrievalParams params,
                    const std::string& response_type, Gateway& gateway) {
    RetrievedSubgraph retrieved = with_stage(
        "retrieve", [&] { return retrieve_causal_context(query, index, params, gateway); });
    return answer_from_subgraph(query, std::move(retrieved), response_type, gateway);
}

}  // namespace causalrag
