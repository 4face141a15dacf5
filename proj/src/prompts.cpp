#include "causalrag/prompts.hpp"

#include <cctype>

#include "causalrag/errors.hpp"
#include "causalrag/text_util.hpp"

namespace causalrag {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_ident(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Returns the placeholder name when s[pos] starts a {name} marker.
std::string placeholder_at(std::string_view s, size_t pos, size_t* end) {
    if (s[pos] != '{' || pos + 1 >= s.size() || !is_ident_start(s[pos + 1])) return {};
    size_t i = pos + 1;
    while (i < s.size() && is_ident(s[i])) ++i;
    if (i >= s.size() || s[i] != '}') return {};
    *end = i + 1;
    return std::string(s.substr(pos + 1, i - pos - 1));
}

PromptTemplate make_template(TemplateId id, std::string body) {
    PromptTemplate t{id, std::move(body), {}};
    t.required_placeholders = extract_placeholders(t.body);
    return t;
}

std::map<TemplateId, PromptTemplate> build_registry() {
    std::map<TemplateId, PromptTemplate> reg;

    reg.emplace(TemplateId::GraphExtraction, make_template(TemplateId::GraphExtraction, R"(---Role---
You are a smart assistant who turns documents into entity/relation graphs.
---Goal---
Read the source text and identify the key entities or concepts it mentions and the directed relationships between them. Output one relationship per line in the exact form:
entity | relation | entity
You may also describe an entity on its own line in the exact form:
entity | short description of the entity
Use short canonical entity names, keep every relation to a single verb phrase, and never invent entities the text does not mention. Output nothing but these lines, within a strict token budget.
---Source Text---
{input_text})"));

    reg.emplace(TemplateId::CausalDiscovery, make_template(TemplateId::CausalDiscovery, R"(---Role---
You are a smart assistant who analyses cause and effect in knowledge graphs.
--- Goal ---
Write a structured, professional causality analysis report over the network data below. Identify and estimate the causal paths that connect the entities, keep only the nodes that carry causal weight, and stay within a strict token budget.
---Network Data---
{graph_data}
--- Report Format ---
Produce the report in exactly this layout:
---Causal Paths---
PATH: entity -> entity -> entity
RELATIONS: relation -> relation
RATIONALE: one sentence on why this path is causally plausible
Repeat the PATH/RELATIONS/RATIONALE lines for every causal path you find. Emit the ---Causal Paths--- header even when there is no path. Then finish with:
---Narrative---
A short professional narrative tying the paths together.)"));

    reg.emplace(TemplateId::CausalSummary, make_template(TemplateId::CausalSummary, R"(---Role---
You are a helpful assistant responding to a user query about a causality analysis report.
---Goal---
Generate a response of the target length and format that answers the query. Merge the cleaned information of the causal summary below into a coherent distillation, keep only statements the report grounds, and end with one line in the exact form "Source paths: <comma-separated path numbers>" naming the paths you used. Stay within a strict token budget.
---Causal Summary---
{causal_summary}
---Target Response Length and Format---
{response_type}
---User Query---
{query})"));

    reg.emplace(TemplateId::AnswerGeneration, make_template(TemplateId::AnswerGeneration, R"(---Role---
You are a helpful assistant who answers strictly from the provided context.
---Goal---
Answer the user query using only the context below. If the context does not contain the answer, say so plainly. Respond in the target length and format, within a strict token budget.
---Context---
{context}
---Target Response Length and Format---
{response_type}
---User Query---
{query})"));

    reg.emplace(TemplateId::QuestionGeneration, make_template(TemplateId::QuestionGeneration, R"(---Role---
You are a careful examiner who writes grounded comprehension questions.
---Goal---
Write {n} questions about the document below. Every question must be explicitly answerable from the document alone, and its answer must appear verbatim (or near verbatim) in the text. Output one question per line in the exact form:
1. question | answer span copied from the document
Number the lines starting at 1 and output nothing else, within a strict token budget.
---Document---
{document_text})"));

    reg.emplace(TemplateId::FaithfulnessJudge, make_template(TemplateId::FaithfulnessJudge, R"(---Role---
You are a strict grader of factual consistency.
---Goal---
Compare the answer against the reference document claim by claim, stating a short rationale per claim. Then give one overall score from 0 to 100, where 100 means every claim is supported by the document. End with one line in the exact form:
score: <number>
Stay within a strict token budget.
---Answer---
{answer}
---Reference Document---
{reference_document})"));

    reg.emplace(TemplateId::CausalRelevanceJudge, make_template(TemplateId::CausalRelevanceJudge, R"(---Role---
You are a strict judge of causal relevance.
---Goal---
Decide whether the retrieved context item is causally related to the user question, not merely similar in wording. Answer with the single word YES or NO on the final line, within a strict token budget.
---User Question---
{question}
---Context Item---
{context_item})"));

    return reg;
}

}  // namespace

std::string_view to_string(TemplateId id) {
    switch (id) {
        case TemplateId::GraphExtraction: return "graph_extraction";
        case TemplateId::CausalDiscovery: return "causal_discovery";
        case TemplateId::CausalSummary: return "causal_summary";
        case TemplateId::AnswerGeneration: return "answer_generation";
        case TemplateId::QuestionGeneration: return "question_generation";
        case TemplateId::FaithfulnessJudge: return "faithfulness_judge";
        case TemplateId::CausalRelevanceJudge: return "causal_relevance_judge";
    }
    return "unknown";
}

TemplateId template_id_from_string(std::string_view s) {
    for (const auto& [id, tmpl] : prompt_registry()) {
        if (to_string(id) == s) return id;
    }
    throw FormatError("unknown template id: " + std::string(s));
}

std::vector<std::string> extract_placeholders(std::string_view body) {
    std::vector<std::string> names;
    for (size_t i = 0; i < body.size(); ++i) {
        size_t end = 0;
        std::string name = placeholder_at(body, i, &end);
        if (name.empty()) continue;
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
        i = end - 1;
    }
    return names;
}

std::string render(const PromptTemplate& tmpl, const Bindings& bindings) {
    std::vector<std::string> missing;
    auto note_missing = [&](const std::string& name) {
        if (bindings.count(name) == 0 &&
            std::find(missing.begin(), missing.end(), name) == missing.end())
            missing.push_back(name);
    };
    for (const auto& name : tmpl.required_placeholders) note_missing(name);
    for (const auto& name : extract_placeholders(tmpl.body)) note_missing(name);
    if (!missing.empty())
        throw ContractError("render " + std::string(to_string(tmpl.id)) +
                            ": missing placeholder(s): " + text::join(missing, ", "));

    std::string out;
    out.reserve(tmpl.body.size());
    for (size_t i = 0; i < tmpl.body.size(); ++i) {
        size_t end = 0;
        std::string name = placeholder_at(tmpl.body, i, &end);
        if (name.empty()) {
            out.push_back(tmpl.body[i]);
        } else {
            out += bindings.at(name);
            i = end - 1;
        }
    }
    return out;
}

const std::map<TemplateId, PromptTemplate>& prompt_registry() {
    static const std::map<TemplateId, PromptTemplate> registry = build_registry();
    return registry;
}

const PromptTemplate& prompt_template(TemplateId id) { return prompt_registry().at(id); }

std::string render_template(TemplateId id, const Bindings& bindings) {
    return render(prompt_template(id), bindings);
}

}  // namespace causalrag
