#include <doctest.h>

#include <set>

#include "causalrag/errors.hpp"
#include "causalrag/prompts.hpp"

using namespace causalrag;

TEST_CASE("registry audit: exactly seven templates with the expected placeholders") {
    const auto& registry = prompt_registry();
    REQUIRE(registry.size() == kTemplateCount);

    const std::map<TemplateId, std::vector<std::string>> expected{
        {TemplateId::GraphExtraction, {"input_text"}},
        {TemplateId::CausalDiscovery, {"graph_data"}},
        {TemplateId::CausalSummary, {"causal_summary", "response_type", "query"}},
        {TemplateId::AnswerGeneration, {"context", "response_type", "query"}},
        {TemplateId::QuestionGeneration, {"n", "document_text"}},
        {TemplateId::FaithfulnessJudge, {"answer", "reference_document"}},
        {TemplateId::CausalRelevanceJudge, {"question", "context_item"}},
    };
    for (const auto& [id, tmpl] : registry) {
        CHECK(tmpl.id == id);
        CHECK_FALSE(tmpl.body.empty());
        CHECK(tmpl.body.find("---Role---") != std::string::npos);  // role conditioning
        CHECK(tmpl.body.find("token budget") != std::string::npos);
        REQUIRE(expected.count(id) == 1);
        const auto want = expected.at(id);
        CHECK(std::set<std::string>(tmpl.required_placeholders.begin(),
                                    tmpl.required_placeholders.end()) ==
              std::set<std::string>(want.begin(), want.end()));
        CHECK(template_id_from_string(std::string(to_string(id))) == id);
    }
}

TEST_CASE("causal discovery prompt keeps its section headers verbatim") {
    const std::string rendered =
        render_template(TemplateId::CausalDiscovery, {{"graph_data", "Nodes:\n- a\nEdges:\n"}});
    CHECK(rendered.find("---Role---") != std::string::npos);
    CHECK(rendered.find("--- Goal ---") != std::string::npos);
    CHECK(rendered.find("---Network Data---") != std::string::npos);
    CHECK(rendered.find("--- Report Format ---") != std::string::npos);
    CHECK(rendered.find("Nodes:\n- a") != std::string::npos);
    CHECK(rendered.find("{graph_data}") == std::string::npos);
}

TEST_CASE("causal summary prompt keeps its section headers verbatim") {
    const std::string rendered = render_template(TemplateId::CausalSummary,
                                                 {{"causal_summary", "Path 1: a -> b"},
                                                  {"response_type", "multiple paragraphs"},
                                                  {"query", "why?"}});
    CHECK(rendered.find("---Role---") != std::string::npos);
    CHECK(rendered.find("---Goal---") != std::string::npos);
    CHECK(rendered.find("---Causal Summary---") != std::string::npos);
    CHECK(rendered.find("---Target Response Length and Format---") != std::string::npos);
    CHECK(rendered.find("---User Query---") != std::string::npos);
    CHECK(rendered.find("Path 1: a -> b") != std::string::npos);
    CHECK(rendered.find("multiple paragraphs") != std::string::npos);
}

TEST_CASE("render fails naming every missing placeholder") {
    try {
        render_template(TemplateId::CausalSummary, {{"causal_summary", "x"}});
        FAIL("expected ContractError");
    } catch (const ContractError& e) {
        const std::string message = e.what();
        CHECK(message.find("query") != std::string::npos);
        CHECK(message.find("response_type") != std::string::npos);
        CHECK(message.find("causal_summary") == std::string::npos);
    }
}

TEST_CASE("a template with no placeholders renders unchanged") {
    PromptTemplate tmpl{TemplateId::AnswerGeneration, "no markers here", {}};
    CHECK(render(tmpl, {}) == "no markers here");
    CHECK(render(tmpl, {{"unused", "ignored"}}) == "no markers here");
}

TEST_CASE("placeholders substitute verbatim, unknown braces pass through") {
    PromptTemplate tmpl{TemplateId::AnswerGeneration, "a {x} b {x} c {not closed {9}", {"x"}};
    CHECK(render(tmpl, {{"x", "V"}}) == "a V b V c {not closed {9}");
}

TEST_CASE("extract_placeholders finds unique names in order") {
    CHECK(extract_placeholders("{b} then {a} then {b}") == std::vector<std::string>{"b", "a"});
}
