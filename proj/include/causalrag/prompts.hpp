#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace causalrag {

// The seven pipeline templates. Every LLM interaction flows through one of
// these ids; there are no ad-hoc prompt strings elsewhere.
enum class TemplateId {
    GraphExtraction,
    CausalDiscovery,
    CausalSummary,
    AnswerGeneration,
    QuestionGeneration,
    FaithfulnessJudge,
    CausalRelevanceJudge,
};

inline constexpr int kTemplateCount = 7;

std::string_view to_string(TemplateId id);
TemplateId template_id_from_string(std::string_view s);

struct PromptTemplate {
    TemplateId id;
    std::string body;  // text with {name} placeholders
    std::vector<std::string> required_placeholders;
};

using Bindings = std::map<std::string, std::string>;

// The unique {name} placeholders of a template body, in order of appearance.
std::vector<std::string> extract_placeholders(std::string_view body);

// Substitutes every placeholder verbatim. ContractError naming the missing
// placeholders when the bindings do not cover them; the rendered text never
// contains an unresolved placeholder marker.
std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

const std::map<TemplateId, PromptTemplate>& prompt_registry();
const PromptTemplate& prompt_template(TemplateId id);
std::string render_template(TemplateId id, const Bindings& bindings);

// Appended to a prompt when its response could not be parsed and the call is
// retried once; keeps retry prompts distinct so mocks can script both turns.
inline constexpr std::string_view kReformatSuffix =
    "\n\nYour previous response could not be parsed. Follow the required output format exactly.";

}  // namespace causalrag
