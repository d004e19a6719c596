#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clickbench {

struct LabelEntry {
  std::string label;
  std::vector<std::string> intents;
};

/// Canonical prompt and template texts, loaded from resources/prompts.json.
struct PromptTexts {
  std::string version;
  std::string system_preamble;
  std::string task_header;
  std::string guidance;
  std::string observation_caption;
  std::string reasoning_instruction;
  std::string action_instruction;
  std::string feedback_stdout_header;
  std::string feedback_stderr_header;
  std::string feedback_moved;
  std::string feedback_clamped;
  std::string feedback_clicked;
  std::string feedback_next_screenshot;
  std::map<std::string, std::string> parse_errors;
  std::string hint;
  std::string formulation_simplified;
  std::vector<std::string> humanlike_templates;
  std::vector<LabelEntry> label_bank;
  std::string oracle_reasoning_inside;
  std::string oracle_reasoning_outside;
  std::string scripted_reasoning_blind;
};

PromptTexts parse_prompt_texts(std::string_view json_text);

/// The compiled-in resource.
const PromptTexts& prompts();
std::string_view prompts_resource_json();

using TemplateVars = std::vector<std::pair<std::string_view, std::string>>;

/// Replaces every "{name}" with its value; unknown placeholders are left as-is.
std::string fill_template(std::string_view tmpl, const TemplateVars& vars);

/// Integral values print without a fraction, others with up to two decimals.
std::string format_coord(double v);

}  // namespace clickbench
