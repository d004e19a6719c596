#include "clickbench/prompts.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "clickbench/error.hpp"

namespace clickbench {

namespace detail {
extern const std::string_view kPromptsJson;
}

PromptTexts parse_prompt_texts(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::DataFormatError, std::string("prompts resource: ") + e.what());
  }
  PromptTexts p;
  try {
    p.version = j.at("version").get<std::string>();
    p.system_preamble = j.at("system_preamble").get<std::string>();
    p.task_header = j.at("task_header").get<std::string>();
    p.guidance = j.at("guidance").get<std::string>();
    p.observation_caption = j.at("observation_caption").get<std::string>();
    p.reasoning_instruction = j.at("reasoning_instruction").get<std::string>();
    p.action_instruction = j.at("action_instruction").get<std::string>();
    p.feedback_stdout_header = j.at("feedback_stdout_header").get<std::string>();
    p.feedback_stderr_header = j.at("feedback_stderr_header").get<std::string>();
    p.feedback_moved = j.at("feedback_moved").get<std::string>();
    p.feedback_clamped = j.at("feedback_clamped").get<std::string>();
    p.feedback_clicked = j.at("feedback_clicked").get<std::string>();
    p.feedback_next_screenshot = j.at("feedback_next_screenshot").get<std::string>();
    p.parse_errors = j.at("parse_errors").get<std::map<std::string, std::string>>();
    p.hint = j.at("hint").get<std::string>();
    p.formulation_simplified = j.at("formulation_simplified").get<std::string>();
    p.humanlike_templates = j.at("humanlike_templates").get<std::vector<std::string>>();
    for (const auto& entry : j.at("label_bank")) {
      p.label_bank.push_back({entry.at("label").get<std::string>(),
                              entry.at("intents").get<std::vector<std::string>>()});
    }
    p.oracle_reasoning_inside = j.at("oracle_reasoning_inside").get<std::string>();
    p.oracle_reasoning_outside = j.at("oracle_reasoning_outside").get<std::string>();
    p.scripted_reasoning_blind = j.at("scripted_reasoning_blind").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::DataFormatError, std::string("prompts resource: ") + e.what());
  }
  return p;
}

std::string_view prompts_resource_json() { return detail::kPromptsJson; }

const PromptTexts& prompts() {
  static const PromptTexts texts = parse_prompt_texts(detail::kPromptsJson);
  return texts;
}

std::string fill_template(std::string_view tmpl, const TemplateVars& vars) {
  std::string out;
  out.reserve(tmpl.size() + 32);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto name = tmpl.substr(i + 1, close - i - 1);
        bool replaced = false;
        for (const auto& [key, value] : vars) {
          if (key == name) {
            out += value;
            replaced = true;
            break;
          }
        }
        if (replaced) {
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

std::string format_coord(double v) {
  if (std::floor(v) == v && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace clickbench
