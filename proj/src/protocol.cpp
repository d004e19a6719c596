#include "clickbench/protocol.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "clickbench/codec.hpp"
#include "clickbench/error.hpp"
#include "clickbench/prompts.hpp"

namespace clickbench {
namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kCellOpen = "<ipython_cell>";
constexpr std::string_view kCellClose = "</ipython_cell>";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<std::string_view> between(std::string_view text, std::string_view open, std::string_view close) {
  const auto a = text.find(open);
  if (a == std::string_view::npos) return std::nullopt;
  const auto start = a + open.size();
  const auto b = text.find(close, start);
  if (b == std::string_view::npos) return std::nullopt;
  return text.substr(start, b - start);
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string strip_comments(std::string_view cell) {
  std::string out;
  bool in_comment = false;
  for (char c : cell) {
    if (c == '\n') in_comment = false;
    else if (c == '#') in_comment = true;
    if (!in_comment) out.push_back(c);
  }
  return out;
}

/// Number of depth-0 "identifier(" occurrences.
int count_calls(std::string_view s) {
  int calls = 0;
  int depth = 0;
  for (std::size_t i = 0; i < s.size();) {
    const char c = s[i];
    if (c == '(') {
      ++depth;
      ++i;
    } else if (c == ')') {
      --depth;
      ++i;
    } else if (ident_start(c) && (i == 0 || !ident_char(s[i - 1]))) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      std::size_t k = j;
      while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
      if (depth == 0 && k < s.size() && s[k] == '(') ++calls;
      i = j;
    } else {
      ++i;
    }
  }
  return calls;
}

std::vector<std::string_view> split_statements(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    const bool end = i == s.size();
    const char c = end ? '\n' : s[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (end || ((c == '\n' || c == ';') && depth <= 0)) {
      const auto stmt = trim(s.substr(start, i - start));
      if (!stmt.empty()) out.push_back(stmt);
      start = i + 1;
    }
  }
  return out;
}

/// [+-]? (digits ('.' digits*)? | '.' digits)
std::optional<double> parse_number(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  std::size_t i = 0;
  if (token[i] == '+' || token[i] == '-') ++i;
  std::size_t int_digits = 0;
  while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) ++i, ++int_digits;
  std::size_t frac_digits = 0;
  if (i < token.size() && token[i] == '.') {
    ++i;
    while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i]))) ++i, ++frac_digits;
  }
  if (i != token.size() || (int_digits == 0 && frac_digits == 0)) return std::nullopt;
  const std::string buf(token);
  const double v = std::strtod(buf.c_str(), nullptr);
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

Parsed<Action> parse_call(std::string_view stmt) {
  if (stmt.empty() || !ident_start(stmt.front())) return ParseError::MalformedArguments;
  std::size_t j = 0;
  while (j < stmt.size() && ident_char(stmt[j])) ++j;
  const auto name = stmt.substr(0, j);
  if (name != "mouse_move" && name != "mouse_click") return ParseError::UnknownMethod;
  auto rest = trim(stmt.substr(j));
  if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')') return ParseError::MalformedArguments;
  const auto args = rest.substr(1, rest.size() - 2);
  if (args.find_first_of("()") != std::string_view::npos) return ParseError::MalformedArguments;
  if (name == "mouse_click") {
    if (!trim(args).empty()) return ParseError::MalformedArguments;
    return Action{MouseClick{}};
  }
  const auto comma = args.find(',');
  if (comma == std::string_view::npos || args.find(',', comma + 1) != std::string_view::npos)
    return ParseError::MalformedArguments;
  const auto x = parse_number(args.substr(0, comma));
  const auto y = parse_number(args.substr(comma + 1));
  if (!x || !y) return ParseError::MalformedArguments;
  return Action{MouseMove{round_half_up(*x), round_half_up(*y)}};
}

}  // namespace

void RunConfig::validate() const {
  if (step_quota < 1) throw Error(Errc::InvalidArguments, "step_quota must be >= 1");
  if (repetitions < 1) throw Error(Errc::InvalidArguments, "repetitions must be >= 1");
}

std::string_view to_string(Formulation f) { return f == Formulation::Simplified ? "simplified" : "humanlike"; }

const std::string& formulation_text(const TaskSpec& task, Formulation f) {
  return f == Formulation::Simplified ? task.formulation_simplified : task.formulation_humanlike;
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

bool ImagePart::operator==(const ImagePart& other) const {
  if (raster == other.raster) return true;
  if (!raster || !other.raster) return false;
  return *raster == *other.raster;
}

Message Message::text(Role role, std::string body) { return Message{role, {TextPart{std::move(body)}}}; }

std::string Message::text_content() const {
  std::string out;
  for (const auto& part : parts) {
    if (const auto* t = std::get_if<TextPart>(&part)) {
      if (!out.empty()) out += "\n";
      out += t->text;
    }
  }
  return out;
}

std::size_t Message::image_count() const {
  std::size_t n = 0;
  for (const auto& part : parts) n += std::holds_alternative<ImagePart>(part) ? 1 : 0;
  return n;
}

std::string render_transcript(std::span<const Message> messages) {
  std::string out;
  for (const auto& m : messages) {
    out += "[";
    out += to_string(m.role);
    out += "]\n";
    for (const auto& part : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&part)) {
        out += t->text;
      } else {
        const auto& img = std::get<ImagePart>(part);
        if (img.raster) {
          out += "<image " + std::to_string(img.raster->width()) + "x" + std::to_string(img.raster->height()) +
                 " sha256:" + sha256_hex(img.raster->bytes()) + ">";
        } else {
          out += "<image missing>";
        }
      }
      out += "\n";
    }
  }
  return out;
}

std::string_view to_string(ParseError e) {
  switch (e) {
    case ParseError::NoThinkBlock: return "NoThinkBlock";
    case ParseError::NoActionCell: return "NoActionCell";
    case ParseError::UnknownMethod: return "UnknownMethod";
    case ParseError::MalformedArguments: return "MalformedArguments";
    case ParseError::MultipleActions: return "MultipleActions";
    case ParseError::EmptyCell: return "EmptyCell";
  }
  return "NoActionCell";
}

std::optional<ParseError> parse_error_from_string(std::string_view name) {
  for (auto e : {ParseError::NoThinkBlock, ParseError::NoActionCell, ParseError::UnknownMethod,
                 ParseError::MalformedArguments, ParseError::MultipleActions, ParseError::EmptyCell}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

const std::string& feedback_text(ParseError e) { return prompts().parse_errors.at(std::string(to_string(e))); }

Parsed<std::string> parse_think(std::string_view reply) {
  const auto body = between(reply, kThinkOpen, kThinkClose);
  if (!body) return ParseError::NoThinkBlock;
  return std::string(trim(*body));
}

std::optional<std::string> extract_action_cell(std::string_view reply) {
  const auto body = between(reply, kCellOpen, kCellClose);
  if (!body) return std::nullopt;
  return std::string(*body);
}

Parsed<Action> parse_action_cell(std::string_view reply) {
  const auto cell = between(reply, kCellOpen, kCellClose);
  if (!cell) return ParseError::NoActionCell;
  const std::string code = strip_comments(*cell);
  if (trim(code).empty()) return ParseError::EmptyCell;
  if (count_calls(code) > 1) return ParseError::MultipleActions;
  const auto statements = split_statements(code);
  if (statements.size() != 1) return ParseError::MalformedArguments;
  return parse_call(statements.front());
}

std::string serialize_action_cell(const Action& action) {
  return std::string(kCellOpen) + to_call_text(action) + std::string(kCellClose);
}

Message observation_message(std::shared_ptr<const Raster> observation) {
  const auto& p = prompts();
  Message m;
  m.role = Role::User;
  const int w = observation ? observation->width() : 0;
  const int h = observation ? observation->height() : 0;
  m.parts.push_back(TextPart{fill_template(p.observation_caption,
                                           {{"width", std::to_string(w)}, {"height", std::to_string(h)}})});
  m.parts.push_back(ImagePart{std::move(observation)});
  return m;
}

std::vector<Message> build_reasoning_prompt(const TaskSpec& task, const RunConfig& config,
                                            const Message& observation, std::span<const AgentTurn> trace) {
  const auto& p = prompts();
  std::vector<Message> out;
  out.push_back(Message::text(Role::System, p.system_preamble));

  Message task_msg;
  task_msg.role = Role::User;
  task_msg.parts.push_back(TextPart{fill_template(p.task_header, {{"task", formulation_text(task, config.formulation)}})});
  if (config.guidance_present) task_msg.parts.push_back(TextPart{p.guidance});
  out.push_back(std::move(task_msg));

  if (config.trace_visible) {
    for (const auto& turn : trace) {
      out.push_back(Message::text(Role::Assistant, std::string(kThinkOpen) + turn.reasoning_text + std::string(kThinkClose)));
      if (!turn.action_reply.empty()) {
        out.push_back(Message::text(Role::Assistant, std::string(kCellOpen) + turn.action_raw + std::string(kCellClose)));
      }
      out.push_back(Message::text(Role::User, turn.console_output));
    }
  }

  out.push_back(observation);
  out.push_back(Message::text(Role::User, p.reasoning_instruction));
  return out;
}

std::vector<Message> build_reasoning_prompt(const TaskSpec& task, const RunConfig& config,
                                            std::shared_ptr<const Raster> observation,
                                            std::span<const AgentTurn> trace) {
  return build_reasoning_prompt(task, config, observation_message(std::move(observation)), trace);
}

std::vector<Message> build_action_prompt(std::vector<Message> prior, const std::string& reasoning_reply) {
  prior.push_back(Message::text(Role::Assistant, reasoning_reply));
  prior.push_back(Message::text(Role::User, prompts().action_instruction));
  return prior;
}

std::string console_text(const ExecutionOutcome& outcome) {
  const auto& p = prompts();
  std::string out_lines;
  std::string err_lines;
  if (outcome.error) err_lines = feedback_text(*outcome.error);
  if (!outcome.execution_error.empty()) {
    if (!err_lines.empty()) err_lines += "\n";
    err_lines += outcome.execution_error;
  }
  if (outcome.action) {
    const auto cx = format_coord(outcome.cursor.x);
    const auto cy = format_coord(outcome.cursor.y);
    if (is_click(*outcome.action)) {
      out_lines = fill_template(p.feedback_clicked, {{"x", cx}, {"y", cy}});
    } else if (outcome.clamped && outcome.requested) {
      out_lines = fill_template(p.feedback_clamped, {{"rx", std::to_string(outcome.requested->x)},
                                                     {"ry", std::to_string(outcome.requested->y)},
                                                     {"width", std::to_string(outcome.viewport.width)},
                                                     {"height", std::to_string(outcome.viewport.height)},
                                                     {"x", cx},
                                                     {"y", cy}});
    } else {
      out_lines = fill_template(p.feedback_moved, {{"x", cx}, {"y", cy}});
    }
  }
  std::string text = p.feedback_stdout_header + "\n";
  if (!out_lines.empty()) text += out_lines + "\n";
  text += p.feedback_stderr_header;
  if (!err_lines.empty()) text += "\n" + err_lines;
  return text;
}

Message build_feedback(const ExecutionOutcome& outcome, std::shared_ptr<const Raster> next_observation) {
  Message m;
  m.role = Role::User;
  m.parts.push_back(TextPart{console_text(outcome)});
  if (!outcome.terminated && next_observation) {
    m.parts.push_back(TextPart{prompts().feedback_next_screenshot});
    m.parts.push_back(ImagePart{std::move(next_observation)});
  }
  return m;
}

}  // namespace clickbench
