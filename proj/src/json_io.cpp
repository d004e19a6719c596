#include "clickbench/json_io.hpp"

#include <fstream>

#include "clickbench/error.hpp"

namespace clickbench {

using nlohmann::json;

void to_json(json& j, const Viewport& v) { j = {{"width", v.width}, {"height", v.height}}; }
void from_json(const json& j, Viewport& v) {
  v.width = j.at("width").get<int>();
  v.height = j.at("height").get<int>();
}

void to_json(json& j, const Point& p) { j = {{"x", p.x}, {"y", p.y}}; }
void from_json(const json& j, Point& p) {
  p.x = j.at("x").get<double>();
  p.y = j.at("y").get<double>();
}

void to_json(json& j, const BoundingBox& b) { j = {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }
void from_json(const json& j, BoundingBox& b) {
  b.x = j.at("x").get<double>();
  b.y = j.at("y").get<double>();
  b.w = j.at("w").get<double>();
  b.h = j.at("h").get<double>();
}

void to_json(json& j, const Rgba& c) { j = json::array({c.r, c.g, c.b, c.a}); }
void from_json(const json& j, Rgba& c) {
  if (!j.is_array() || j.size() != 4) throw Error(Errc::DataFormatError, "color must be [r,g,b,a]");
  c = {j[0].get<std::uint8_t>(), j[1].get<std::uint8_t>(), j[2].get<std::uint8_t>(), j[3].get<std::uint8_t>()};
}

void to_json(json& j, const LayoutElement& e) {
  j = {{"id", e.id}, {"rect", e.rect}, {"fill", e.fill}, {"label", e.label}, {"clickable", e.clickable}};
  if (!e.parent.empty()) j["parent"] = e.parent;
}
void from_json(const json& j, LayoutElement& e) {
  e.id = j.at("id").get<std::string>();
  e.rect = j.at("rect").get<BoundingBox>();
  e.fill = j.at("fill").get<Rgba>();
  e.label = j.value("label", std::string());
  e.clickable = j.value("clickable", false);
  e.parent = j.value("parent", std::string());
}

void to_json(json& j, const PageLayout& l) {
  j = {{"viewport", l.viewport}, {"background", l.background}, {"elements", l.elements}};
}
void from_json(const json& j, PageLayout& l) {
  l.viewport = j.at("viewport").get<Viewport>();
  l.background = j.value("background", Rgba{255, 255, 255, 255});
  l.elements = j.at("elements").get<std::vector<LayoutElement>>();
}

namespace {

json range_json(int lo, int hi) { return {{"min", lo}, {"max", hi}}; }

std::string_view overlap_name(OverlapPolicy p) { return p == OverlapPolicy::Avoid ? "avoid" : "allow_off_center"; }

}  // namespace

void to_json(json& j, const GenSpec& g) {
  j = {{"seed", g.seed},
       {"viewport", g.viewport},
       {"element_count", range_json(g.element_count.min, g.element_count.max)},
       {"target_width", range_json(g.target_width.min, g.target_width.max)},
       {"target_height", range_json(g.target_height.min, g.target_height.max)},
       {"overlap", std::string(overlap_name(g.overlap))},
       {"cursor_distance", {{"min", g.cursor_distance.min}, {"max", g.cursor_distance.max}}}};
}
void from_json(const json& j, GenSpec& g) {
  GenSpec d;
  g.seed = j.value("seed", d.seed);
  g.viewport = j.value("viewport", d.viewport);
  auto int_range = [&](const char* key, IntRange fallback) {
    if (!j.contains(key)) return fallback;
    return IntRange{j[key].at("min").get<int>(), j[key].at("max").get<int>()};
  };
  g.element_count = int_range("element_count", d.element_count);
  g.target_width = int_range("target_width", d.target_width);
  g.target_height = int_range("target_height", d.target_height);
  const std::string overlap = j.value("overlap", std::string("avoid"));
  if (overlap == "avoid") g.overlap = OverlapPolicy::Avoid;
  else if (overlap == "allow_off_center") g.overlap = OverlapPolicy::AllowOffCenter;
  else throw Error(Errc::DataFormatError, "unknown overlap policy " + overlap);
  if (j.contains("cursor_distance")) {
    g.cursor_distance = {j["cursor_distance"].at("min").get<double>(), j["cursor_distance"].at("max").get<double>()};
  } else {
    g.cursor_distance = d.cursor_distance;
  }
}

void to_json(json& j, const TaskSpec& t) {
  json page;
  if (t.page.kind == PageKind::Synthetic) {
    page = {{"kind", "synthetic"}};
    if (t.page.layout) page["layout"] = *t.page.layout;
  } else {
    page = {{"kind", "snapshot"}, {"path", t.page.path}};
  }
  j = {{"task_id", t.task_id},
       {"page", std::move(page)},
       {"target_locator", t.target_locator},
       {"target_bbox", t.target_bbox},
       {"target_text", t.target_text},
       {"formulation_simplified", t.formulation_simplified},
       {"formulation_humanlike", t.formulation_humanlike}};
  if (t.suggested_cursor) j["suggested_cursor"] = *t.suggested_cursor;
}
void from_json(const json& j, TaskSpec& t) {
  t.task_id = j.at("task_id").get<std::string>();
  const auto& page = j.at("page");
  const std::string kind = page.at("kind").get<std::string>();
  if (kind == "synthetic") {
    t.page.kind = PageKind::Synthetic;
    t.page.path.clear();
    t.page.layout = page.contains("layout") ? std::make_shared<const PageLayout>(page["layout"].get<PageLayout>())
                                            : nullptr;
  } else if (kind == "snapshot") {
    t.page.kind = PageKind::Snapshot;
    t.page.path = page.at("path").get<std::string>();
    t.page.layout = nullptr;
  } else {
    throw Error(Errc::DataFormatError, "unknown page kind " + kind);
  }
  t.target_locator = j.at("target_locator").get<std::string>();
  t.target_bbox = j.at("target_bbox").get<BoundingBox>();
  t.target_text = j.at("target_text").get<std::string>();
  t.formulation_simplified = j.at("formulation_simplified").get<std::string>();
  t.formulation_humanlike = j.value("formulation_humanlike", std::string());
  if (j.contains("suggested_cursor")) t.suggested_cursor = j["suggested_cursor"].get<Point>();
  else t.suggested_cursor.reset();
}

void to_json(json& j, const Action& a) {
  if (const auto* m = std::get_if<MouseMove>(&a)) {
    j = {{"type", "mouse_move"}, {"x", m->x}, {"y", m->y}};
  } else {
    j = {{"type", "mouse_click"}};
  }
}
void from_json(const json& j, Action& a) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "mouse_move") a = MouseMove{j.at("x").get<int>(), j.at("y").get<int>()};
  else if (type == "mouse_click") a = MouseClick{};
  else throw Error(Errc::DataFormatError, "unknown action type " + type);
}

Formulation formulation_from_string(std::string_view s) {
  if (s == "simplified") return Formulation::Simplified;
  if (s == "humanlike") return Formulation::HumanLike;
  throw Error(Errc::DataFormatError, "unknown formulation " + std::string(s));
}

void to_json(json& j, const RunConfig& c) {
  j = {{"trace_visible", c.trace_visible},
       {"guidance_present", c.guidance_present},
       {"formulation", std::string(to_string(c.formulation))},
       {"step_quota", c.step_quota},
       {"repetitions", c.repetitions},
       {"seed", c.seed}};
}
void from_json(const json& j, RunConfig& c) {
  c.trace_visible = j.at("trace_visible").get<bool>();
  c.guidance_present = j.at("guidance_present").get<bool>();
  c.formulation = formulation_from_string(j.at("formulation").get<std::string>());
  c.step_quota = j.at("step_quota").get<int>();
  c.repetitions = j.at("repetitions").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(json& j, const AgentTurn& t) {
  j = {{"reasoning_reply", t.reasoning_reply},
       {"reasoning_text", t.reasoning_text},
       {"action_reply", t.action_reply},
       {"action_raw", t.action_raw},
       {"console_output", t.console_output}};
  if (const auto* a = std::get_if<Action>(&t.action)) {
    j["action"] = *a;
    j["parse_error"] = nullptr;
  } else {
    j["action"] = nullptr;
    j["parse_error"] = std::string(to_string(std::get<ParseError>(t.action)));
  }
}
void from_json(const json& j, AgentTurn& t) {
  t.reasoning_reply = j.at("reasoning_reply").get<std::string>();
  t.reasoning_text = j.at("reasoning_text").get<std::string>();
  t.action_reply = j.at("action_reply").get<std::string>();
  t.action_raw = j.at("action_raw").get<std::string>();
  t.console_output = j.value("console_output", std::string());
  if (!j.at("action").is_null()) {
    t.action = j["action"].get<Action>();
  } else {
    const auto e = parse_error_from_string(j.at("parse_error").get<std::string>());
    if (!e) throw Error(Errc::DataFormatError, "unknown parse_error");
    t.action = *e;
  }
}

void to_json(json& j, const EpisodeRecord& r) {
  j = {{"task_id", r.task_id},
       {"task_index", r.task_index},
       {"repetition", r.repetition},
       {"config", r.config},
       {"target_bbox", r.target_bbox},
       {"turns", r.turns},
       {"initial_cursor", r.initial_cursor},
       {"moves", r.moves},
       {"click_point", r.click_point ? json(*r.click_point) : json(nullptr)},
       {"success", r.success},
       {"first_move_outside", r.first_move_outside},
       {"corrected_success", r.corrected_success},
       {"infra_failure", r.infra_failure},
       {"infra_error", r.infra_error},
       {"steps_used", r.steps_used}};
}
void from_json(const json& j, EpisodeRecord& r) {
  r.task_id = j.at("task_id").get<std::string>();
  r.task_index = j.at("task_index").get<std::size_t>();
  r.repetition = j.at("repetition").get<std::size_t>();
  r.config = j.at("config").get<RunConfig>();
  r.target_bbox = j.at("target_bbox").get<BoundingBox>();
  r.turns = j.at("turns").get<std::vector<AgentTurn>>();
  r.initial_cursor = j.at("initial_cursor").get<Point>();
  r.moves = j.at("moves").get<std::vector<Point>>();
  if (j.at("click_point").is_null()) r.click_point.reset();
  else r.click_point = j["click_point"].get<Point>();
  r.success = j.at("success").get<bool>();
  r.first_move_outside = j.at("first_move_outside").get<bool>();
  r.corrected_success = j.at("corrected_success").get<bool>();
  r.infra_failure = j.at("infra_failure").get<bool>();
  r.infra_error = j.value("infra_error", std::string());
  r.steps_used = j.at("steps_used").get<int>();
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(Errc::DataFormatError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

namespace {

template <typename T>
T convert(const json& j, const std::filesystem::path& path, std::size_t index) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::DataFormatError, path.string() + " entry " + std::to_string(index) + ": " + e.what());
  }
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string());
  for (const auto& j : lines) out << j.dump() << '\n';
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

}  // namespace

void write_task_manifest(const std::filesystem::path& path, std::span<const TaskSpec> tasks) {
  std::vector<json> lines;
  lines.reserve(tasks.size());
  for (const auto& t : tasks) lines.emplace_back(t);
  write_lines(path, lines);
}

std::vector<TaskSpec> read_task_manifest(const std::filesystem::path& path) {
  const auto lines = read_jsonl(path);
  std::vector<TaskSpec> tasks;
  tasks.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    TaskSpec t = convert<TaskSpec>(lines[i], path, i);
    if (t.page.kind == PageKind::Snapshot && std::filesystem::path(t.page.path).is_relative()) {
      t.page.path = (path.parent_path() / t.page.path).lexically_normal().string();
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<EpisodeRecord> read_records_jsonl(const std::filesystem::path& path) {
  const auto lines = read_jsonl(path);
  std::vector<EpisodeRecord> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) out.push_back(convert<EpisodeRecord>(lines[i], path, i));
  return out;
}

void write_records_jsonl(const std::filesystem::path& path, std::span<const EpisodeRecord> records) {
  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.emplace_back(r);
  write_lines(path, lines);
}

}  // namespace clickbench
