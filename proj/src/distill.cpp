#include "clickbench/distill.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>

#include "clickbench/codec.hpp"
#include "clickbench/error.hpp"
#include "clickbench/json_io.hpp"
#include "clickbench/prompts.hpp"
#include "clickbench/rng.hpp"

namespace clickbench {
namespace {

constexpr std::uint64_t kStage1Salt = 0x737461676531ULL;  // "stage1"
constexpr int kPlacementAttempts = 256;

RunConfig teacher_config(Formulation f, int quota, std::uint64_t seed) {
  RunConfig c;
  c.trace_visible = false;
  c.guidance_present = true;
  c.formulation = f;
  c.step_quota = quota;
  c.repetitions = 1;
  c.seed = seed;
  return c;
}

CursorState snap(CursorState c) { return {static_cast<double>(round_half_up(c.x)), static_cast<double>(round_half_up(c.y))}; }

CursorState place_cursor(const Stage1Spec& spec, const GeneratedTask& g, std::size_t index) {
  if (!spec.click_fraction) return snap(g.initial_cursor);
  const BoundingBox& box = g.task.target_bbox;
  const Viewport& vp = spec.gen.viewport;
  Rng rng(mix64(derive_seed(spec.gen.seed, index, 0) ^ kStage1Salt));
  if (rng.bernoulli(*spec.click_fraction)) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      const CursorState c = snap({rng.uniform(box.x, box.x + box.w), rng.uniform(box.y, box.y + box.h)});
      if (hit_test(box, c)) return c;
    }
    throw Error(Errc::GenerationFailed, "no integer pixel inside target " + g.task.task_id);
  }
  const Point center = box.center();
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    const double d = rng.uniform(spec.gen.cursor_distance.min, spec.gen.cursor_distance.max);
    const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const CursorState c = snap({center.x + d * std::cos(a), center.y + d * std::sin(a)});
    if (c.x < 0 || c.y < 0 || c.x > vp.width - 1 || c.y > vp.height - 1) continue;
    if (!hit_test(box, c)) return c;
  }
  throw Error(Errc::GenerationFailed, "cannot place an outside cursor for " + g.task.task_id);
}

DistillSample make_stage1_sample(const Stage1Spec& spec, std::size_t index) {
  const GeneratedTask g = generate_task(spec.gen, index);
  const CursorState cursor = place_cursor(spec, g, index);

  const auto page = std::make_shared<const Raster>(composite_cursor(render_page(*g.layout).raster, cursor));
  PrivilegedHint hint{cursor, g.task.target_bbox, label_action(cursor, g.task.target_bbox)};

  DistillSample s;
  s.stage = Stage::One;
  s.student_messages = build_reasoning_prompt(g.task, teacher_config(spec.formulation, 1, spec.gen.seed), page, {});
  s.teacher_messages = s.student_messages;
  s.teacher_messages.at(1).parts.push_back(TextPart{hint_text(hint)});
  s.target_output = "<think>" + oracle_reasoning(cursor, g.task.target_bbox, g.task.target_text) + "</think>\n" +
                    serialize_action_cell(hint.correct_action);
  s.meta.task_id = g.task.task_id;
  s.meta.step_index = 0;
  s.meta.seed = spec.gen.seed;
  s.meta.target_text = g.task.target_text;
  s.meta.hint = hint;
  return s;
}

template <typename Body>
void parallel_for(std::size_t n, Execution execution, Body body) {
  if (execution == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(clickbench_distill_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

Role role_from_string(const std::string& s) {
  if (s == "system") return Role::System;
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  throw Error(Errc::DataFormatError, "unknown role: " + s);
}

class ImageWriter {
 public:
  explicit ImageWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::string store(const std::shared_ptr<const Raster>& raster) {
    if (auto it = by_pointer_.find(raster.get()); it != by_pointer_.end()) return it->second;
    const auto png = encode_png(*raster);
    std::string sha = sha256_hex(png);
    const auto path = dir_ / (sha + ".png");
    if (!std::filesystem::exists(path)) {
      std::filesystem::create_directories(dir_);
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      f.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
      if (!f) throw Error(Errc::IoError, "cannot write " + path.string());
    }
    by_pointer_.emplace(raster.get(), sha);
    keep_.push_back(raster);
    return sha;
  }

 private:
  std::filesystem::path dir_;
  std::map<const Raster*, std::string> by_pointer_;
  std::vector<std::shared_ptr<const Raster>> keep_;
};

class ImageReader {
 public:
  explicit ImageReader(std::filesystem::path base) : base_(std::move(base)) {}

  std::shared_ptr<const Raster> load(const std::string& rel_path, const std::string& sha) {
    if (auto it = cache_.find(sha); it != cache_.end()) return it->second;
    const auto path = base_ / rel_path;
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::IoError, "cannot read " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (sha256_hex(bytes) != sha) throw Error(Errc::DataFormatError, "image hash mismatch: " + path.string());
    auto raster = std::make_shared<const Raster>(decode_png(bytes));
    cache_.emplace(sha, raster);
    return raster;
  }

 private:
  std::filesystem::path base_;
  std::map<std::string, std::shared_ptr<const Raster>> cache_;
};

nlohmann::json messages_to_json(const std::vector<Message>& messages, ImageWriter& images,
                                std::vector<std::string>& hashes) {
  auto out = nlohmann::json::array();
  for (const auto& m : messages) {
    auto content = nlohmann::json::array();
    for (const auto& part : m.parts) {
      if (const auto* t = std::get_if<TextPart>(&part)) {
        content.push_back({{"type", "text"}, {"text", t->text}});
      } else {
        const auto sha = images.store(std::get<ImagePart>(part).raster);
        hashes.push_back(sha);
        content.push_back({{"type", "image"}, {"path", "images/" + sha + ".png"}, {"sha256", sha}});
      }
    }
    out.push_back({{"role", std::string(to_string(m.role))}, {"content", std::move(content)}});
  }
  return out;
}

std::vector<Message> messages_from_json(const nlohmann::json& j, ImageReader& images,
                                        std::vector<std::string>& hashes) {
  std::vector<Message> out;
  for (const auto& jm : j) {
    Message m;
    m.role = role_from_string(jm.at("role").get<std::string>());
    for (const auto& jp : jm.at("content")) {
      const auto type = jp.at("type").get<std::string>();
      if (type == "text") {
        m.parts.push_back(TextPart{jp.at("text").get<std::string>()});
      } else if (type == "image") {
        const auto sha = jp.at("sha256").get<std::string>();
        hashes.push_back(sha);
        m.parts.push_back(ImagePart{images.load(jp.at("path").get<std::string>(), sha)});
      } else {
        throw Error(Errc::DataFormatError, "unknown content type: " + type);
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

Action label_action(CursorState cursor, const BoundingBox& bbox) {
  if (hit_test(bbox, cursor)) return MouseClick{};
  return center_move(bbox);
}

std::string hint_text(const PrivilegedHint& hint) {
  const auto& b = hint.target_bbox;
  return fill_template(prompts().hint, {{"cx", format_coord(hint.cursor.x)},
                                        {"cy", format_coord(hint.cursor.y)},
                                        {"x", format_coord(b.x)},
                                        {"y", format_coord(b.y)},
                                        {"w", format_coord(b.w)},
                                        {"h", format_coord(b.h)},
                                        {"action", to_call_text(hint.correct_action)}});
}

void Stage1Spec::validate() const {
  gen.validate();
  if (click_fraction && !(*click_fraction >= 0.0 && *click_fraction <= 1.0)) {
    throw Error(Errc::InvalidArguments, "click_fraction must lie in [0, 1]");
  }
}

std::vector<DistillSample> gen_stage1_samples(const Stage1Spec& spec, std::size_t count, std::size_t first,
                                              Execution execution) {
  spec.validate();
  std::vector<DistillSample> out(count);
  parallel_for(count, execution, [&](std::size_t i) { out[i] = make_stage1_sample(spec, first + i); });
  return out;
}

double eval_move_or_click(const AgentFactory& agents, std::span<const DistillSample> samples) {
  std::size_t n = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.meta.hint) continue;
    ++n;
    auto agent = agents();
    agent->begin_episode({s.meta.task_id, i, 0});
    StepContext ctx{SubStep::Reasoning, s.meta.step_index, s.meta.hint->cursor, s.meta.hint->target_bbox,
                    s.meta.target_text};
    const std::string reasoning = agent->respond(s.student_messages, ctx);
    if (!parsed_ok(parse_think(reasoning))) continue;
    ctx.sub_step = SubStep::Action;
    const auto action_prompt = build_action_prompt(s.student_messages, reasoning);
    const auto action = parse_action_cell(agent->respond(action_prompt, ctx));
    if (!parsed_ok(action)) continue;
    if (is_click(std::get<Action>(action)) == is_click(s.meta.hint->correct_action)) ++correct;
  }
  return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
}

std::vector<DistillSample> collect_stage2(const BackendFactory& backends, const AgentFactory& agents,
                                          std::span<const TaskSpec> tasks, int quota, const Stage2Options& options) {
  const RunConfig teacher = teacher_config(options.formulation, quota, options.seed);
  teacher.validate();
  RunConfig student = teacher;
  student.trace_visible = true;
  student.guidance_present = false;

  std::vector<std::vector<DistillSample>> per_task(tasks.size());

  auto run_task = [&](std::size_t i, PageBackend& backend) {
    const TaskSpec& task = tasks[i];
    backend.load(task);
    if (backend.detect_exclusion(task) != ExclusionVerdict::Ok) return;

    struct Captured {
      std::shared_ptr<const Raster> observation;
      std::vector<Message> prompt;
      AgentTurn turn;
    };
    std::vector<Captured> steps;
    auto observer = [&](const StepCapture& c) { steps.push_back({c.observation, *c.reasoning_prompt, *c.turn}); };

    auto agent = agents();
    const CursorState start = initial_cursor_for(teacher, i, 0, backend.viewport(), task, options.cursor_init);
    const EpisodeRecord rec = run_episode(backend, *agent, task, teacher, start, {task.task_id, i, 0}, observer);
    if (!rec.success || rec.infra_failure) return;

    std::vector<AgentTurn> trace;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      DistillSample s;
      s.stage = Stage::Two;
      s.teacher_messages = std::move(steps[t].prompt);
      s.student_messages = build_reasoning_prompt(task, student, steps[t].observation, trace);
      const AgentTurn& turn = steps[t].turn;
      s.target_output = turn.action_reply.empty() ? turn.reasoning_reply : turn.reasoning_reply + "\n" + turn.action_reply;
      s.meta.task_id = task.task_id;
      s.meta.step_index = static_cast<int>(t);
      s.meta.seed = options.seed;
      s.meta.target_text = task.target_text;
      per_task[i].push_back(std::move(s));
      trace.push_back(turn);
    }
  };

  if (options.execution == Execution::Serial) {
    auto backend = backends();
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i, *backend);
  } else {
    std::exception_ptr failure;
#pragma omp parallel
    {
      std::unique_ptr<PageBackend> backend;
      try {
        backend = backends();
      } catch (...) {
#pragma omp critical(clickbench_distill_failure)
        if (!failure) failure = std::current_exception();
      }
#pragma omp for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(tasks.size()); ++i) {
        if (!backend) continue;
        try {
          run_task(static_cast<std::size_t>(i), *backend);
        } catch (...) {
#pragma omp critical(clickbench_distill_failure)
          if (!failure) failure = std::current_exception();
        }
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<DistillSample> out;
  for (auto& v : per_task) std::move(v.begin(), v.end(), std::back_inserter(out));
  return out;
}

void export_jsonl(std::span<const DistillSample> samples, const std::filesystem::path& path) {
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(base);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string());
  ImageWriter images(base / "images");
  for (const auto& s : samples) {
    std::vector<std::string> hashes;
    nlohmann::json j;
    j["schema_version"] = kDistillSchemaVersion;
    j["stage"] = s.stage == Stage::One ? 1 : 2;
    j["teacher_messages"] = messages_to_json(s.teacher_messages, images, hashes);
    j["student_messages"] = messages_to_json(s.student_messages, images, hashes);
    j["target_output"] = s.target_output;
    nlohmann::json meta{{"task_id", s.meta.task_id},
                        {"step_index", s.meta.step_index},
                        {"seed", s.meta.seed},
                        {"target_text", s.meta.target_text},
                        {"image_hashes", hashes}};
    if (s.meta.hint) {
      meta["hint"] = {{"cursor", s.meta.hint->cursor},
                      {"target_bbox", s.meta.hint->target_bbox},
                      {"correct_action", s.meta.hint->correct_action},
                      {"text", hint_text(*s.meta.hint)}};
    }
    j["meta"] = std::move(meta);
    out << j.dump() << '\n';
  }
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

std::vector<DistillSample> import_jsonl(const std::filesystem::path& path) {
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  ImageReader images(base);
  std::vector<DistillSample> out;
  for (const auto& j : read_jsonl(path)) {
    try {
      if (j.at("schema_version").get<int>() != kDistillSchemaVersion) {
        throw Error(Errc::DataFormatError, "unsupported schema_version");
      }
      DistillSample s;
      const int stage = j.at("stage").get<int>();
      if (stage != 1 && stage != 2) throw Error(Errc::DataFormatError, "stage must be 1 or 2");
      s.stage = stage == 1 ? Stage::One : Stage::Two;
      std::vector<std::string> hashes;
      s.teacher_messages = messages_from_json(j.at("teacher_messages"), images, hashes);
      s.student_messages = messages_from_json(j.at("student_messages"), images, hashes);
      s.target_output = j.at("target_output").get<std::string>();
      const auto& meta = j.at("meta");
      s.meta.task_id = meta.at("task_id").get<std::string>();
      s.meta.step_index = meta.at("step_index").get<int>();
      s.meta.seed = meta.at("seed").get<std::uint64_t>();
      s.meta.target_text = meta.at("target_text").get<std::string>();
      if (meta.at("image_hashes").get<std::vector<std::string>>() != hashes) {
        throw Error(Errc::DataFormatError, "meta.image_hashes does not match the referenced images");
      }
      if (meta.contains("hint")) {
        const auto& h = meta.at("hint");
        s.meta.hint = PrivilegedHint{h.at("cursor").get<Point>(), h.at("target_bbox").get<BoundingBox>(),
                                     h.at("correct_action").get<Action>()};
      }
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::DataFormatError, std::string("malformed sample: ") + e.what());
    }
  }
  return out;
}

}  // namespace clickbench
