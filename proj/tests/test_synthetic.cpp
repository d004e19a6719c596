#include <doctest.h>

#include <cmath>
#include <random>

#include "clickbench/backend.hpp"
#include "clickbench/error.hpp"
#include "clickbench/synthetic.hpp"

using namespace clickbench;

namespace {

constexpr Rgba kWhite{255, 255, 255, 255};
constexpr Rgba kRed{255, 0, 0, 255};
constexpr Rgba kBlue{0, 0, 255, 255};

LayoutElement element(std::string id, BoundingBox rect, Rgba fill, std::string label = {}, bool clickable = false) {
  LayoutElement e;
  e.id = std::move(id);
  e.rect = rect;
  e.fill = fill;
  e.label = std::move(label);
  e.clickable = clickable;
  return e;
}

PageLayout small_layout() {
  PageLayout l;
  l.viewport = {320, 200};
  l.background = kWhite;
  l.elements.push_back(element("target", {10, 150, 60, 20}, kBlue, "OK", true));
  return l;
}

PageLayout random_layout(std::mt19937_64& gen) {
  PageLayout l;
  l.viewport = {200, 120};
  l.background = {240, 240, 240, 255};
  std::uniform_real_distribution<double> pos(-20.0, 190.0), size(1.0, 80.0);
  const int n = 1 + static_cast<int>(gen() % 10);
  for (int i = 0; i < n; ++i) {
    const Rgba fill{std::uint8_t(gen()), std::uint8_t(gen()), std::uint8_t(gen()), std::uint8_t(128 + gen() % 128)};
    const bool clickable = i == 0 || gen() % 2 == 0;
    l.elements.push_back(element("e" + std::to_string(i), {pos(gen), pos(gen), size(gen), size(gen)}, fill,
                                 clickable ? "Label " + std::to_string(i) : "", clickable));
  }
  return l;
}

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("render_page fills and z-order") {
    PageLayout l = small_layout();
    l.elements.push_back(element("red", {100, 100, 50, 20}, kRed));
    auto page = render_page(l);
    CHECK(page.raster.width() == 320);
    CHECK(page.raster.height() == 200);
    CHECK(page.raster.at(125, 110) == kRed);
    CHECK(page.raster.at(0, 0) == kWhite);

    l.elements.push_back(element("blue", {120, 105, 50, 20}, kBlue));
    page = render_page(l);
    CHECK(page.raster.at(130, 110) == kBlue);
    CHECK(page.raster.at(110, 110) == kRed);
  }

  TEST_CASE("pixel coverage uses pixel centers") {
    PageLayout l = small_layout();
    l.elements.push_back(element("frac", {100.4, 100.6, 10.2, 4.0}, kRed));
    const auto page = render_page(l);
    CHECK(page.raster.at(99, 101) == kWhite);
    CHECK(page.raster.at(100, 101) == kRed);
    CHECK(page.raster.at(110, 101) == kRed);
    CHECK(page.raster.at(111, 101) == kWhite);
    CHECK(page.raster.at(109, 104) == kRed);
    CHECK(page.raster.at(109, 105) == kWhite);
    CHECK(page.raster.at(109, 100) == kWhite);
  }

  TEST_CASE("render_page is deterministic and reports rects verbatim") {
    const auto spec = GenSpec{};
    const auto g = generate_task(spec, 3);
    const auto a = render_page(*g.layout);
    const auto b = render_page(*g.layout);
    CHECK(a.raster == b.raster);
    REQUIRE(a.geometry.size() == g.layout->elements.size());
    for (const auto& e : g.layout->elements) CHECK(a.geometry.at(e.id) == e.rect);
  }

  TEST_CASE("parallel rasterizer equals the serial reference") {
    std::mt19937_64 gen(21);
    for (int i = 0; i < 200; ++i) {
      const PageLayout l = random_layout(gen);
      const auto par = render_page(l);
      const auto ref = render_page_reference(l);
      REQUIRE(par.raster == ref.raster);
      CHECK(par.geometry == ref.geometry);
    }
    const GenSpec spec;
    for (std::size_t i = 0; i < 10; ++i) {
      const auto g = generate_task(spec, i);
      CHECK(render_page(*g.layout).raster == render_page_reference(*g.layout).raster);
    }
  }

  TEST_CASE("labels are drawn inside their element") {
    PageLayout l;
    l.viewport = {200, 100};
    l.elements.push_back(element("t", {20, 20, 120, 30}, Rgba{250, 250, 250, 255}, "HELLO", true));
    const auto page = render_page(l);
    int ink = 0;
    for (int y = 0; y < 100; ++y) {
      for (int x = 0; x < 200; ++x) {
        const Rgba c = page.raster.at(x, y);
        const bool inside = hit_test(l.elements[0].rect, {x + 0.5, y + 0.5});
        if (c == Rgba{0, 0, 0, 255}) {
          ++ink;
          CHECK(inside);
        }
      }
    }
    CHECK(ink > 20);
  }

  TEST_CASE("generate_task is a pure function of (spec, index)") {
    GenSpec spec;
    spec.seed = 99;
    for (std::size_t i = 0; i < 20; ++i) {
      const auto a = generate_task(spec, i);
      const auto b = generate_task(spec, i);
      CHECK(a.task == b.task);
      CHECK(*a.layout == *b.layout);
      CHECK(a.initial_cursor == b.initial_cursor);
    }
    GenSpec other = spec;
    other.seed = 100;
    CHECK_FALSE(generate_task(spec, 0).task == generate_task(other, 0).task);
  }

  TEST_CASE("generate_tasks equals per-index generation") {
    GenSpec spec;
    spec.seed = 4;
    const auto batch = generate_tasks(spec, 40, 10);
    REQUIRE(batch.size() == 40);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto single = generate_task(spec, 10 + i);
      CHECK(batch[i].task == single.task);
      CHECK(batch[i].initial_cursor == single.initial_cursor);
    }
  }

  TEST_CASE("distance [0,0] puts the cursor on the target center") {
    GenSpec spec;
    spec.cursor_distance = {0, 0};
    for (std::size_t i = 0; i < 50; ++i) {
      const auto g = generate_task(spec, i);
      CHECK(g.initial_cursor == g.task.target_bbox.center());
      CHECK(hit_test(g.task.target_bbox, g.initial_cursor));
    }
  }

  TEST_CASE("cursor distances stay inside [200, 400] over 1000 tasks") {
    GenSpec spec;
    spec.seed = 2024;
    spec.cursor_distance = {200, 400};
    const auto tasks = generate_tasks(spec, 1000);
    for (const auto& g : tasks) {
      const Point c = g.task.target_bbox.center();
      const double d = std::hypot(g.initial_cursor.x - c.x, g.initial_cursor.y - c.y);
      CHECK(d >= 200.0 - 1e-9);
      CHECK(d <= 400.0 + 1e-9);
      CHECK(g.initial_cursor.x >= 0);
      CHECK(g.initial_cursor.x <= spec.viewport.width - 1);
      CHECK(g.initial_cursor.y >= 0);
      CHECK(g.initial_cursor.y <= spec.viewport.height - 1);
    }
  }

  TEST_CASE("generated targets are visible, sized and described") {
    for (auto overlap : {OverlapPolicy::Avoid, OverlapPolicy::AllowOffCenter}) {
      GenSpec spec;
      spec.seed = 8;
      spec.overlap = overlap;
      for (const auto& g : generate_tasks(spec, 300)) {
        const auto& t = g.task;
        CHECK_FALSE(occlusion_check(*g.layout, t.target_locator));
        CHECK(hit_test(t.target_bbox, t.target_bbox.center()));
        const auto* e = g.layout->find(t.target_locator);
        REQUIRE(e != nullptr);
        CHECK(e->rect == t.target_bbox);
        CHECK(e->clickable);
        CHECK(e->label == t.target_text);
        CHECK(t.target_bbox.w >= spec.target_width.min);
        CHECK(t.target_bbox.w <= spec.target_width.max);
        CHECK(t.target_bbox.h >= spec.target_height.min);
        CHECK(t.target_bbox.h <= spec.target_height.max);
        CHECK(t.formulation_simplified ==
              "Click on the element that displays " + t.target_text + " or conveys its meaning.");
        CHECK_FALSE(t.formulation_humanlike.empty());
        CHECK(t.formulation_humanlike != t.formulation_simplified);
        CHECK(static_cast<int>(g.layout->elements.size()) >= spec.element_count.min);
        CHECK(static_cast<int>(g.layout->elements.size()) <= spec.element_count.max);
        if (overlap == OverlapPolicy::Avoid) {
          for (const auto& other : g.layout->elements) {
            if (other.id != e->id && other.parent != e->id) CHECK_FALSE(other.rect.intersects(e->rect));
          }
        }
      }
    }
  }

  TEST_CASE("GenSpec validation") {
    GenSpec spec;
    spec.target_width = {4, 20};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = GenSpec{};
    spec.cursor_distance = {50, 10};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = GenSpec{};
    spec.element_count = {0, 3};
    CHECK_THROWS_AS(spec.validate(), Error);
  }

  TEST_CASE("unsatisfiable distance range raises GenerationFailed") {
    GenSpec spec;
    spec.cursor_distance = {5000, 6000};
    try {
      generate_task(spec, 0);
      FAIL("expected GenerationFailed");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::GenerationFailed);
    }
  }

  TEST_CASE("occlusion_check examples") {
    PageLayout l = small_layout();
    CHECK_FALSE(occlusion_check(l, "target"));

    PageLayout corner = l;
    corner.elements.push_back(element("corner", {0, 140, 20, 15}, kRed));
    CHECK_FALSE(occlusion_check(corner, "target"));

    PageLayout covered = l;
    covered.elements.push_back(element("cover", {30, 155, 20, 10}, kRed));
    CHECK(occlusion_check(covered, "target"));

    PageLayout below = l;
    below.elements.insert(below.elements.begin(), element("under", {0, 0, 320, 200}, kRed));
    CHECK_FALSE(occlusion_check(below, "target"));

    PageLayout child = l;
    auto icon = element("icon", {35, 155, 10, 10}, kRed);
    icon.parent = "target";
    child.elements.push_back(icon);
    CHECK_FALSE(occlusion_check(child, "target"));

    CHECK_THROWS_AS(occlusion_check(l, "missing"), Error);
  }

  TEST_CASE("synthetic backend exclusion verdicts") {
    const auto g = generate_task(GenSpec{}, 1);
    SyntheticBackend backend;
    backend.load(g.task);
    CHECK(backend.detect_exclusion(g.task) == ExclusionVerdict::Ok);
    const auto shot = backend.screenshot();
    CHECK(*shot == render_page(*g.layout).raster);

    TaskSpec replaced = g.task;
    replaced.target_text = "Something else entirely";
    CHECK(backend.detect_exclusion(replaced) == ExclusionVerdict::Replaced);

    TaskSpec missing = g.task;
    missing.target_locator = "nope";
    CHECK(backend.detect_exclusion(missing) == ExclusionVerdict::NotFound);

    auto layout = std::make_shared<PageLayout>(*g.layout);
    layout->elements.push_back(element("overlay", {0, 0, 1280, 800}, Rgba{0, 0, 0, 200}));
    TaskSpec occluded = g.task;
    occluded.page.layout = layout;
    backend.load(occluded);
    CHECK(backend.detect_exclusion(occluded) == ExclusionVerdict::Occluded);
  }

  TEST_CASE("text normalization for the replaced test") {
    CHECK(visible_text_matches("  Switch   to\nENGLISH ", "to english"));
    CHECK_FALSE(visible_text_matches("Deutsch", "English"));
    CHECK(normalize_text("  A\t b  ") == "a b");
  }
}
