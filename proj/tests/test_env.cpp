#include <doctest.h>

#include <random>

#include "clickbench/env.hpp"
#include "clickbench/error.hpp"

using namespace clickbench;

namespace {

EnvState state_at(double x, double y) {
  EnvState s;
  s.screenshot = std::make_shared<const Raster>(8, 8);
  s.cursor = {x, y};
  return s;
}

}  // namespace

TEST_SUITE("env") {
  TEST_CASE("hit_test is half-open") {
    const BoundingBox b{100, 100, 50, 20};
    CHECK(hit_test(b, {125, 110}));
    CHECK_FALSE(hit_test(b, {0, 0}));
    CHECK_FALSE(hit_test(b, {150, 110}));
    CHECK_FALSE(hit_test(b, {125, 120}));
    CHECK(hit_test(b, {100, 100}));
    CHECK(hit_test(b, {149.999, 119.999}));
  }

  TEST_CASE("hit_test is monotone under containment") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 500.0);
    for (int i = 0; i < 5000; ++i) {
      const BoundingBox outer{u(gen), u(gen), u(gen) + 1, u(gen) + 1};
      const double ix = outer.x + outer.w * 0.25 * (u(gen) / 500.0);
      const double iy = outer.y + outer.h * 0.25 * (u(gen) / 500.0);
      const BoundingBox inner{ix, iy, (outer.x + outer.w - ix) * 0.5, (outer.y + outer.h - iy) * 0.5};
      REQUIRE(outer.contains(inner));
      const Point p{u(gen), u(gen)};
      if (hit_test(inner, p)) CHECK(hit_test(outer, p));
    }
  }

  TEST_CASE("round_half_up and clamping") {
    CHECK(round_half_up(2.5) == 3);
    CHECK(round_half_up(-2.5) == -2);
    CHECK(round_half_up(10.49) == 10);
    const auto c = clamp_to_viewport(-10, 10000, Viewport{1280, 800});
    CHECK(c.x == 0);
    CHECK(c.y == 799);
    CHECK(c.clamped);
    const auto d = clamp_to_viewport(400.4, 299.6, Viewport{1280, 800});
    CHECK(d.x == 400);
    CHECK(d.y == 300);
    CHECK_FALSE(d.clamped);
  }

  TEST_CASE("apply_action examples") {
    const Viewport vp{1280, 800};
    auto s = apply_action(state_at(5, 5), MouseMove{400, 300}, vp);
    CHECK(s.cursor == Point{400, 300});
    CHECK_FALSE(s.terminated);
    CHECK(s.step_index == 1);

    s = apply_action(state_at(5, 5), MouseMove{-10, 10000}, vp);
    CHECK(s.cursor == Point{0, 799});

    s = apply_action(state_at(400, 300), MouseClick{}, vp);
    REQUIRE(s.click_point);
    CHECK(*s.click_point == Point{400, 300});
    CHECK(s.terminated);
    CHECK_THROWS_AS(apply_action(s, MouseClick{}, vp), Error);
    try {
      apply_action(s, MouseMove{1, 1}, vp);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ActionAfterTermination);
    }
  }

  TEST_CASE("moves are idempotent and keep the screenshot") {
    const Viewport vp{1280, 800};
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<int> u(-3000, 3000);
    for (int i = 0; i < 2000; ++i) {
      const MouseMove m{u(gen), u(gen)};
      const auto once = apply_action(state_at(5, 5), m, vp);
      const auto twice = apply_action(once, m, vp);
      CHECK(once.cursor == twice.cursor);
      CHECK(once.cursor.x >= 0);
      CHECK(once.cursor.x <= vp.width - 1);
      CHECK(once.cursor.y >= 0);
      CHECK(once.cursor.y <= vp.height - 1);
      CHECK(twice.screenshot->width() == 8);
      CHECK(twice.screenshot->height() == 8);
    }
  }

  TEST_CASE("termination happens exactly once, at the first click") {
    const Viewport vp{320, 200};
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 500; ++trial) {
      EnvState s = state_at(1, 1);
      int terminations = 0;
      int first_click = -1;
      for (int step = 0; step < 10; ++step) {
        const bool click = gen() % 4 == 0;
        if (s.terminated) {
          CHECK_THROWS(apply_action(s, MouseClick{}, vp));
          break;
        }
        if (click && first_click < 0) first_click = step;
        const bool was = s.terminated;
        s = apply_action(s, click ? Action{MouseClick{}} : Action{MouseMove{int(gen() % 400), int(gen() % 300)}}, vp);
        if (!was && s.terminated) ++terminations;
        CHECK(s.terminated == s.click_point.has_value());
      }
      CHECK(terminations == (first_click >= 0 ? 1 : 0));
    }
  }

  TEST_CASE("to_call_text") {
    CHECK(to_call_text(MouseMove{412, 233}) == "mouse_move(412, 233)");
    CHECK(to_call_text(MouseClick{}) == "mouse_click()");
  }

  TEST_CASE("cursor sprite geometry") {
    const Raster& sprite = cursor_sprite();
    CHECK(sprite.width() == kCursorWidth);
    CHECK(sprite.height() == kCursorHeight);
    CHECK(sprite.at(0, 0).a == 255);
    bool has_black = false;
    bool has_white = false;
    for (int y = 0; y < sprite.height(); ++y) {
      for (int x = 0; x < sprite.width(); ++x) {
        const Rgba c = sprite.at(x, y);
        if (c.a == 255 && c.r == 0 && c.g == 0 && c.b == 0) has_black = true;
        if (c.a == 255 && c.r == 255 && c.g == 255 && c.b == 255) has_white = true;
      }
    }
    CHECK(has_black);
    CHECK(has_white);
  }

  TEST_CASE("composite_cursor at the origin") {
    const Raster page(64, 48, Rgba{30, 60, 90, 255});
    const Raster copy = page;
    const Raster out = composite_cursor(page, {0, 0});
    CHECK(page == copy);
    CHECK(out.width() == 64);
    CHECK(out.height() == 48);
    CHECK(out.at(0, 0) == cursor_sprite().at(0, 0));
  }

  TEST_CASE("composite_cursor clips at the far corner") {
    const Raster page(64, 48, Rgba{30, 60, 90, 255});
    const Raster out = composite_cursor(page, {63, 47});
    CHECK(out.width() == 64);
    CHECK(out.height() == 48);
    CHECK(out.at(63, 47) == cursor_sprite().at(0, 0));
    CHECK(out.at(62, 46) == page.at(62, 46));
  }

  TEST_CASE("composite_cursor changes pixels only inside the footprint") {
    std::mt19937_64 gen(17);
    Raster page(80, 60);
    for (int y = 0; y < 60; ++y) {
      for (int x = 0; x < 80; ++x) page.set(x, y, Rgba{std::uint8_t(gen()), std::uint8_t(gen()), std::uint8_t(gen()), 255});
    }
    std::uniform_real_distribution<double> ux(0.0, 79.0), uy(0.0, 59.0);
    for (int i = 0; i < 200; ++i) {
      const CursorState c{ux(gen), uy(gen)};
      const Raster out = composite_cursor(page, c);
      const BoundingBox fp = cursor_footprint(c);
      for (int y = 0; y < 60; ++y) {
        for (int x = 0; x < 80; ++x) {
          if (!hit_test(fp, {x + 0.5, y + 0.5})) REQUIRE(out.at(x, y) == page.at(x, y));
        }
      }
    }
  }

  TEST_CASE("compositing twice is idempotent on opaque sprite pixels") {
    const Raster page(64, 64, Rgba{200, 10, 10, 255});
    const CursorState c{20, 20};
    const Raster once = composite_cursor(page, c);
    const Raster twice = composite_cursor(once, c);
    const Raster& sprite = cursor_sprite();
    for (int sy = 0; sy < sprite.height(); ++sy) {
      for (int sx = 0; sx < sprite.width(); ++sx) {
        if (sprite.at(sx, sy).a == 255) CHECK(twice.at(20 + sx, 20 + sy) == once.at(20 + sx, 20 + sy));
      }
    }
  }

  TEST_CASE("blend_over oracle") {
    CHECK(blend_over({10, 20, 30, 255}, {200, 100, 0, 255}) == Rgba{200, 100, 0, 255});
    CHECK(blend_over({10, 20, 30, 255}, {200, 100, 0, 0}) == Rgba{10, 20, 30, 255});
    const Rgba half = blend_over({0, 0, 0, 255}, {255, 255, 255, 128});
    CHECK(half.a == 255);
    CHECK(std::abs(int(half.r) - 128) <= 1);
  }
}
