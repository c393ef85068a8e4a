// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "pluvia/image_io.hpp"
#include "pluvia/streaks.hpp"
#include "test_util.hpp"

using namespace pluvia;

namespace {

StreakGeometry make_geometry(float x0, float y0, float x1, float y1, float diam_px,
                             float depth_m = 3.0f) {
  StreakGeometry g;
  g.start_px = {x0, y0};
  g.end_px = {x1, y1};
  g.image_diameter_px = diam_px;
  g.depth_m = depth_m;
  return g;
}

Eigen::Vector2d apply_h(const Eigen::Matrix3d& H, const Eigen::Vector2d& p) {
  const Eigen::Vector3d q = H * Eigen::Vector3d(p.x(), p.y(), 1.0);
  return {q.x() / q.z(), q.y() / q.z()};
}

double sprite_sum(const RenderedStreak& s) {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) acc += s.rgb[static_cast<std::size_t>(c)].cast<double>().sum();
  return acc;
}

}  // namespace

TEST_SUITE_BEGIN("streaks");

TEST_CASE("procedural database has the full 20x10 complement") {
  const StreakDatabase db = StreakDatabase::procedural();
  CHECK(db.size() == 200);
  for (int j = 1; j <= 20; ++j) {
    const StreakTexture& tex = db.texture(j, 1);
    CHECK(tex.model_index == j);
    CHECK((tex.intensity >= 0.0f).all());
    CHECK((tex.intensity <= 1.0f).all());
    // Black-background rule: alpha vanishes exactly with intensity.
    CHECK(((tex.intensity == 0.0f) == (tex.alpha == 0.0f)).all());
  }
  // Model aspects span short stubby to long thin, strictly increasing.
  for (int j = 1; j < 20; ++j) CHECK(db.model_aspect(j + 1) > db.model_aspect(j));

  // Fallback contract: regeneration is deterministic.
  const StreakDatabase again = StreakDatabase::procedural();
  for (int j : {1, 7, 20})
    for (int k : {1, 5, 10})
      CHECK((db.texture(j, k).intensity == again.texture(j, k).intensity).all());
}

TEST_CASE("database directory loading") {
  test::ScratchDir dir("streaks_db");

  // Minimal synthetic database: a bright vertical bar on black, except one
  // deliberately all-black file.
  LinearImage bar(8, 24);
  for (Eigen::Index y = 4; y < 20; ++y)
    for (Eigen::Index x = 3; x <= 4; ++x)
      for (int c = 0; c < 3; ++c) bar.channel(c)(y, x) = 1.0f;
  const LinearImage black(8, 24);
  for (int j = 1; j <= 20; ++j)
    for (int k = 1; k <= 10; ++k) {
      const std::string name = "cv" + std::to_string(j) + "_osc" + std::to_string(k) + ".png";
      save_image(j == 3 && k == 2 ? black : bar, dir.file(name));
    }

  const StreakDatabase db = StreakDatabase::load(dir.path().string());
  CHECK(db.size() == 200);
  CHECK((db.texture(3, 2).alpha == 0.0f).all());
  CHECK(db.texture(1, 1).alpha.maxCoeff() == doctest::Approx(1.0f));
  CHECK(db.texture(1, 1).aspect() == doctest::Approx(16.0 / 2.0));

  SUBCASE("a missing file is an error naming it") {
    std::filesystem::remove(dir.file("cv5_osc7.png"));
    CHECK_THROWS_WITH_AS(StreakDatabase::load_directory(dir.path().string()),
                         doctest::Contains("cv5_osc7.png"), std::runtime_error);
  }
}

TEST_CASE("absent directory falls back to the procedural database") {
  const StreakDatabase db = StreakDatabase::load("/nonexistent/streak/dir");
  CHECK(db.size() == 200);
}

TEST_CASE("model selection follows the geometry aspect") {
  const StreakDatabase db = StreakDatabase::procedural();
  std::mt19937_64 rng(5);

  SUBCASE("exact aspect match selects that model") {
    for (int j : {1, 7, 13, 20}) {
      const double aspect = db.model_aspect(j);
      const auto geom = make_geometry(50, 50, 50, 50 + static_cast<float>(aspect * 4.0), 4.0f);
      CHECK(select_streak(db, geom, rng).model_index == j);
    }
  }

  SUBCASE("identical rng state reproduces the pick") {
    const auto geom = make_geometry(10, 10, 10, 60, 5.0f);
    std::mt19937_64 a(42), b(42);
    const StreakTexture& ta = select_streak(db, geom, a);
    const StreakTexture& tb = select_streak(db, geom, b);
    CHECK(ta.model_index == tb.model_index);
    CHECK(ta.oscillation_index == tb.oscillation_index);
  }

  SUBCASE("halfway aspects break toward the lower model index") {
    const double mid = (db.model_aspect(4) + db.model_aspect(5)) / 2.0;
    const auto geom = make_geometry(0, 0, 0, static_cast<float>(mid * 2.0), 2.0f);
    CHECK(select_streak(db, geom, rng).model_index == 4);
  }

  SUBCASE("oscillation index is uniform over 1..10") {
    const auto geom = make_geometry(0, 0, 0, 40, 4.0f);
    std::array<int, 11> hist{};
    for (int i = 0; i < 5000; ++i) {
      const int k = select_streak(db, geom, rng).oscillation_index;
      REQUIRE(k >= 1);
      REQUIRE(k <= 10);
      ++hist[static_cast<std::size_t>(k)];
    }
    for (int k = 1; k <= 10; ++k) CHECK(hist[static_cast<std::size_t>(k)] > 350);
  }
}

TEST_CASE("identity control points reproduce the texture") {
  const StreakDatabase db = StreakDatabase::procedural();
  const StreakTexture& tex = db.texture(5, 3);
  // Control points live on texel centers, so the self-mapping geometry spans
  // center-to-center distances.
  const float cx = static_cast<float>(tex.trim_x0 + tex.trim_x1) / 2.0f;
  const auto geom = make_geometry(cx, static_cast<float>(tex.trim_y0), cx,
                                  static_cast<float>(tex.trim_y1),
                                  static_cast<float>(tex.trim_x1 - tex.trim_x0));
  const RenderedStreak out = warp_streak(tex, geom);
  for (Eigen::Index y = tex.trim_y0; y <= tex.trim_y1; ++y)
    for (Eigen::Index x = tex.trim_x0; x <= tex.trim_x1; ++x) {
      const Eigen::Index sy = y - static_cast<Eigen::Index>(out.origin_px.y());
      const Eigen::Index sx = x - static_cast<Eigen::Index>(out.origin_px.x());
      REQUIRE(sy >= 0);
      REQUIRE(sx >= 0);
      CHECK(out.rgb[0](sy, sx) == doctest::Approx(tex.intensity(y, x)).epsilon(1e-6));
    }
}

TEST_CASE("homography maps control points onto the geometry exactly") {
  const StreakDatabase db = StreakDatabase::procedural();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const StreakTexture& tex = db.texture(1 + trial % 20, 1 + trial % 10);
    const float x0 = static_cast<float>(100.0 + 50.0 * u(rng));
    const float y0 = static_cast<float>(80.0 + 40.0 * u(rng));
    const auto geom = make_geometry(x0, y0, x0 + static_cast<float>(30.0 * u(rng)),
                                    y0 + static_cast<float>(20.0 + 15.0 * u(rng)),
                                    static_cast<float>(2.0 + 3.0 * u(rng) * 0.5));
    const Eigen::Matrix3d H = streak_homography(tex, geom);
    const double mid_x = (tex.trim_x0 + tex.trim_x1) / 2.0;
    const Eigen::Vector2d s = apply_h(H, {mid_x, static_cast<double>(tex.trim_y0)});
    const Eigen::Vector2d e = apply_h(H, {mid_x, static_cast<double>(tex.trim_y1)});
    CHECK((s - geom.start_px.cast<double>().matrix()).norm() < 1e-9);
    CHECK((e - geom.end_px.cast<double>().matrix()).norm() < 1e-9);
  }
}

TEST_CASE("a 90 degree rotated geometry pins the endpoints after rasterization") {
  const StreakDatabase db = StreakDatabase::procedural();
  const StreakTexture& tex = db.texture(8, 1);
  const auto geom = make_geometry(40.0f, 25.0f, 40.0f + static_cast<float>(tex.trim_height()),
                                  25.0f, static_cast<float>(tex.trim_width()));
  const Eigen::Matrix3d H = streak_homography(tex, geom);
  const double mid_x = (tex.trim_x0 + tex.trim_x1) / 2.0;
  CHECK((apply_h(H, {mid_x, static_cast<double>(tex.trim_y0)}) -
         Eigen::Vector2d(40.0, 25.0))
            .norm() < 1e-9);

  const RenderedStreak out = warp_streak(tex, geom);
  // Both endpoints are inside the sprite, and the sprite is wide, not tall.
  CHECK(out.origin_px.x() <= 40);
  CHECK(out.origin_px.x() + out.width() >= 40 + tex.trim_height());
  CHECK(out.width() > out.height());
}

TEST_CASE("doubling the geometry length doubles the sprite major axis") {
  const StreakDatabase db = StreakDatabase::procedural();
  const StreakTexture& tex = db.texture(10, 4);
  const float len = static_cast<float>(tex.trim_height());
  const float diam = static_cast<float>(tex.trim_width());
  const auto g1 = make_geometry(60, 10, 60, 10 + len, diam);
  const auto g2 = make_geometry(60, 10, 60, 10 + 2 * len, diam);

  // Exact warped extent of the trim box through each homography.
  auto warped_span = [&](const StreakGeometry& g) {
    const Eigen::Matrix3d H = streak_homography(tex, g);
    double lo = 1e30, hi = -1e30;
    for (const auto& corner :
         {Eigen::Vector2d(tex.trim_x0, tex.trim_y0), Eigen::Vector2d(tex.trim_x1, tex.trim_y0),
          Eigen::Vector2d(tex.trim_x0, tex.trim_y1), Eigen::Vector2d(tex.trim_x1, tex.trim_y1)}) {
      const double y = apply_h(H, corner).y();
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    return hi - lo;
  };
  CHECK(warped_span(g2) == doctest::Approx(2.0 * warped_span(g1)).epsilon(0.02));

  // Rasterized bounding boxes double within the 1 px contract plus padding.
  const RenderedStreak base = warp_streak(tex, g1);
  const RenderedStreak twice = warp_streak(tex, g2);
  CHECK(std::abs(static_cast<double>(twice.height() - 5) -
                 2.0 * static_cast<double>(base.height() - 5)) <= 2.0);
}

TEST_CASE("sprite bounding box contains both warped endpoints") {
  const StreakDatabase db = StreakDatabase::procedural();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const StreakTexture& tex = db.texture(1 + trial % 20, 1 + trial % 10);
    const auto geom = make_geometry(static_cast<float>(200.0 * u(rng)),
                                    static_cast<float>(100.0 * u(rng)),
                                    static_cast<float>(200.0 * u(rng)),
                                    static_cast<float>(100.0 * u(rng)),
                                    static_cast<float>(1.0 + 4.0 * u(rng)));
    const RenderedStreak out = warp_streak(tex, geom);
    for (const Eigen::Vector2f& p : {geom.start_px, geom.end_px}) {
      CHECK(p.x() >= static_cast<float>(out.origin_px.x()));
      CHECK(p.y() >= static_cast<float>(out.origin_px.y()));
      CHECK(p.x() <= static_cast<float>(out.origin_px.x() + out.width() - 1));
      CHECK(p.y() <= static_cast<float>(out.origin_px.y() + out.height() - 1));
    }
  }
}

TEST_CASE("degenerate zero-width geometry falls back to a similarity transform") {
  const StreakDatabase db = StreakDatabase::procedural();
  const StreakTexture& tex = db.texture(5, 5);
  const auto geom = make_geometry(30, 10, 30, 50, 0.0f);  // zero diameter
  const Eigen::Matrix3d H = streak_homography(tex, geom);
  const double mid_x = (tex.trim_x0 + tex.trim_x1) / 2.0;
  CHECK((apply_h(H, {mid_x, static_cast<double>(tex.trim_y0)}) - Eigen::Vector2d(30, 10)).norm() <
        1e-9);
  CHECK((apply_h(H, {mid_x, static_cast<double>(tex.trim_y1)}) - Eigen::Vector2d(30, 50)).norm() <
        1e-9);
  CHECK_NOTHROW(warp_streak(tex, geom));
}

TEST_CASE("shading multiplies by the refracted and reflected means") {
  const StreakDatabase db = StreakDatabase::procedural();
  RenderedStreak sprite = warp_streak(db.texture(6, 2), make_geometry(20, 10, 22, 60, 3.0f));
  const Planef before = sprite.rgb[0];

  SUBCASE("unit environment leaves the streak unchanged") {
    const RenderedStreak out = shade_streak(sprite, Rgb(1, 1, 1), Rgb(1, 1, 1));
    // 0.94 + 0.06 = 1 exactly in float.
    CHECK((out.rgb[0] == before).all());
    CHECK((out.rgb[1] == before).all());
  }
  SUBCASE("black environment extinguishes the streak") {
    const RenderedStreak out = shade_streak(sprite, Rgb(0, 0, 0), Rgb(0, 0, 0));
    for (int c = 0; c < 3; ++c) CHECK((out.rgb[static_cast<std::size_t>(c)] == 0.0f).all());
    CHECK((out.alpha == sprite.alpha).all());  // alpha untouched
  }
  SUBCASE("channel split follows 0.94 F + 0.06 E") {
    const RenderedStreak out = shade_streak(sprite, Rgb(1, 0, 0), Rgb(0, 1, 0));
    CHECK((out.rgb[0] - 0.94f * before).abs().maxCoeff() < 1e-7f);
    CHECK((out.rgb[1] - 0.06f * before).abs().maxCoeff() < 1e-7f);
    CHECK((out.rgb[2] == 0.0f).all());
  }
}

TEST_CASE("circle of confusion values") {
  CameraRig rig = test::kitti_rig();  // f = 6 mm, f_N = 2, f_p = 6 m
  SUBCASE("objects on the focus plane are sharp") {
    CHECK(circle_of_confusion_px(6.0, rig) == doctest::Approx(0.0));
  }
  SUBCASE("one meter away: scalar oracle of the footnote formula") {
    const double c_m = (1.0 - 6.0) * 0.006 * 0.006 / (1.0 * (6.0 - 0.006) * 2.0);
    CHECK(std::abs(c_m) == doctest::Approx(1.5015e-5).epsilon(1e-3));
    CHECK(circle_of_confusion_px(1.0, rig) ==
          doctest::Approx(std::abs(c_m) * rig.pixels_per_meter).epsilon(1e-9));
  }
  SUBCASE("the far limit is finite") {
    const double limit_m = 0.006 * 0.006 / ((6.0 - 0.006) * 2.0);
    const double far = circle_of_confusion_px(1.0e9, rig);
    CHECK(far == doctest::Approx(limit_m * rig.pixels_per_meter).epsilon(1e-6));
    CHECK(circle_of_confusion_px(1.0e12, rig) < limit_m * rig.pixels_per_meter * 1.0001);
  }
  CHECK_THROWS_AS(circle_of_confusion_px(0.0, rig), std::invalid_argument);
}

TEST_CASE("defocus below one pixel is a no-op") {
  const StreakDatabase db = StreakDatabase::procedural();
  const RenderedStreak sprite = warp_streak(db.texture(4, 4), make_geometry(10, 10, 12, 40, 2.5f));
  const RenderedStreak out = defocus_streak(sprite, 0.0);
  CHECK(out.origin_px == sprite.origin_px);
  CHECK((out.rgb[0] == sprite.rgb[0]).all());
  const RenderedStreak half = defocus_streak(sprite, 0.9);
  CHECK((half.alpha == sprite.alpha).all());
}

TEST_CASE("defocus conserves sprite energy") {
  const StreakDatabase db = StreakDatabase::procedural();
  RenderedStreak sprite = warp_streak(db.texture(12, 7), make_geometry(30, 5, 33, 80, 4.0f));
  sprite = shade_streak(sprite, Rgb(0.8f, 0.6f, 0.4f), Rgb(0.5f, 0.5f, 0.5f));
  const double before = sprite_sum(sprite);
  const double alpha_before = sprite.alpha.cast<double>().sum();
  for (const double coc : {1.5, 3.0, 5.0, 9.0}) {
    const RenderedStreak out = defocus_streak(sprite, coc);
    CHECK(sprite_sum(out) == doctest::Approx(before).epsilon(1e-4));
    CHECK(out.alpha.cast<double>().sum() == doctest::Approx(alpha_before).epsilon(1e-4));
  }
}

TEST_CASE("defocus impulse response is a disk of the requested diameter") {
  RenderedStreak impulse;
  impulse.origin_px = {0, 0};
  impulse.alpha = Planef::Zero(1, 1);
  impulse.alpha(0, 0) = 1.0f;
  for (int c = 0; c < 3; ++c) impulse.rgb[static_cast<std::size_t>(c)] = impulse.alpha;

  const RenderedStreak out = defocus_streak(impulse, 5.0);
  // Center row: exactly 5 non-zero pixels (diameter 5).
  const Eigen::Index cy = out.height() / 2;
  int non_zero = 0;
  for (Eigen::Index x = 0; x < out.width(); ++x)
    if (out.rgb[0](cy, x) > 0.0f) ++non_zero;
  CHECK(non_zero == 5);
  // And the blur is round: corners of the support stay empty.
  CHECK(out.rgb[0](0, 0) == 0.0f);
  CHECK(out.rgb[0](out.height() - 1, out.width() - 1) == 0.0f);
}

TEST_SUITE_END();
