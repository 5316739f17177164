#include <doctest.h>

#include <cmath>

#include "flow.hpp"
#include "rng.hpp"
#include "test_support.hpp"

using namespace uwvo;

namespace {

FlowField constant_flow(int w, int h, double u, double v) {
  FlowField f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      f.u(x, y) = u;
      f.v(x, y) = v;
    }
  return f;
}

}  // namespace

TEST_CASE("estimate_flow recovers an integer shift") {
  const int w = 96, h = 80, shift = 3;
  Image tex = testsup::make_textured_image(w + 2 * shift, h, 42);
  Image a(w, h), b(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        a.at(x, y, c) = tex.at(x + shift, y, c);
        // b holds the same content displaced so that x2 = x1 + (3, 0).
        b.at(x, y, c) = tex.at(x, y, c);
      }
  FlowParams params{3, 10, 9};
  FlowField flow = estimate_flow(a, b, params);

  // a(x) = tex(x+3) appears in b at x+3, so the true flow is (+3, 0).
  Mask interior = interior_mask(w, h, 8);
  FlowField truth = constant_flow(w, h, static_cast<double>(shift), 0.0);
  CHECK(flow_epe(flow, truth, &interior) < 0.5);
}

TEST_CASE("estimate_flow on identical frames is zero") {
  Image a = testsup::make_textured_image(64, 64, 5);
  FlowField flow = estimate_flow(a, a, FlowParams{3, 8, 9});
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      CHECK(std::abs(flow.u(x, y)) < 1e-3);
      CHECK(std::abs(flow.v(x, y)) < 1e-3);
    }
}

TEST_CASE("estimate_flow is deterministic") {
  Image a = testsup::make_textured_image(64, 48, 21);
  Image b = testsup::make_textured_image(64, 48, 22);
  FlowParams params{2, 6, 7};
  FlowField f1 = estimate_flow(a, b, params);
  FlowField f2 = estimate_flow(a, b, params);
  CHECK(f1.data() == f2.data());  // bit-identical
}

TEST_CASE("estimate_flow is shift-covariant on periodic texture") {
  // Both pairs share the same constant true flow (-2, -1); the second pair is
  // the first sampled at an integer offset (5, 7), so the estimated field
  // must shift along with the content: f1(x) == f0(x + offset).
  const int w = 72, h = 72, ox = 5, oy = 7;
  Image a0 = testsup::make_periodic_image(w, h, 0, 0);
  Image b0 = testsup::make_periodic_image(w, h, 2, 1);
  Image a1 = testsup::make_periodic_image(w, h, ox, oy);
  Image b1 = testsup::make_periodic_image(w, h, 2 + ox, 1 + oy);
  FlowParams params{1, 8, 9};
  FlowField f0 = estimate_flow(a0, b0, params);
  FlowField f1 = estimate_flow(a1, b1, params);
  for (int y = 16; y < h - 16 - oy; ++y)
    for (int x = 16; x < w - 16 - ox; ++x) {
      CHECK(std::abs(f1.u(x, y) - f0.u(x + ox, y + oy)) < 0.1);
      CHECK(std::abs(f1.v(x, y) - f0.v(x + ox, y + oy)) < 0.1);
    }
}

TEST_CASE("estimate_flow validates sizes") {
  Image a = testsup::make_textured_image(32, 32, 1);
  Image b = testsup::make_textured_image(48, 32, 1);
  CHECK_THROWS_AS(estimate_flow(a, b, FlowParams{}), ShapeMismatchError);
  // 32 < 2^(4-1) * 15
  CHECK_THROWS_AS(estimate_flow(a, a, FlowParams{4, 10, 15}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(estimate_flow(a, a, FlowParams{0, 10, 9}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(estimate_flow(a, a, FlowParams{2, 0, 9}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(estimate_flow(a, a, FlowParams{2, 5, 8}),
                  InvalidArgumentError);
}

TEST_CASE("weight_flow") {
  SUBCASE("unit weights are the identity") {
    FlowField f = constant_flow(12, 10, 1.5, -2.0);
    f.u(3, 3) = -7.25;
    WeightMap w = WeightMap::uniform(12, 10, 1.0);
    FlowField out = weight_flow(f, w);
    CHECK(out.data() == f.data());
  }
  SUBCASE("scales both components") {
    FlowField f(8, 8);
    f.u(2, 2) = 2.0;
    f.v(2, 2) = -1.0;
    WeightMap w = WeightMap::uniform(8, 8, 0.95);
    FlowField out = weight_flow(f, w);
    CHECK(out.u(2, 2) == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(out.v(2, 2) == doctest::Approx(-0.95).epsilon(1e-15));
  }
  SUBCASE("suppresses below 1, emphasizes above 1") {
    SplitMix64 rng(17);
    FlowField f(16, 12);
    ScalarGrid wg(16, 12);
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 16; ++x) {
        f.u(x, y) = rng.next_double(-3, 3);
        f.v(x, y) = rng.next_double(-3, 3);
        wg.at(x, y) = rng.next_double(0.5, 1.5);
      }
    WeightMap w = WeightMap::from_grid(wg);
    FlowField out = weight_flow(f, w);
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 16; ++x) {
        double mag_in = std::hypot(f.u(x, y), f.v(x, y));
        double mag_out = std::hypot(out.u(x, y), out.v(x, y));
        if (mag_in == 0.0) continue;
        if (w.at(x, y) < 1.0) CHECK(mag_out < mag_in);
        if (w.at(x, y) > 1.0) CHECK(mag_out > mag_in);
        // Direction preserved.
        double cross = f.u(x, y) * out.v(x, y) - f.v(x, y) * out.u(x, y);
        CHECK(std::abs(cross) < 1e-9 * mag_in * mag_out + 1e-15);
        CHECK(f.u(x, y) * out.u(x, y) + f.v(x, y) * out.v(x, y) >= 0.0);
      }
  }
  SUBCASE("linearity") {
    SplitMix64 rng(23);
    FlowField f1(10, 10), f2(10, 10);
    ScalarGrid wg(10, 10);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) {
        f1.u(x, y) = rng.next_double(-2, 2);
        f1.v(x, y) = rng.next_double(-2, 2);
        f2.u(x, y) = rng.next_double(-2, 2);
        f2.v(x, y) = rng.next_double(-2, 2);
        wg.at(x, y) = rng.next_double(0.25, 2.0);
      }
    WeightMap w = WeightMap::from_grid(wg);
    const double ca = 1.5, cb = -0.75;
    FlowField combo(10, 10);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) {
        combo.u(x, y) = ca * f1.u(x, y) + cb * f2.u(x, y);
        combo.v(x, y) = ca * f1.v(x, y) + cb * f2.v(x, y);
      }
    FlowField lhs = weight_flow(combo, w);
    FlowField w1 = weight_flow(f1, w);
    FlowField w2 = weight_flow(f2, w);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) {
        CHECK(lhs.u(x, y) ==
              doctest::Approx(ca * w1.u(x, y) + cb * w2.u(x, y))
                  .epsilon(1e-12));
        CHECK(lhs.v(x, y) ==
              doctest::Approx(ca * w1.v(x, y) + cb * w2.v(x, y))
                  .epsilon(1e-12));
      }
  }
  SUBCASE("shape mismatch is rejected") {
    FlowField f(8, 8);
    WeightMap w = WeightMap::uniform(10, 8, 1.0);
    CHECK_THROWS_AS(weight_flow(f, w), ShapeMismatchError);
  }
}

TEST_CASE("warp_image") {
  Image img = testsup::make_textured_image(48, 40, 33);
  SUBCASE("zero flow is the identity") {
    Image out = warp_image(img, FlowField(48, 40));
    CHECK(out.data() == img.data());
  }
  SUBCASE("integer shift matches exactly in the interior") {
    FlowField f = constant_flow(48, 40, 2.0, 1.0);
    Image out = warp_image(img, f);
    for (int y = 0; y < 39; ++y)
      for (int x = 0; x < 46; ++x)
        for (int c = 0; c < 3; ++c)
          CHECK(out.at(x, y, c) == img.at(x + 2, y + 1, c));
  }
}

TEST_CASE("flow_epe") {
  FlowField a = constant_flow(10, 10, 1.0, 2.0);
  SUBCASE("identical fields give zero") {
    CHECK(flow_epe(a, a) == 0.0);
  }
  SUBCASE("(3,4) offset gives 5") {
    FlowField b = constant_flow(10, 10, 4.0, 6.0);
    CHECK(flow_epe(b, a) == doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("matches a direct reference loop on noisy fields") {
    SplitMix64 rng(91);
    FlowField noisy(10, 10);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) {
        noisy.u(x, y) = a.u(x, y) + rng.next_double(-1, 1);
        noisy.v(x, y) = a.v(x, y) + rng.next_double(-1, 1);
      }
    double expect = 0.0;
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x)
        expect += std::hypot(noisy.u(x, y) - a.u(x, y),
                             noisy.v(x, y) - a.v(x, y));
    expect /= 100.0;
    CHECK(flow_epe(noisy, a) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("empty mask is rejected") {
    Mask empty(10, 10, false);
    CHECK_THROWS_AS(flow_epe(a, a, &empty), InvalidArgumentError);
  }
}
