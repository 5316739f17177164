#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "image_io.hpp"
#include "test_support.hpp"
#include "uwvo/uwvo.h"

namespace {

// Handles released automatically so failing CHECKs cannot leak.
template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() {
    if (ptr) Destroy(ptr);
  }
  T** out() { return &ptr; }
  operator T*() const { return ptr; }
};

using ImageH = Handle<uwvo_image, uwvo_image_destroy>;
using MapH = Handle<uwvo_map, uwvo_map_destroy>;
using FlowH = Handle<uwvo_flow, uwvo_flow_destroy>;
using TrajH = Handle<uwvo_trajectory, uwvo_trajectory_destroy>;
using CorrH = Handle<uwvo_correspondences, uwvo_correspondences_destroy>;

std::string capi_dir() { return testsup::temp_dir("capi"); }

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(uwvo_version()) == "0.1.0");
  CHECK(std::string(uwvo_status_name(UWVO_OK)) == "ok");
  CHECK(std::string(uwvo_status_name(UWVO_ERROR_SHAPE_MISMATCH)) ==
        "shape mismatch");
}

TEST_CASE("image lifecycle and error reporting") {
  ImageH img;
  REQUIRE(uwvo_image_create(16, 16, img.out()) == UWVO_OK);
  CHECK(uwvo_image_width(img) == 16);

  double rgb[3] = {0.25, 0.5, 0.75};
  CHECK(uwvo_image_set_pixel(img, 3, 4, rgb) == UWVO_OK);
  double back[3];
  CHECK(uwvo_image_get_pixel(img, 3, 4, back) == UWVO_OK);
  CHECK(back[1] == 0.5);
  CHECK(uwvo_image_get_pixel(img, 99, 4, back) ==
        UWVO_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(uwvo_last_error()) > 0);

  // Too-small images are invalid.
  ImageH tiny;
  CHECK(uwvo_image_create(4, 4, tiny.out()) == UWVO_ERROR_INVALID_ARGUMENT);

  ImageH missing;
  CHECK(uwvo_image_load("/nonexistent/foo.png", missing.out()) ==
        UWVO_ERROR_IO);
}

TEST_CASE("imaging chain through the C surface") {
  // Uniform mid-gray scene degraded by uniform haze.
  ImageH img;
  REQUIRE(uwvo_image_create(32, 32, img.out()) == UWVO_OK);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      double rgb[3] = {0.8, 0.8, 0.8};
      uwvo_image_set_pixel(img, x, y, rgb);
    }
  // Depth map -> degrade -> transmission out.
  MapH depth;
  {
    // Build via PFM to exercise the file path.
    uwvo::ScalarGrid g(32, 32, 2.0);
    uwvo::save_pfm(g, capi_dir() + "/depth.pfm");
  }
  REQUIRE(uwvo_map_load_pfm((capi_dir() + "/depth.pfm").c_str(),
                            depth.out()) == UWVO_OK);
  double beta[3] = {0.25, 0.25, 0.25};
  double ambient[3] = {0.6, 0.6, 0.6};
  ImageH hazy;
  MapH tmap;
  REQUIRE(uwvo_degrade_with_depth(img, depth, beta, ambient, hazy.out(),
                                  tmap.out()) == UWVO_OK);
  double t_val;
  REQUIRE(uwvo_map_get(tmap, 0, 0, &t_val) == UWVO_OK);
  CHECK(t_val == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

  ImageH restored;
  REQUIRE(uwvo_restore_radiance(hazy, tmap, ambient, restored.out()) ==
          UWVO_OK);
  double rgb[3];
  REQUIRE(uwvo_image_get_pixel(restored, 16, 16, rgb) == UWVO_OK);
  CHECK(rgb[0] == doctest::Approx(0.8).epsilon(1e-3));

  // Inverse + normalization carries sigma out.
  MapH inv;
  REQUIRE(uwvo_transmission_invert(tmap, inv.out()) == UWVO_OK);
  MapH weights;
  double sigma = -1.0;
  REQUIRE(uwvo_normalize_transmission(inv, 0.25, 4.0, weights.out(),
                                      &sigma) == UWVO_OK);
  double w_val;
  REQUIRE(uwvo_map_get(weights, 5, 5, &w_val) == UWVO_OK);
  double t = std::exp(-0.5);
  CHECK(sigma == doctest::Approx(0.25 * t / 4.0).epsilon(1e-12));
  CHECK(w_val == doctest::Approx(0.25 * t + 1.0 - sigma).epsilon(1e-12));

  // Mismatched shapes surface as shape errors.
  ImageH small;
  REQUIRE(uwvo_image_create(16, 16, small.out()) == UWVO_OK);
  ImageH bad;
  CHECK(uwvo_apply_degradation(small, tmap, ambient, bad.out()) ==
        UWVO_ERROR_SHAPE_MISMATCH);
}

TEST_CASE("flow and geometry through the C surface") {
  std::string dir = capi_dir();
  // Textured pair with a known shift.
  uwvo::Image tex = testsup::make_textured_image(96, 86, 77);
  uwvo::Image a(90, 80), b(90, 80);
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 90; ++x)
      for (int c = 0; c < 3; ++c) {
        a.at(x, y, c) = tex.at(x + 3, y + 2, c);
        b.at(x, y, c) = tex.at(x, y, c);
      }
  uwvo::save_image(a, dir + "/a.png");
  uwvo::save_image(b, dir + "/b.png");

  ImageH ia, ib;
  REQUIRE(uwvo_image_load((dir + "/a.png").c_str(), ia.out()) == UWVO_OK);
  REQUIRE(uwvo_image_load((dir + "/b.png").c_str(), ib.out()) == UWVO_OK);

  FlowH flow;
  REQUIRE(uwvo_estimate_flow(ia, ib, 2, 8, 9, flow.out()) == UWVO_OK);
  double u, v;
  REQUIRE(uwvo_flow_get(flow, 45, 40, &u, &v) == UWVO_OK);
  CHECK(u == doctest::Approx(3.0).epsilon(0.2));
  CHECK(v == doctest::Approx(2.0).epsilon(0.25));

  // Save / load / colorize.
  REQUIRE(uwvo_flow_save(flow, (dir + "/f.flo").c_str()) == UWVO_OK);
  FlowH loaded;
  REQUIRE(uwvo_flow_load((dir + "/f.flo").c_str(), loaded.out()) == UWVO_OK);
  CHECK(uwvo_flow_width(loaded) == 90);
  ImageH vis;
  REQUIRE(uwvo_flow_colorize(loaded, 0.0, vis.out()) == UWVO_OK);
  CHECK(uwvo_image_width(vis) == 90);

  CorrH cs;
  REQUIRE(uwvo_flow_to_correspondences(flow, nullptr, 8,
                                       UWVO_MODE_CONFIDENCE_WEIGHTED,
                                       cs.out()) == UWVO_OK);
  CHECK(uwvo_correspondences_size(cs) > 8);
}

TEST_CASE("trajectory metrics through the C surface") {
  TrajH est, ref;
  REQUIRE(uwvo_trajectory_create(est.out()) == UWVO_OK);
  REQUIRE(uwvo_trajectory_create(ref.out()) == UWVO_OK);
  double q[4] = {0, 0, 0, 1};
  for (int i = 0; i < 10; ++i) {
    double p_ref[3] = {static_cast<double>(i), std::sin(0.4 * i), 0.2 * i};
    double p_est[3] = {p_ref[0] + 0.5, p_ref[1] - 1.0, p_ref[2] + 0.25};
    REQUIRE(uwvo_trajectory_append(ref, 0.1 * i, p_ref, q) == UWVO_OK);
    REQUIRE(uwvo_trajectory_append(est, 0.1 * i, p_est, q) == UWVO_OK);
  }
  double err;
  REQUIRE(uwvo_ate(est, ref, 0, &err) == UWVO_OK);
  double offset = std::sqrt(0.5 * 0.5 + 1.0 + 0.25 * 0.25);
  CHECK(err == doctest::Approx(offset).epsilon(1e-12));
  REQUIRE(uwvo_ate(est, ref, 1, &err) == UWVO_OK);
  CHECK(err < 1e-9);

  uwvo_metrics metrics;
  REQUIRE(uwvo_evaluate(est, ref, 3, 1, &metrics) == UWVO_OK);
  CHECK(metrics.pose_count == 10);
  CHECK(metrics.ate_rmse < 1e-9);

  // A trajectory scored against itself is perfect.
  uwvo_metrics self;
  REQUIRE(uwvo_evaluate(ref, ref, 3, 0, &self) == UWVO_OK);
  CHECK(self.ate_rmse == 0.0);
  CHECK(self.rte_rmse < 1e-12);

  size_t matched;
  REQUIRE(uwvo_associated_count(est, ref, &matched) == UWVO_OK);
  CHECK(matched == 10);

  // Alignment + transform roundtrip.
  double scale, r[9], t3[3];
  REQUIRE(uwvo_umeyama_align(est, ref, 1, &scale, r, t3) == UWVO_OK);
  TrajH mapped;
  REQUIRE(uwvo_trajectory_transform(est, scale, r, t3, mapped.out()) ==
          UWVO_OK);
  REQUIRE(uwvo_ate(mapped, ref, 0, &err) == UWVO_OK);
  CHECK(err < 1e-9);

  std::string path = capi_dir() + "/traj.tum";
  REQUIRE(uwvo_trajectory_save_tum(est, path.c_str()) == UWVO_OK);
  TrajH back;
  REQUIRE(uwvo_trajectory_load_tum(path.c_str(), back.out()) == UWVO_OK);
  CHECK(uwvo_trajectory_size(back) == 10);
}

TEST_CASE("synth presets and manifests through the C surface") {
  CHECK(uwvo_synth_preset_count() >= 2);
  CHECK(uwvo_synth_preset_name(0) != nullptr);
  uwvo_synth_params params;
  CHECK(uwvo_synth_preset("nope", &params) == UWVO_ERROR_INVALID_ARGUMENT);
  REQUIRE(uwvo_synth_preset("clear-01", &params) == UWVO_OK);
  CHECK(params.frames == 120);

  // Tiny custom dataset through the C API.
  params.width = 96;
  params.height = 72;
  params.frames = 3;
  params.fx = 80;
  params.fy = 80;
  params.cx = 47.5;
  params.cy = 35.5;
  params.name = "capi";
  std::string dir = capi_dir() + "/ds";
  std::filesystem::remove_all(dir);
  REQUIRE(uwvo_synth_emit(&params, dir.c_str()) == UWVO_OK);

  uwvo_synth_params back;
  REQUIRE(uwvo_read_manifest((dir + "/manifest.toml").c_str(), &back) ==
          UWVO_OK);
  CHECK(back.frames == 3);
  CHECK(std::string(back.name) == "capi");

  // Run the sequence end to end through the C API.
  uwvo_run_config config = uwvo_run_config_default();
  config.fx = 80;
  config.fy = 80;
  config.cx = 47.5;
  config.cy = 35.5;
  config.pyramid_levels = 2;
  config.window = 9;
  config.stride = 4;
  config.ransac_iterations = 300;
  config.ransac_threshold = 2e-3;  // ~0.16 px at this short focal length
  std::vector<std::string> paths;
  std::vector<const char*> cpaths;
  for (int i = 0; i < 3; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "/frames/%06d.png", i);
    paths.push_back(dir + buf);
  }
  for (const auto& s : paths) cpaths.push_back(s.c_str());

  TrajH traj;
  std::vector<uwvo_pair_stats> stats(2);
  REQUIRE(uwvo_run_sequence(&config, cpaths.data(), cpaths.size(), traj.out(),
                            stats.data()) == UWVO_OK);
  CHECK(uwvo_trajectory_size(traj) == 3);
  for (const auto& s : stats) {
    CHECK(s.correspondences > 8);
    if (!s.degenerate) CHECK(s.inlier_ratio > 0.05);
  }
}

TEST_CASE("run config defaults and TOML loading") {
  uwvo_run_config c = uwvo_run_config_default();
  CHECK(c.alpha == 0.25);
  CHECK(c.beta_bias == 4.0);
  CHECK(c.mode == UWVO_MODE_CONFIDENCE_WEIGHTED);
  CHECK(c.ransac_iterations == 1000);
  CHECK(c.ransac_threshold == 2e-4);
  CHECK(c.seed == 42);

  std::string path = capi_dir() + "/c.toml";
  {
    std::ofstream out(path);
    out << "seed = 9\n[normalization]\nalpha = 0.1\n";
  }
  uwvo_run_config loaded;
  REQUIRE(uwvo_run_config_load(path.c_str(), &loaded) == UWVO_OK);
  CHECK(loaded.seed == 9);
  CHECK(loaded.alpha == 0.1);

  std::string bad = capi_dir() + "/bad.toml";
  {
    std::ofstream out(bad);
    out << "alpha = = 1\n";
  }
  CHECK(uwvo_run_config_load(bad.c_str(), &loaded) == UWVO_ERROR_PARSE);
}
