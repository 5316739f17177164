#include "uwvo/uwvo.h"

#include <cstring>
#include <string>

#include "error.hpp"
#include "flow_io.hpp"
#include "image_io.hpp"
#include "pipeline.hpp"
#include "synth.hpp"

namespace {

thread_local std::string g_last_error;
thread_local std::string g_manifest_name;

uwvo_status map_code(uwvo::ErrorCode code) {
  using uwvo::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return UWVO_ERROR_INVALID_ARGUMENT;
    case ErrorCode::ShapeMismatch: return UWVO_ERROR_SHAPE_MISMATCH;
    case ErrorCode::DegenerateGeometry: return UWVO_ERROR_DEGENERATE_GEOMETRY;
    case ErrorCode::CheiralityFailure: return UWVO_ERROR_CHEIRALITY;
    case ErrorCode::ParseError: return UWVO_ERROR_PARSE;
    case ErrorCode::IoError: return UWVO_ERROR_IO;
    case ErrorCode::Internal: return UWVO_ERROR_INTERNAL;
  }
  return UWVO_ERROR_INTERNAL;
}

uwvo_status fail(uwvo_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
uwvo_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return UWVO_OK;
  } catch (const uwvo::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UWVO_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return UWVO_ERROR_INTERNAL;
  }
}

uwvo::PoseBackend to_backend(int32_t mode) {
  if (mode == UWVO_MODE_SCALED_FLOW) return uwvo::PoseBackend::ScaledFlow;
  if (mode == UWVO_MODE_CONFIDENCE_WEIGHTED)
    return uwvo::PoseBackend::ConfidenceWeighted;
  throw uwvo::InvalidArgumentError("unknown backend mode");
}

uwvo::RunConfig to_config(const uwvo_run_config& c) {
  uwvo::RunConfig cfg;
  cfg.intrinsics = uwvo::CameraIntrinsics(c.fx, c.fy, c.cx, c.cy);
  cfg.normalization = uwvo::NormalizationParams(c.alpha, c.beta_bias);
  cfg.flow.pyramid_levels = c.pyramid_levels;
  cfg.flow.iterations_per_level = c.iterations_per_level;
  cfg.flow.window = c.window;
  cfg.ransac.iterations = c.ransac_iterations;
  cfg.ransac.threshold = c.ransac_threshold;
  cfg.mode = to_backend(c.mode);
  cfg.stride = c.stride;
  cfg.transmission_patch = c.transmission_patch;
  cfg.seed = c.seed;
  cfg.fps = c.fps;
  cfg.workers = c.workers;
  cfg.validate();
  return cfg;
}

uwvo_run_config from_config(const uwvo::RunConfig& cfg) {
  uwvo_run_config c;
  c.fx = cfg.intrinsics.fx;
  c.fy = cfg.intrinsics.fy;
  c.cx = cfg.intrinsics.cx;
  c.cy = cfg.intrinsics.cy;
  c.alpha = cfg.normalization.alpha;
  c.beta_bias = cfg.normalization.beta_bias;
  c.pyramid_levels = cfg.flow.pyramid_levels;
  c.iterations_per_level = cfg.flow.iterations_per_level;
  c.window = cfg.flow.window;
  c.ransac_iterations = cfg.ransac.iterations;
  c.ransac_threshold = cfg.ransac.threshold;
  c.mode = cfg.mode == uwvo::PoseBackend::ScaledFlow
               ? UWVO_MODE_SCALED_FLOW
               : UWVO_MODE_CONFIDENCE_WEIGHTED;
  c.stride = cfg.stride;
  c.transmission_patch = cfg.transmission_patch;
  c.seed = cfg.seed;
  c.fps = cfg.fps;
  c.workers = cfg.workers;
  return c;
}

uwvo::SynthParams to_synth(const uwvo_synth_params& p) {
  uwvo::SynthParams s;
  if (p.name) s.name = p.name;
  s.width = p.width;
  s.height = p.height;
  s.frames = p.frames;
  s.fps = p.fps;
  s.seed = p.seed;
  s.intrinsics = uwvo::CameraIntrinsics(p.fx, p.fy, p.cx, p.cy);
  s.path = p.path_kind == 0   ? uwvo::PathKind::Line
           : p.path_kind == 2 ? uwvo::PathKind::Arc
                              : uwvo::PathKind::Serpentine;
  s.camera_height = p.camera_height;
  s.plane_tilt_deg = p.plane_tilt_deg;
  s.advance_per_frame = p.advance_per_frame;
  s.lateral_amplitude = p.lateral_amplitude;
  s.serpentine_period = p.serpentine_period;
  s.arc_radius = p.arc_radius;
  s.arc_step_deg = p.arc_step_deg;
  s.texture_contrast = p.texture_contrast;
  s.texture_feature_size = p.texture_feature_size;
  s.texture_dot_period = p.texture_dot_period;
  s.scene_tiles = p.scene_tiles;
  s.tile_height_min = p.tile_height_min;
  s.tile_height_max = p.tile_height_max;
  s.haze = uwvo::HazeParams(
      {p.beta[0], p.beta[1], p.beta[2]},
      uwvo::AmbientLight(p.ambient[0], p.ambient[1], p.ambient[2]));
  s.noise_sigma = p.noise_sigma;
  return s;
}

uwvo_synth_params from_synth(const uwvo::SynthParams& s) {
  uwvo_synth_params p;
  g_manifest_name = s.name;
  p.name = g_manifest_name.c_str();
  p.width = s.width;
  p.height = s.height;
  p.frames = s.frames;
  p.fps = s.fps;
  p.seed = s.seed;
  p.fx = s.intrinsics.fx;
  p.fy = s.intrinsics.fy;
  p.cx = s.intrinsics.cx;
  p.cy = s.intrinsics.cy;
  p.path_kind = s.path == uwvo::PathKind::Line  ? 0
                : s.path == uwvo::PathKind::Arc ? 2
                                                : 1;
  p.camera_height = s.camera_height;
  p.plane_tilt_deg = s.plane_tilt_deg;
  p.advance_per_frame = s.advance_per_frame;
  p.lateral_amplitude = s.lateral_amplitude;
  p.serpentine_period = s.serpentine_period;
  p.arc_radius = s.arc_radius;
  p.arc_step_deg = s.arc_step_deg;
  p.texture_contrast = s.texture_contrast;
  p.texture_feature_size = s.texture_feature_size;
  p.texture_dot_period = s.texture_dot_period;
  p.scene_tiles = s.scene_tiles;
  p.tile_height_min = s.tile_height_min;
  p.tile_height_max = s.tile_height_max;
  for (int c = 0; c < 3; ++c) {
    p.beta[c] = s.haze.attenuation[c];
    p.ambient[c] = s.haze.ambient[c];
  }
  p.noise_sigma = s.noise_sigma;
  return p;
}

uwvo_motion from_motion(const uwvo::RelativeMotion& m) {
  return {m.rotation.x(), m.rotation.y(), m.rotation.z(), m.rotation.w(),
          m.translation.x(), m.translation.y(), m.translation.z()};
}

void from_stats(const uwvo::PairStats& s, uwvo_pair_stats* out) {
  out->sigma = s.sigma;
  out->weight_min = s.weight_min;
  out->weight_max = s.weight_max;
  out->inlier_ratio = s.inlier_ratio;
  out->correspondences = s.correspondences;
  out->degenerate = s.degenerate ? 1 : 0;
}

uwvo::CameraIntrinsics to_intrinsics(const double k[4]) {
  return uwvo::CameraIntrinsics(k[0], k[1], k[2], k[3]);
}

}  // namespace

struct uwvo_image {
  uwvo::Image img;
};
struct uwvo_map {
  uwvo::ScalarGrid grid;
};
struct uwvo_flow {
  uwvo::FlowField flow;
};
struct uwvo_correspondences {
  uwvo::CorrespondenceSet cs;
};
struct uwvo_trajectory {
  uwvo::Trajectory traj;
};

extern "C" {

const char* uwvo_version(void) { return "0.1.0"; }

const char* uwvo_status_name(uwvo_status status) {
  switch (status) {
    case UWVO_OK: return "ok";
    case UWVO_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case UWVO_ERROR_SHAPE_MISMATCH: return "shape mismatch";
    case UWVO_ERROR_DEGENERATE_GEOMETRY: return "degenerate geometry";
    case UWVO_ERROR_CHEIRALITY: return "cheirality failure";
    case UWVO_ERROR_PARSE: return "parse error";
    case UWVO_ERROR_IO: return "io error";
    case UWVO_ERROR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* uwvo_last_error(void) { return g_last_error.c_str(); }

/* ---- images ------------------------------------------------------------ */

uwvo_status uwvo_image_create(int32_t width, int32_t height,
                              uwvo_image** out) {
  if (!out) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null out pointer");
  return guarded([&] { *out = new uwvo_image{uwvo::Image(width, height)}; });
}

uwvo_status uwvo_image_load(const char* path, uwvo_image** out) {
  if (!path || !out) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new uwvo_image{uwvo::load_image(path)}; });
}

uwvo_status uwvo_image_save(const uwvo_image* img, const char* path) {
  if (!img || !path) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { uwvo::save_image(img->img, path); });
}

void uwvo_image_destroy(uwvo_image* img) { delete img; }

int32_t uwvo_image_width(const uwvo_image* img) {
  return img ? img->img.width() : 0;
}
int32_t uwvo_image_height(const uwvo_image* img) {
  return img ? img->img.height() : 0;
}

uwvo_status uwvo_image_get_pixel(const uwvo_image* img, int32_t x, int32_t y,
                                 double rgb[3]) {
  if (!img || !rgb) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  if (x < 0 || x >= img->img.width() || y < 0 || y >= img->img.height())
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "pixel out of bounds");
  for (int c = 0; c < 3; ++c) rgb[c] = img->img.at(x, y, c);
  return UWVO_OK;
}

uwvo_status uwvo_image_set_pixel(uwvo_image* img, int32_t x, int32_t y,
                                 const double rgb[3]) {
  if (!img || !rgb) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  if (x < 0 || x >= img->img.width() || y < 0 || y >= img->img.height())
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "pixel out of bounds");
  for (int c = 0; c < 3; ++c) {
    double v = rgb[c];
    img->img.at(x, y, c) = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }
  return UWVO_OK;
}

/* ---- scalar maps -------------------------------------------------------- */

void uwvo_map_destroy(uwvo_map* map) { delete map; }

int32_t uwvo_map_width(const uwvo_map* map) {
  return map ? map->grid.width() : 0;
}
int32_t uwvo_map_height(const uwvo_map* map) {
  return map ? map->grid.height() : 0;
}

uwvo_status uwvo_map_get(const uwvo_map* map, int32_t x, int32_t y,
                         double* value) {
  if (!map || !value) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  if (x < 0 || x >= map->grid.width() || y < 0 || y >= map->grid.height())
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "pixel out of bounds");
  *value = map->grid.at(x, y);
  return UWVO_OK;
}

uwvo_status uwvo_map_stats(const uwvo_map* map, double* min_value,
                           double* max_value, double* mean_value) {
  if (!map) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null map");
  if (min_value) *min_value = map->grid.min_value();
  if (max_value) *max_value = map->grid.max_value();
  if (mean_value) *mean_value = map->grid.mean();
  return UWVO_OK;
}

uwvo_status uwvo_map_load_pfm(const char* path, uwvo_map** out) {
  if (!path || !out) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new uwvo_map{uwvo::load_pfm(path)}; });
}

uwvo_status uwvo_map_save_pfm(const uwvo_map* map, const char* path) {
  if (!map || !path) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { uwvo::save_pfm(map->grid, path); });
}

uwvo_status uwvo_map_save_pgm(const uwvo_map* map, const char* path) {
  if (!map || !path) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { uwvo::save_pgm_preview(map->grid, path); });
}

/* ---- underwater imaging ------------------------------------------------- */

uwvo_status uwvo_estimate_ambient(const uwvo_image* img, double ambient[3]) {
  if (!img || !ambient)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::AmbientLight a = uwvo::estimate_ambient(img->img);
    for (int c = 0; c < 3; ++c) ambient[c] = a[c];
  });
}

uwvo_status uwvo_estimate_transmission(const uwvo_image* img,
                                       const double ambient[3], int32_t patch,
                                       uwvo_map** out) {
  if (!img || !ambient || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::TransmissionMap t = uwvo::estimate_transmission(
        img->img, uwvo::AmbientLight(ambient[0], ambient[1], ambient[2]),
        patch);
    *out = new uwvo_map{t.grid()};
  });
}

uwvo_status uwvo_transmission_invert(const uwvo_map* transmission,
                                     uwvo_map** out) {
  if (!transmission || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::TransmissionMap t =
        uwvo::TransmissionMap::from_grid(transmission->grid);
    *out = new uwvo_map{uwvo::invert(t).grid()};
  });
}

uwvo_status uwvo_normalize_transmission(const uwvo_map* inverse_map,
                                        double alpha, double beta_bias,
                                        uwvo_map** weights, double* sigma) {
  if (!inverse_map || !weights)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::InverseTransmissionMap inv =
        uwvo::InverseTransmissionMap::from_grid(inverse_map->grid);
    uwvo::WeightMap w = uwvo::normalize_transmission(
        inv, uwvo::NormalizationParams(alpha, beta_bias));
    if (sigma) *sigma = w.sigma();
    *weights = new uwvo_map{w.grid()};
  });
}

uwvo_status uwvo_apply_degradation(const uwvo_image* radiance,
                                   const uwvo_map* transmission,
                                   const double ambient[3],
                                   uwvo_image** out) {
  if (!radiance || !transmission || !ambient || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::TransmissionMap t =
        uwvo::TransmissionMap::from_grid(transmission->grid);
    *out = new uwvo_image{uwvo::apply_degradation(
        radiance->img, t,
        uwvo::AmbientLight(ambient[0], ambient[1], ambient[2]))};
  });
}

uwvo_status uwvo_restore_radiance(const uwvo_image* observed,
                                  const uwvo_map* transmission,
                                  const double ambient[3], uwvo_image** out) {
  if (!observed || !transmission || !ambient || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::TransmissionMap t =
        uwvo::TransmissionMap::from_grid(transmission->grid);
    *out = new uwvo_image{uwvo::restore_radiance(
        observed->img, t,
        uwvo::AmbientLight(ambient[0], ambient[1], ambient[2]))};
  });
}

uwvo_status uwvo_degrade_with_depth(const uwvo_image* radiance,
                                    const uwvo_map* depth,
                                    const double beta[3],
                                    const double ambient[3], uwvo_image** out,
                                    uwvo_map** transmission_out) {
  if (!radiance || !depth || !beta || !ambient || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::HazeParams haze(
        {beta[0], beta[1], beta[2]},
        uwvo::AmbientLight(ambient[0], ambient[1], ambient[2]));
    uwvo::TransmissionMap gt = uwvo::TransmissionMap::clamped(
        uwvo::ScalarGrid(radiance->img.width(), radiance->img.height(), 1.0));
    uwvo::Image result =
        uwvo::degrade_frame(radiance->img, depth->grid, haze, &gt);
    *out = new uwvo_image{std::move(result)};
    if (transmission_out) *transmission_out = new uwvo_map{gt.grid()};
  });
}

/* ---- optical flow -------------------------------------------------------- */

uwvo_status uwvo_estimate_flow(const uwvo_image* frame_a,
                               const uwvo_image* frame_b,
                               int32_t pyramid_levels,
                               int32_t iterations_per_level, int32_t window,
                               uwvo_flow** out) {
  if (!frame_a || !frame_b || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::FlowParams params{pyramid_levels, iterations_per_level, window};
    *out = new uwvo_flow{uwvo::estimate_flow(frame_a->img, frame_b->img,
                                             params)};
  });
}

void uwvo_flow_destroy(uwvo_flow* flow) { delete flow; }

int32_t uwvo_flow_width(const uwvo_flow* flow) {
  return flow ? flow->flow.width() : 0;
}
int32_t uwvo_flow_height(const uwvo_flow* flow) {
  return flow ? flow->flow.height() : 0;
}

uwvo_status uwvo_flow_get(const uwvo_flow* flow, int32_t x, int32_t y,
                          double* u, double* v) {
  if (!flow || !u || !v)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  if (x < 0 || x >= flow->flow.width() || y < 0 || y >= flow->flow.height())
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "pixel out of bounds");
  *u = flow->flow.u(x, y);
  *v = flow->flow.v(x, y);
  return UWVO_OK;
}

uwvo_status uwvo_weight_flow(const uwvo_flow* flow, const uwvo_map* weights,
                             uwvo_flow** out) {
  if (!flow || !weights || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::WeightMap w = uwvo::WeightMap::from_grid(weights->grid);
    *out = new uwvo_flow{uwvo::weight_flow(flow->flow, w)};
  });
}

uwvo_status uwvo_warp_image(const uwvo_image* frame, const uwvo_flow* flow,
                            uwvo_image** out) {
  if (!frame || !flow || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded(
      [&] { *out = new uwvo_image{uwvo::warp_image(frame->img, flow->flow)}; });
}

uwvo_status uwvo_flow_epe(const uwvo_flow* estimate, const uwvo_flow* truth,
                          int32_t border, double* epe) {
  if (!estimate || !truth || !epe)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (border > 0) {
      uwvo::Mask mask = uwvo::interior_mask(estimate->flow.width(),
                                            estimate->flow.height(), border);
      *epe = uwvo::flow_epe(estimate->flow, truth->flow, &mask);
    } else {
      *epe = uwvo::flow_epe(estimate->flow, truth->flow, nullptr);
    }
  });
}

uwvo_status uwvo_flow_load(const char* path, uwvo_flow** out) {
  if (!path || !out) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new uwvo_flow{uwvo::load_flo(path)}; });
}

uwvo_status uwvo_flow_save(const uwvo_flow* flow, const char* path) {
  if (!flow || !path) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { uwvo::save_flo(flow->flow, path); });
}

uwvo_status uwvo_flow_colorize(const uwvo_flow* flow, double max_magnitude,
                               uwvo_image** out) {
  if (!flow || !out) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new uwvo_image{uwvo::colorize_flow(flow->flow, max_magnitude)};
  });
}

/* ---- epipolar geometry --------------------------------------------------- */

uwvo_status uwvo_flow_to_correspondences(const uwvo_flow* flow,
                                         const uwvo_map* weights,
                                         int32_t stride, int32_t mode,
                                         uwvo_correspondences** out) {
  if (!flow || !out) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (weights) {
      uwvo::WeightMap w = uwvo::WeightMap::from_grid(weights->grid);
      *out = new uwvo_correspondences{uwvo::flow_to_correspondences(
          flow->flow, &w, stride, to_backend(mode))};
    } else {
      *out = new uwvo_correspondences{uwvo::flow_to_correspondences(
          flow->flow, nullptr, stride, to_backend(mode))};
    }
  });
}

void uwvo_correspondences_destroy(uwvo_correspondences* cs) { delete cs; }

size_t uwvo_correspondences_size(const uwvo_correspondences* cs) {
  return cs ? cs->cs.size() : 0;
}

uwvo_status uwvo_estimate_essential(const uwvo_correspondences* cs,
                                    const double intrinsics[4],
                                    int32_t iterations, double threshold,
                                    uint64_t seed, double essential[9],
                                    uint8_t* inlier_mask,
                                    size_t* inlier_count) {
  if (!cs || !intrinsics || !essential)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::RansacParams params{iterations, threshold, seed};
    uwvo::EssentialResult r =
        uwvo::estimate_essential(cs->cs, to_intrinsics(intrinsics), params);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) essential[3 * i + j] = r.essential(i, j);
    if (inlier_mask)
      std::memcpy(inlier_mask, r.inlier_mask.data(), r.inlier_mask.size());
    if (inlier_count) *inlier_count = r.inlier_count;
  });
}

uwvo_status uwvo_decompose_essential(const double essential[9],
                                     const uwvo_correspondences* cs,
                                     const uint8_t* inlier_mask,
                                     const double intrinsics[4],
                                     uwvo_motion* motion) {
  if (!essential || !cs || !intrinsics || !motion)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    Eigen::Matrix3d e;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) e(i, j) = essential[3 * i + j];
    uwvo::CorrespondenceSet subset;
    if (inlier_mask) {
      for (size_t i = 0; i < cs->cs.size(); ++i)
        if (inlier_mask[i]) subset.push_back(cs->cs[i]);
    } else {
      subset = cs->cs;
    }
    uwvo::RelativeMotion m =
        uwvo::decompose_essential(e, subset, to_intrinsics(intrinsics));
    *motion = from_motion(m);
  });
}

uwvo_status uwvo_recover_motion(const uwvo_run_config* config,
                                const uwvo_image* frame_a,
                                const uwvo_image* frame_b,
                                uint64_t ransac_seed, uwvo_motion* motion,
                                uwvo_pair_stats* stats) {
  if (!config || !frame_a || !frame_b || !motion)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::RunConfig cfg = to_config(*config);
    cfg.intrinsics.validate_for(frame_a->img.width(), frame_a->img.height());
    uwvo::PairAnalysis analysis =
        uwvo::analyze_pair(frame_a->img, frame_b->img, cfg);
    uwvo::PairStats ps;
    uwvo::RelativeMotion m = uwvo::solve_pair(analysis, cfg, ransac_seed, &ps);
    *motion = from_motion(m);
    if (stats) from_stats(ps, stats);
  });
}

/* ---- sequence runs ------------------------------------------------------- */

uwvo_run_config uwvo_run_config_default(void) {
  return from_config(uwvo::RunConfig{});
}

uwvo_status uwvo_run_config_load(const char* path, uwvo_run_config* config) {
  if (!path || !config)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *config = from_config(uwvo::load_run_config(path)); });
}

uwvo_status uwvo_run_sequence(const uwvo_run_config* config,
                              const char* const* frame_paths, size_t count,
                              uwvo_trajectory** trajectory,
                              uwvo_pair_stats* stats) {
  if (!config || !frame_paths || !trajectory)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::string> paths;
    paths.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!frame_paths[i])
        throw uwvo::InvalidArgumentError("null frame path");
      paths.emplace_back(frame_paths[i]);
    }
    uwvo::RunSummary summary = uwvo::run_sequence(paths, to_config(*config));
    if (stats)
      for (size_t i = 0; i < summary.pairs.size(); ++i)
        from_stats(summary.pairs[i], &stats[i]);
    *trajectory = new uwvo_trajectory{std::move(summary.trajectory)};
  });
}

/* ---- trajectories -------------------------------------------------------- */

uwvo_status uwvo_trajectory_create(uwvo_trajectory** out) {
  if (!out) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null out pointer");
  return guarded([&] { *out = new uwvo_trajectory{}; });
}

void uwvo_trajectory_destroy(uwvo_trajectory* traj) { delete traj; }

uwvo_status uwvo_trajectory_append(uwvo_trajectory* traj, double timestamp,
                                   const double position[3],
                                   const double quaternion[4]) {
  if (!traj || !position || !quaternion)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::Pose p;
    p.timestamp = timestamp;
    p.position = {position[0], position[1], position[2]};
    p.rotation = Eigen::Quaterniond(quaternion[3], quaternion[0],
                                    quaternion[1], quaternion[2]);
    traj->traj.append(std::move(p));
  });
}

size_t uwvo_trajectory_size(const uwvo_trajectory* traj) {
  return traj ? traj->traj.size() : 0;
}

uwvo_status uwvo_trajectory_pose(const uwvo_trajectory* traj, size_t index,
                                 double* timestamp, double position[3],
                                 double quaternion[4]) {
  if (!traj) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null trajectory");
  if (index >= traj->traj.size())
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "pose index out of range");
  const uwvo::Pose& p = traj->traj[index];
  if (timestamp) *timestamp = p.timestamp;
  if (position) {
    position[0] = p.position.x();
    position[1] = p.position.y();
    position[2] = p.position.z();
  }
  if (quaternion) {
    quaternion[0] = p.rotation.x();
    quaternion[1] = p.rotation.y();
    quaternion[2] = p.rotation.z();
    quaternion[3] = p.rotation.w();
  }
  return UWVO_OK;
}

uwvo_status uwvo_trajectory_load_tum(const char* path, uwvo_trajectory** out) {
  if (!path || !out) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new uwvo_trajectory{uwvo::load_tum(path)}; });
}

uwvo_status uwvo_trajectory_save_tum(const uwvo_trajectory* traj,
                                     const char* path) {
  if (!traj || !path) return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { uwvo::save_tum(traj->traj, path); });
}

uwvo_status uwvo_trajectory_length(const uwvo_trajectory* traj,
                                   double* length) {
  if (!traj || !length)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *length = uwvo::trajectory_length(traj->traj); });
}

uwvo_status uwvo_umeyama_align(const uwvo_trajectory* estimate,
                               const uwvo_trajectory* reference,
                               int32_t with_scale, double* scale,
                               double rotation[9], double translation[3]) {
  if (!estimate || !reference)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::AlignmentResult r =
        uwvo::umeyama_align(estimate->traj, reference->traj, with_scale != 0);
    if (scale) *scale = r.scale;
    if (rotation)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rotation[3 * i + j] = r.rotation(i, j);
    if (translation)
      for (int i = 0; i < 3; ++i) translation[i] = r.translation(i);
  });
}

uwvo_status uwvo_trajectory_transform(const uwvo_trajectory* traj,
                                      double scale, const double rotation[9],
                                      const double translation[3],
                                      uwvo_trajectory** out) {
  if (!traj || !rotation || !translation || !out)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    uwvo::AlignmentResult r;
    r.scale = scale;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.rotation(i, j) = rotation[3 * i + j];
    r.translation = {translation[0], translation[1], translation[2]};
    if (!(scale > 0.0))
      throw uwvo::InvalidArgumentError("scale must be > 0");
    *out = new uwvo_trajectory{uwvo::transform_trajectory(traj->traj, r)};
  });
}

uwvo_status uwvo_ate(const uwvo_trajectory* estimate,
                     const uwvo_trajectory* reference, int32_t align,
                     double* ate_rmse) {
  if (!estimate || !reference || !ate_rmse)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *ate_rmse = uwvo::ate(estimate->traj, reference->traj, align != 0);
  });
}

uwvo_status uwvo_rte(const uwvo_trajectory* estimate,
                     const uwvo_trajectory* reference, int32_t delta_frames,
                     double* rte_rmse) {
  if (!estimate || !reference || !rte_rmse)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *rte_rmse = uwvo::rte(estimate->traj, reference->traj, delta_frames);
  });
}

uwvo_status uwvo_associated_count(const uwvo_trajectory* estimate,
                                  const uwvo_trajectory* reference,
                                  size_t* matched) {
  if (!estimate || !reference || !matched)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *matched = uwvo::associate(estimate->traj, reference->traj).pairs.size();
  });
}

uwvo_status uwvo_evaluate(const uwvo_trajectory* estimate,
                          const uwvo_trajectory* reference,
                          int32_t delta_frames, int32_t align,
                          uwvo_metrics* metrics) {
  if (!estimate || !reference || !metrics)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    metrics->ate_rmse = uwvo::ate(estimate->traj, reference->traj, align != 0);
    metrics->rte_rmse = uwvo::rte(estimate->traj, reference->traj,
                                  delta_frames);
    metrics->length = uwvo::trajectory_length(estimate->traj);
    metrics->pose_count = estimate->traj.size();
  });
}

/* ---- synthetic data ------------------------------------------------------ */

int32_t uwvo_synth_preset_count(void) {
  return static_cast<int32_t>(uwvo::synth_preset_names().size());
}

const char* uwvo_synth_preset_name(int32_t index) {
  static const std::vector<std::string> names = uwvo::synth_preset_names();
  if (index < 0 || index >= static_cast<int32_t>(names.size())) return nullptr;
  return names[index].c_str();
}

uwvo_status uwvo_synth_preset(const char* name, uwvo_synth_params* params) {
  if (!name || !params)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *params = from_synth(uwvo::synth_preset(name)); });
}

uwvo_status uwvo_synth_emit(const uwvo_synth_params* params, const char* dir) {
  if (!params || !dir)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { uwvo::emit_dataset(to_synth(*params), dir); });
}

uwvo_status uwvo_read_manifest(const char* path, uwvo_synth_params* params) {
  if (!path || !params)
    return fail(UWVO_ERROR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *params = from_synth(uwvo::read_manifest(path)); });
}

}  // extern "C"
