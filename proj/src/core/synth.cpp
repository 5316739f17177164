#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "flow_io.hpp"
#include "image_io.hpp"
#include "rng.hpp"
#include "toml.hpp"

namespace uwvo {

namespace {

double lattice_value(int64_t ix, int64_t iy, uint64_t seed) {
  uint64_t h = hash_mix(seed, hash_mix(static_cast<uint64_t>(ix) * 0x9E3779B9u,
                                       static_cast<uint64_t>(iy)));
  return (h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(double x, double y, uint64_t seed) {
  double fx = std::floor(x), fy = std::floor(y);
  int64_t ix = static_cast<int64_t>(fx), iy = static_cast<int64_t>(fy);
  double tx = smoothstep(x - fx), ty = smoothstep(y - fy);
  double v00 = lattice_value(ix, iy, seed);
  double v10 = lattice_value(ix + 1, iy, seed);
  double v01 = lattice_value(ix, iy + 1, seed);
  double v11 = lattice_value(ix + 1, iy + 1, seed);
  return (1 - ty) * ((1 - tx) * v00 + tx * v10) +
         ty * ((1 - tx) * v01 + tx * v11);
}

double fbm(double x, double y, uint64_t seed, int octaves) {
  double sum = 0.0, amp = 1.0, norm = 0.0, freq = 1.0;
  for (int o = 0; o < octaves; ++o) {
    sum += amp * value_noise(x * freq, y * freq, seed + o * 0x1234567ull);
    norm += amp;
    amp *= 0.5;
    freq *= 2.0;
  }
  return sum / norm;
}

// Smooth radial bump, 1 at the cell center, 0 beyond radius.
double dot_bump(double frac, double radius) {
  double d = std::abs(frac - 0.5);
  if (d >= radius) return 0.0;
  return smoothstep(1.0 - d / radius);
}

Eigen::Matrix3d nadir_orientation() {
  // Camera looks straight down: image right = +x world, image down = -y
  // world, optical axis = -z world.
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  return r;
}

constexpr double kMinRayDepth = 1e-6;

}  // namespace

Eigen::Vector3d TexturedPlane::basis_u() const {
  Eigen::Vector3d n = normal.normalized();
  Eigen::Vector3d ref = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                              : Eigen::Vector3d::UnitY();
  return (ref - ref.dot(n) * n).normalized();
}

Eigen::Vector3d TexturedPlane::basis_v() const {
  return normal.normalized().cross(basis_u()).normalized();
}

void TexturedPlane::sample(double u, double v, double rgb[3]) const {
  const double f = 1.0 / feature_size;
  static const double mid[3] = {0.55, 0.60, 0.65};
  double dots_u = u / dot_period - std::floor(u / dot_period);
  double dots_v = v / dot_period - std::floor(v / dot_period);
  double dip = dot_bump(dots_u, 0.3) * dot_bump(dots_v, 0.3);
  double dark = 1.0 - 0.97 * dip;
  for (int c = 0; c < 3; ++c) {
    double n = fbm(u * f, v * f, seed + 101 * (c + 1), 3);
    double base = mid[c] + contrast * 0.8 * (n - 0.5);
    rgb[c] = std::clamp(base * dark, 0.0, 1.0);
  }
}

Scene make_scene(const SynthParams& params) {
  TexturedPlane base;
  base.point = Eigen::Vector3d::Zero();
  double tilt = params.plane_tilt_deg * M_PI / 180.0;
  base.normal = Eigen::Vector3d(0.0, std::sin(tilt), std::cos(tilt));
  base.seed = params.seed;
  base.feature_size = params.texture_feature_size;
  base.contrast = params.texture_contrast;
  base.dot_period = params.texture_dot_period;

  Scene scene;
  scene.planes.push_back(base);

  if (params.scene_tiles > 0) {
    // Scatter raised tiles over the area the path sweeps.
    std::vector<Pose> path = make_path(params);
    double min_x = path.front().position.x(), max_x = min_x;
    double min_y = path.front().position.y(), max_y = min_y;
    for (const Pose& p : path) {
      min_x = std::min(min_x, p.position.x());
      max_x = std::max(max_x, p.position.x());
      min_y = std::min(min_y, p.position.y());
      max_y = std::max(max_y, p.position.y());
    }
    double pad = 0.6 * params.camera_height;
    SplitMix64 rng(hash_mix(params.seed, 0x71135ull));
    for (int i = 0; i < params.scene_tiles; ++i) {
      TexturedPlane tile = base;
      double height =
          rng.next_double(params.tile_height_min, params.tile_height_max);
      double cx = rng.next_double(min_x - pad, max_x + pad);
      double cy = rng.next_double(min_y - pad, max_y + pad);
      // Center on the base plane, then raise along its normal.
      double cz = base.normal.z() != 0.0
                      ? (base.normal.dot(base.point) - base.normal.x() * cx -
                         base.normal.y() * cy) /
                            base.normal.z()
                      : 0.0;
      tile.point = Eigen::Vector3d(cx, cy, cz) + height * base.normal;
      tile.extent_u = rng.next_double(0.25, 0.6) * params.camera_height * 0.5;
      tile.extent_v = rng.next_double(0.25, 0.6) * params.camera_height * 0.5;
      tile.seed = hash_mix(params.seed, 0xA11E5ull + i);
      scene.planes.push_back(tile);
    }
  }
  return scene;
}

std::vector<Pose> make_path(const SynthParams& params) {
  std::vector<Pose> poses;
  poses.reserve(params.frames);
  const Eigen::Matrix3d r0 = nadir_orientation();
  for (int i = 0; i < params.frames; ++i) {
    Pose p;
    p.timestamp = i / params.fps;
    double yaw = 0.0;
    switch (params.path) {
      case PathKind::Line: {
        p.position = {params.advance_per_frame * i, 0.0,
                      params.camera_height};
        break;
      }
      case PathKind::Serpentine: {
        double phase = 2.0 * M_PI * i / params.serpentine_period;
        p.position = {params.advance_per_frame * i,
                      params.lateral_amplitude * std::sin(phase),
                      params.camera_height};
        // Gentle heading wiggle following the sweep.
        yaw = 0.08 * std::cos(phase);
        break;
      }
      case PathKind::Arc: {
        double phi = params.arc_step_deg * M_PI / 180.0 * i;
        p.position = {params.arc_radius * std::sin(phi),
                      params.arc_radius * (1.0 - std::cos(phi)),
                      params.camera_height};
        yaw = phi;
        break;
      }
    }
    Eigen::Matrix3d r =
        (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * r0).matrix();
    p.rotation = Eigen::Quaterniond(r).normalized();
    poses.push_back(p);
  }
  return poses;
}

void render_frame(const Scene& scene, const Pose& camera,
                  const CameraIntrinsics& k, int width, int height,
                  Image* frame, ScalarGrid* depth) {
  if (scene.planes.empty())
    throw InvalidArgumentError("render_frame: empty scene");
  k.validate_for(width, height);
  *frame = Image(width, height);
  *depth = ScalarGrid(width, height);
  const Eigen::Matrix3d r_wc = camera.rotation.toRotationMatrix();
  const Eigen::Vector3d origin = camera.position;

  struct PlaneCache {
    const TexturedPlane* plane;
    Eigen::Vector3d n, bu, bv;
    double offset;
  };
  std::vector<PlaneCache> cache;
  for (const auto& plane : scene.planes) {
    Eigen::Vector3d n = plane.normal.normalized();
    cache.push_back({&plane, n, plane.basis_u(), plane.basis_v(),
                     n.dot(plane.point)});
  }

  double rgb[3];
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      Eigen::Vector3d dir_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      Eigen::Vector3d dir = r_wc * dir_cam;
      double best_s = -1.0;
      const PlaneCache* hit = nullptr;
      double best_u = 0.0, best_v = 0.0;
      for (const auto& pc : cache) {
        double denom = pc.n.dot(dir);
        if (std::abs(denom) < 1e-12) continue;
        double s = (pc.offset - pc.n.dot(origin)) / denom;
        if (s <= kMinRayDepth || (best_s >= 0.0 && s >= best_s)) continue;
        Eigen::Vector3d q = origin + s * dir - pc.plane->point;
        double pu = q.dot(pc.bu), pv = q.dot(pc.bv);
        if (pc.plane->extent_u > 0.0 && (std::abs(pu) > pc.plane->extent_u ||
                                         std::abs(pv) > pc.plane->extent_v))
          continue;
        best_s = s;
        hit = &pc;
        best_u = pu;
        best_v = pv;
      }
      if (!hit)
        throw InvalidArgumentError(
            "render_frame: camera ray misses the scene (camera crossing the "
            "plane?)");
      hit->plane->sample(best_u, best_v, rgb);
      for (int c = 0; c < 3; ++c) frame->at(x, y, c) = rgb[c];
      // dir_cam.z == 1, so the ray parameter is the camera-frame z depth.
      depth->at(x, y) = best_s;
    }
}

FlowField ground_truth_flow(const Pose& pose_a, const Pose& pose_b,
                            const ScalarGrid& depth_a,
                            const CameraIntrinsics& k, Mask* valid) {
  const int w = depth_a.width(), h = depth_a.height();
  FlowField flow(w, h);
  if (valid) *valid = Mask(w, h, true);
  const Eigen::Matrix3d ra = pose_a.rotation.toRotationMatrix();
  const Eigen::Matrix3d rb_inv =
      pose_b.rotation.toRotationMatrix().transpose();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Eigen::Vector3d p_cam_a((x - k.cx) / k.fx * depth_a.at(x, y),
                              (y - k.cy) / k.fy * depth_a.at(x, y),
                              depth_a.at(x, y));
      Eigen::Vector3d p_world = ra * p_cam_a + pose_a.position;
      Eigen::Vector3d p_cam_b = rb_inv * (p_world - pose_b.position);
      if (p_cam_b.z() <= kMinRayDepth) {
        if (valid) valid->set(x, y, false);
        continue;
      }
      Eigen::Vector2d px = k.project(p_cam_b);
      flow.u(x, y) = px.x() - x;
      flow.v(x, y) = px.y() - y;
      if (valid && (px.x() < 0 || px.x() > w - 1 || px.y() < 0 ||
                    px.y() > h - 1))
        valid->set(x, y, false);
    }
  return flow;
}

Image degrade_frame(const Image& clean, const ScalarGrid& depth,
                    const HazeParams& haze, TransmissionMap* gt_transmission) {
  if (clean.width() != depth.width() || clean.height() != depth.height())
    throw ShapeMismatchError("degrade_frame: depth dimension mismatch");
  for (double d : depth.data())
    if (!(d > 0.0))
      throw InvalidArgumentError("degrade_frame: depth must be positive");

  ScalarGrid tc[3] = {ScalarGrid(depth.width(), depth.height()),
                      ScalarGrid(depth.width(), depth.height()),
                      ScalarGrid(depth.width(), depth.height())};
  ScalarGrid mean(depth.width(), depth.height());
  for (size_t i = 0; i < depth.size(); ++i) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) {
      tc[c][i] = std::exp(-haze.attenuation[c] * depth[i]);
      m += tc[c][i];
    }
    mean[i] = m / 3.0;
  }
  std::array<TransmissionMap, 3> maps = {
      TransmissionMap::clamped(std::move(tc[0])),
      TransmissionMap::clamped(std::move(tc[1])),
      TransmissionMap::clamped(std::move(tc[2]))};
  if (gt_transmission)
    *gt_transmission = TransmissionMap::clamped(std::move(mean));
  return apply_degradation(clean, maps, haze.ambient);
}

void add_noise(Image* frame, double sigma, uint64_t seed) {
  if (sigma <= 0.0) return;
  SplitMix64 rng(seed);
  auto& data = frame->data();
  for (size_t i = 0; i + 1 < data.size(); i += 2) {
    // Box-Muller; consumes uniforms in pairs.
    double u1 = std::max(rng.next_double(), 1e-12);
    double u2 = rng.next_double();
    double mag = sigma * std::sqrt(-2.0 * std::log(u1));
    data[i] += mag * std::cos(2.0 * M_PI * u2);
    data[i + 1] += mag * std::sin(2.0 * M_PI * u2);
  }
  frame->clamp01();
}

SyntheticDataset generate_dataset(const SynthParams& params) {
  if (params.frames < 2)
    throw InvalidArgumentError("generate_dataset: need at least 2 frames");
  SyntheticDataset ds;
  ds.params = params;
  Scene scene = make_scene(params);
  std::vector<Pose> path = make_path(params);

  for (int i = 0; i < params.frames; ++i) {
    Image frame;
    ScalarGrid depth;
    render_frame(scene, path[i], params.intrinsics, params.width,
                 params.height, &frame, &depth);
    ds.clean_frames.push_back(frame);
    TransmissionMap gt = TransmissionMap::clamped(
        ScalarGrid(params.width, params.height, 1.0));
    Image degraded = degrade_frame(frame, depth, params.haze, &gt);
    add_noise(&degraded, params.noise_sigma,
              hash_mix(params.seed, 0xA0B1C2D3ull + i));
    ds.frames.push_back(std::move(degraded));
    ds.transmission.push_back(std::move(gt));
    ds.depths.push_back(std::move(depth));
    ds.trajectory.append(path[i]);
  }
  for (int i = 0; i + 1 < params.frames; ++i) {
    Mask valid;
    ds.flows.push_back(ground_truth_flow(path[i], path[i + 1], ds.depths[i],
                                         params.intrinsics, &valid));
    ds.flow_masks.push_back(std::move(valid));
  }
  return ds;
}

namespace {

std::string index_name(int i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d%s", i, ext);
  return buf;
}

toml::Table manifest_table(const SynthParams& p) {
  toml::Table t;
  t.set("dataset.name", {p.name});
  t.set("dataset.seed", {static_cast<int64_t>(p.seed)});
  t.set("dataset.width", {static_cast<int64_t>(p.width)});
  t.set("dataset.height", {static_cast<int64_t>(p.height)});
  t.set("dataset.frames", {static_cast<int64_t>(p.frames)});
  t.set("dataset.fps", {p.fps});
  t.set("dataset.noise_sigma", {p.noise_sigma});
  t.set("intrinsics.fx", {p.intrinsics.fx});
  t.set("intrinsics.fy", {p.intrinsics.fy});
  t.set("intrinsics.cx", {p.intrinsics.cx});
  t.set("intrinsics.cy", {p.intrinsics.cy});
  std::vector<toml::Value> beta{{p.haze.attenuation[0]},
                                {p.haze.attenuation[1]},
                                {p.haze.attenuation[2]}};
  std::vector<toml::Value> amb{
      {p.haze.ambient[0]}, {p.haze.ambient[1]}, {p.haze.ambient[2]}};
  t.set("haze.beta", {std::move(beta)});
  t.set("haze.ambient", {std::move(amb)});
  const char* kind = p.path == PathKind::Line        ? "line"
                     : p.path == PathKind::Serpentine ? "serpentine"
                                                      : "arc";
  t.set("path.kind", {std::string(kind)});
  t.set("path.camera_height", {p.camera_height});
  t.set("path.plane_tilt_deg", {p.plane_tilt_deg});
  t.set("path.advance_per_frame", {p.advance_per_frame});
  t.set("path.lateral_amplitude", {p.lateral_amplitude});
  t.set("path.serpentine_period", {p.serpentine_period});
  t.set("path.arc_radius", {p.arc_radius});
  t.set("path.arc_step_deg", {p.arc_step_deg});
  t.set("texture.contrast", {p.texture_contrast});
  t.set("texture.feature_size", {p.texture_feature_size});
  t.set("texture.dot_period", {p.texture_dot_period});
  t.set("scene.tiles", {static_cast<int64_t>(p.scene_tiles)});
  t.set("scene.tile_height_min", {p.tile_height_min});
  t.set("scene.tile_height_max", {p.tile_height_max});
  return t;
}

}  // namespace

void emit_dataset(const SynthParams& params, const std::string& dir) {
  if (params.frames < 2)
    throw InvalidArgumentError("emit_dataset: need at least 2 frames");
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"", "/frames", "/depth", "/transmission", "/flow"}) {
    fs::create_directories(dir + sub, ec);
    if (ec)
      throw IoError("emit_dataset: cannot create " + dir + sub + ": " +
                    ec.message());
  }

  Scene scene = make_scene(params);
  std::vector<Pose> path = make_path(params);

  Trajectory traj;
  ScalarGrid prev_depth;
  for (int i = 0; i < params.frames; ++i) {
    Image frame;
    ScalarGrid depth;
    render_frame(scene, path[i], params.intrinsics, params.width,
                 params.height, &frame, &depth);
    TransmissionMap gt = TransmissionMap::clamped(
        ScalarGrid(params.width, params.height, 1.0));
    Image degraded = degrade_frame(frame, depth, params.haze, &gt);
    add_noise(&degraded, params.noise_sigma,
              hash_mix(params.seed, 0xA0B1C2D3ull + i));

    save_image(degraded, dir + "/frames/" + index_name(i, ".png"));
    save_pfm(depth, dir + "/depth/" + index_name(i, ".pfm"));
    save_pfm(gt.grid(), dir + "/transmission/" + index_name(i, ".pfm"));
    if (i > 0) {
      FlowField flow = ground_truth_flow(path[i - 1], path[i], prev_depth,
                                         params.intrinsics, nullptr);
      save_flo(flow, dir + "/flow/" + index_name(i - 1, ".flo"));
    }
    prev_depth = std::move(depth);
    traj.append(path[i]);
  }
  save_tum(traj, dir + "/groundtruth.tum");
  toml::write_file(manifest_table(params), dir + "/manifest.toml");
}

std::vector<std::string> synth_preset_names() {
  return {"clear-01", "haze-heavy-01", "restore-check-01"};
}

SynthParams synth_preset(const std::string& name) {
  SynthParams p;
  p.name = name;
  if (name == "clear-01") {
    p.seed = 7001;
    p.path = PathKind::Serpentine;
    p.haze = HazeParams({0.07, 0.05, 0.04}, AmbientLight(0.6, 0.75, 0.85));
    p.texture_contrast = 1.0;
    p.noise_sigma = 0.004;
    return p;
  }
  if (name == "haze-heavy-01") {
    p.seed = 7002;
    p.path = PathKind::Arc;
    p.haze = HazeParams({0.55, 0.5, 0.45}, AmbientLight(0.6, 0.75, 0.85));
    p.texture_contrast = 0.55;
    p.noise_sigma = 0.02;
    return p;
  }
  if (name == "restore-check-01") {
    // Uniform attenuation across channels so a single shared map inverts the
    // degradation exactly.
    p.seed = 7003;
    p.frames = 4;
    p.path = PathKind::Line;
    p.haze = HazeParams({0.3, 0.3, 0.3}, AmbientLight(0.6, 0.75, 0.85));
    p.noise_sigma = 0.0;
    return p;
  }
  throw InvalidArgumentError("synth_preset: unknown preset '" + name +
                             "' (available: clear-01, haze-heavy-01, "
                             "restore-check-01)");
}

SynthParams read_manifest(const std::string& path) {
  toml::Table t = toml::parse_file(path);
  SynthParams p;
  p.name = t.get_string("dataset.name", p.name);
  p.seed = static_cast<uint64_t>(t.get_int("dataset.seed", 1));
  p.width = static_cast<int>(t.get_int("dataset.width", p.width));
  p.height = static_cast<int>(t.get_int("dataset.height", p.height));
  p.frames = static_cast<int>(t.get_int("dataset.frames", p.frames));
  p.fps = t.get_double("dataset.fps", p.fps);
  p.noise_sigma = t.get_double("dataset.noise_sigma", 0.0);
  p.intrinsics =
      CameraIntrinsics(t.get_double("intrinsics.fx", p.intrinsics.fx),
                       t.get_double("intrinsics.fy", p.intrinsics.fy),
                       t.get_double("intrinsics.cx", p.intrinsics.cx),
                       t.get_double("intrinsics.cy", p.intrinsics.cy));
  if (t.contains("haze.beta")) {
    auto beta = t.get_double_array("haze.beta");
    auto amb = t.get_double_array("haze.ambient");
    if (beta.size() != 3 || amb.size() != 3)
      throw ParseError("read_manifest: haze arrays must have 3 entries");
    p.haze = HazeParams({beta[0], beta[1], beta[2]},
                        AmbientLight(amb[0], amb[1], amb[2]));
  }
  std::string kind = t.get_string("path.kind", "serpentine");
  p.path = kind == "line"  ? PathKind::Line
           : kind == "arc" ? PathKind::Arc
                           : PathKind::Serpentine;
  p.camera_height = t.get_double("path.camera_height", p.camera_height);
  p.plane_tilt_deg = t.get_double("path.plane_tilt_deg", p.plane_tilt_deg);
  p.advance_per_frame =
      t.get_double("path.advance_per_frame", p.advance_per_frame);
  p.lateral_amplitude =
      t.get_double("path.lateral_amplitude", p.lateral_amplitude);
  p.serpentine_period =
      t.get_double("path.serpentine_period", p.serpentine_period);
  p.arc_radius = t.get_double("path.arc_radius", p.arc_radius);
  p.arc_step_deg = t.get_double("path.arc_step_deg", p.arc_step_deg);
  p.texture_contrast = t.get_double("texture.contrast", p.texture_contrast);
  p.texture_feature_size =
      t.get_double("texture.feature_size", p.texture_feature_size);
  p.texture_dot_period =
      t.get_double("texture.dot_period", p.texture_dot_period);
  p.scene_tiles = static_cast<int>(t.get_int("scene.tiles", p.scene_tiles));
  p.tile_height_min = t.get_double("scene.tile_height_min", p.tile_height_min);
  p.tile_height_max = t.get_double("scene.tile_height_max", p.tile_height_max);
  return p;
}

}  // namespace uwvo
