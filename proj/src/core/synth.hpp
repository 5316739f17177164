#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flow.hpp"
#include "geometry.hpp"
#include "imaging.hpp"
#include "trajectory.hpp"

namespace uwvo {

// Procedural textured plane. Texture is seeded value noise with a regular
// grid of dark dots (keeps a near-zero dark channel in every patch) so the
// dark-channel estimators behave like they do on natural scenes.
struct TexturedPlane {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  uint64_t seed = 1;
  double feature_size = 0.1;   // meters per noise feature
  double contrast = 1.0;       // 0..1 scales texture modulation
  double dot_period = 0.12;    // meters between dark dots
  // Half-extents in plane coordinates; <= 0 means unbounded. Bounded planes
  // act as raised tiles over the base plane.
  double extent_u = -1.0;
  double extent_v = -1.0;

  // In-plane orthonormal basis derived from the normal.
  Eigen::Vector3d basis_u() const;
  Eigen::Vector3d basis_v() const;
  // RGB radiance at in-plane coordinates (u, v).
  void sample(double u, double v, double rgb[3]) const;
};

// Base plane plus raised tiles. A single plane would make the scene purely
// homographic and the essential-matrix problem degenerate; the tiles provide
// the depth structure epipolar estimation needs.
struct Scene {
  std::vector<TexturedPlane> planes;
};

enum class PathKind { Line, Serpentine, Arc };

struct SynthParams {
  std::string name = "custom";
  int width = 320;
  int height = 240;
  int frames = 120;
  double fps = 10.0;
  uint64_t seed = 1;
  CameraIntrinsics intrinsics{260.0, 260.0, 159.5, 119.5};

  PathKind path = PathKind::Serpentine;
  double camera_height = 2.5;      // meters above the plane origin
  double plane_tilt_deg = 25.0;    // tilt about the world x axis
  double advance_per_frame = 0.05; // meters along the sweep axis
  double lateral_amplitude = 0.3;  // serpentine lateral swing, meters
  double serpentine_period = 80.0; // frames per full swing
  double arc_radius = 2.0;         // meters
  double arc_step_deg = 0.5;       // degrees per frame

  double texture_contrast = 1.0;
  double texture_feature_size = 0.1;
  double texture_dot_period = 0.12;  // dark-dot spacing; keep it under the
                                     // dark-channel patch in pixels

  int scene_tiles = 14;              // raised tiles scattered over the sweep
  double tile_height_min = 0.3;      // meters above the base plane
  double tile_height_max = 0.8;

  HazeParams haze{{0.05, 0.05, 0.05}, AmbientLight(0.6, 0.75, 0.85)};
  double noise_sigma = 0.0;  // additive Gaussian before quantization
};

// Everything a desk-scale experiment needs: degraded frames plus the ground
// truth they were generated from.
struct SyntheticDataset {
  SynthParams params;
  std::vector<Image> frames;             // degraded (or clean when beta = 0)
  std::vector<Image> clean_frames;
  std::vector<ScalarGrid> depths;        // z-depth per frame, meters
  std::vector<TransmissionMap> transmission;  // channel-mean ground truth
  std::vector<FlowField> flows;          // frame i -> i+1
  std::vector<Mask> flow_masks;
  Trajectory trajectory;                 // camera-to-world poses
};

Scene make_scene(const SynthParams& params);
std::vector<Pose> make_path(const SynthParams& params);

// Pinhole render of the scene from one camera pose; also returns the z-depth
// map. Throws when a ray fails to hit a plane in front of the camera.
void render_frame(const Scene& scene, const Pose& camera,
                  const CameraIntrinsics& k, int width, int height,
                  Image* frame, ScalarGrid* depth);

// Exact reprojection flow from pose_a to pose_b; pixels that land behind the
// second camera or outside its frame are masked invalid.
FlowField ground_truth_flow(const Pose& pose_a, const Pose& pose_b,
                            const ScalarGrid& depth_a,
                            const CameraIntrinsics& k, Mask* valid = nullptr);

// Applies the per-channel forward model t_c = exp(-beta_c * depth) and
// returns the channel-mean transmission used as single-map ground truth.
Image degrade_frame(const Image& clean, const ScalarGrid& depth,
                    const HazeParams& haze, TransmissionMap* gt_transmission);

// Deterministic additive Gaussian noise (clamped to [0,1]).
void add_noise(Image* frame, double sigma, uint64_t seed);

// In-memory generation; intended for small test-sized datasets.
SyntheticDataset generate_dataset(const SynthParams& params);

// Streams a dataset to disk:
//   frames/%06d.png, depth/%06d.pfm, transmission/%06d.pfm, flow/%06d.flo,
//   groundtruth.tum, manifest.toml
void emit_dataset(const SynthParams& params, const std::string& dir);

// Bundled benchmark presets.
std::vector<std::string> synth_preset_names();
SynthParams synth_preset(const std::string& name);

// Reads back the manifest written by emit_dataset.
SynthParams read_manifest(const std::string& path);

}  // namespace uwvo
