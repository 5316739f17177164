#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>
#include <vector>

#include "flow.hpp"
#include "imaging.hpp"

namespace uwvo {

struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx_, double fy_, double cx_, double cy_);
  void validate() const;
  // Additionally checks that the principal point lies inside the image.
  void validate_for(int width, int height) const;

  Eigen::Vector2d normalize(const Eigen::Vector2d& pixel) const {
    return {(pixel.x() - cx) / fx, (pixel.y() - cy) / fy};
  }
  Eigen::Vector2d project(const Eigen::Vector3d& p_cam) const {
    return {fx * p_cam.x() / p_cam.z() + cx, fy * p_cam.y() / p_cam.z() + cy};
  }
};

struct Correspondence {
  Eigen::Vector2d x1;  // pixel in frame t
  Eigen::Vector2d x2;  // pixel in frame t+1
  double weight = 1.0;
};

using CorrespondenceSet = std::vector<Correspondence>;

// How the transmission weights enter motion recovery. ScaledFlow multiplies
// the flow vectors themselves; ConfidenceWeighted keeps the flow intact and
// uses the weights as per-correspondence confidences in the solver.
enum class PoseBackend { ScaledFlow, ConfidenceWeighted };

struct RansacParams {
  int iterations = 1000;
  double threshold = 2e-4;  // Sampson error in normalized coordinates
  uint64_t seed = 42;
};

// Relative motion between consecutive frames: the pose of camera t+1
// expressed in camera t's frame. rotation is unit, translation is a unit
// direction (monocular scale fixed to 1). identity() is the no-motion
// fallback with zero translation, used when a pair cannot be solved.
struct RelativeMotion {
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RelativeMotion identity();
  RelativeMotion inverse() const;
  // Checks the estimation-output invariants (unit quaternion, unit
  // translation).
  void validate() const;
};

struct EssentialResult {
  Eigen::Matrix3d essential;
  std::vector<uint8_t> inlier_mask;
  size_t inlier_count = 0;
};

// Grid-samples the flow into point correspondences. In ScaledFlow mode the
// (optionally pre-weighted) flow is applied directly and weights are 1; in
// ConfidenceWeighted mode the raw flow is applied and the weight map value is
// attached. Out-of-bounds endpoints are discarded; fewer than 8 survivors is
// an error.
CorrespondenceSet flow_to_correspondences(const FlowField& flow,
                                          const WeightMap* weights, int stride,
                                          PoseBackend mode);

// Weighted normalized eight-point solve inside a seeded RANSAC loop scored by
// Sampson distance; the final model is refit on all inliers and projected to
// singular values (1, 1, 0).
EssentialResult estimate_essential(const CorrespondenceSet& cs,
                                   const CameraIntrinsics& k,
                                   const RansacParams& ransac);

// Picks the (R, t) candidate with the most points of positive depth in both
// views (midpoint triangulation); throws CheiralityError when no candidate
// exceeds 50%.
RelativeMotion decompose_essential(const Eigen::Matrix3d& essential,
                                   const CorrespondenceSet& cs,
                                   const CameraIntrinsics& k);

// Sampson error of one correspondence in normalized coordinates.
double sampson_error(const Eigen::Matrix3d& essential,
                     const Eigen::Vector2d& x1n, const Eigen::Vector2d& x2n);

// Full single-pair pipeline: transmission -> inverse -> normalization ->
// flow -> weighting (per mode) -> correspondences -> essential -> motion.
RelativeMotion recover_motion(const Image& frame_a, const Image& frame_b,
                              const CameraIntrinsics& k,
                              const NormalizationParams& normalization,
                              const FlowParams& flow_params,
                              const RansacParams& ransac, PoseBackend mode,
                              int stride = 4, int transmission_patch = 15);

}  // namespace uwvo
