#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace uwvo {

// Nearest-neighbor timestamp association tolerance, in seconds.
constexpr double kAssociationTolerance = 0.02;

struct Pose {
  double timestamp = 0.0;
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

// Ordered pose sequence with strictly increasing timestamps.
class Trajectory {
 public:
  Trajectory() = default;

  void append(Pose pose);
  size_t size() const { return poses_.size(); }
  bool empty() const { return poses_.empty(); }
  const Pose& operator[](size_t i) const { return poses_[i]; }
  const std::vector<Pose>& poses() const { return poses_; }

  auto begin() const { return poses_.begin(); }
  auto end() const { return poses_.end(); }

 private:
  std::vector<Pose> poses_;
};

// Least-squares similarity mapping estimate positions onto the reference:
// p_ref ~= scale * rotation * p_est + translation.
struct AlignmentResult {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return scale * (rotation * p) + translation;
  }
};

struct MetricsReport {
  double ate_rmse = 0.0;
  double rte_rmse = 0.0;
  double length = 0.0;
  size_t pose_count = 0;
};

// Index pairs (estimate, reference) associated by nearest timestamp within
// kAssociationTolerance; unmatched poses are dropped and counted.
struct Association {
  std::vector<std::pair<size_t, size_t>> pairs;
  size_t dropped_estimate = 0;
  size_t dropped_reference = 0;
};

Association associate(const Trajectory& estimate, const Trajectory& reference,
                      double tolerance = kAssociationTolerance);

// Chains relative motions into absolute poses: pose_0 = identity at the first
// timestamp, each unit translation applied at step length 1.
Trajectory compose_trajectory(const std::vector<RelativeMotion>& motions,
                              const std::vector<double>& timestamps);

AlignmentResult umeyama_align(const Trajectory& estimate,
                              const Trajectory& reference, bool with_scale);

// RMSE of positional residuals, after similarity alignment when align is set.
double ate(const Trajectory& estimate, const Trajectory& reference,
           bool align);

// For every start index, rigidly aligns the delta_frames-long sub-trajectory
// by its first pose and measures the endpoint error; returns the RMSE.
double rte(const Trajectory& estimate, const Trajectory& reference,
           int delta_frames);

// Sum of consecutive position distances.
double trajectory_length(const Trajectory& t);

// TUM interchange format: "timestamp tx ty tz qx qy qz qw" per line,
// '#' starts a comment. Roundtrip is lossless (shortest exact decimal).
Trajectory load_tum(const std::string& path);
void save_tum(const Trajectory& t, const std::string& path);

// Applies a similarity transform to every pose (positions transformed,
// rotations left-multiplied, timestamps kept).
Trajectory transform_trajectory(const Trajectory& t,
                                const AlignmentResult& alignment);

}  // namespace uwvo
