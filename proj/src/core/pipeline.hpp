#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "trajectory.hpp"

namespace uwvo {

// Everything needed to run the VO pipeline over a frame sequence. Loadable
// from a TOML config file; every field has a CLI override.
struct RunConfig {
  CameraIntrinsics intrinsics{260.0, 260.0, 159.5, 119.5};
  NormalizationParams normalization{0.25, 4.0};
  FlowParams flow;
  RansacParams ransac;
  PoseBackend mode = PoseBackend::ConfidenceWeighted;
  int stride = 4;
  int transmission_patch = 15;
  uint64_t seed = 42;
  double fps = 10.0;
  int workers = 1;

  void validate() const;
};

RunConfig load_run_config(const std::string& path);

// Per-pair products that do not depend on the RANSAC seed or backend mode.
struct PairAnalysis {
  WeightMap weights;
  FlowField flow;
  double sigma = 0.0;
};

struct PairStats {
  double sigma = 0.0;
  double weight_min = 0.0;
  double weight_max = 0.0;
  double inlier_ratio = 0.0;
  int correspondences = 0;
  bool degenerate = false;  // motion fell back to identity
};

PairAnalysis analyze_pair(const Image& frame_a, const Image& frame_b,
                          const RunConfig& config);

// Motion from a finished analysis. Throws DegenerateGeometryError /
// CheiralityError for unusable geometry; callers decide the fallback.
RelativeMotion solve_pair(const PairAnalysis& analysis,
                          const RunConfig& config, uint64_t ransac_seed,
                          PairStats* stats = nullptr);

// Seed for pair index i derived from the run seed; independent of worker
// scheduling.
uint64_t pair_seed(uint64_t run_seed, size_t pair_index);

struct RunSummary {
  Trajectory trajectory;
  std::vector<PairStats> pairs;
  size_t degenerate_pairs = 0;
};

// Runs the pipeline over an ordered frame list with `workers` threads.
// Degenerate pairs contribute identity motions; results are byte-identical
// for any worker count.
RunSummary run_sequence(const std::vector<std::string>& frame_paths,
                        const RunConfig& config);

}  // namespace uwvo
