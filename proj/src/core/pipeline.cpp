#include "pipeline.hpp"

#include <atomic>
#include <thread>

#include "image_io.hpp"
#include "rng.hpp"
#include "toml.hpp"

namespace uwvo {

void RunConfig::validate() const {
  intrinsics.validate();
  normalization.validate();  // rejects sigma >= 1 before any frame is touched
  flow.validate();
  if (ransac.iterations < 1 || !(ransac.threshold > 0.0))
    throw InvalidArgumentError("RunConfig: bad RANSAC parameters");
  if (stride < 1) throw InvalidArgumentError("RunConfig: stride must be >= 1");
  if (transmission_patch < 3 || transmission_patch % 2 == 0)
    throw InvalidArgumentError(
        "RunConfig: transmission_patch must be odd and >= 3");
  if (!(fps > 0.0)) throw InvalidArgumentError("RunConfig: fps must be > 0");
  if (workers < 1) throw InvalidArgumentError("RunConfig: workers must be >= 1");
}

RunConfig load_run_config(const std::string& path) {
  toml::Table t = toml::parse_file(path);
  RunConfig c;
  c.intrinsics = CameraIntrinsics(
      t.get_double("intrinsics.fx", c.intrinsics.fx),
      t.get_double("intrinsics.fy", c.intrinsics.fy),
      t.get_double("intrinsics.cx", c.intrinsics.cx),
      t.get_double("intrinsics.cy", c.intrinsics.cy));
  c.normalization.alpha =
      t.get_double("normalization.alpha", c.normalization.alpha);
  c.normalization.beta_bias =
      t.get_double("normalization.beta_bias", c.normalization.beta_bias);
  c.flow.pyramid_levels = static_cast<int>(
      t.get_int("flow.pyramid_levels", c.flow.pyramid_levels));
  c.flow.iterations_per_level = static_cast<int>(
      t.get_int("flow.iterations_per_level", c.flow.iterations_per_level));
  c.flow.window = static_cast<int>(t.get_int("flow.window", c.flow.window));
  c.ransac.iterations = static_cast<int>(
      t.get_int("ransac.iterations", c.ransac.iterations));
  c.ransac.threshold = t.get_double("ransac.threshold", c.ransac.threshold);
  std::string mode = t.get_string("pose.mode", "confidence");
  if (mode == "confidence")
    c.mode = PoseBackend::ConfidenceWeighted;
  else if (mode == "scaled")
    c.mode = PoseBackend::ScaledFlow;
  else
    throw InvalidArgumentError(
        "RunConfig: pose.mode must be \"confidence\" or \"scaled\"");
  c.stride = static_cast<int>(t.get_int("pose.stride", c.stride));
  c.transmission_patch = static_cast<int>(
      t.get_int("transmission.patch", c.transmission_patch));
  c.seed = static_cast<uint64_t>(t.get_int("seed", static_cast<int64_t>(c.seed)));
  c.fps = t.get_double("fps", c.fps);
  c.workers = static_cast<int>(t.get_int("workers", c.workers));
  c.validate();
  return c;
}

PairAnalysis analyze_pair(const Image& frame_a, const Image& frame_b,
                          const RunConfig& config) {
  AmbientLight ambient = estimate_ambient(frame_a);
  AmbientLight safe_ambient(std::max(ambient[0], 1e-3),
                            std::max(ambient[1], 1e-3),
                            std::max(ambient[2], 1e-3));
  TransmissionMap t = estimate_transmission(frame_a, safe_ambient,
                                            config.transmission_patch);
  WeightMap weights =
      normalize_transmission(invert(t), config.normalization);
  FlowField flow = estimate_flow(frame_a, frame_b, config.flow);
  double sigma = weights.sigma();
  return PairAnalysis{std::move(weights), std::move(flow), sigma};
}

RelativeMotion solve_pair(const PairAnalysis& analysis,
                          const RunConfig& config, uint64_t ransac_seed,
                          PairStats* stats) {
  if (stats) {
    stats->sigma = analysis.sigma;
    stats->weight_min = analysis.weights.grid().min_value();
    stats->weight_max = analysis.weights.grid().max_value();
  }
  CorrespondenceSet cs;
  if (config.mode == PoseBackend::ScaledFlow) {
    FlowField weighted = weight_flow(analysis.flow, analysis.weights);
    cs = flow_to_correspondences(weighted, nullptr, config.stride,
                                 config.mode);
  } else {
    cs = flow_to_correspondences(analysis.flow, &analysis.weights,
                                 config.stride, config.mode);
  }
  if (stats) stats->correspondences = static_cast<int>(cs.size());

  RansacParams ransac = config.ransac;
  ransac.seed = ransac_seed;
  EssentialResult er = estimate_essential(cs, config.intrinsics, ransac);
  if (stats)
    stats->inlier_ratio =
        static_cast<double>(er.inlier_count) / static_cast<double>(cs.size());

  CorrespondenceSet inliers;
  inliers.reserve(er.inlier_count);
  for (size_t i = 0; i < cs.size(); ++i)
    if (er.inlier_mask[i]) inliers.push_back(cs[i]);
  return decompose_essential(er.essential, inliers, config.intrinsics);
}

uint64_t pair_seed(uint64_t run_seed, size_t pair_index) {
  return hash_mix(run_seed, 0x5EEDF00Dull + pair_index);
}

RunSummary run_sequence(const std::vector<std::string>& frame_paths,
                        const RunConfig& config) {
  config.validate();
  if (frame_paths.size() < 2)
    throw InvalidArgumentError("run_sequence: need at least 2 frames");

  const size_t n_pairs = frame_paths.size() - 1;
  std::vector<RelativeMotion> motions(n_pairs);
  std::vector<PairStats> stats(n_pairs);
  std::vector<std::exception_ptr> errors(n_pairs);

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n_pairs) return;
      try {
        Image a = load_image(frame_paths[i]);
        Image b = load_image(frame_paths[i + 1]);
        config.intrinsics.validate_for(a.width(), a.height());
        PairAnalysis analysis = analyze_pair(a, b, config);
        try {
          motions[i] = solve_pair(analysis, config,
                                  pair_seed(config.seed, i), &stats[i]);
        } catch (const DegenerateGeometryError&) {
          motions[i] = RelativeMotion::identity();
          stats[i].degenerate = true;
        } catch (const CheiralityError&) {
          motions[i] = RelativeMotion::identity();
          stats[i].degenerate = true;
        }
      } catch (...) {
        errors[i] = std::current_exception();
        return;
      }
    }
  };

  const int n_threads =
      std::max(1, std::min<int>(config.workers, static_cast<int>(n_pairs)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (size_t i = 0; i < n_pairs; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  std::vector<double> timestamps(frame_paths.size());
  for (size_t i = 0; i < timestamps.size(); ++i)
    timestamps[i] = static_cast<double>(i) / config.fps;

  RunSummary summary;
  // Identity fallback for degenerate pairs keeps long sequences alive; the
  // count is surfaced so callers can report it.
  summary.trajectory = compose_trajectory(motions, timestamps);
  summary.pairs = std::move(stats);
  for (const PairStats& p : summary.pairs)
    if (p.degenerate) ++summary.degenerate_pairs;
  return summary;
}

}  // namespace uwvo
