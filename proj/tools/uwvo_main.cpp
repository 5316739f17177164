// uwvo command-line front end. Talks to the library exclusively through the
// C API in uwvo/uwvo.h; everything here is argument handling, file listing
// and report formatting.

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "svg.hpp"
#include "uwvo/uwvo.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitInternal = 2;

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("UWVO_LOG");
  if (!env) return LogLevel::Info;
  std::string v = env;
  if (v == "quiet" || v == "0") return LogLevel::Quiet;
  if (v == "debug" || v == "2") return LogLevel::Debug;
  return LogLevel::Info;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << msg << "\n";
}
void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << msg << "\n";
}

// Failure helper: prints the library's error message and picks the exit code.
int report_failure(const std::string& what, uwvo_status status) {
  std::cerr << "error: " << what << ": " << uwvo_status_name(status);
  const char* detail = uwvo_last_error();
  if (detail && *detail) std::cerr << " (" << detail << ")";
  std::cerr << "\n";
  return status == UWVO_ERROR_INTERNAL ? kExitInternal : kExitBadInput;
}

#define UWVO_TRY(what, call)                          \
  do {                                                \
    uwvo_status status_ = (call);                     \
    if (status_ != UWVO_OK) return report_failure(what, status_); \
  } while (0)

// Shortest exact decimal; keeps CSV output bit-stable.
std::string format_exact(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double v, int digits) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

// Frames of a sequence directory in lexicographic order. Accepts either the
// directory itself or a dataset root with a frames/ subdirectory.
std::vector<std::string> list_frames(const std::string& dir) {
  fs::path root = dir;
  if (fs::is_directory(root / "frames")) root /= "frames";
  if (!fs::is_directory(root)) return {};
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_regular_file() && has_image_extension(entry.path()))
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  return paths;
}

struct ConfigOverrides {
  std::optional<double> alpha, beta_bias, fps;
  std::optional<uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> workers, stride, delta_frames;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Weight-range spread");
    cmd->add_option("--beta-bias", beta_bias,
                    "Suppress/emphasize bias (must exceed alpha)");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--mode", mode, "Weighting backend: scaled|confidence")
        ->check(CLI::IsMember({"scaled", "confidence"}));
    cmd->add_option("--workers", workers, "Worker threads");
    cmd->add_option("--stride", stride, "Correspondence sampling stride");
    cmd->add_option("--fps", fps, "Frame rate used for timestamps");
  }

  void apply(uwvo_run_config* config) const {
    if (alpha) config->alpha = *alpha;
    if (beta_bias) config->beta_bias = *beta_bias;
    if (seed) config->seed = *seed;
    if (fps) config->fps = *fps;
    if (workers) config->workers = *workers;
    if (stride) config->stride = *stride;
    if (mode)
      config->mode = *mode == "scaled" ? UWVO_MODE_SCALED_FLOW
                                       : UWVO_MODE_CONFIDENCE_WEIGHTED;
  }
};

// Layered config: defaults <- dataset manifest (intrinsics/fps) <- config
// file <- command-line flags.
int build_config(const std::string& frames_dir, const std::string& config_path,
                 const ConfigOverrides& overrides, uwvo_run_config* config) {
  *config = uwvo_run_config_default();
  fs::path manifest = fs::path(frames_dir) / "manifest.toml";
  if (config_path.empty() && fs::exists(manifest)) {
    uwvo_synth_params params;
    UWVO_TRY("reading manifest", uwvo_read_manifest(
        manifest.string().c_str(), &params));
    config->fx = params.fx;
    config->fy = params.fy;
    config->cx = params.cx;
    config->cy = params.cy;
    config->fps = params.fps;
    log_debug("intrinsics and fps taken from " + manifest.string());
  }
  if (!config_path.empty())
    UWVO_TRY("loading config", uwvo_run_config_load(config_path.c_str(),
                                                    config));
  overrides.apply(config);
  return kExitOk;
}

struct TrajectoryHandle {
  uwvo_trajectory* ptr = nullptr;
  ~TrajectoryHandle() {
    if (ptr) uwvo_trajectory_destroy(ptr);
  }
};

struct Row {
  std::string name;
  uwvo_metrics metrics;
};

// ---- run --------------------------------------------------------------

int cmd_run(const std::string& frames_dir, const std::string& config_path,
            const std::string& out_path, std::string log_path,
            const ConfigOverrides& overrides) {
  uwvo_run_config config;
  int rc = build_config(frames_dir, config_path, overrides, &config);
  if (rc != kExitOk) return rc;

  std::vector<std::string> frames = list_frames(frames_dir);
  if (frames.size() < 2) {
    std::cerr << "error: need at least 2 frames in " << frames_dir << "\n";
    return kExitBadInput;
  }
  std::vector<const char*> cpaths;
  cpaths.reserve(frames.size());
  for (const auto& f : frames) cpaths.push_back(f.c_str());

  std::vector<uwvo_pair_stats> stats(frames.size() - 1);
  TrajectoryHandle traj;
  UWVO_TRY("running sequence",
           uwvo_run_sequence(&config, cpaths.data(), cpaths.size(), &traj.ptr,
                             stats.data()));
  UWVO_TRY("writing trajectory",
           uwvo_trajectory_save_tum(traj.ptr, out_path.c_str()));

  if (log_path.empty()) log_path = out_path + ".log";
  {
    std::ofstream log(log_path, std::ios::binary);
    if (!log) {
      std::cerr << "error: cannot open log file " << log_path << "\n";
      return kExitBadInput;
    }
    log << "# pair inlier_ratio sigma weight_min weight_max correspondences "
           "status\n";
    for (size_t i = 0; i < stats.size(); ++i) {
      log << i << ' ' << format_exact(stats[i].inlier_ratio) << ' '
          << format_exact(stats[i].sigma) << ' '
          << format_exact(stats[i].weight_min) << ' '
          << format_exact(stats[i].weight_max) << ' '
          << stats[i].correspondences << ' '
          << (stats[i].degenerate ? "degenerate" : "ok") << '\n';
    }
  }

  size_t degenerate = 0;
  double inlier_sum = 0.0;
  for (const auto& s : stats) {
    degenerate += s.degenerate ? 1 : 0;
    inlier_sum += s.inlier_ratio;
  }
  log_info("poses: " + std::to_string(frames.size()) +
           ", degenerate pairs: " + std::to_string(degenerate) +
           ", mean inlier ratio: " +
           format_fixed(inlier_sum / stats.size(), 3));
  log_info("trajectory written to " + out_path);
  return kExitOk;
}

// ---- eval --------------------------------------------------------------

int plot_trajectories(const std::string& plot_dir,
                      const uwvo_trajectory* reference,
                      const std::vector<std::string>& names,
                      const std::vector<uwvo_trajectory*>& estimates) {
  fs::create_directories(plot_dir);
  auto pull = [](const uwvo_trajectory* t, int axis, std::vector<double>* xs,
                 std::vector<double>* ys, bool time_axis) {
    size_t n = uwvo_trajectory_size(t);
    for (size_t i = 0; i < n; ++i) {
      double ts, pos[3], q[4];
      uwvo_trajectory_pose(t, i, &ts, pos, q);
      xs->push_back(time_axis ? ts : pos[0]);
      ys->push_back(pos[axis]);
    }
  };

  uwvo_cli::SvgPlot xy(640, 480, "Trajectory (x-y plane)", "x (m)", "y (m)");
  {
    uwvo_cli::Series ref{"reference", "#555555", {}, {}};
    pull(reference, 1, &ref.x, &ref.y, false);
    xy.add(std::move(ref));
  }
  for (size_t i = 0; i < estimates.size(); ++i) {
    uwvo_cli::Series s{names[i], uwvo_cli::series_color(i), {}, {}};
    pull(estimates[i], 1, &s.x, &s.y, false);
    xy.add(std::move(s));
  }
  xy.write(plot_dir + "/trajectory_xy.svg");

  const char* axis_names[3] = {"x (m)", "y (m)", "z (m)"};
  const char* axis_files[3] = {"/trajectory_x.svg", "/trajectory_y.svg",
                               "/trajectory_z.svg"};
  for (int axis = 0; axis < 3; ++axis) {
    uwvo_cli::SvgPlot plot(640, 300,
                           std::string("Trajectory ") + axis_names[axis],
                           "t (s)", axis_names[axis]);
    uwvo_cli::Series ref{"reference", "#555555", {}, {}};
    pull(reference, axis, &ref.x, &ref.y, true);
    plot.add(std::move(ref));
    for (size_t i = 0; i < estimates.size(); ++i) {
      uwvo_cli::Series s{names[i], uwvo_cli::series_color(i), {}, {}};
      pull(estimates[i], axis, &s.x, &s.y, true);
      plot.add(std::move(s));
    }
    plot.write(plot_dir + axis_files[axis]);
  }
  return kExitOk;
}

int cmd_eval(const std::vector<std::string>& estimate_paths,
             const std::string& ref_path, int delta_frames, bool align,
             const std::string& csv_path, const std::string& plot_dir) {
  TrajectoryHandle reference;
  UWVO_TRY("loading reference",
           uwvo_trajectory_load_tum(ref_path.c_str(), &reference.ptr));

  std::vector<Row> rows;
  std::vector<TrajectoryHandle> kept;  // owns the (aligned) estimates
  std::vector<uwvo_trajectory*> for_plot;
  std::vector<std::string> names;

  for (const auto& path : estimate_paths) {
    TrajectoryHandle est;
    UWVO_TRY("loading estimate " + path,
             uwvo_trajectory_load_tum(path.c_str(), &est.ptr));

    size_t matched = 0;
    UWVO_TRY("associating timestamps",
             uwvo_associated_count(est.ptr, reference.ptr, &matched));
    size_t est_size = uwvo_trajectory_size(est.ptr);
    if (matched * 2 < est_size) {
      std::cerr << "error: only " << matched << " of " << est_size
                << " poses of " << path
                << " associate with the reference (need at least 50%)\n";
      return kExitBadInput;
    }
    if (matched < est_size)
      log_info("warning: " + std::to_string(est_size - matched) +
               " unmatched poses dropped from " + path);

    TrajectoryHandle aligned;
    uwvo_trajectory* scored = est.ptr;
    if (align) {
      double scale, r[9], t[3];
      UWVO_TRY("aligning " + path,
               uwvo_umeyama_align(est.ptr, reference.ptr, 1, &scale, r, t));
      UWVO_TRY("transforming " + path,
               uwvo_trajectory_transform(est.ptr, scale, r, t, &aligned.ptr));
      scored = aligned.ptr;
    }

    Row row;
    row.name = fs::path(path).filename().string();
    UWVO_TRY("evaluating " + path,
             uwvo_evaluate(scored, reference.ptr, delta_frames, 0,
                           &row.metrics));
    rows.push_back(row);
    names.push_back(row.name);

    // Keep the scored trajectory alive for plotting.
    kept.emplace_back();
    if (align) {
      kept.back().ptr = aligned.ptr;
      aligned.ptr = nullptr;
    } else {
      kept.back().ptr = est.ptr;
      est.ptr = nullptr;
    }
    for_plot.push_back(kept.back().ptr);
  }

  // Text table.
  std::cout << std::left << std::setw(28) << "name" << std::right
            << std::setw(12) << "length_m" << std::setw(8) << "poses"
            << std::setw(12) << "ate_m" << std::setw(12) << "rte_m" << "\n";
  for (const auto& row : rows)
    std::cout << std::left << std::setw(28) << row.name << std::right
              << std::setw(12) << format_fixed(row.metrics.length, 3)
              << std::setw(8) << row.metrics.pose_count << std::setw(12)
              << format_fixed(row.metrics.ate_rmse, 4) << std::setw(12)
              << format_fixed(row.metrics.rte_rmse, 4) << "\n";

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
      std::cerr << "error: cannot open " << csv_path << "\n";
      return kExitBadInput;
    }
    csv << "name,length_m,poses,ate_m,rte_m\n";
    for (const auto& row : rows)
      csv << row.name << ',' << format_exact(row.metrics.length) << ','
          << row.metrics.pose_count << ','
          << format_exact(row.metrics.ate_rmse) << ','
          << format_exact(row.metrics.rte_rmse) << '\n';
  }

  if (!plot_dir.empty())
    return plot_trajectories(plot_dir, reference.ptr, names, for_plot);
  return kExitOk;
}

// ---- synth --------------------------------------------------------------

std::string preset_list() {
  std::string out;
  for (int i = 0; i < uwvo_synth_preset_count(); ++i) {
    if (i) out += ", ";
    out += uwvo_synth_preset_name(i);
  }
  return out;
}

int cmd_synth(const std::string& preset, const std::string& out_dir,
              std::optional<uint64_t> seed) {
  uwvo_synth_params params;
  if (uwvo_synth_preset(preset.c_str(), &params) != UWVO_OK) {
    std::cerr << "error: unknown preset '" << preset
              << "'; available: " << preset_list() << "\n";
    return kExitBadInput;
  }
  if (seed) params.seed = *seed;
  UWVO_TRY("generating dataset", uwvo_synth_emit(&params, out_dir.c_str()));
  log_info("dataset '" + preset + "' written to " + out_dir + " (" +
           std::to_string(params.frames) + " frames)");
  return kExitOk;
}

// ---- degrade --------------------------------------------------------------

struct MapHandle {
  uwvo_map* ptr = nullptr;
  ~MapHandle() {
    if (ptr) uwvo_map_destroy(ptr);
  }
};
struct ImageHandle {
  uwvo_image* ptr = nullptr;
  ~ImageHandle() {
    if (ptr) uwvo_image_destroy(ptr);
  }
};

int cmd_degrade(const std::string& frames_dir, const std::string& out_dir,
                const std::string& depth_dir, double uniform_depth,
                std::vector<double> beta, std::vector<double> ambient) {
  if (depth_dir.empty() && !(uniform_depth > 0.0)) {
    std::cerr << "error: provide --depth-dir or --uniform-depth\n";
    return kExitBadInput;
  }
  std::vector<std::string> frames = list_frames(frames_dir);
  if (frames.empty()) {
    std::cerr << "error: no frames found in " << frames_dir << "\n";
    return kExitBadInput;
  }
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/transmission");

  for (const auto& frame_path : frames) {
    ImageHandle img;
    UWVO_TRY("loading " + frame_path,
             uwvo_image_load(frame_path.c_str(), &img.ptr));

    MapHandle depth;
    if (!depth_dir.empty()) {
      fs::path depth_path =
          fs::path(depth_dir) / (fs::path(frame_path).stem().string() +
                                 ".pfm");
      if (!fs::exists(depth_path)) {
        std::cerr << "error: missing depth map " << depth_path.string()
                  << "\n";
        return kExitBadInput;
      }
      UWVO_TRY("loading depth",
               uwvo_map_load_pfm(depth_path.string().c_str(), &depth.ptr));
    }
    // With --uniform-depth there is no map handle; the constant-transmission
    // forward model is applied per channel below.

    ImageHandle degraded;
    MapHandle tmap;
    if (depth.ptr) {
      UWVO_TRY("degrading " + frame_path,
               uwvo_degrade_with_depth(img.ptr, depth.ptr, beta.data(),
                                       ambient.data(), &degraded.ptr,
                                       &tmap.ptr));
    } else {
      // Uniform depth: t_c = exp(-beta_c * d) is constant; apply the shared
      // forward model channel by channel through pixel accessors.
      double t_c[3];
      for (int c = 0; c < 3; ++c) t_c[c] = std::exp(-beta[c] * uniform_depth);
      int w = uwvo_image_width(img.ptr), h = uwvo_image_height(img.ptr);
      UWVO_TRY("allocating", uwvo_image_create(w, h, &degraded.ptr));
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double rgb[3];
          uwvo_image_get_pixel(img.ptr, x, y, rgb);
          for (int c = 0; c < 3; ++c)
            rgb[c] = rgb[c] * t_c[c] + ambient[c] * (1.0 - t_c[c]);
          uwvo_image_set_pixel(degraded.ptr, x, y, rgb);
        }
    }

    fs::path name = fs::path(frame_path).filename();
    UWVO_TRY("saving frame",
             uwvo_image_save(degraded.ptr,
                             (fs::path(out_dir) / name).string().c_str()));
    if (tmap.ptr) {
      fs::path tname = fs::path(out_dir) / "transmission" /
                       (fs::path(frame_path).stem().string() + ".pfm");
      UWVO_TRY("saving transmission",
               uwvo_map_save_pfm(tmap.ptr, tname.string().c_str()));
    }
  }
  log_info("degraded " + std::to_string(frames.size()) + " frames into " +
           out_dir);
  return kExitOk;
}

// ---- flow-debug -----------------------------------------------------------

int save_map_png(const uwvo_map* map, const std::string& path) {
  int w = uwvo_map_width(map), h = uwvo_map_height(map);
  double lo, hi;
  UWVO_TRY("map stats", uwvo_map_stats(map, &lo, &hi, nullptr));
  double span = hi > lo ? hi - lo : 1.0;
  ImageHandle img;
  UWVO_TRY("allocating", uwvo_image_create(w, h, &img.ptr));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double v;
      uwvo_map_get(map, x, y, &v);
      double g = (v - lo) / span;
      double rgb[3] = {g, g, g};
      uwvo_image_set_pixel(img.ptr, x, y, rgb);
    }
  UWVO_TRY("saving " + path, uwvo_image_save(img.ptr, path.c_str()));
  return kExitOk;
}

int cmd_flow_debug(const std::string& frame_a_path,
                   const std::string& frame_b_path, const std::string& out_dir,
                   const std::string& config_path,
                   const ConfigOverrides& overrides,
                   const std::string& gt_flow_path, int epe_border) {
  uwvo_run_config config;
  int rc = build_config("", config_path, overrides, &config);
  if (rc != kExitOk) return rc;

  ImageHandle a, b;
  UWVO_TRY("loading " + frame_a_path,
           uwvo_image_load(frame_a_path.c_str(), &a.ptr));
  UWVO_TRY("loading " + frame_b_path,
           uwvo_image_load(frame_b_path.c_str(), &b.ptr));
  fs::create_directories(out_dir);

  // Transmission weights from the first frame.
  double ambient[3];
  UWVO_TRY("estimating ambient", uwvo_estimate_ambient(a.ptr, ambient));
  for (int c = 0; c < 3; ++c) ambient[c] = std::max(ambient[c], 1e-3);
  MapHandle transmission, inverse, weights;
  UWVO_TRY("estimating transmission",
           uwvo_estimate_transmission(a.ptr, ambient,
                                      config.transmission_patch,
                                      &transmission.ptr));
  UWVO_TRY("inverting", uwvo_transmission_invert(transmission.ptr,
                                                 &inverse.ptr));
  double sigma = 0.0;
  UWVO_TRY("normalizing",
           uwvo_normalize_transmission(inverse.ptr, config.alpha,
                                       config.beta_bias, &weights.ptr,
                                       &sigma));

  struct FlowHandle {
    uwvo_flow* ptr = nullptr;
    ~FlowHandle() {
      if (ptr) uwvo_flow_destroy(ptr);
    }
  } flow, weighted;
  UWVO_TRY("estimating flow",
           uwvo_estimate_flow(a.ptr, b.ptr, config.pyramid_levels,
                              config.iterations_per_level, config.window,
                              &flow.ptr));
  UWVO_TRY("weighting flow",
           uwvo_weight_flow(flow.ptr, weights.ptr, &weighted.ptr));

  // Shared color scale so the F and wF panels are comparable.
  double max_mag = 0.0;
  int w = uwvo_flow_width(flow.ptr), h = uwvo_flow_height(flow.ptr);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double u, v;
      uwvo_flow_get(flow.ptr, x, y, &u, &v);
      max_mag = std::max(max_mag, std::hypot(u, v));
      uwvo_flow_get(weighted.ptr, x, y, &u, &v);
      max_mag = std::max(max_mag, std::hypot(u, v));
    }
  if (max_mag <= 0.0) max_mag = 1.0;

  UWVO_TRY("saving flow", uwvo_flow_save(flow.ptr,
                                         (out_dir + "/flow.flo").c_str()));
  UWVO_TRY("saving weighted flow",
           uwvo_flow_save(weighted.ptr,
                          (out_dir + "/flow_weighted.flo").c_str()));
  UWVO_TRY("saving weights",
           uwvo_map_save_pfm(weights.ptr, (out_dir + "/weights.pfm").c_str()));
  UWVO_TRY("saving weight preview",
           uwvo_map_save_pgm(weights.ptr, (out_dir + "/weights.pgm").c_str()));

  // Four-panel artifacts: input, T_norm, F, wF.
  UWVO_TRY("saving input panel",
           uwvo_image_save(a.ptr, (out_dir + "/panel_input.png").c_str()));
  rc = save_map_png(weights.ptr, out_dir + "/panel_tnorm.png");
  if (rc != kExitOk) return rc;
  ImageHandle flow_vis, wflow_vis;
  UWVO_TRY("colorizing flow",
           uwvo_flow_colorize(flow.ptr, max_mag, &flow_vis.ptr));
  UWVO_TRY("colorizing weighted flow",
           uwvo_flow_colorize(weighted.ptr, max_mag, &wflow_vis.ptr));
  UWVO_TRY("saving flow panel",
           uwvo_image_save(flow_vis.ptr,
                           (out_dir + "/panel_flow.png").c_str()));
  UWVO_TRY("saving weighted panel",
           uwvo_image_save(wflow_vis.ptr,
                           (out_dir + "/panel_flow_weighted.png").c_str()));

  double lo, hi;
  UWVO_TRY("weight stats", uwvo_map_stats(weights.ptr, &lo, &hi, nullptr));
  std::cout << "sigma " << format_exact(sigma) << "\n";
  std::cout << "weights [" << format_exact(lo) << ", " << format_exact(hi)
            << "]\n";

  if (!gt_flow_path.empty()) {
    FlowHandle gt;
    UWVO_TRY("loading ground-truth flow",
             uwvo_flow_load(gt_flow_path.c_str(), &gt.ptr));
    double epe;
    UWVO_TRY("computing EPE",
             uwvo_flow_epe(flow.ptr, gt.ptr, epe_border, &epe));
    std::cout << "epe " << format_exact(epe) << "\n";
  }
  log_info("flow debug artifacts written to " + out_dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uwvo - attenuation-aware monocular visual odometry"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Estimate a trajectory from frames");
  std::string run_frames, run_config, run_out = "trajectory.tum", run_log;
  ConfigOverrides run_over;
  run->add_option("--frames", run_frames, "Frame directory")->required();
  run->add_option("--config", run_config, "TOML config file");
  run->add_option("--out", run_out, "Output TUM trajectory");
  run->add_option("--log", run_log, "Per-pair log file (default <out>.log)");
  run_over.add_flags(run);

  // eval
  auto* eval = app.add_subcommand("eval", "Score trajectories against a reference");
  std::vector<std::string> eval_estimates;
  std::string eval_ref, eval_csv, eval_plots;
  int eval_delta = 50;
  bool eval_no_align = false;
  eval->add_option("estimates", eval_estimates, "Estimated TUM files")
      ->required();
  eval->add_option("--ref", eval_ref, "Reference TUM file")->required();
  eval->add_option("--delta-frames", eval_delta, "RTE window length");
  eval->add_flag("--no-align", eval_no_align,
                 "Skip similarity alignment before scoring");
  eval->add_option("--csv", eval_csv, "Write CSV table here");
  eval->add_option("--plot-dir", eval_plots, "Write SVG plots here");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string synth_preset_name, synth_out;
  std::optional<uint64_t> synth_seed;
  synth->add_option("--preset", synth_preset_name,
                    "Preset name (see error message for the list)")
      ->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override the preset seed");

  // degrade
  auto* degrade = app.add_subcommand("degrade",
                                     "Apply the underwater forward model");
  std::string deg_frames, deg_out, deg_depth;
  double deg_uniform = 0.0;
  std::vector<double> deg_beta{0.3, 0.3, 0.3};
  std::vector<double> deg_ambient{0.6, 0.75, 0.85};
  degrade->add_option("--frames", deg_frames, "Input frame directory")
      ->required();
  degrade->add_option("--out", deg_out, "Output directory")->required();
  degrade->add_option("--depth-dir", deg_depth,
                      "Per-frame depth PFMs (stem-matched)");
  degrade->add_option("--uniform-depth", deg_uniform,
                      "Constant depth in meters");
  degrade->add_option("--beta", deg_beta, "Attenuation per channel (1/m)")
      ->expected(3);
  degrade->add_option("--ambient", deg_ambient, "Ambient light per channel")
      ->expected(3);

  // flow-debug
  auto* fdebug = app.add_subcommand("flow-debug",
                                    "Dump flow and weighting artifacts");
  std::string fd_a, fd_b, fd_out = "flow_debug", fd_config, fd_gt;
  int fd_border = 8;
  ConfigOverrides fd_over;
  fdebug->add_option("frame_a", fd_a, "First frame")->required();
  fdebug->add_option("frame_b", fd_b, "Second frame")->required();
  fdebug->add_option("--out", fd_out, "Output directory");
  fdebug->add_option("--config", fd_config, "TOML config file");
  fdebug->add_option("--gt-flow", fd_gt, "Ground-truth .flo for EPE");
  fdebug->add_option("--epe-border", fd_border, "Border excluded from EPE");
  fd_over.add_flags(fdebug);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (run->parsed())
      return cmd_run(run_frames, run_config, run_out, run_log, run_over);
    if (eval->parsed())
      return cmd_eval(eval_estimates, eval_ref, eval_delta, !eval_no_align,
                      eval_csv, eval_plots);
    if (synth->parsed())
      return cmd_synth(synth_preset_name, synth_out, synth_seed);
    if (degrade->parsed())
      return cmd_degrade(deg_frames, deg_out, deg_depth, deg_uniform,
                         deg_beta, deg_ambient);
    if (fdebug->parsed())
      return cmd_flow_debug(fd_a, fd_b, fd_out, fd_config, fd_over, fd_gt,
                            fd_border);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitBadInput;
}
