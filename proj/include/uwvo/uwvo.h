/* uwvo - attenuation-aware monocular visual odometry for underwater imagery.
 *
 * C interface of the shared library. All objects are opaque handles created
 * and destroyed through these functions; every fallible call returns a
 * uwvo_status and leaves a human-readable message in uwvo_last_error()
 * (thread-local) on failure. Out-parameters are written only on UWVO_OK.
 *
 * Conventions:
 *   - images are RGB with values in [0, 1]; 8-bit files are divided by 255
 *   - scalar maps (transmission, weights, depth) are W x H doubles
 *   - flow fields store (u, v) pixel displacements, u right, v down
 *   - quaternions are passed as [qx, qy, qz, qw]
 *   - rotation matrices are row-major double[9]
 */
#ifndef UWVO_H
#define UWVO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UWVO_API __declspec(dllexport)
#else
#define UWVO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uwvo_status {
  UWVO_OK = 0,
  UWVO_ERROR_INVALID_ARGUMENT = 1,
  UWVO_ERROR_SHAPE_MISMATCH = 2,
  UWVO_ERROR_DEGENERATE_GEOMETRY = 3,
  UWVO_ERROR_CHEIRALITY = 4,
  UWVO_ERROR_PARSE = 5,
  UWVO_ERROR_IO = 6,
  UWVO_ERROR_INTERNAL = 7
} uwvo_status;

typedef struct uwvo_image uwvo_image;
typedef struct uwvo_map uwvo_map;            /* scalar map */
typedef struct uwvo_flow uwvo_flow;          /* dense flow field */
typedef struct uwvo_correspondences uwvo_correspondences;
typedef struct uwvo_trajectory uwvo_trajectory;

/* Weighting backends for motion recovery. */
#define UWVO_MODE_SCALED_FLOW 0
#define UWVO_MODE_CONFIDENCE_WEIGHTED 1

typedef struct uwvo_motion {
  double qx, qy, qz, qw; /* rotation: pose of frame t+1 in frame t */
  double tx, ty, tz;     /* unit translation direction (0 for identity) */
} uwvo_motion;

typedef struct uwvo_pair_stats {
  double sigma;        /* weight normalization offset */
  double weight_min;
  double weight_max;
  double inlier_ratio;
  int32_t correspondences;
  int32_t degenerate;  /* nonzero when the pair fell back to identity */
} uwvo_pair_stats;

typedef struct uwvo_run_config {
  double fx, fy, cx, cy;          /* pinhole intrinsics, pixels */
  double alpha;                   /* weight-range spread */
  double beta_bias;               /* suppress/emphasize bias, > alpha */
  int32_t pyramid_levels;
  int32_t iterations_per_level;
  int32_t window;                 /* odd, >= 5 */
  int32_t ransac_iterations;
  double ransac_threshold;        /* Sampson error, normalized coords */
  int32_t mode;                   /* UWVO_MODE_* */
  int32_t stride;                 /* correspondence sampling stride */
  int32_t transmission_patch;     /* dark-channel window, odd */
  uint64_t seed;
  double fps;                     /* frame timestamps = index / fps */
  int32_t workers;                /* worker threads for sequence runs */
} uwvo_run_config;

typedef struct uwvo_metrics {
  double ate_rmse;
  double rte_rmse;
  double length;
  uint64_t pose_count;
} uwvo_metrics;

typedef struct uwvo_synth_params {
  const char* name;
  int32_t width, height, frames;
  double fps;
  uint64_t seed;
  double fx, fy, cx, cy;
  int32_t path_kind;              /* 0 line, 1 serpentine, 2 arc */
  double camera_height;
  double plane_tilt_deg;
  double advance_per_frame;
  double lateral_amplitude;
  double serpentine_period;
  double arc_radius;
  double arc_step_deg;
  double texture_contrast;
  double texture_feature_size;
  double texture_dot_period;
  int32_t scene_tiles;            /* raised tiles; 0 gives a single plane */
  double tile_height_min;
  double tile_height_max;
  double beta[3];
  double ambient[3];
  double noise_sigma;
} uwvo_synth_params;

UWVO_API const char* uwvo_version(void);
UWVO_API const char* uwvo_status_name(uwvo_status status);
/* Message of the last failure on this thread; empty string if none. */
UWVO_API const char* uwvo_last_error(void);

/* ---- images ------------------------------------------------------------ */

UWVO_API uwvo_status uwvo_image_create(int32_t width, int32_t height,
                                       uwvo_image** out);
UWVO_API uwvo_status uwvo_image_load(const char* path, uwvo_image** out);
/* Format by extension: .png, .ppm, .pgm. */
UWVO_API uwvo_status uwvo_image_save(const uwvo_image* img, const char* path);
UWVO_API void uwvo_image_destroy(uwvo_image* img);
UWVO_API int32_t uwvo_image_width(const uwvo_image* img);
UWVO_API int32_t uwvo_image_height(const uwvo_image* img);
UWVO_API uwvo_status uwvo_image_get_pixel(const uwvo_image* img, int32_t x,
                                          int32_t y, double rgb[3]);
UWVO_API uwvo_status uwvo_image_set_pixel(uwvo_image* img, int32_t x,
                                          int32_t y, const double rgb[3]);

/* ---- scalar maps -------------------------------------------------------- */

UWVO_API void uwvo_map_destroy(uwvo_map* map);
UWVO_API int32_t uwvo_map_width(const uwvo_map* map);
UWVO_API int32_t uwvo_map_height(const uwvo_map* map);
UWVO_API uwvo_status uwvo_map_get(const uwvo_map* map, int32_t x, int32_t y,
                                  double* value);
UWVO_API uwvo_status uwvo_map_stats(const uwvo_map* map, double* min_value,
                                    double* max_value, double* mean_value);
/* Grayscale PFM, little-endian, scale -1.0. */
UWVO_API uwvo_status uwvo_map_load_pfm(const char* path, uwvo_map** out);
UWVO_API uwvo_status uwvo_map_save_pfm(const uwvo_map* map, const char* path);
/* 8-bit preview, [min, max] stretched to [0, 255]. */
UWVO_API uwvo_status uwvo_map_save_pgm(const uwvo_map* map, const char* path);

/* ---- underwater imaging ------------------------------------------------- */

/* Mean color of the haziest (top 0.1% dark-channel) pixels. */
UWVO_API uwvo_status uwvo_estimate_ambient(const uwvo_image* img,
                                           double ambient[3]);
/* Dark-channel-prior transmission estimate; patch odd and >= 3. */
UWVO_API uwvo_status uwvo_estimate_transmission(const uwvo_image* img,
                                                const double ambient[3],
                                                int32_t patch,
                                                uwvo_map** out);
/* Elementwise inverse; input values must lie in [1e-3, 1]. */
UWVO_API uwvo_status uwvo_transmission_invert(const uwvo_map* transmission,
                                              uwvo_map** out);
/* sigma = max(alpha * t) / beta_bias; weights = alpha * t + 1 - sigma. */
UWVO_API uwvo_status uwvo_normalize_transmission(const uwvo_map* inverse_map,
                                                 double alpha,
                                                 double beta_bias,
                                                 uwvo_map** weights,
                                                 double* sigma);
/* I = D * t + A * (1 - t), shared single-channel map. */
UWVO_API uwvo_status uwvo_apply_degradation(const uwvo_image* radiance,
                                            const uwvo_map* transmission,
                                            const double ambient[3],
                                            uwvo_image** out);
/* D = (I - A * (1 - t)) / t, clamped to [0, 1]. */
UWVO_API uwvo_status uwvo_restore_radiance(const uwvo_image* observed,
                                           const uwvo_map* transmission,
                                           const double ambient[3],
                                           uwvo_image** out);
/* Forward model from a metric depth map: t_c = exp(-beta_c * depth).
 * transmission_out (optional) receives the channel-mean map. */
UWVO_API uwvo_status uwvo_degrade_with_depth(const uwvo_image* radiance,
                                             const uwvo_map* depth,
                                             const double beta[3],
                                             const double ambient[3],
                                             uwvo_image** out,
                                             uwvo_map** transmission_out);

/* ---- optical flow -------------------------------------------------------- */

UWVO_API uwvo_status uwvo_estimate_flow(const uwvo_image* frame_a,
                                        const uwvo_image* frame_b,
                                        int32_t pyramid_levels,
                                        int32_t iterations_per_level,
                                        int32_t window, uwvo_flow** out);
UWVO_API void uwvo_flow_destroy(uwvo_flow* flow);
UWVO_API int32_t uwvo_flow_width(const uwvo_flow* flow);
UWVO_API int32_t uwvo_flow_height(const uwvo_flow* flow);
UWVO_API uwvo_status uwvo_flow_get(const uwvo_flow* flow, int32_t x, int32_t y,
                                   double* u, double* v);
/* Hadamard product with a strictly positive weight map. */
UWVO_API uwvo_status uwvo_weight_flow(const uwvo_flow* flow,
                                      const uwvo_map* weights,
                                      uwvo_flow** out);
UWVO_API uwvo_status uwvo_warp_image(const uwvo_image* frame,
                                     const uwvo_flow* flow, uwvo_image** out);
/* Mean endpoint error over pixels at least `border` away from the edge. */
UWVO_API uwvo_status uwvo_flow_epe(const uwvo_flow* estimate,
                                   const uwvo_flow* truth, int32_t border,
                                   double* epe);
/* Middlebury .flo, bit-exact. */
UWVO_API uwvo_status uwvo_flow_load(const char* path, uwvo_flow** out);
UWVO_API uwvo_status uwvo_flow_save(const uwvo_flow* flow, const char* path);
/* Color-wheel rendering; max_magnitude <= 0 auto-scales. */
UWVO_API uwvo_status uwvo_flow_colorize(const uwvo_flow* flow,
                                        double max_magnitude,
                                        uwvo_image** out);

/* ---- epipolar geometry --------------------------------------------------- */

/* Grid-samples flow into correspondences. weights may be NULL. mode selects
 * how weights are applied (UWVO_MODE_*). */
UWVO_API uwvo_status uwvo_flow_to_correspondences(const uwvo_flow* flow,
                                                  const uwvo_map* weights,
                                                  int32_t stride, int32_t mode,
                                                  uwvo_correspondences** out);
UWVO_API void uwvo_correspondences_destroy(uwvo_correspondences* cs);
UWVO_API size_t uwvo_correspondences_size(const uwvo_correspondences* cs);

/* Weighted normalized eight-point solve in a seeded RANSAC loop. essential is
 * row-major; inlier_mask (optional) must hold uwvo_correspondences_size
 * bytes. */
UWVO_API uwvo_status uwvo_estimate_essential(const uwvo_correspondences* cs,
                                             const double intrinsics[4],
                                             int32_t iterations,
                                             double threshold, uint64_t seed,
                                             double essential[9],
                                             uint8_t* inlier_mask,
                                             size_t* inlier_count);
/* Cheirality-resolved motion from an essential matrix. inlier_mask may be
 * NULL to use every correspondence. */
UWVO_API uwvo_status uwvo_decompose_essential(const double essential[9],
                                              const uwvo_correspondences* cs,
                                              const uint8_t* inlier_mask,
                                              const double intrinsics[4],
                                              uwvo_motion* motion);

/* Full single-pair pipeline with the config's backend mode. */
UWVO_API uwvo_status uwvo_recover_motion(const uwvo_run_config* config,
                                         const uwvo_image* frame_a,
                                         const uwvo_image* frame_b,
                                         uint64_t ransac_seed,
                                         uwvo_motion* motion,
                                         uwvo_pair_stats* stats);

/* ---- sequence runs ------------------------------------------------------- */

UWVO_API uwvo_run_config uwvo_run_config_default(void);
/* Reads a TOML config; missing keys keep their defaults. */
UWVO_API uwvo_status uwvo_run_config_load(const char* path,
                                          uwvo_run_config* config);
/* Runs VO over an ordered frame list. stats (optional) must hold count-1
 * entries. Degenerate pairs yield identity motions. */
UWVO_API uwvo_status uwvo_run_sequence(const uwvo_run_config* config,
                                       const char* const* frame_paths,
                                       size_t count,
                                       uwvo_trajectory** trajectory,
                                       uwvo_pair_stats* stats);

/* ---- trajectories -------------------------------------------------------- */

UWVO_API uwvo_status uwvo_trajectory_create(uwvo_trajectory** out);
UWVO_API void uwvo_trajectory_destroy(uwvo_trajectory* traj);
UWVO_API uwvo_status uwvo_trajectory_append(uwvo_trajectory* traj,
                                            double timestamp,
                                            const double position[3],
                                            const double quaternion[4]);
UWVO_API size_t uwvo_trajectory_size(const uwvo_trajectory* traj);
UWVO_API uwvo_status uwvo_trajectory_pose(const uwvo_trajectory* traj,
                                          size_t index, double* timestamp,
                                          double position[3],
                                          double quaternion[4]);
/* TUM format: "timestamp tx ty tz qx qy qz qw", '#' comments. */
UWVO_API uwvo_status uwvo_trajectory_load_tum(const char* path,
                                              uwvo_trajectory** out);
UWVO_API uwvo_status uwvo_trajectory_save_tum(const uwvo_trajectory* traj,
                                              const char* path);
UWVO_API uwvo_status uwvo_trajectory_length(const uwvo_trajectory* traj,
                                            double* length);
/* Least-squares similarity aligning estimate onto reference. */
UWVO_API uwvo_status uwvo_umeyama_align(const uwvo_trajectory* estimate,
                                        const uwvo_trajectory* reference,
                                        int32_t with_scale, double* scale,
                                        double rotation[9],
                                        double translation[3]);
UWVO_API uwvo_status uwvo_trajectory_transform(const uwvo_trajectory* traj,
                                               double scale,
                                               const double rotation[9],
                                               const double translation[3],
                                               uwvo_trajectory** out);
UWVO_API uwvo_status uwvo_ate(const uwvo_trajectory* estimate,
                              const uwvo_trajectory* reference, int32_t align,
                              double* ate_rmse);
UWVO_API uwvo_status uwvo_rte(const uwvo_trajectory* estimate,
                              const uwvo_trajectory* reference,
                              int32_t delta_frames, double* rte_rmse);
/* Number of poses matched by nearest-timestamp association (0.02 s). */
UWVO_API uwvo_status uwvo_associated_count(const uwvo_trajectory* estimate,
                                           const uwvo_trajectory* reference,
                                           size_t* matched);
/* Length, pose count, ATE and RTE in one call. */
UWVO_API uwvo_status uwvo_evaluate(const uwvo_trajectory* estimate,
                                   const uwvo_trajectory* reference,
                                   int32_t delta_frames, int32_t align,
                                   uwvo_metrics* metrics);

/* ---- synthetic data ------------------------------------------------------ */

UWVO_API int32_t uwvo_synth_preset_count(void);
UWVO_API const char* uwvo_synth_preset_name(int32_t index);
/* Fills params with a preset's values; name must be a preset name. */
UWVO_API uwvo_status uwvo_synth_preset(const char* name,
                                       uwvo_synth_params* params);
/* Writes frames/, depth/, transmission/, flow/, groundtruth.tum and
 * manifest.toml under dir. */
UWVO_API uwvo_status uwvo_synth_emit(const uwvo_synth_params* params,
                                     const char* dir);
/* Reads back a dataset manifest written by uwvo_synth_emit. The name field
 * of params points at thread-local storage. */
UWVO_API uwvo_status uwvo_read_manifest(const char* path,
                                        uwvo_synth_params* params);

#ifdef __cplusplus
}
#endif

#endif /* UWVO_H */
