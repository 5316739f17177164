#pragma once

#include <array>

#include "grid.hpp"

namespace uwvo {

// Lower clamp for transmission values. Keeps the elementwise inverse bounded
// by 1/kTransmissionEpsilon.
constexpr double kTransmissionEpsilon = 1e-3;

// Haze retention factor of the dark-channel transmission estimate.
constexpr double kDarkChannelOmega = 0.95;

// Constant background light scattered into the camera by the medium.
struct AmbientLight {
  std::array<double, 3> rgb{0.0, 0.0, 0.0};

  AmbientLight() = default;
  AmbientLight(double r, double g, double b);
  double operator[](int c) const { return rgb[c]; }
};

// Per-pixel fraction of scene radiance reaching the camera, in
// [kTransmissionEpsilon, 1].
class TransmissionMap {
 public:
  // Rejects values outside [kTransmissionEpsilon, 1].
  static TransmissionMap from_grid(ScalarGrid grid);
  // Clamps values into the valid range instead of rejecting.
  static TransmissionMap clamped(ScalarGrid grid);

  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  double at(int x, int y) const { return grid_.at(x, y); }
  const ScalarGrid& grid() const { return grid_; }

 private:
  explicit TransmissionMap(ScalarGrid grid) : grid_(std::move(grid)) {}
  ScalarGrid grid_;
};

// Elementwise inverse of a TransmissionMap; values in [1, 1/epsilon].
class InverseTransmissionMap {
 public:
  static InverseTransmissionMap from_grid(ScalarGrid grid);

  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  double at(int x, int y) const { return grid_.at(x, y); }
  const ScalarGrid& grid() const { return grid_; }

 private:
  explicit InverseTransmissionMap(ScalarGrid grid) : grid_(std::move(grid)) {}
  ScalarGrid grid_;
  friend InverseTransmissionMap invert(const TransmissionMap& t);
};

// alpha spreads the weight range, beta_bias shifts it towards suppressing or
// emphasizing motion. alpha / beta_bias < 1 is required so that the offset
// sigma stays below 1 and every weight stays strictly positive.
struct NormalizationParams {
  double alpha = 0.25;
  double beta_bias = 4.0;

  NormalizationParams() = default;
  NormalizationParams(double alpha_, double beta_bias_);
  void validate() const;
};

// Normalized transmission weights, range [1 - sigma, alpha * max(t) + 1 - sigma],
// strictly positive.
class WeightMap {
 public:
  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  double at(int x, int y) const { return grid_.at(x, y); }
  const ScalarGrid& grid() const { return grid_; }

  double sigma() const { return sigma_; }
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }

  // Uniform weight map (value must be > 0); handy for the alpha = 0 case.
  static WeightMap uniform(int width, int height, double value);

  // Adopts an externally produced map; all values must be strictly positive.
  // sigma is reported as 1 - min since the normalization inputs are unknown.
  static WeightMap from_grid(ScalarGrid grid);

 private:
  WeightMap(ScalarGrid grid, double sigma, double lower, double upper)
      : grid_(std::move(grid)), sigma_(sigma), lower_(lower), upper_(upper) {}
  ScalarGrid grid_;
  double sigma_, lower_, upper_;
  friend WeightMap normalize_transmission(const InverseTransmissionMap&,
                                          const NormalizationParams&);
};

// Per-channel attenuation coefficients (1/m) plus ambient light.
struct HazeParams {
  std::array<double, 3> attenuation{0.05, 0.05, 0.05};
  AmbientLight ambient;

  HazeParams() = default;
  HazeParams(std::array<double, 3> attenuation_, AmbientLight ambient_);
};

// I(x,c) = D(x,c) * t(x) + A_c * (1 - t(x)), one shared transmission map.
Image apply_degradation(const Image& radiance, const TransmissionMap& t,
                        const AmbientLight& ambient);

// Same forward model with an independent transmission map per channel.
Image apply_degradation(const Image& radiance,
                        const std::array<TransmissionMap, 3>& t,
                        const AmbientLight& ambient);

// D(x,c) = (I(x,c) - A_c * (1 - t(x))) / t(x), clamped to [0, 1].
Image restore_radiance(const Image& observed, const TransmissionMap& t,
                       const AmbientLight& ambient);

// Mean color of the pixels whose dark-channel value is in the top 0.1%.
AmbientLight estimate_ambient(const Image& observed);

// Dark-channel-prior estimate:
//   t(x) = clamp(1 - omega * min over patch and channels of I/A, eps, 1).
// patch must be odd and >= 3; ambient channels must be positive.
TransmissionMap estimate_transmission(const Image& observed,
                                      const AmbientLight& ambient, int patch);

InverseTransmissionMap invert(const TransmissionMap& t);
TransmissionMap invert(const InverseTransmissionMap& t_inv);

// sigma = max(alpha * (1/T_inv)) / beta_bias
// T_norm(x) = alpha * (1/T_inv(x)) + 1 - sigma
WeightMap normalize_transmission(const InverseTransmissionMap& t_inv,
                                 const NormalizationParams& params);

}  // namespace uwvo
